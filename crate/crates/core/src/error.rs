use thiserror::Error;

/// Errors raised by model construction and stiffness computations.
#[derive(Debug, Error)]
pub enum StiffnessError {
    #[error("rotation matrix is not orthonormal (deviation {deviation:.3e})")]
    NonOrthonormalRotation { deviation: f64 },

    #[error("configuration size mismatch: expected {expected} {what} coordinates, got {got}")]
    SizeMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("singular chain: rank(J_theta) = {rank} < 6; at least 6 independent virtual springs are required")]
    SingularChain { rank: usize },

    #[error("redundant passive joints: rank(J_q) = {rank} < {n_q} columns")]
    RedundantPassiveJoints { rank: usize, n_q: usize },

    #[error("passive column {index} is redundant or already stiffness-free (mu = {mu:.3e}, threshold {threshold:.3e})")]
    RedundantColumn {
        index: usize,
        mu: f64,
        threshold: f64,
    },

    #[error("saddle-point system is singular (relative pivot {pivot:.3e} at row {row})")]
    SingularSaddlePoint { pivot: f64, row: usize },

    #[error("spring stiffness block {index} is not symmetric positive-definite")]
    InvalidSpringBlock { index: usize },

    #[error("joint axis {index} is not unit length (|axis| = {norm:.6})")]
    NonUnitAxis { index: usize, norm: f64 },

    #[error("leg is already expressed in the global frame")]
    AlreadyGlobal,

    #[error("manipulator has no legs")]
    EmptyManipulator,

    #[error("wrench is unresisted: component along free direction [{direction}] exceeds tolerance")]
    UnresistedWrench { direction: String },

    #[error("zero passive Jacobian column")]
    ZeroColumn,

    #[error("pivot entry K[{p},{p}] = {value:.3e} is below the redundancy threshold {threshold:.3e}")]
    PivotBelowThreshold { p: usize, value: f64, threshold: f64 },

    #[error("matrix entry (3,3) must be positive, got {0:.3e}")]
    NonPositivePivot2d(f64),
}
