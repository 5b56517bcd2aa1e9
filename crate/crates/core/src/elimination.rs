//! Passive-joint elimination: the one-shot Schur-complement formula, the
//! column-recursive rank-one procedure, closed-form rules for trivial
//! columns, and rank bookkeeping.

use nalgebra::{DMatrix, Matrix6, Vector6};

use crate::chain::matrix_rank;
use crate::error::StiffnessError;
use crate::spatial::StiffnessMatrix6;

/// Relative acceptance threshold for the scalar `μ = jqᵀ K jq`:
/// a column is accepted when `μ > EPS_REL * trace(K)/6`.
pub const EPS_REL: f64 = 1e-10;

/// Rank threshold used in elimination reports.
const RANK_TOL: f64 = 1e-10;

/// What [`eliminate_recursive`] does with a column whose `μ` falls below the
/// acceptance threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RedundancyPolicy {
    /// Raise [`StiffnessError::RedundantColumn`].
    #[default]
    Error,
    /// Skip the column and record its index in the report.
    Skip,
}

/// Classification of a passive Jacobian column, used only to pick the fast
/// computation path; every path produces identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnClass {
    /// Signed unit basis column `±e_p` (0-based index).
    Trivial(usize),
    /// One unit rotational entry plus lever entries in the translational part.
    QuasiTrivial,
    General,
}

/// Ordered set of passive Jacobian columns.
#[derive(Debug, Clone, PartialEq)]
pub struct PassiveJacobian {
    columns: Vec<Vector6<f64>>,
}

impl PassiveJacobian {
    pub fn empty() -> Self {
        Self {
            columns: Vec::new(),
        }
    }

    pub fn from_columns(columns: Vec<Vector6<f64>>) -> Self {
        Self { columns }
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let columns = (0..m.ncols())
            .map(|j| Vector6::from_fn(|i, _| m[(i, j)]))
            .collect();
        Self { columns }
    }

    pub fn columns(&self) -> &[Vector6<f64>] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(6, self.columns.len(), |i, j| self.columns[j][i])
    }
}

/// Per-step record of a recursive elimination run.
#[derive(Debug, Clone)]
pub struct EliminationReport {
    pub result: StiffnessMatrix6,
    pub rank_before: usize,
    pub rank_after: usize,
    /// Scalar `μ` of each accepted column, in elimination order.
    pub mu_values: Vec<f64>,
    /// Column indices skipped under [`RedundancyPolicy::Skip`].
    pub skipped: Vec<usize>,
}

fn mu_threshold(k: &StiffnessMatrix6) -> f64 {
    EPS_REL * k.matrix().trace() / 6.0
}

/// Classifies a column as trivial, quasi-trivial or general.
pub fn classify_column(jq: &Vector6<f64>) -> Result<ColumnClass, StiffnessError> {
    if jq.norm() == 0.0 {
        return Err(StiffnessError::ZeroColumn);
    }
    let nonzero: Vec<usize> = (0..6).filter(|&i| jq[i] != 0.0).collect();
    if nonzero.len() == 1 && (jq[nonzero[0]].abs() - 1.0).abs() < 1e-12 {
        return Ok(ColumnClass::Trivial(nonzero[0]));
    }
    // quasi-trivial: one unit rotational entry about axis k, zero elsewhere in
    // the rotational part, and no lever component along that same axis
    let rot_nonzero: Vec<usize> = (3..6).filter(|&i| jq[i] != 0.0).collect();
    if rot_nonzero.len() == 1 && (jq[rot_nonzero[0]].abs() - 1.0).abs() < 1e-12 {
        let axis = rot_nonzero[0] - 3;
        if jq[axis] == 0.0 {
            return Ok(ColumnClass::QuasiTrivial);
        }
    }
    Ok(ColumnClass::General)
}

/// Single-column rank-one update `K⁺ = K − (1/μ)·u·uᵀ` with `u = K·jq` and
/// `μ = jqᵀ·K·jq`. The eliminated direction is left stiffness-free and the
/// rank drops by exactly one.
pub fn eliminate_single(
    k: &StiffnessMatrix6,
    jq: &Vector6<f64>,
) -> Result<StiffnessMatrix6, StiffnessError> {
    eliminate_single_indexed(k, jq, 0)
}

fn eliminate_single_indexed(
    k: &StiffnessMatrix6,
    jq: &Vector6<f64>,
    index: usize,
) -> Result<StiffnessMatrix6, StiffnessError> {
    let u = k.matrix() * jq;
    let mu = jq.dot(&u);
    let threshold = mu_threshold(k);
    if mu <= threshold {
        return Err(StiffnessError::RedundantColumn {
            index,
            mu,
            threshold,
        });
    }
    Ok(StiffnessMatrix6::from_matrix(
        k.matrix() - u * u.transpose() / mu,
    ))
}

/// Closed-form rule for a trivial column `e_p` (0-based):
/// `K⁺ⱼₖ = Kⱼₖ − Kⱼₚ·Kₚₖ/Kₚₚ`, with row and column `p` exactly zero.
pub fn eliminate_trivial(
    k: &StiffnessMatrix6,
    p: usize,
) -> Result<StiffnessMatrix6, StiffnessError> {
    assert!(p < 6, "trivial index out of range");
    let kpp = k.matrix()[(p, p)];
    let threshold = mu_threshold(k);
    if kpp <= threshold {
        return Err(StiffnessError::PivotBelowThreshold {
            p,
            value: kpp,
            threshold,
        });
    }
    let m = k.matrix();
    let mut out = Matrix6::from_fn(|j, l| m[(j, l)] - m[(j, p)] * m[(p, l)] / kpp);
    for i in 0..6 {
        out[(p, i)] = 0.0;
        out[(i, p)] = 0.0;
    }
    Ok(StiffnessMatrix6::from_matrix(out))
}

/// One-shot Schur-complement elimination of all columns:
/// `K_c = K⁰ − K⁰·J_q·(J_qᵀ·K⁰·J_q)⁻¹·J_qᵀ·K⁰`.
pub fn eliminate_full(
    k0: &StiffnessMatrix6,
    jq: &PassiveJacobian,
) -> Result<StiffnessMatrix6, StiffnessError> {
    let n_q = jq.len();
    if n_q == 0 {
        return Ok(*k0);
    }
    let j = jq.to_matrix();
    let k = DMatrix::from_fn(6, 6, |i, l| k0.matrix()[(i, l)]);
    let middle = j.transpose() * &k * &j;
    if matrix_rank(&middle, 1e-12) < n_q {
        let rank = matrix_rank(&j, 1e-10);
        return Err(StiffnessError::RedundantPassiveJoints { rank, n_q });
    }
    let inv = middle
        .try_inverse()
        .ok_or(StiffnessError::RedundantPassiveJoints {
            rank: matrix_rank(&j, 1e-10),
            n_q,
        })?;
    let correction = &k * &j * inv * j.transpose() * &k;
    let out = Matrix6::from_fn(|i, l| k[(i, l)] - correction[(i, l)]);
    Ok(StiffnessMatrix6::from_matrix(out))
}

/// Column-by-column elimination, dispatching trivial columns to the
/// closed-form rule. The result is independent of the column order.
pub fn eliminate_recursive(
    k0: &StiffnessMatrix6,
    jq: &PassiveJacobian,
    order: Option<&[usize]>,
    policy: RedundancyPolicy,
) -> Result<EliminationReport, StiffnessError> {
    let default_order: Vec<usize> = (0..jq.len()).collect();
    let order = order.unwrap_or(&default_order);
    assert_eq!(order.len(), jq.len(), "order must be a permutation of the columns");

    let rank_before = k0.rank(RANK_TOL);
    let mut current = *k0;
    let mut mu_values = Vec::with_capacity(jq.len());
    let mut skipped = Vec::new();

    for &index in order {
        let col = &jq.columns()[index];
        let u = current.matrix() * col;
        let mu = col.dot(&u);
        let threshold = mu_threshold(&current);
        if mu <= threshold {
            match policy {
                RedundancyPolicy::Error => {
                    return Err(StiffnessError::RedundantColumn {
                        index,
                        mu,
                        threshold,
                    })
                }
                RedundancyPolicy::Skip => {
                    skipped.push(index);
                    continue;
                }
            }
        }
        current = match classify_column(col)? {
            ColumnClass::Trivial(p) => {
                // sign of a unit column cancels in the rank-one update
                eliminate_trivial(&current, p)?
            }
            _ => eliminate_single_indexed(&current, col, index)?,
        };
        mu_values.push(mu);
    }

    let rank_after = current.rank(RANK_TOL);
    Ok(EliminationReport {
        result: current,
        rank_before,
        rank_after,
        mu_values,
        skipped,
    })
}
