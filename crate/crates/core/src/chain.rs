//! Serial-chain model with virtual springs and passive joints: forward
//! kinematics, analytic Jacobians, the base stiffness of the chain without
//! passive joints, and two independent oracles (KKT block inversion and
//! constrained energy minimization) for the Cartesian stiffness.

use nalgebra::{DMatrix, DVector, Matrix6, Vector3, Vector6};

use crate::error::StiffnessError;
use crate::spatial::{rotation_about, StiffnessMatrix6, Transform};

/// Relative singular-value threshold for rank decisions on Jacobians.
const RANK_TOL: f64 = 1e-10;

/// Relative pivot threshold for the dense saddle-point factorization.
const PIVOT_TOL: f64 = 1e-12;

/// One axis of a virtual spring, expressed in the frame local to the spring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpringAxis {
    Tx,
    Ty,
    Tz,
    Rx,
    Ry,
    Rz,
}

impl SpringAxis {
    pub const ALL: [SpringAxis; 6] = [
        SpringAxis::Tx,
        SpringAxis::Ty,
        SpringAxis::Tz,
        SpringAxis::Rx,
        SpringAxis::Ry,
        SpringAxis::Rz,
    ];

    pub fn is_rotational(self) -> bool {
        matches!(self, SpringAxis::Rx | SpringAxis::Ry | SpringAxis::Rz)
    }

    /// Local direction of the axis.
    pub fn direction(self) -> Vector3<f64> {
        match self {
            SpringAxis::Tx | SpringAxis::Rx => Vector3::x(),
            SpringAxis::Ty | SpringAxis::Ry => Vector3::y(),
            SpringAxis::Tz | SpringAxis::Rz => Vector3::z(),
        }
    }
}

/// Virtual spring with `axes.len()` elastic coordinates and a matching
/// symmetric positive-definite stiffness block.
#[derive(Debug, Clone, PartialEq)]
pub struct SpringElement {
    pub axes: Vec<SpringAxis>,
    pub stiffness: DMatrix<f64>,
}

impl SpringElement {
    /// Full 6-dof spring with the given 6×6 stiffness block.
    pub fn full(stiffness: Matrix6<f64>) -> Self {
        Self {
            axes: SpringAxis::ALL.to_vec(),
            stiffness: DMatrix::from_fn(6, 6, |i, j| stiffness[(i, j)]),
        }
    }

    pub fn dof(&self) -> usize {
        self.axes.len()
    }
}

/// One element of a serial chain.
#[derive(Debug, Clone, PartialEq)]
pub enum ChainElement {
    RigidLink(Transform),
    VirtualSpring(SpringElement),
    PassiveRevolute { axis: Vector3<f64> },
    PassivePrismatic { axis: Vector3<f64> },
}

/// Ordered description of a serial chain: rigid links, virtual springs and
/// passive joints, attached to a base pose.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainModel {
    base: Transform,
    elements: Vec<ChainElement>,
    n_q: usize,
    n_theta: usize,
}

impl ChainModel {
    pub fn new(base: Transform, elements: Vec<ChainElement>) -> Result<Self, StiffnessError> {
        let mut n_q = 0;
        let mut n_theta = 0;
        for (index, element) in elements.iter().enumerate() {
            match element {
                ChainElement::RigidLink(_) => {}
                ChainElement::VirtualSpring(spring) => {
                    let d = spring.dof();
                    if spring.stiffness.nrows() != d || spring.stiffness.ncols() != d {
                        return Err(StiffnessError::InvalidSpringBlock { index });
                    }
                    let sym = (&spring.stiffness - spring.stiffness.transpose()).norm();
                    if sym > 1e-9 * spring.stiffness.norm().max(1.0)
                        || spring.stiffness.clone().cholesky().is_none()
                    {
                        return Err(StiffnessError::InvalidSpringBlock { index });
                    }
                    n_theta += d;
                }
                ChainElement::PassiveRevolute { axis } | ChainElement::PassivePrismatic { axis } => {
                    let norm = axis.norm();
                    if (norm - 1.0).abs() > 1e-9 {
                        return Err(StiffnessError::NonUnitAxis { index, norm });
                    }
                    n_q += 1;
                }
            }
        }
        Ok(Self {
            base,
            elements,
            n_q,
            n_theta,
        })
    }

    pub fn base(&self) -> &Transform {
        &self.base
    }

    pub fn elements(&self) -> &[ChainElement] {
        &self.elements
    }

    /// Number of passive coordinates.
    pub fn n_q(&self) -> usize {
        self.n_q
    }

    /// Total number of virtual-spring coordinates.
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// Block-diagonal aggregate of the spring stiffness blocks, `n_θ × n_θ`.
    pub fn aggregate_spring_stiffness(&self) -> DMatrix<f64> {
        let mut k = DMatrix::zeros(self.n_theta, self.n_theta);
        let mut offset = 0;
        for element in &self.elements {
            if let ChainElement::VirtualSpring(spring) = element {
                let d = spring.dof();
                k.view_mut((offset, offset), (d, d)).copy_from(&spring.stiffness);
                offset += d;
            }
        }
        k
    }
}

/// Joint and spring coordinates for one chain configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub q: Vec<f64>,
    pub theta: Vec<f64>,
}

impl ChainConfig {
    pub fn zero(model: &ChainModel) -> Self {
        Self {
            q: vec![0.0; model.n_q()],
            theta: vec![0.0; model.n_theta()],
        }
    }

    fn check(&self, model: &ChainModel) -> Result<(), StiffnessError> {
        if self.q.len() != model.n_q() {
            return Err(StiffnessError::SizeMismatch {
                what: "passive",
                expected: model.n_q(),
                got: self.q.len(),
            });
        }
        if self.theta.len() != model.n_theta() {
            return Err(StiffnessError::SizeMismatch {
                what: "spring",
                expected: model.n_theta(),
                got: self.theta.len(),
            });
        }
        Ok(())
    }
}

/// Jacobians of the end pose with respect to spring and passive coordinates,
/// evaluated at a stated configuration, columns in the global frame.
#[derive(Debug, Clone)]
pub struct JacobianSet {
    /// 6×n_θ.
    pub j_theta: DMatrix<f64>,
    /// 6×n_q.
    pub j_q: DMatrix<f64>,
}

fn elementary_transform(rotational: bool, axis: &Vector3<f64>, value: f64) -> Transform {
    if rotational {
        Transform::from_rotation(rotation_about(axis, value))
    } else {
        Transform::from_translation(axis * value)
    }
}

enum JointRecord {
    Spring { rotational: bool, e: Vector3<f64>, p: Vector3<f64> },
    Passive { rotational: bool, e: Vector3<f64>, p: Vector3<f64> },
}

/// Walks the chain once, applying elementary joint transforms and optionally
/// recording global joint axes and positions.
fn walk(
    model: &ChainModel,
    cfg: &ChainConfig,
    mut record: Option<&mut Vec<JointRecord>>,
) -> Transform {
    let mut pose = model.base;
    let mut iq = 0;
    let mut itheta = 0;
    for element in &model.elements {
        match element {
            ChainElement::RigidLink(link) => pose = pose.compose(link),
            ChainElement::PassiveRevolute { axis } | ChainElement::PassivePrismatic { axis } => {
                let rotational = matches!(element, ChainElement::PassiveRevolute { .. });
                if let Some(rec) = record.as_deref_mut() {
                    rec.push(JointRecord::Passive {
                        rotational,
                        e: pose.rotation * axis,
                        p: pose.translation,
                    });
                }
                pose = pose.compose(&elementary_transform(rotational, axis, cfg.q[iq]));
                iq += 1;
            }
            ChainElement::VirtualSpring(spring) => {
                for axis in &spring.axes {
                    let rotational = axis.is_rotational();
                    let dir = axis.direction();
                    if let Some(rec) = record.as_deref_mut() {
                        rec.push(JointRecord::Spring {
                            rotational,
                            e: pose.rotation * dir,
                            p: pose.translation,
                        });
                    }
                    pose = pose.compose(&elementary_transform(rotational, &dir, cfg.theta[itheta]));
                    itheta += 1;
                }
            }
        }
    }
    pose
}

/// End-frame pose of the chain at the given configuration.
pub fn forward_kinematics(
    model: &ChainModel,
    cfg: &ChainConfig,
) -> Result<Transform, StiffnessError> {
    cfg.check(model)?;
    Ok(walk(model, cfg, None))
}

/// Analytic Jacobians at the given configuration.
///
/// Translational columns are `[e; 0]`; rotational columns are `[e×r; e]` with
/// `r` the vector from the joint center to the end reference point.
pub fn jacobians(model: &ChainModel, cfg: &ChainConfig) -> Result<JacobianSet, StiffnessError> {
    cfg.check(model)?;
    let mut records = Vec::with_capacity(model.n_q() + model.n_theta());
    let end = walk(model, cfg, Some(&mut records));

    let column = |rotational: bool, e: &Vector3<f64>, p: &Vector3<f64>| -> Vector6<f64> {
        let mut col = Vector6::zeros();
        if rotational {
            let r = end.translation - p;
            col.fixed_rows_mut::<3>(0).copy_from(&e.cross(&r));
            col.fixed_rows_mut::<3>(3).copy_from(e);
        } else {
            col.fixed_rows_mut::<3>(0).copy_from(e);
        }
        col
    };

    let mut j_theta = DMatrix::zeros(6, model.n_theta());
    let mut j_q = DMatrix::zeros(6, model.n_q());
    let mut iq = 0;
    let mut itheta = 0;
    for record in &records {
        match record {
            JointRecord::Spring { rotational, e, p } => {
                j_theta.set_column(itheta, &column(*rotational, e, p));
                itheta += 1;
            }
            JointRecord::Passive { rotational, e, p } => {
                j_q.set_column(iq, &column(*rotational, e, p));
                iq += 1;
            }
        }
    }
    Ok(JacobianSet { j_theta, j_q })
}

/// Numerical rank via singular values with a relative threshold.
pub fn matrix_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > rel_tol * smax)
        .count()
}

fn cartesian_compliance(
    j_theta: &DMatrix<f64>,
    k_theta: &DMatrix<f64>,
) -> Result<Matrix6<f64>, StiffnessError> {
    let rank = matrix_rank(j_theta, RANK_TOL);
    if rank < 6 {
        return Err(StiffnessError::SingularChain { rank });
    }
    let chol = k_theta
        .clone()
        .cholesky()
        .ok_or(StiffnessError::InvalidSpringBlock { index: 0 })?;
    let c = j_theta * chol.solve(&j_theta.transpose());
    Ok(Matrix6::from_fn(|i, j| c[(i, j)]))
}

/// Stiffness of the chain without passive joints: `(J_θ K_θ⁻¹ J_θᵀ)⁻¹`.
///
/// Requires `rank(J_θ) = 6`; the result is symmetric positive-definite.
pub fn base_stiffness(
    j_theta: &DMatrix<f64>,
    k_theta: &DMatrix<f64>,
) -> Result<StiffnessMatrix6, StiffnessError> {
    let c = cartesian_compliance(j_theta, k_theta)?;
    let k = c
        .try_inverse()
        .ok_or(StiffnessError::SingularChain { rank: 0 })?;
    Ok(StiffnessMatrix6::from_matrix(k))
}

/// Dense inversion with partial pivoting and a relative pivot threshold.
fn invert_checked(m: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>, StiffnessError> {
    let n = m.nrows();
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let mut a = m.clone();
    let mut inv = DMatrix::<f64>::identity(n, n);
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = a[(col, col)].abs();
        for row in col + 1..n {
            if a[(row, col)].abs() > pivot_val {
                pivot_val = a[(row, col)].abs();
                pivot_row = row;
            }
        }
        if pivot_val <= rel_tol * scale {
            return Err(StiffnessError::SingularSaddlePoint {
                pivot: pivot_val / scale,
                row: col,
            });
        }
        if pivot_row != col {
            a.swap_rows(pivot_row, col);
            inv.swap_rows(pivot_row, col);
        }
        let p = a[(col, col)];
        for j in 0..n {
            a[(col, j)] /= p;
            inv[(col, j)] /= p;
        }
        for row in 0..n {
            if row != col {
                let f = a[(row, col)];
                if f != 0.0 {
                    for j in 0..n {
                        a[(row, j)] -= f * a[(col, j)];
                        inv[(row, j)] -= f * inv[(col, j)];
                    }
                }
            }
        }
    }
    Ok(inv)
}

/// Cartesian stiffness by inversion of the `(6+n_q)×(6+n_q)` saddle-point
/// matrix `[[J_θ K_θ⁻¹ J_θᵀ, J_q], [J_qᵀ, 0]]`, extracting the upper-left
/// 6×6 block, plus the `n_q×6` block mapping end twist to passive motion.
pub fn kkt_stiffness(
    j_theta: &DMatrix<f64>,
    k_theta: &DMatrix<f64>,
    j_q: &DMatrix<f64>,
) -> Result<(StiffnessMatrix6, DMatrix<f64>), StiffnessError> {
    let n_q = j_q.ncols();
    if n_q == 0 {
        return Ok((base_stiffness(j_theta, k_theta)?, DMatrix::zeros(0, 6)));
    }
    let rank_q = matrix_rank(j_q, RANK_TOL);
    if rank_q < n_q {
        return Err(StiffnessError::RedundantPassiveJoints { rank: rank_q, n_q });
    }
    let c = cartesian_compliance(j_theta, k_theta)?;
    let n = 6 + n_q;
    let mut m = DMatrix::zeros(n, n);
    m.view_mut((0, 0), (6, 6))
        .copy_from(&DMatrix::from_fn(6, 6, |i, j| c[(i, j)]));
    m.view_mut((0, 6), (6, n_q)).copy_from(j_q);
    m.view_mut((6, 0), (n_q, 6)).copy_from(&j_q.transpose());
    let inv = invert_checked(&m, PIVOT_TOL)?;
    let k_c = Matrix6::from_fn(|i, j| inv[(i, j)]);
    let sensitivity = inv.view((6, 0), (n_q, 6)).into_owned();
    Ok((StiffnessMatrix6::from_matrix(k_c), sensitivity))
}

/// Conjugate gradient for an SPD operator given as a closure.
fn conjugate_gradient(
    apply: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    b: &DVector<f64>,
    rel_tol: f64,
    max_iter: usize,
) -> DVector<f64> {
    let mut x = DVector::zeros(b.len());
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rs = r.dot(&r);
    let b_norm = b.norm().max(f64::MIN_POSITIVE);
    for _ in 0..max_iter {
        if rs.sqrt() <= rel_tol * b_norm {
            break;
        }
        let ap = apply(&p);
        let alpha = rs / p.dot(&ap);
        x += alpha * &p;
        r -= alpha * &ap;
        let rs_new = r.dot(&r);
        p = &r + (rs_new / rs) * p;
        rs = rs_new;
    }
    x
}

/// Brute-force oracle: for each twist direction, numerically minimizes the
/// elastic energy over all spring and passive displacements subject to the
/// linearized end-pose constraint, and assembles the stiffness from second
/// differences of the minimal energy.
///
/// The constrained quadratic is solved by null-space substitution plus
/// conjugate gradients, independent of the Schur/KKT path it cross-checks.
pub fn energy_oracle_stiffness(
    j_theta: &DMatrix<f64>,
    k_theta: &DMatrix<f64>,
    j_q: &DMatrix<f64>,
) -> Result<StiffnessMatrix6, StiffnessError> {
    let n_theta = j_theta.ncols();
    let n_q = j_q.ncols();
    let rank_theta = matrix_rank(j_theta, RANK_TOL);
    if rank_theta < 6 {
        return Err(StiffnessError::SingularChain { rank: rank_theta });
    }
    if n_q > 0 {
        let rank_q = matrix_rank(j_q, RANK_TOL);
        if rank_q < n_q {
            return Err(StiffnessError::RedundantPassiveJoints { rank: rank_q, n_q });
        }
    }

    let n = n_theta + n_q;
    let mut a = DMatrix::zeros(6, n);
    a.view_mut((0, 0), (6, n_theta)).copy_from(j_theta);
    a.view_mut((0, n_theta), (6, n_q)).copy_from(j_q);

    // Right pseudo-inverse Aᵀ(AAᵀ)⁻¹ for a particular solution of A·x = δt.
    let aat = &a * a.transpose();
    let aat_inv = aat
        .try_inverse()
        .ok_or(StiffnessError::SingularChain { rank: rank_theta })?;
    let a_pinv = a.transpose() * aat_inv;

    // Null-space basis of A from the small eigenvectors of AᵀA.
    let gram = a.transpose() * &a;
    let eig = gram.symmetric_eigen();
    let lambda_max = eig.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let mut null_basis = DMatrix::zeros(n, n - 6);
    let mut col = 0;
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() <= 1e-16 * lambda_max.max(1.0) + RANK_TOL * lambda_max {
            null_basis.set_column(col, &eig.eigenvectors.column(i).into_owned());
            col += 1;
        }
    }
    debug_assert_eq!(col, n - 6);

    let apply_h = |x: &DVector<f64>| -> DVector<f64> {
        let theta = x.rows(0, n_theta).into_owned();
        let mut out = DVector::zeros(n);
        out.rows_mut(0, n_theta).copy_from(&(k_theta * theta));
        out
    };
    let apply_reduced = |z: &DVector<f64>| -> DVector<f64> {
        null_basis.transpose() * apply_h(&(&null_basis * z))
    };

    let min_energy = |dt: &Vector6<f64>| -> f64 {
        let rhs6 = DVector::from_column_slice(dt.as_slice());
        let x_p = &a_pinv * rhs6;
        let b = -(null_basis.transpose() * apply_h(&x_p));
        let z = conjugate_gradient(&apply_reduced, &b, 1e-13, 20 * n.max(1));
        let x = &x_p + &null_basis * z;
        0.5 * x.dot(&apply_h(&x))
    };

    let h = 1e-3;
    let mut k = Matrix6::zeros();
    for i in 0..6 {
        for j in i..6 {
            let mut ei = Vector6::zeros();
            let mut ej = Vector6::zeros();
            ei[i] = h;
            ej[j] = h;
            let val = (min_energy(&(ei + ej)) - min_energy(&(ei - ej))
                - min_energy(&(-ei + ej))
                + min_energy(&(-ei - ej)))
                / (4.0 * h * h);
            k[(i, j)] = val;
            k[(j, i)] = val;
        }
    }
    Ok(StiffnessMatrix6::from_matrix(k))
}
