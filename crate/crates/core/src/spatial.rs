//! Small-matrix spatial algebra: rotations, skew matrices, homogeneous
//! transforms, and the 6×6 maps used to re-express stiffness matrices across
//! frames and reference points.

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

use crate::error::StiffnessError;

/// Sign of the `(v×)` coupling block in [`shift_stiffness`].
///
/// Transporting a wrench from the point where the stiffness is expressed to a
/// reference point displaced by `v` (with `v` pointing from the old point to
/// the new one) yields `-(v×)` in the lower-left block of the congruence
/// factor. Fixed once, module-wide, and pinned by the rigid-extension KKT
/// oracle in the chain tests.
pub const LEVER_SIGN: f64 = -1.0;

/// Orthonormality tolerance used when accepting rotation matrices.
pub const ROTATION_TOL: f64 = 1e-9;

/// Skew-symmetric matrix `(v×)` such that `skew(v) * w == v.cross(w)`.
pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

fn orthonormality_deviation(r: &Matrix3<f64>) -> f64 {
    let gram = (r * r.transpose() - Matrix3::identity()).norm();
    let det = (r.determinant() - 1.0).abs();
    gram.max(det)
}

/// Checks that `r` is a proper rotation within [`ROTATION_TOL`].
pub fn check_rotation(r: &Matrix3<f64>) -> Result<(), StiffnessError> {
    let deviation = orthonormality_deviation(r);
    if deviation > ROTATION_TOL {
        return Err(StiffnessError::NonOrthonormalRotation { deviation });
    }
    Ok(())
}

/// Rigid placement: a proper rotation plus a translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Transform {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Builds a transform, rejecting a non-orthonormal rotation part.
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self, StiffnessError> {
        check_rotation(&rotation)?;
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation,
        }
    }

    pub fn from_rotation(rotation: Matrix3<f64>) -> Self {
        Self {
            rotation,
            translation: Vector3::zeros(),
        }
    }

    /// Homogeneous composition `self * other`.
    pub fn compose(&self, other: &Transform) -> Transform {
        Transform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }
}

/// Rotation by `angle` about a unit axis (Rodrigues form).
pub fn rotation_about(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let k = skew(axis);
    Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

/// External loading: force plus torque at a reference point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wrench {
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

impl Wrench {
    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Self {
            force: Vector3::new(v[0], v[1], v[2]),
            torque: Vector3::new(v[3], v[4], v[5]),
        }
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(
            self.force.x,
            self.force.y,
            self.force.z,
            self.torque.x,
            self.torque.y,
            self.torque.z,
        )
    }
}

/// Small translational plus rotational deflection of the end frame.
///
/// Valid only within the small-deflection linearization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    pub translation: Vector3<f64>,
    pub rotation: Vector3<f64>,
}

impl Twist {
    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Self {
            translation: Vector3::new(v[0], v[1], v[2]),
            rotation: Vector3::new(v[3], v[4], v[5]),
        }
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(
            self.translation.x,
            self.translation.y,
            self.translation.z,
            self.rotation.x,
            self.rotation.y,
            self.rotation.z,
        )
    }
}

/// 6×6 symmetric positive-semidefinite map from twist deflection to wrench.
///
/// Stored explicitly symmetrized; every transform re-symmetrizes the result
/// as `(K + Kᵀ)/2` to suppress round-off drift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessMatrix6 {
    m: Matrix6<f64>,
}

impl StiffnessMatrix6 {
    /// Wraps a matrix, symmetrizing it.
    pub fn from_matrix(m: Matrix6<f64>) -> Self {
        Self {
            m: (m + m.transpose()) * 0.5,
        }
    }

    pub fn zeros() -> Self {
        Self {
            m: Matrix6::zeros(),
        }
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix6<f64> {
        self.m
    }

    /// Eigenvalues of the (symmetric) matrix, sorted descending.
    pub fn eigenvalues(&self) -> Vector6<f64> {
        let mut ev: Vec<f64> = self.m.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Vector6::from_iterator(ev)
    }

    /// Numerical rank under a relative eigenvalue threshold `tol * |λ|_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let ev = self.eigenvalues();
        let max = ev.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        if max == 0.0 {
            return 0;
        }
        ev.iter().filter(|&&x| x.abs() > tol * max).count()
    }

    /// Orthonormal basis of the numerical null space (columns).
    pub fn null_space(&self, tol: f64) -> Vec<Vector6<f64>> {
        let eig = self.m.symmetric_eigen();
        let max = eig.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        let mut out = Vec::new();
        for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
            if max == 0.0 || lambda.abs() <= tol * max {
                out.push(Vector6::from_column_slice(eig.eigenvectors.column(i).as_slice()));
            }
        }
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[5]
    }

    /// Checks PSD up to `-tol * |λ|_max` round-off slack.
    pub fn is_psd(&self, tol: f64) -> bool {
        let ev = self.eigenvalues();
        let max = ev.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        ev[5] >= -tol * max
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }
}

/// Re-expresses `K` in a frame rotated by `R`: `blockdiag(R,R) K blockdiag(Rᵀ,Rᵀ)`.
///
/// Symmetry and the eigenvalue spectrum are preserved.
pub fn rotate_stiffness(
    k: &StiffnessMatrix6,
    r: &Matrix3<f64>,
) -> Result<StiffnessMatrix6, StiffnessError> {
    check_rotation(r)?;
    let mut b = Matrix6::zeros();
    b.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
    b.fixed_view_mut::<3, 3>(3, 3).copy_from(r);
    Ok(StiffnessMatrix6::from_matrix(b * k.m * b.transpose()))
}

/// Congruence factor of [`shift_stiffness`]: `[[I, 0], [Σ·(v×), I]]`.
pub fn shift_factor(v: &Vector3<f64>) -> Matrix6<f64> {
    let mut s = Matrix6::identity();
    s.fixed_view_mut::<3, 3>(3, 0).copy_from(&(skew(v) * LEVER_SIGN));
    s
}

/// Transports `K` to a reference point displaced by `v` (from the point where
/// `K` is expressed to the new one, both frames axis-aligned): `S K Sᵀ` with
/// `S = [[I, 0], [Σ·(v×), I]]`. Rank-preserving.
pub fn shift_stiffness(k: &StiffnessMatrix6, v: &Vector3<f64>) -> StiffnessMatrix6 {
    let s = shift_factor(v);
    StiffnessMatrix6::from_matrix(s * k.m * s.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_rotation, random_spd6};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn skew_of_zero_is_zero() {
        assert_eq!(skew(&Vector3::zeros()), Matrix3::zeros());
    }

    #[test]
    fn skew_ex_times_ey_is_ez() {
        let v = skew(&Vector3::x()) * Vector3::y();
        assert_eq!(v, Vector3::z());
    }

    #[test]
    fn skew_is_antisymmetric() {
        let s = skew(&Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(s + s.transpose(), Matrix3::zeros());
    }

    #[test]
    fn skew_matches_cross_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let v = Vector3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
            let w = Vector3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
            assert!((skew(&v) * w - v.cross(&w)).norm() < 1e-14);
        }
    }

    #[test]
    fn rotate_by_identity_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let k = random_spd6(&mut rng);
        let r = rotate_stiffness(&k, &Matrix3::identity()).unwrap();
        assert_relative_eq!(r.matrix(), k.matrix(), epsilon = 1e-14);
    }

    #[test]
    fn rotate_quarter_turn_permutes_axes() {
        let mut m = Matrix6::zeros();
        m[(0, 0)] = 7.0;
        let k = StiffnessMatrix6::from_matrix(m);
        let r = rotation_about(&Vector3::z(), std::f64::consts::FRAC_PI_2);
        let rotated = rotate_stiffness(&k, &r).unwrap();
        let mut expected = Matrix6::zeros();
        expected[(1, 1)] = 7.0;
        assert_relative_eq!(rotated.matrix(), &expected, epsilon = 1e-12);
    }

    #[test]
    fn rotate_rejects_non_orthonormal() {
        let k = StiffnessMatrix6::from_matrix(Matrix6::identity());
        let bad = Matrix3::identity() * 1.5;
        assert!(matches!(
            rotate_stiffness(&k, &bad),
            Err(StiffnessError::NonOrthonormalRotation { .. })
        ));
    }

    #[test]
    fn rotation_preserves_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let k = random_spd6(&mut rng);
            let r = random_rotation(&mut rng);
            let rotated = rotate_stiffness(&k, &r).unwrap();
            let e1 = k.eigenvalues();
            let e2 = rotated.eigenvalues();
            assert_relative_eq!(e1, e2, epsilon = 1e-10 * e1[0].abs());
        }
    }

    #[test]
    fn shift_by_zero_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let k = random_spd6(&mut rng);
        let s = shift_stiffness(&k, &Vector3::zeros());
        assert_relative_eq!(s.matrix(), k.matrix(), epsilon = 1e-14);
    }

    #[test]
    fn shift_of_translational_block_builds_rotational_terms() {
        let length = 0.7;
        let stiff = 3.0;
        let mut m = Matrix6::zeros();
        m.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&(Matrix3::identity() * stiff));
        let k = StiffnessMatrix6::from_matrix(m);
        let shifted = shift_stiffness(&k, &Vector3::new(0.0, 0.0, length));
        // direct multiplication of the 6x6 product
        let s = shift_factor(&Vector3::new(0.0, 0.0, length));
        let expected = s * m * s.transpose();
        assert_relative_eq!(shifted.matrix(), &expected, epsilon = 1e-13);
        let rot = shifted.matrix().fixed_view::<3, 3>(3, 3).into_owned();
        let expected_rot = Matrix3::from_diagonal(&Vector3::new(
            stiff * length * length,
            stiff * length * length,
            0.0,
        ));
        assert_relative_eq!(&rot, &expected_rot, epsilon = 1e-13);
        assert_relative_eq!(
            &shifted.matrix().fixed_view::<3, 3>(0, 0).into_owned(),
            &(Matrix3::identity() * stiff),
            epsilon = 1e-13
        );
    }

    #[test]
    fn shift_of_rank_one_leg_is_rank_one_outer_product() {
        let u = Vector3::new(0.3, -0.5, 0.81).normalize();
        let v = Vector3::new(0.1, 0.2, -0.4);
        let k11 = 2.5e4;
        let mut m = Matrix6::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&(u * u.transpose() * k11));
        let shifted = shift_stiffness(&StiffnessMatrix6::from_matrix(m), &v);
        let mut w = Vector6::zeros();
        w.fixed_rows_mut::<3>(0).copy_from(&u);
        w.fixed_rows_mut::<3>(3).copy_from(&(v.cross(&u) * LEVER_SIGN));
        let expected = w * w.transpose() * k11;
        assert_relative_eq!(shifted.matrix(), &expected, epsilon = 1e-9);
        assert_eq!(shifted.rank(1e-10), 1);
    }

    #[test]
    fn shift_round_trip_and_rank_preservation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let k = random_spd6(&mut rng);
            let v = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let there = shift_stiffness(&k, &v);
            let back = shift_stiffness(&there, &-v);
            let rel = (back.matrix() - k.matrix()).norm() / k.matrix().norm();
            assert!(rel < 1e-12, "round trip rel err {rel}");
            assert_eq!(there.rank(1e-10), k.rank(1e-10));
        }
    }

    #[test]
    fn compose_identity_laws() {
        let t = Transform::new(
            rotation_about(&Vector3::y(), 0.4),
            Vector3::new(1.0, -2.0, 0.5),
        )
        .unwrap();
        let id = Transform::identity();
        assert_eq!(id.compose(&t), t);
        assert_eq!(t.compose(&id), t);
    }

    #[test]
    fn compose_pure_translations_adds() {
        let a = Transform::from_translation(Vector3::new(1.0, 0.0, 0.0));
        let b = Transform::from_translation(Vector3::new(0.0, 2.0, 0.0));
        assert_eq!(a.compose(&b).translation, Vector3::new(1.0, 2.0, 0.0));
    }
}
