//! Shared helpers for unit tests: seeded random rotations, SPD matrices and
//! passive-joint column generators.

use nalgebra::{DMatrix, Matrix3, Matrix6, Vector3, Vector6};
use rand::Rng;

use crate::spatial::{rotation_about, StiffnessMatrix6};

pub fn random_unit(rng: &mut impl Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        if v.norm() > 1e-3 {
            return v.normalize();
        }
    }
}

pub fn random_rotation(rng: &mut impl Rng) -> Matrix3<f64> {
    rotation_about(&random_unit(rng), rng.gen_range(-3.0..3.0))
}

pub fn random_spd6(rng: &mut impl Rng) -> StiffnessMatrix6 {
    let a = Matrix6::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    StiffnessMatrix6::from_matrix(a * a.transpose() + Matrix6::identity() * 0.1)
}

/// Random passive column of either template: translational `[e; 0]` or
/// rotational `[e×r; e]`.
pub fn random_passive_column(rng: &mut impl Rng) -> Vector6<f64> {
    let e = random_unit(rng);
    let mut col = Vector6::zeros();
    if rng.gen_bool(0.5) {
        col.fixed_rows_mut::<3>(0).copy_from(&e);
    } else {
        let r = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        col.fixed_rows_mut::<3>(0).copy_from(&e.cross(&r));
        col.fixed_rows_mut::<3>(3).copy_from(&e);
    }
    col
}

/// `n` passive columns with full column rank (regenerated until independent).
pub fn random_independent_columns(rng: &mut impl Rng, n: usize) -> Vec<Vector6<f64>> {
    loop {
        let cols: Vec<Vector6<f64>> = (0..n).map(|_| random_passive_column(rng)).collect();
        let m = DMatrix::from_fn(6, n, |i, j| cols[j][i]);
        let svd = m.svd(false, false);
        let smax = svd.singular_values.max();
        let rank = svd.singular_values.iter().filter(|&&s| s > 1e-8 * smax).count();
        if rank == n {
            return cols;
        }
    }
}
