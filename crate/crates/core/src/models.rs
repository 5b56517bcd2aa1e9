//! Reference manipulators and closed-form comparators: the planar
//! single-link example, the cantilever-beam leg, the Stewart-Gough leg with
//! its five passive rotations, leg-placement geometry for the two case
//! studies, and their closed-form stiffness matrices.

use nalgebra::{Matrix3, Matrix6, Vector2, Vector3, Vector6};

use crate::assembly::{aggregate, leg_to_global, FrameTag, LegAssembly, ManipulatorModel};
use crate::elimination::{eliminate_recursive, PassiveJacobian, RedundancyPolicy};
use crate::error::StiffnessError;
use crate::spatial::StiffnessMatrix6;

/// Euler-Bernoulli cantilever beam, local x along the beam axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParams {
    /// Young's modulus.
    pub e: f64,
    /// Shear modulus.
    pub g: f64,
    /// Cross-section area.
    pub a: f64,
    /// Second moment about local y.
    pub i_y: f64,
    /// Second moment about local z.
    pub i_z: f64,
    /// Torsion constant.
    pub j_t: f64,
    /// Beam length.
    pub l: f64,
}

/// 6×6 tip stiffness of a cantilever beam clamped at the far end, local x
/// along the beam: axial EA/L, torsion GJ/L, and the 12EI/L³ – 6EI/L² –
/// 4EI/L bending pattern.
pub fn beam_stiffness(p: &BeamParams) -> StiffnessMatrix6 {
    let BeamParams {
        e,
        g,
        a,
        i_y,
        i_z,
        j_t,
        l,
    } = *p;
    let mut k = Matrix6::zeros();
    k[(0, 0)] = e * a / l;
    k[(3, 3)] = g * j_t / l;
    // bending in the x-y plane couples uy with rz
    k[(1, 1)] = 12.0 * e * i_z / l.powi(3);
    k[(5, 5)] = 4.0 * e * i_z / l;
    k[(1, 5)] = -6.0 * e * i_z / l.powi(2);
    k[(5, 1)] = k[(1, 5)];
    // bending in the x-z plane couples uz with ry
    k[(2, 2)] = 12.0 * e * i_y / l.powi(3);
    k[(4, 4)] = 4.0 * e * i_y / l;
    k[(2, 4)] = 6.0 * e * i_y / l.powi(2);
    k[(4, 2)] = k[(2, 4)];
    StiffnessMatrix6::from_matrix(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StewartCase {
    /// Legs evenly spaced at 60°: degenerate design, singular stiffness.
    A,
    /// Legs paired at 120°: classical design, non-singular stiffness.
    B,
}

/// Stewart-Gough platform in its home configuration (platform parallel to
/// the base, symmetric about the vertical axis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StewartParams {
    /// Base circle radius.
    pub base_radius: f64,
    /// Platform circle radius.
    pub platform_radius: f64,
    /// Vertical base-platform distance.
    pub height: f64,
    /// Axial stiffness of one leg.
    pub k11: f64,
    pub case: StewartCase,
}

impl StewartParams {
    pub fn with_defaults(case: StewartCase) -> Self {
        Self {
            base_radius: 0.5,
            platform_radius: 0.2,
            height: 1.0,
            k11: 1e6,
            case,
        }
    }

    /// Squared leg length in the home configuration (identical for all legs).
    pub fn leg_length_squared(&self) -> f64 {
        let r = self.platform_radius;
        let big_r = self.base_radius;
        let h = self.height;
        match self.case {
            StewartCase::A => (big_r - r).powi(2) + h * h,
            StewartCase::B => big_r * big_r + r * r - big_r * r + h * h,
        }
    }
}

/// Base and platform attachment angles (radians) of leg `i` (0-based).
fn leg_angles(case: StewartCase, i: usize) -> (f64, f64) {
    let deg = |d: f64| d.to_radians();
    match case {
        StewartCase::A => {
            let phi = deg(60.0 * i as f64);
            (phi, phi)
        }
        StewartCase::B => {
            let phi = [0.0, 120.0, 120.0, 240.0, 240.0, 360.0][i];
            let psi = [60.0, 60.0, 180.0, 180.0, 300.0, 300.0][i];
            (deg(phi), deg(psi))
        }
    }
}

/// Leg axis vector `uᵢ` (base attachment to platform attachment) and lever
/// `vᵢ` (platform attachment to the platform reference point) of leg `i`.
pub fn stewart_leg_vectors(p: &StewartParams, i: usize) -> (Vector3<f64>, Vector3<f64>) {
    assert!(i < 6, "leg index out of range");
    let (phi, psi) = leg_angles(p.case, i);
    let r = p.platform_radius;
    let big_r = p.base_radius;
    let u = Vector3::new(
        r * psi.cos() - big_r * phi.cos(),
        r * psi.sin() - big_r * phi.sin(),
        p.height,
    );
    let v = Vector3::new(-r * psi.cos(), -r * psi.sin(), 0.0);
    (u, v)
}

/// The five passive-rotation columns of a Stewart-Gough leg of length `l`:
/// three rotations at the reference point plus the two lever-shifted ones.
pub fn stewart_leg_passive_columns(l: f64) -> PassiveJacobian {
    assert!(l > 0.0, "leg length must be positive");
    PassiveJacobian::from_columns(vec![
        Vector6::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0),
        Vector6::new(0.0, 0.0, 0.0, 0.0, 1.0, 0.0),
        Vector6::new(0.0, 0.0, 0.0, 0.0, 0.0, 1.0),
        Vector6::new(0.0, 0.0, -l, 0.0, 1.0, 0.0),
        Vector6::new(0.0, l, 0.0, 0.0, 0.0, 1.0),
    ])
}

/// Eliminates the five passive rotations from a beam stiffness; only the
/// traction/compression term survives (rank 1, entry (0,0) = K11).
pub fn stewart_leg_stiffness(
    beam: &StiffnessMatrix6,
    l: f64,
) -> Result<StiffnessMatrix6, StiffnessError> {
    let columns = stewart_leg_passive_columns(l);
    let report = eliminate_recursive(beam, &columns, None, RedundancyPolicy::Error)?;
    Ok(report.result)
}

/// Rotation whose first column is `u0` (maps local x to the leg axis).
pub fn leg_orientation(u0: &Vector3<f64>) -> Matrix3<f64> {
    let seed = if u0.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let y = (seed - u0 * seed.dot(u0)).normalize();
    let z = u0.cross(&y);
    Matrix3::from_columns(&[*u0, y, z])
}

fn synthetic_beam(k11: f64, l: f64) -> BeamParams {
    // Any SPD symmetric beam works here; only the axial term survives the
    // elimination, so pin EA/L = K11 and take generic section properties.
    let a = 1e-3;
    let e = k11 * l / a;
    BeamParams {
        e,
        g: e / 2.6,
        a,
        i_y: 1e-6,
        i_z: 1e-6,
        j_t: 2e-6,
        l,
    }
}

/// Builds one global-frame leg assembly of the Stewart-Gough platform.
pub fn stewart_leg_assembly(p: &StewartParams, i: usize) -> Result<LegAssembly, StiffnessError> {
    let (u, v) = stewart_leg_vectors(p, i);
    let l = u.norm();
    let beam = beam_stiffness(&synthetic_beam(p.k11, l));
    let local = stewart_leg_stiffness(&beam, l)?;
    let leg = LegAssembly {
        stiffness: local,
        orientation: leg_orientation(&(u / l)),
        lever: v,
        frame: FrameTag::Local,
    };
    leg_to_global(&leg)
}

/// Full numeric pipeline: per-leg elimination, rotation, transport to the
/// platform reference point, and aggregation over the six legs.
pub fn stewart_stiffness_pipeline(p: &StewartParams) -> Result<StiffnessMatrix6, StiffnessError> {
    let legs = (0..6)
        .map(|i| stewart_leg_assembly(p, i))
        .collect::<Result<Vec<_>, _>>()?;
    aggregate(&ManipulatorModel { legs })
}

/// Closed-form home-configuration stiffness for the two case studies.
pub fn stewart_closed_form(p: &StewartParams) -> StiffnessMatrix6 {
    let r = p.platform_radius;
    let big_r = p.base_radius;
    let h = p.height;
    let l2 = p.leg_length_squared();
    let factor = 3.0 * p.k11 / l2;
    let d_a = big_r - r;
    let d_b = big_r / 2.0 - r;
    let mut m = Matrix6::zeros();
    match p.case {
        StewartCase::A => {
            m[(0, 0)] = d_a * d_a;
            m[(1, 1)] = d_a * d_a;
            m[(2, 2)] = 2.0 * h * h;
            m[(0, 4)] = r * h * d_a;
            m[(4, 0)] = m[(0, 4)];
            m[(1, 3)] = -r * h * d_a;
            m[(3, 1)] = m[(1, 3)];
            m[(3, 3)] = r * r * h * h;
            m[(4, 4)] = r * r * h * h;
        }
        StewartCase::B => {
            m[(0, 0)] = d_a * d_a + big_r * r;
            m[(1, 1)] = d_a * d_a + big_r * r;
            m[(2, 2)] = 2.0 * h * h;
            m[(0, 4)] = r * h * d_b;
            m[(4, 0)] = m[(0, 4)];
            m[(1, 3)] = -r * h * d_b;
            m[(3, 1)] = m[(1, 3)];
            m[(3, 3)] = r * r * h * h;
            m[(4, 4)] = r * r * h * h;
            m[(5, 5)] = 1.5 * r * r * big_r * big_r;
        }
    }
    StiffnessMatrix6::from_matrix(m * factor)
}

/// Planar single-link elimination of the end rotation: returns the 3×3
/// matrix with entries `Kⱼₖ − Kⱼ₂K₂ₖ/K₂₂` (third row/column zero) and the
/// coefficients of the eliminated-coordinate map
/// `δφ = c₀·δx + c₁·δy`.
pub fn motivating_2d(k: &Matrix3<f64>) -> Result<(Matrix3<f64>, Vector2<f64>), StiffnessError> {
    let k33 = k[(2, 2)];
    if k33 <= 0.0 {
        return Err(StiffnessError::NonPositivePivot2d(k33));
    }
    let mut out = Matrix3::from_fn(|j, l| k[(j, l)] - k[(j, 2)] * k[(2, l)] / k33);
    for i in 0..3 {
        out[(2, i)] = 0.0;
        out[(i, 2)] = 0.0;
    }
    let map = Vector2::new(-k[(0, 2)] / k33, -k[(1, 2)] / k33);
    Ok((out, map))
}

/// Demo values used by the command-line `demo-2d` built-in.
pub fn demo_2d_matrix() -> Matrix3<f64> {
    Matrix3::new(2.0, 0.0, 1.0, 0.0, 2.0, 1.0, 1.0, 1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{energy_oracle_stiffness, matrix_rank};
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn test_beam() -> BeamParams {
        BeamParams {
            e: 70e9,
            g: 26e9,
            a: 3e-4,
            i_y: 2e-8,
            i_z: 3e-8,
            j_t: 4e-8,
            l: 1.2,
        }
    }

    #[test]
    fn beam_axial_and_torsion_entries() {
        let p = test_beam();
        let k = beam_stiffness(&p);
        assert_relative_eq!(k.matrix()[(0, 0)], p.e * p.a / p.l, epsilon = 1e-6);
        assert_relative_eq!(k.matrix()[(3, 3)], p.g * p.j_t / p.l, epsilon = 1e-6);
    }

    #[test]
    fn beam_is_spd_and_matches_cantilever_compliance() {
        let p = test_beam();
        let k = beam_stiffness(&p);
        assert!(k.min_eigenvalue() > 0.0);
        let c = k.matrix().try_inverse().unwrap();
        // tip deflection under a pure tip force
        assert_relative_eq!(
            c[(1, 1)],
            p.l.powi(3) / (3.0 * p.e * p.i_z),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            c[(2, 2)],
            p.l.powi(3) / (3.0 * p.e * p.i_y),
            max_relative = 1e-12
        );
        assert_relative_eq!(c[(0, 0)], p.l / (p.e * p.a), max_relative = 1e-12);
    }

    #[test]
    fn stewart_passive_columns_match_the_printed_set() {
        let l = 1.7;
        let cols = stewart_leg_passive_columns(l);
        assert_eq!(cols.len(), 5);
        assert_eq!(cols.columns()[0], Vector6::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0));
        assert_eq!(cols.columns()[3], Vector6::new(0.0, 0.0, -l, 0.0, 1.0, 0.0));
        assert_eq!(cols.columns()[4], Vector6::new(0.0, l, 0.0, 0.0, 0.0, 1.0));
        assert_eq!(matrix_rank(&cols.to_matrix(), 1e-10), 5);
    }

    #[test]
    fn stewart_leg_keeps_only_traction_compression() {
        let p = test_beam();
        let beam = beam_stiffness(&p);
        let leg = stewart_leg_stiffness(&beam, p.l).unwrap();
        let k11 = leg.matrix()[(0, 0)];
        assert_relative_eq!(k11, p.e * p.a / p.l, max_relative = 1e-9);
        assert_eq!(leg.rank(1e-10), 1);
        for i in 0..6 {
            for j in 0..6 {
                if (i, j) != (0, 0) {
                    assert!(leg.matrix()[(i, j)].abs() <= 1e-9 * k11, "entry ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn stewart_leg_k11_matches_energy_oracle() {
        let p = test_beam();
        let beam = beam_stiffness(&p);
        let leg = stewart_leg_stiffness(&beam, p.l).unwrap();
        let j_theta = DMatrix::identity(6, 6);
        let k_theta = DMatrix::from_fn(6, 6, |i, j| beam.matrix()[(i, j)]);
        let j_q = stewart_leg_passive_columns(p.l).to_matrix();
        let oracle = energy_oracle_stiffness(&j_theta, &k_theta, &j_q).unwrap();
        let rel = (leg.matrix() - oracle.matrix()).norm() / leg.matrix().norm();
        assert!(rel < 1e-6, "rel {rel}");
    }

    #[test]
    fn leg_vectors_case_a_first_leg() {
        let p = StewartParams::with_defaults(StewartCase::A);
        let (u, v) = stewart_leg_vectors(&p, 0);
        assert_relative_eq!(
            u,
            Vector3::new(p.platform_radius - p.base_radius, 0.0, p.height),
            epsilon = 1e-15
        );
        assert_relative_eq!(v, Vector3::new(-p.platform_radius, 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn leg_lengths_are_uniform_in_both_cases() {
        for case in [StewartCase::A, StewartCase::B] {
            let p = StewartParams::with_defaults(case);
            let expected = p.leg_length_squared();
            for i in 0..6 {
                let (u, _) = stewart_leg_vectors(&p, i);
                assert_relative_eq!(u.norm_squared(), expected, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn pipeline_case_a_is_singular_about_vertical() {
        let p = StewartParams::with_defaults(StewartCase::A);
        let k = stewart_stiffness_pipeline(&p).unwrap();
        let ev = k.eigenvalues();
        assert!(ev[5].abs() <= 1e-9 * ev[0]);
        // equal base/platform angles collapse the six leg lines onto a
        // three-dimensional screw system, so three motions go unresisted
        assert_eq!(k.rank(1e-10), 3);
        let null = k.null_space(1e-9);
        assert_eq!(null.len(), 3);
        let mut e6 = Vector6::zeros();
        e6[5] = 1.0;
        // the vertical rotation is one of them, exactly
        assert!((k.matrix() * e6).norm() <= 1e-12 * ev[0]);
        let projection: f64 = null.iter().map(|n| n.dot(&e6).powi(2)).sum();
        assert!(projection.sqrt() > 1.0 - 1e-9);
    }

    #[test]
    fn pipeline_case_b_is_full_rank() {
        let p = StewartParams::with_defaults(StewartCase::B);
        let k = stewart_stiffness_pipeline(&p).unwrap();
        assert_eq!(k.rank(1e-10), 6);
        assert!(k.min_eigenvalue() > 1e-6 * k.eigenvalues()[0]);
    }

    #[test]
    fn pipeline_matches_cited_closed_form_entries() {
        for case in [StewartCase::A, StewartCase::B] {
            let p = StewartParams::with_defaults(case);
            let k = stewart_stiffness_pipeline(&p).unwrap();
            let l2 = p.leg_length_squared();
            assert_relative_eq!(
                k.matrix()[(2, 2)],
                6.0 * p.k11 * p.height * p.height / l2,
                max_relative = 1e-9
            );
            match case {
                StewartCase::A => {
                    let d_a = p.base_radius - p.platform_radius;
                    assert_relative_eq!(
                        k.matrix()[(0, 0)],
                        3.0 * p.k11 / l2 * d_a * d_a,
                        max_relative = 1e-9
                    );
                    assert!(k.matrix()[(5, 5)].abs() <= 1e-9 * k.eigenvalues()[0]);
                }
                StewartCase::B => {
                    assert_relative_eq!(
                        k.matrix()[(5, 5)],
                        4.5 * p.k11 * p.platform_radius.powi(2) * p.base_radius.powi(2) / l2,
                        max_relative = 1e-9
                    );
                }
            }
        }
    }

    #[test]
    fn pipeline_and_closed_form_agree_on_pattern() {
        for case in [StewartCase::A, StewartCase::B] {
            let p = StewartParams::with_defaults(case);
            let pipeline = stewart_stiffness_pipeline(&p).unwrap();
            let closed = stewart_closed_form(&p);
            let scale = closed.matrix().amax();
            for i in 0..6 {
                for j in 0..6 {
                    let zero_closed = closed.matrix()[(i, j)].abs() <= 1e-12 * scale;
                    let zero_pipeline = pipeline.matrix()[(i, j)].abs() <= 1e-9 * scale;
                    assert_eq!(zero_closed, zero_pipeline, "pattern mismatch at ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn motivating_2d_diagonal_case() {
        let k = Matrix3::from_diagonal(&Vector3::new(4.0, 9.0, 16.0));
        let (out, map) = motivating_2d(&k).unwrap();
        assert_relative_eq!(
            out,
            Matrix3::from_diagonal(&Vector3::new(4.0, 9.0, 0.0)),
            epsilon = 1e-15
        );
        assert_relative_eq!(map, Vector2::zeros(), epsilon = 1e-15);
    }

    #[test]
    fn motivating_2d_hand_computed_example() {
        let (out, map) = motivating_2d(&demo_2d_matrix()).unwrap();
        let expected = Matrix3::new(1.0, -1.0, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0);
        assert_relative_eq!(out, expected, epsilon = 1e-14);
        assert_relative_eq!(map, Vector2::new(-1.0, -1.0), epsilon = 1e-14);
    }

    #[test]
    fn motivating_2d_rejects_nonpositive_pivot() {
        let mut k = demo_2d_matrix();
        k[(2, 2)] = 0.0;
        assert!(matches!(
            motivating_2d(&k),
            Err(StiffnessError::NonPositivePivot2d(_))
        ));
    }

    #[test]
    fn motivating_2d_matches_1d_minimization_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        for _ in 0..20 {
            let a = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let k = a * a.transpose() + Matrix3::identity() * 0.2;
            let (out, _) = motivating_2d(&k).unwrap();

            // minimize the quadratic over the third coordinate by ternary
            // search, then take second differences of the minimal energy
            let energy = |x: f64, y: f64| -> f64 {
                let e = |phi: f64| {
                    let d = Vector3::new(x, y, phi);
                    0.5 * d.dot(&(k * d))
                };
                let (mut lo, mut hi) = (-100.0, 100.0);
                for _ in 0..200 {
                    let m1 = lo + (hi - lo) / 3.0;
                    let m2 = hi - (hi - lo) / 3.0;
                    if e(m1) < e(m2) {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                e(0.5 * (lo + hi))
            };
            let h = 1e-2;
            let second = |i: usize, j: usize| -> f64 {
                let mut d = [[0.0f64; 2]; 4];
                d[0][i] += h;
                d[0][j] += h;
                d[1][i] += h;
                d[1][j] -= h;
                d[2][i] -= h;
                d[2][j] += h;
                d[3][i] -= h;
                d[3][j] -= h;
                (energy(d[0][0], d[0][1]) - energy(d[1][0], d[1][1]) - energy(d[2][0], d[2][1])
                    + energy(d[3][0], d[3][1]))
                    / (4.0 * h * h)
            };
            for i in 0..2 {
                for j in 0..2 {
                    assert_relative_eq!(out[(i, j)], second(i, j), epsilon = 1e-9);
                }
            }
        }
    }
}
