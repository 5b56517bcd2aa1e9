//! Parallel-manipulator aggregation: rotate each leg stiffness to the global
//! frame, transport it to the common platform reference point, and sum over
//! legs. Also the force-deflection solve, with a spectral pseudo-inverse for
//! singular aggregates.

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

use crate::error::StiffnessError;
use crate::spatial::{rotate_stiffness, shift_stiffness, StiffnessMatrix6, Twist, Wrench};

/// Eigenvalue cutoff (relative to the largest) for the pseudo-inverse in
/// [`deflection`].
const PINV_TOL: f64 = 1e-10;

/// Relative tolerance on the null-space component of a wrench before it is
/// declared unresisted.
const NULL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameTag {
    Local,
    Global,
}

/// One leg's Cartesian stiffness at its end-point, together with the leg
/// orientation and the lever from the leg end-point to the platform
/// reference point.
#[derive(Debug, Clone)]
pub struct LegAssembly {
    pub stiffness: StiffnessMatrix6,
    pub orientation: Matrix3<f64>,
    pub lever: Vector3<f64>,
    pub frame: FrameTag,
}

/// Collection of legs sharing one platform reference point.
#[derive(Debug, Clone)]
pub struct ManipulatorModel {
    pub legs: Vec<LegAssembly>,
}

/// Rotates a local-frame leg stiffness to the global frame.
pub fn leg_to_global(leg: &LegAssembly) -> Result<LegAssembly, StiffnessError> {
    if leg.frame == FrameTag::Global {
        return Err(StiffnessError::AlreadyGlobal);
    }
    Ok(LegAssembly {
        stiffness: rotate_stiffness(&leg.stiffness, &leg.orientation)?,
        orientation: leg.orientation,
        lever: leg.lever,
        frame: FrameTag::Global,
    })
}

/// Sums the leg stiffnesses at the platform reference point:
/// `Σᵢ shift_stiffness(K⁽ⁱ⁾, vᵢ)`. Legs must already be in the global frame.
pub fn aggregate(model: &ManipulatorModel) -> Result<StiffnessMatrix6, StiffnessError> {
    if model.legs.is_empty() {
        return Err(StiffnessError::EmptyManipulator);
    }
    let mut sum = Matrix6::zeros();
    for leg in &model.legs {
        debug_assert_eq!(leg.frame, FrameTag::Global);
        sum += shift_stiffness(&leg.stiffness, &leg.lever).into_matrix();
    }
    Ok(StiffnessMatrix6::from_matrix(sum))
}

fn direction_name(v: &Vector6<f64>) -> String {
    const NAMES: [&str; 6] = [
        "translation x",
        "translation y",
        "translation z",
        "rotation about x",
        "rotation about y",
        "rotation about z",
    ];
    let mut best = 0;
    for i in 1..6 {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best].abs() > 0.99 * v.norm() {
        NAMES[best].to_string()
    } else {
        format!(
            "{:+.3} {:+.3} {:+.3} {:+.3} {:+.3} {:+.3}",
            v[0], v[1], v[2], v[3], v[4], v[5]
        )
    }
}

/// Minimum-norm twist solving `K·δt = F` through a spectral pseudo-inverse.
///
/// A wrench with a component in the null space of `K` beyond
/// `NULL_TOL·‖F‖` is rejected as unresisted, naming the free direction.
pub fn deflection(k: &StiffnessMatrix6, f: &Wrench) -> Result<Twist, StiffnessError> {
    let fv = f.to_vector();
    let eig = k.matrix().symmetric_eigen();
    let lambda_max = eig.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let mut dt = Vector6::zeros();
    let mut null_component = Vector6::zeros();
    for i in 0..6 {
        let lambda = eig.eigenvalues[i];
        let v = Vector6::from_column_slice(eig.eigenvectors.column(i).as_slice());
        let coeff = v.dot(&fv);
        if lambda_max > 0.0 && lambda.abs() > PINV_TOL * lambda_max {
            dt += v * (coeff / lambda);
        } else {
            null_component += v * coeff;
        }
    }
    if null_component.norm() > NULL_TOL * fv.norm() {
        return Err(StiffnessError::UnresistedWrench {
            direction: direction_name(&null_component.normalize()),
        });
    }
    Ok(Twist::from_vector(&dt))
}
