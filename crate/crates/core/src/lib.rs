//! Cartesian stiffness computation for elastic kinematic chains and parallel
//! manipulators containing passive joints.
//!
//! The library models a manipulator leg as a serial chain of rigid links,
//! lumped virtual springs and passive joints, computes the 6×6 Cartesian
//! stiffness of the chain with the passive coordinates eliminated by a
//! Schur-complement update, and aggregates per-leg stiffnesses of a parallel
//! manipulator at a common platform reference point.

pub mod assembly;
pub mod chain;
pub mod elimination;
pub mod error;
pub mod models;
pub mod modelfile;
pub mod report;
pub mod spatial;
#[cfg(test)]
pub(crate) mod testutil;

pub use error::StiffnessError;
pub use spatial::{StiffnessMatrix6, Transform, Twist, Wrench};
