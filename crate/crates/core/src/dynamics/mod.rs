//! Fixed-step flows on `Tⁿ` and `T*Tⁿ`: Hamiltonian and Lee flows, fiber
//! displaceability of the zero section, and the Moser isotopy.

mod displace;
mod moser;
mod rk4;

pub use displace::{displaceability_check, DisplaceConfig, DisplaceReport, DisplaceRow};
pub use moser::{
    moser_flow, moser_refinement, torus_example, MoserConfig, MoserField, MoserOutput, MoserProblem, MoserReport,
    MoserResidual, RefinementReport,
};
pub use rk4::{integrate_flow, rk4_step, trajectories_csv, Field, FlowConfig, FnField, Sample, Trajectory};

use crate::calculus::CalculusError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("invalid flow configuration: {0}")]
    InvalidConfig(String),
    #[error("β vanishes at {point:?}; the zero section is not displaced there")]
    VanishingBeta { point: Vec<f64> },
    #[error("ω_t is degenerate at t = {t}, x = {point:?}")]
    Degenerate { t: f64, point: Vec<f64> },
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}
