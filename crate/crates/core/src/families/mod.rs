//! Generating families `F : Tⁿ × Rᵐ → R` quadratic at infinity, their
//! β-critical points (zeros of `dF − Fβ`), the Lagrangian `L_F`, the
//! smoothed `H = log G` with `γ = dH − β`, and the comparison of
//! critical-point counts with Novikov ranks.

mod critical;
mod family;
mod lagrangian;
mod newton;
mod pipeline;
mod theorem;

pub use critical::{
    beta_critical_points, beta_map, BetaCriticalPoint, CriticalSearch, Region, SearchConfig, SearchWarning,
};
pub use family::{BetaJet, CoreTerm, FamilyFunction, Gauged, GeneratingFamily, Jet, Negated, Stabilized, TrigJet};
pub use lagrangian::{lagrangian_from_family, Intersection, LagrangianConfig, LagrangianReport, LagrangianSample};
pub use newton::torus_distance;
pub use pipeline::{
    build_pipeline, chi, GammaZero, Pairing, PipelineArtifacts, PipelineConfig, PipelineSummary, RegionCounts,
    Smoothing,
};
pub use theorem::{theorem_bound_report, TheoremReport};

use crate::calculus::CalculusError;
use crate::novikov::HomologyError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FamilyError {
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("β lives on T^{beta} but the family's base is T^{family}")]
    DimensionMismatch { family: usize, beta: usize },
    #[error("ε = {epsilon} is too large: |d_βF| or |dF| is {residual:e} at {point:?} where |F| < 2ε; choose a smaller ε")]
    EpsilonTooLarge { epsilon: f64, point: Vec<f64>, residual: f64 },
    #[error("critical value {value} at {point:?} is within 2ε of 0 (ε = {epsilon}); perturb F or choose a smaller ε")]
    CriticalValueNearZero { point: Vec<f64>, value: f64, epsilon: f64 },
    #[error("periods of β {beta:?} are not a positive multiple of the cocycle periods {cocycle:?}")]
    PeriodMismatch { beta: Vec<String>, cocycle: Vec<String> },
    #[error("{0}")]
    MissingCocycle(String),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}
