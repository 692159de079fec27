//! Exterior calculus with the Lichnerowicz–De Rham differential on `Tⁿ`
//! and `T*Tⁿ`.
//!
//! Conventions: `ω = Σ dp_i∧dq_i` on cotangent models, interior products
//! contract the first slot, `X_H⌟ω = −d_η H`, `Z_λ⌟ω = λ`, and
//! `d_η β = dβ − η∧β`. Coefficients are exact trig polynomials; gauge
//! factors `e^f` are truncated Taylor series with a certified remainder.

mod exp;
mod field;
mod form;
pub mod parse;
pub mod random;
mod space;
mod structure;
mod trig;

pub use exp::{taylor_pair, truncation_order, ExpSeries, EXP_REMAINDER};
pub use field::{is_nondegenerate, solve_dual, SemiForm, VectorFieldExpr, Weight};
pub use form::{add_num, d_eta, interior_num, max_abs_diff, scale_num, wedge_num, Form, NumForm};
pub use parse::{normalized_periods, parse_coeff_json, parse_form_json, parse_function, parse_one_form};
pub use space::{Grid, Space};
pub use structure::{
    cartan_residual, check_primitive, contactization_reeb, gauge_form, gauge_identity_residual, gauge_transform,
    hamiltonian_residual_at, hamiltonian_vector_field, hamiltonian_vector_field_semi, lee_vector_field,
    lie_derivative_at, liouville_vector_field, structural_identities_report, tautological_form, wedge_at,
    ConformalStructure, IdentitiesReport, ReebField, GRID_TOL,
};
pub use trig::{parse_rational, rational_from_f64, Monomial, TrigPoly};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalculusError {
    #[error("expected a form of degree {expected}, found degree {found}")]
    Degree { expected: usize, found: usize },
    #[error("the Lee form η is not closed")]
    EtaNotClosed,
    #[error("d_η ω ≠ 0: {0}")]
    NotConformal(String),
    #[error("ω is degenerate at grid point {point:?}")]
    Degenerate { point: Vec<f64> },
    #[error("ω is singular at {point:?}")]
    Singular { point: Vec<f64> },
    #[error("λ is not a primitive of ω: {0}")]
    NotPrimitive(String),
    #[error("α ∧ (dα)ⁿ vanishes at {point:?}")]
    NotContact { point: Vec<f64> },
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}
