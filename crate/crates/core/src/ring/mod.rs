//! Exact Laurent polynomials over Q or F₂ and their matrices.
//!
//! For an integral cohomology class the Novikov ring of the infinite cyclic
//! cover is a completion of `F[t, t⁻¹]`, and free ranks over it agree with
//! ranks over the fraction field `F(t)`. Everything here is exact.

mod laurent;
mod matrix;

pub use laurent::{laurent_mul, LaurentPoly};
pub use matrix::{rank_over_fraction_field, LaurentMatrix};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Base field of a Laurent ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldTag {
    /// The rationals.
    #[serde(rename = "Q")]
    Rational,
    /// The two-element field.
    #[serde(rename = "F2")]
    Two,
}

impl FieldTag {
    /// Reduces a rational scalar into the field's canonical representative.
    ///
    /// Over F₂ the scalar must have an odd denominator; every value produced by
    /// integer incidence data and ring operations does.
    pub fn normalize(self, c: &BigRational) -> BigRational {
        match self {
            FieldTag::Rational => c.clone(),
            FieldTag::Two => {
                assert!(
                    c.denom().is_odd(),
                    "scalar {c} has no image in F2 (even denominator)"
                );
                if c.numer().is_odd() {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }
        }
    }

    pub fn from_int(self, c: i64) -> BigRational {
        self.normalize(&BigRational::from_integer(BigInt::from(c)))
    }

    pub fn characteristic(self) -> u32 {
        match self {
            FieldTag::Rational => 0,
            FieldTag::Two => 2,
        }
    }

    pub fn parse(s: &str) -> Option<FieldTag> {
        match s {
            "Q" | "q" | "QQ" | "rational" | "rationals" => Some(FieldTag::Rational),
            "F2" | "f2" | "Z2" | "z2" | "GF2" => Some(FieldTag::Two),
            _ => None,
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Rational => write!(f, "Q"),
            FieldTag::Two => write!(f, "F2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: FieldTag, right: FieldTag },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub(crate) fn is_negative(c: &BigRational) -> bool {
    c.is_negative()
}
