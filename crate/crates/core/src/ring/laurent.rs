use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{FieldTag, RingError};

/// An element of `F[t, t⁻¹]`.
///
/// Stored as a sparse map from exponent to nonzero coefficient, so two
/// polynomials are equal exactly when their maps are.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    field: FieldTag,
    terms: BTreeMap<i64, BigRational>,
}

impl LaurentPoly {
    pub fn zero(field: FieldTag) -> Self {
        LaurentPoly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: FieldTag) -> Self {
        Self::monomial(field, 1, 0)
    }

    /// `c·tᵏ`, reduced into the field.
    pub fn monomial(field: FieldTag, c: i64, k: i64) -> Self {
        Self::monomial_rational(field, BigRational::from_integer(BigInt::from(c)), k)
    }

    pub fn monomial_rational(field: FieldTag, c: BigRational, k: i64) -> Self {
        let mut p = Self::zero(field);
        p.add_term(k, &c);
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms<I>(field: FieldTag, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        let mut p = Self::zero(field);
        for (k, c) in terms {
            p.add_term(k, &BigRational::from_integer(BigInt::from(c)));
        }
        p
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, k: i64) -> BigRational {
        self.terms.get(&k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// `max exponent − min exponent`, the degree up to units.
    pub fn span(&self) -> Option<i64> {
        Some(self.max_exponent()? - self.min_exponent()?)
    }

    fn add_term(&mut self, k: i64, c: &BigRational) {
        let c = self.field.normalize(c);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(k).or_insert_with(BigRational::zero);
        *entry = self.field.normalize(&(&*entry + c));
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    fn check(&self, other: &Self) -> Result<(), RingError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(RingError::FieldMismatch {
                left: self.field,
                right: other.field,
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c);
        }
        out
    }

    pub(crate) fn sub_unchecked(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, &-c);
        }
        out
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.field);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a + b, &(ca * cb));
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.field);
        for (k, c) in &self.terms {
            out.add_term(*k, &-c);
        }
        out
    }

    /// Multiplies by the unit `tᵏ`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly {
            field: self.field,
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.field);
        for (k, a) in &self.terms {
            out.add_term(*k, &(a * c));
        }
        out
    }

    /// Exact quotient `self / divisor` in the Laurent ring, or `None` if the
    /// division leaves a remainder.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero(self.field));
        }
        // Normalize both to ordinary polynomials with nonzero constant term;
        // the quotient's lowest exponent is then the difference of the lows.
        let a_low = self.min_exponent()?;
        let b_low = divisor.min_exponent()?;
        let mut rem = self.shift(-a_low);
        let b = divisor.shift(-b_low);
        let b_deg = b.max_exponent()?;
        let b_lead = b.coeff(b_deg);
        let mut quot = Self::zero(self.field);
        while let Some(deg) = rem.max_exponent() {
            if deg < b_deg {
                return None;
            }
            let c = self
                .field
                .normalize(&(rem.coeff(deg) / b_lead.clone()));
            let step = Self::monomial_rational(self.field, c, deg - b_deg);
            rem = rem.sub_unchecked(&step.mul_unchecked(&b));
            quot = quot.add_unchecked(&step);
        }
        Some(quot.shift(a_low - b_low))
    }

    /// Evaluates at a nonzero rational point.
    pub fn eval(&self, t: &BigRational) -> BigRational {
        assert!(!t.is_zero() || self.min_exponent().is_none_or(|k| k >= 0));
        let mut acc = BigRational::zero();
        for (k, c) in &self.terms {
            acc += c * pow_rational(t, *k);
        }
        self.field.normalize(&acc)
    }
}

pub(crate) fn pow_rational(t: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        num_traits::pow(t.clone(), k as usize)
    } else {
        num_traits::pow(t.recip(), (-k) as usize)
    }
}

/// The product of two Laurent polynomials over the same field.
pub fn laurent_mul(a: &LaurentPoly, b: &LaurentPoly) -> Result<LaurentPoly, RingError> {
    a.mul(b)
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            let neg = super::is_negative(c);
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = !mag.is_one() || *k == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match *k {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self, self.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(FieldTag::Rational, terms.iter().copied())
    }

    fn f2(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(FieldTag::Two, terms.iter().copied())
    }

    #[test]
    fn difference_of_squares() {
        let a = q(&[(0, 1), (1, -1)]);
        let b = q(&[(0, 1), (1, 1)]);
        assert_eq!(laurent_mul(&a, &b).unwrap(), q(&[(0, 1), (2, -1)]));
    }

    #[test]
    fn unit_inverse() {
        let prod = laurent_mul(&q(&[(-1, 1)]), &q(&[(1, 1)])).unwrap();
        assert!(prod.is_one());
    }

    #[test]
    fn frobenius_square_over_f2() {
        // (1 + t)² = 1 + 2t + t², and 2 ≡ 0 mod 2.
        let a = f2(&[(0, 1), (1, 1)]);
        assert_eq!(laurent_mul(&a, &a).unwrap(), f2(&[(0, 1), (2, 1)]));
    }

    #[test]
    fn field_mismatch_is_an_error() {
        let err = laurent_mul(&q(&[(0, 1)]), &f2(&[(0, 1)])).unwrap_err();
        assert!(matches!(err, RingError::FieldMismatch { .. }));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let p = q(&[(3, 2), (3, -2), (0, 0)]);
        assert!(p.is_zero());
        assert_eq!(p, LaurentPoly::zero(FieldTag::Rational));
        assert_eq!(f2(&[(1, 2)]), LaurentPoly::zero(FieldTag::Two));
    }

    #[test]
    fn exact_division() {
        let a = q(&[(-2, 1), (0, -1)]); // t⁻² − 1
        let b = q(&[(-1, 1), (0, -1)]); // t⁻¹ − 1
        let quot = a.div_exact(&b).unwrap();
        assert_eq!(quot, q(&[(-1, 1), (0, 1)]));
        assert!(q(&[(0, 1), (1, 1)]).div_exact(&q(&[(0, 1), (1, -1)])).is_none());
    }

    #[test]
    fn display() {
        assert_eq!(q(&[(0, 1), (1, -1)]).to_string(), "1 - t");
        assert_eq!(q(&[(-1, 2), (2, 1)]).to_string(), "2t^-1 + t^2");
    }
}
