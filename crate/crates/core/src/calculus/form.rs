use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{CalculusError, Space, TrigPoly};

/// Values of a form at one point, keyed by increasing basis indices.
pub type NumForm = BTreeMap<Vec<usize>, f64>;

/// A differential form `Σ_I c_I dx_I` with [`TrigPoly`] coefficients.
///
/// Basis indices run over the angle coordinates first, then the line
/// coordinates, and each key is strictly increasing.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Form {
    angles: usize,
    lines: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, TrigPoly>,
}

/// Sign of the permutation sorting `a ++ b`, or `None` if they overlap.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut inversions = 0usize;
    for &i in a {
        for &j in b {
            if i == j {
                return None;
            }
            if i > j {
                inversions += 1;
            }
        }
    }
    let mut merged: Vec<usize> = a.iter().chain(b).copied().collect();
    merged.sort_unstable();
    Some((merged, inversions % 2 == 1))
}

impl Form {
    pub fn zero(space: &Space, degree: usize) -> Self {
        Self::zero_on(space.angles(), space.lines(), degree)
    }

    pub(crate) fn zero_on(angles: usize, lines: usize, degree: usize) -> Self {
        Form {
            angles,
            lines,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The 0-form `f`.
    pub fn function(f: TrigPoly) -> Self {
        let mut out = Self::zero_on(f.angles(), f.lines(), 0);
        out.insert(vec![], f);
        out
    }

    /// `c · dx_{i_1} ∧ … ∧ dx_{i_k}` for arbitrary (unsorted) indices.
    pub fn monomial(indices: &[usize], c: TrigPoly) -> Self {
        let mut out = Self::zero_on(c.angles(), c.lines(), indices.len());
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return out;
        }
        let mut perm = indices.to_vec();
        let mut odd = false;
        // Bubble sort parity.
        for i in 0..perm.len() {
            for j in 0..perm.len() - 1 - i {
                if perm[j] > perm[j + 1] {
                    perm.swap(j, j + 1);
                    odd = !odd;
                }
            }
        }
        out.insert(sorted, if odd { c.neg() } else { c });
        out
    }

    /// `Σ_i c_i dx_i`.
    pub fn one_form(components: Vec<TrigPoly>) -> Self {
        let (a, l) = (components[0].angles(), components[0].lines());
        let mut out = Self::zero_on(a, l, 1);
        for (i, c) in components.into_iter().enumerate() {
            out.insert(vec![i], c);
        }
        out
    }

    pub fn from_terms<I>(space: &Space, degree: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<usize>, TrigPoly)>,
    {
        let mut out = Self::zero(space, degree);
        for (idx, c) in terms {
            assert_eq!(idx.len(), degree);
            out = out.add(&Self::monomial(&idx, c));
        }
        out
    }

    fn insert(&mut self, key: Vec<usize>, c: TrigPoly) {
        if c.is_zero() {
            return;
        }
        assert!(key.iter().all(|&i| i < self.dim()), "basis index out of range");
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn angles(&self) -> usize {
        self.angles
    }

    pub fn lines(&self) -> usize {
        self.lines
    }

    pub fn dim(&self) -> usize {
        self.angles + self.lines
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &TrigPoly)> {
        self.terms.iter()
    }

    pub fn component(&self, key: &[usize]) -> TrigPoly {
        self.terms
            .get(key)
            .cloned()
            .unwrap_or_else(|| TrigPoly::zero(self.angles, self.lines))
    }

    /// Coefficient functions `c_i` of a 1-form.
    pub fn components(&self) -> Vec<TrigPoly> {
        assert_eq!(self.degree, 1);
        (0..self.dim()).map(|i| self.component(&[i])).collect()
    }

    /// The scalar of a 0-form.
    pub fn scalar(&self) -> TrigPoly {
        assert_eq!(self.degree, 0);
        self.component(&[])
    }

    fn assert_compatible(&self, other: &Self) {
        assert!(
            self.angles == other.angles && self.lines == other.lines,
            "forms on different spaces"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero_on(self.angles, self.lines, self.degree);
        if c.is_zero() {
            return out;
        }
        for (k, f) in &self.terms {
            out.insert(k.clone(), f.scale(c));
        }
        out
    }

    /// Multiplies every coefficient by the function `f`.
    pub fn mul_fn(&self, f: &TrigPoly) -> Self {
        let mut out = Self::zero_on(self.angles, self.lines, self.degree);
        for (k, c) in &self.terms {
            out.insert(k.clone(), c.mul(f));
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut out = Self::zero_on(self.angles, self.lines, self.degree + other.degree);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((key, odd)) = merge_sign(a, b) {
                    let c = ca.mul(cb);
                    out.insert(key, if odd { c.neg() } else { c });
                }
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> Self {
        let mut out = Self::zero_on(self.angles, self.lines, self.degree + 1);
        for (key, c) in &self.terms {
            for j in 0..self.dim() {
                if key.contains(&j) {
                    continue;
                }
                let dc = c.partial(j);
                if dc.is_zero() {
                    continue;
                }
                let (merged, odd) = merge_sign(&[j], key).expect("j not in key");
                out.insert(merged, if odd { dc.neg() } else { dc });
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.d().is_zero()
    }

    /// `d_η β = dβ − η∧β` for a closed 1-form `η`.
    pub fn d_eta(&self, eta: &Form) -> Result<Form, CalculusError> {
        check_lee_form(eta)?;
        Ok(self.d_eta_unchecked(eta))
    }

    pub(crate) fn d_eta_unchecked(&self, eta: &Form) -> Form {
        let mut out = self.d().sub(&eta.wedge(self));
        out.degree = self.degree + 1;
        out
    }

    /// Interior product with the vector field `Σ X^i ∂_i`, contracting the
    /// first slot.
    pub fn interior(&self, field: &[TrigPoly]) -> Self {
        assert_eq!(field.len(), self.dim());
        assert!(self.degree > 0, "interior product of a function");
        let mut out = Self::zero_on(self.angles, self.lines, self.degree - 1);
        for (key, c) in &self.terms {
            for (r, &i) in key.iter().enumerate() {
                if field[i].is_zero() {
                    continue;
                }
                let mut rest = key.clone();
                rest.remove(r);
                let v = c.mul(&field[i]);
                out.insert(rest, if r % 2 == 1 { v.neg() } else { v });
            }
        }
        out
    }

    /// Reinterprets the form on a space with `extra` more line coordinates.
    pub fn extend_lines(&self, extra: usize) -> Self {
        let mut out = Self::zero_on(self.angles, self.lines + extra, self.degree);
        for (k, c) in &self.terms {
            let mut key = k.clone();
            for i in key.iter_mut() {
                if *i >= self.angles + self.lines {
                    *i += extra;
                }
            }
            out.insert(key, c.extend_lines(extra));
        }
        out
    }

    /// True if every coefficient is a constant.
    pub fn has_constant_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.as_constant().is_some())
    }

    pub fn eval(&self, x: &[f64]) -> NumForm {
        self.terms.iter().map(|(k, c)| (k.clone(), c.eval(x))).collect()
    }

    /// Components of a 1-form at `x`.
    pub fn eval_vec(&self, x: &[f64]) -> DVector<f64> {
        assert_eq!(self.degree, 1);
        let mut v = DVector::zeros(self.dim());
        for (k, c) in &self.terms {
            v[k[0]] = c.eval(x);
        }
        v
    }

    /// The antisymmetric matrix `W` with `ω = Σ_{i<j} W_ij dx_i∧dx_j`.
    pub fn eval_matrix(&self, x: &[f64]) -> DMatrix<f64> {
        assert_eq!(self.degree, 2);
        let n = self.dim();
        let mut w = DMatrix::zeros(n, n);
        for (k, c) in &self.terms {
            let v = c.eval(x);
            w[(k[0], k[1])] = v;
            w[(k[1], k[0])] = -v;
        }
        w
    }

    /// Upper bound of the largest coefficient on the evaluation box.
    pub fn sup_bound(&self, line_box: f64) -> f64 {
        self.terms.values().map(|c| c.sup_bound(line_box)).fold(0.0, f64::max)
    }

    pub fn fmt_with(&self, space: &Space) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let names = space.names();
        self.terms
            .iter()
            .map(|(k, c)| {
                let basis = k.iter().map(|&i| format!("d{}", names[i])).collect::<Vec<_>>().join("∧");
                let coeff = c.fmt_with(names);
                match (k.is_empty(), c.num_terms()) {
                    (true, _) => coeff,
                    (false, 1) if coeff == "1" => basis,
                    (false, 1) => format!("{coeff} {basis}"),
                    _ => format!("({coeff}) {basis}"),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.angles)
            .map(|i| format!("q{}", i + 1))
            .chain((0..self.lines).map(|j| format!("x{}", j + 1)))
            .collect();
        let space = Space::with_names(self.angles, names);
        write!(f, "Form[{}]({})", self.degree, self.fmt_with(&space))
    }
}

/// Checks that `eta` is a closed 1-form.
pub(crate) fn check_lee_form(eta: &Form) -> Result<(), CalculusError> {
    if eta.degree() != 1 && !eta.is_zero() {
        return Err(CalculusError::Degree {
            expected: 1,
            found: eta.degree(),
        });
    }
    if !eta.is_closed() {
        return Err(CalculusError::EtaNotClosed);
    }
    Ok(())
}

/// `d_η β` for a closed 1-form `η`.
pub fn d_eta(beta: &Form, eta: &Form) -> Result<Form, CalculusError> {
    beta.d_eta(eta)
}

/// Numeric interior product `X⌟β` at a point, first slot.
pub fn interior_num(beta: &NumForm, x: &[f64]) -> NumForm {
    let mut out = NumForm::new();
    for (key, c) in beta {
        for (r, &i) in key.iter().enumerate() {
            let mut rest = key.clone();
            rest.remove(r);
            let v = c * x[i] * if r % 2 == 1 { -1.0 } else { 1.0 };
            *out.entry(rest).or_insert(0.0) += v;
        }
    }
    out
}

/// Numeric wedge product at a point.
pub fn wedge_num(a: &NumForm, b: &NumForm) -> NumForm {
    let mut out = NumForm::new();
    for (ka, ca) in a {
        for (kb, cb) in b {
            if let Some((key, odd)) = merge_sign(ka, kb) {
                *out.entry(key).or_insert(0.0) += if odd { -ca * cb } else { ca * cb };
            }
        }
    }
    out
}

/// Largest absolute coefficient of `a − b`.
pub fn max_abs_diff(a: &NumForm, b: &NumForm) -> f64 {
    let mut m: f64 = 0.0;
    for (k, v) in a {
        m = m.max((v - b.get(k).copied().unwrap_or(0.0)).abs());
    }
    for (k, v) in b {
        if !a.contains_key(k) {
            m = m.max(v.abs());
        }
    }
    m
}

pub fn scale_num(a: &NumForm, s: f64) -> NumForm {
    a.iter().map(|(k, v)| (k.clone(), v * s)).collect()
}

pub fn add_num(a: &NumForm, b: &NumForm) -> NumForm {
    let mut out = a.clone();
    for (k, v) in b {
        *out.entry(k.clone()).or_insert(0.0) += v;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn c(angles: usize, lines: usize, v: i64) -> TrigPoly {
        TrigPoly::from_int(angles, lines, v)
    }

    fn rat(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn wedge_signs() {
        let dq = Form::monomial(&[0], c(1, 1, 1));
        let dp = Form::monomial(&[1], c(1, 1, 1));
        assert_eq!(dp.wedge(&dq), Form::monomial(&[0, 1], c(1, 1, -1)));
        assert!(dq.wedge(&dq).is_zero());
        assert_eq!(Form::monomial(&[1, 0], c(1, 1, 1)), dp.wedge(&dq));
    }

    #[test]
    fn d_squared_is_zero() {
        let f = TrigPoly::harmonic(2, 1, vec![1, 2], true, rat(3)).mul(&TrigPoly::line_power(2, 1, 0, 2));
        let beta = Form::one_form(vec![f.clone(), f.partial(0), f.partial(2)]);
        assert!(beta.d().d().is_zero());
        assert!(Form::function(f).d().d().is_zero());
    }

    #[test]
    fn tautological_form_on_twisted_circle() {
        // On T*S¹ with η = c dq: d_η(p dq) = dp∧dq.
        let space = Space::cotangent(1);
        let lambda = Form::monomial(&[0], TrigPoly::line_power(1, 1, 0, 1));
        let eta = Form::monomial(&[0], c(1, 1, 3));
        let omega = lambda.d_eta(&eta).unwrap();
        let expect = Form::monomial(&[1, 0], c(1, 1, 1));
        assert_eq!(omega, expect);
        assert_eq!(omega.fmt_with(&space), "-1 dq1∧dp1");
    }

    #[test]
    fn rejects_non_closed_eta() {
        let eta = Form::monomial(&[0], TrigPoly::line_power(1, 1, 0, 1));
        let beta = Form::function(c(1, 1, 1));
        assert_eq!(beta.d_eta(&eta), Err(CalculusError::EtaNotClosed));
    }

    #[test]
    fn interior_first_slot() {
        // ∂_p ⌟ (dp∧dq) = dq.
        let omega = Form::monomial(&[1, 0], c(1, 1, 1));
        let field = vec![c(1, 1, 0), c(1, 1, 1)];
        assert_eq!(omega.interior(&field), Form::monomial(&[0], c(1, 1, 1)));
    }

    #[test]
    fn extend_lines_shifts_nothing_below() {
        let f = Form::monomial(&[0, 1], c(1, 1, 2));
        let g = f.extend_lines(1);
        assert_eq!(g.dim(), 3);
        assert_eq!(g.component(&[0, 1]), c(1, 2, 2));
    }

    #[test]
    fn numeric_helpers_agree_with_symbolic() {
        let a = Form::one_form(vec![
            TrigPoly::harmonic(2, 0, vec![1, 0], false, rat(1)),
            TrigPoly::harmonic(2, 0, vec![1, 1], true, rat(2)),
        ]);
        let b = Form::one_form(vec![c(2, 0, 1), TrigPoly::harmonic(2, 0, vec![0, 1], false, rat(-1))]);
        let x = [0.4, 1.3];
        let sym = a.wedge(&b).eval(&x);
        let num = wedge_num(&a.eval(&x), &b.eval(&x));
        assert!(max_abs_diff(&sym, &num) < 1e-15);
    }
}
