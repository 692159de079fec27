use super::TrigPoly;

/// Remainder target for the truncated exponential.
pub const EXP_REMAINDER: f64 = 1e-12;

/// The truncated exponential `E_N(f) = Σ_{k ≤ N} f^k / k!` of a trig
/// polynomial, with `N` chosen so that `|e^f − E_N(f)| < 1e−12` wherever
/// the sup bound of `|f|` holds.
///
/// The derivative of the truncation is exactly `E_{N−1}(f) df`, which is
/// what every differential identity involving `e^f` uses.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpSeries {
    log: TrigPoly,
    order: usize,
    bound: f64,
    remainder: f64,
}

impl ExpSeries {
    /// Builds the series for `e^f` on the box `Tᵃ × [−line_box, line_box]ˡ`.
    pub fn new(f: TrigPoly, line_box: f64) -> Self {
        let bound = f.sup_bound(line_box);
        let (order, remainder) = truncation_order(bound);
        ExpSeries {
            log: f,
            order,
            bound,
            remainder,
        }
    }

    pub fn log(&self) -> &TrigPoly {
        &self.log
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Sup bound `B` of `|f|` used to certify the truncation.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Certified bound `e^B B^{N+1}/(N+1)!` on the truncation error.
    pub fn remainder(&self) -> f64 {
        self.remainder
    }

    /// `(E_N(f(x)), E_{N−1}(f(x)))`.
    pub fn eval(&self, x: &[f64]) -> (f64, f64) {
        taylor_pair(self.log.eval(x), self.order)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.eval(x).0
    }
}

/// Least `N` with `e^B B^{N+1}/(N+1)! < EXP_REMAINDER`, and that bound.
pub fn truncation_order(bound: f64) -> (usize, f64) {
    let b = bound.abs();
    let mut term = b; // B^{N+1}/(N+1)! for N = 0
    let mut n = 0usize;
    loop {
        let rem = b.exp() * term;
        if rem < EXP_REMAINDER || n > 400 {
            return (n.max(1), rem);
        }
        n += 1;
        term *= b / (n + 1) as f64;
    }
}

/// `(E_N(y), E_{N−1}(y))` by a single forward sum.
pub fn taylor_pair(y: f64, order: usize) -> (f64, f64) {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = 1.0;
    for k in 1..=order {
        term *= y / k as f64;
        prev = sum;
        sum += term;
    }
    if order == 0 {
        prev = 0.0;
    }
    (sum, prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn remainder_is_certified() {
        let f = TrigPoly::harmonic(1, 0, vec![1], false, BigRational::from_integer(BigInt::from(2)));
        let e = ExpSeries::new(f, 4.0);
        assert!(e.remainder() < EXP_REMAINDER);
        for i in 0..50 {
            let q = i as f64 * 0.13;
            let (v, _) = e.eval(&[q]);
            assert!((v - (2.0 * q.cos()).exp()).abs() < 1e-11);
        }
    }

    #[test]
    fn zero_log_is_one() {
        let e = ExpSeries::new(TrigPoly::zero(2, 0), 4.0);
        assert_eq!(e.eval(&[0.3, 0.4]).0, 1.0);
    }

    #[test]
    fn lower_partial_sum() {
        let (a, b) = taylor_pair(0.5, 3);
        assert!((a - (1.0 + 0.5 + 0.125 + 0.5f64.powi(3) / 6.0)).abs() < 1e-16);
        assert!((b - 1.625).abs() < 1e-16);
    }
}
