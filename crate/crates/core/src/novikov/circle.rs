//! The Morse–Novikov complex of a closed 1-form `f(θ)dθ` on the circle.
//!
//! Generators are the zeros of `f`. Under descent of the primitive on the
//! cover, a zero with `f′ < 0` (a local maximum) has index 1 and its two
//! flow lines run to the neighbouring zeros. The flow line that crosses
//! `θ = 0` picks up the deck transformation `t^{±period}`.

use std::f64::consts::TAU;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::calculus::Form;
use crate::ring::{FieldTag, LaurentMatrix, LaurentPoly};

use super::{CellComplex, Cocycle, HomologyError, NovikovBetti};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircleZero {
    pub theta: f64,
    pub derivative: f64,
    pub index: usize,
}

#[derive(Clone, Debug)]
pub struct CircleMorseNovikov {
    /// Zeros in increasing `θ ∈ [0, 2π)`.
    pub zeros: Vec<CircleZero>,
    /// Positions in `zeros` of the index-0 generators (rows).
    pub minima: Vec<usize>,
    /// Positions in `zeros` of the index-1 generators (columns).
    pub maxima: Vec<usize>,
    /// `∂ : C_1 → C_0`.
    pub differential: LaurentMatrix,
    pub betti: NovikovBetti,
    pub period: i64,
}

/// Samples per unit of the highest frequency when bracketing zeros.
const SAMPLES_PER_FREQ: usize = 256;

fn bisect(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Sign changes of `g` on the periodic grid, refined by bisection.
fn periodic_roots(g: &dyn Fn(f64) -> f64, samples: usize) -> Vec<f64> {
    let step = TAU / samples as f64;
    let vals: Vec<f64> = (0..samples).map(|i| g(i as f64 * step)).collect();
    let mut roots = Vec::new();
    for i in 0..samples {
        let (a, b) = (i as f64 * step, (i + 1) as f64 * step);
        let (ga, gb) = (vals[i], vals[(i + 1) % samples]);
        if ga == 0.0 {
            roots.push(a);
        } else if gb != 0.0 && (ga < 0.0) != (gb < 0.0) {
            roots.push(bisect(g, a, b).rem_euclid(TAU));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Zeros of `f` on `[0, 2π)`, with a typed error for degenerate zeros.
pub fn circle_zeros(eta: &Form) -> Result<Vec<CircleZero>, HomologyError> {
    if eta.angles() != 1 || eta.lines() != 0 || (eta.degree() != 1 && !eta.is_zero()) {
        return Err(HomologyError::NotACircleForm(format!(
            "expected a 1-form on T^1, found degree {} on T^{} × R^{}",
            eta.degree(),
            eta.angles(),
            eta.lines()
        )));
    }
    let f = eta.component(&[0]);
    if f.is_zero() {
        return Err(HomologyError::DegenerateZero { theta: 0.0 });
    }
    let df = f.partial(0);
    let scale = 1.0 + f.sup_bound(0.0);
    let tol = 1e-9 * scale;
    let samples = SAMPLES_PER_FREQ * (f.max_frequency().max(1) as usize);
    let fv = |t: f64| f.eval(&[t]);
    let dfv = |t: f64| df.eval(&[t]);

    // A multiple zero is a critical point of f where f also vanishes.
    for c in periodic_roots(&dfv, samples) {
        if fv(c).abs() < tol {
            return Err(HomologyError::DegenerateZero { theta: c });
        }
    }
    let mut zeros = Vec::new();
    for theta in periodic_roots(&fv, samples) {
        let d = dfv(theta);
        if d.abs() < tol {
            return Err(HomologyError::DegenerateZero { theta });
        }
        zeros.push(CircleZero {
            theta,
            derivative: d,
            index: usize::from(d < 0.0),
        });
    }
    Ok(zeros)
}

/// Builds the Morse–Novikov complex of `η = f(θ)dθ` in the integral class
/// `period`, whose sign must agree with the sign of `∫f`.
pub fn circle_morse_novikov(eta: &Form, period: i64, field: FieldTag) -> Result<CircleMorseNovikov, HomologyError> {
    let zeros = circle_zeros(eta)?;
    let mean = eta.component(&[0]).constant_coefficient();
    let consistent = match period.signum() {
        0 => mean.is_zero(),
        1 => mean.is_positive(),
        _ => mean.is_negative(),
    };
    if !consistent {
        return Err(HomologyError::PeriodMismatch {
            period,
            mean: num_traits::ToPrimitive::to_f64(&mean).unwrap_or(f64::NAN),
        });
    }
    let n = zeros.len();
    let minima: Vec<usize> = (0..n).filter(|&i| zeros[i].index == 0).collect();
    let maxima: Vec<usize> = (0..n).filter(|&i| zeros[i].index == 1).collect();
    let mut row_of = vec![usize::MAX; n];
    for (r, &i) in minima.iter().enumerate() {
        row_of[i] = r;
    }
    let mut d = LaurentMatrix::zeros(field, minima.len(), maxima.len());
    for (col, &j) in maxima.iter().enumerate() {
        let (fwd, k_fwd) = if j + 1 == n { (0, 1) } else { (j + 1, 0) };
        let (bwd, k_bwd) = if j == 0 { (n - 1, -1) } else { (j - 1, 0) };
        if zeros[fwd].index != 0 || zeros[bwd].index != 0 {
            return Err(HomologyError::DegenerateZero { theta: zeros[j].theta });
        }
        d.accumulate(row_of[fwd], col, &LaurentPoly::monomial(field, 1, k_fwd * period));
        d.accumulate(row_of[bwd], col, &LaurentPoly::monomial(field, -1, k_bwd * period));
    }
    let rank = d.rank();
    let betti = NovikovBetti {
        betti: vec![minima.len() - rank, maxima.len() - rank],
        field,
    };
    Ok(CircleMorseNovikov {
        zeros,
        minima,
        maxima,
        differential: d,
        betti,
        period,
    })
}

/// The circle subdivided at `vertices` points, edge `i` joining vertex `i`
/// to `i + 1`, with the whole class carried by the closing edge.
pub fn subdivision_complex(vertices: usize, period: i64) -> (CellComplex, Cocycle) {
    let n = vertices.max(1);
    let mut values = vec![0; n];
    values[n - 1] = period;
    (CellComplex::subdivided_circle(n), Cocycle::integral(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::parse_one_form;
    use crate::novikov::novikov_betti;

    fn form(s: &str) -> Form {
        parse_one_form(s, 1).unwrap()
    }

    #[test]
    fn nonvanishing_form() {
        let mn = circle_morse_novikov(&form("dq"), 1, FieldTag::Rational).unwrap();
        assert!(mn.zeros.is_empty());
        assert_eq!(mn.betti.betti, vec![0, 0]);
    }

    #[test]
    fn exact_sine_form() {
        let mn = circle_morse_novikov(&form("sin(q) dq"), 0, FieldTag::Rational).unwrap();
        assert_eq!(mn.zeros.len(), 2);
        assert!(mn.differential.is_zero());
        assert_eq!(mn.betti.betti, vec![1, 1]);
        assert_eq!(mn.zeros[0].index, 0);
        assert_eq!(mn.zeros[1].index, 1);
        assert!((mn.zeros[1].theta - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn positive_form_class_two() {
        let mn = circle_morse_novikov(&form("2 dq + cos(q) dq"), 2, FieldTag::Rational).unwrap();
        assert_eq!(mn.betti.betti, vec![0, 0]);
    }

    #[test]
    fn agrees_with_subdivision() {
        let eta = form("0.5 dq + sin(q) dq");
        let mn = circle_morse_novikov(&eta, 1, FieldTag::Rational).unwrap();
        assert_eq!(mn.zeros.len(), 2);
        let (cx, c) = subdivision_complex(mn.zeros.len(), 1);
        assert_eq!(novikov_betti(&cx, &c, FieldTag::Rational).unwrap().betti, mn.betti.betti);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            circle_morse_novikov(&form("sin(q) dq"), 1, FieldTag::Rational),
            Err(HomologyError::PeriodMismatch { .. })
        ));
        // 1 + cos θ has a double zero at π.
        assert!(matches!(
            circle_morse_novikov(&form("dq + cos(q) dq"), 1, FieldTag::Rational),
            Err(HomologyError::DegenerateZero { .. })
        ));
    }
}
