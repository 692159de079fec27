use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::form::{add_num, scale_num, NumForm};
use super::{CalculusError, ExpSeries, Form, TrigPoly};

/// Scalar weight of a [`SemiForm`] term.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    One,
    /// `E_N(g)`, the truncated `e^g`.
    Exp(ExpSeries),
    /// `E_{N−1}(g)`, the derivative factor of `E_N(g)`.
    ExpLower(ExpSeries),
}

impl Weight {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Weight::One => 1.0,
            Weight::Exp(e) => e.eval(x).0,
            Weight::ExpLower(e) => e.eval(x).1,
        }
    }
}

/// A form `Σ w_i(x) β_i` with symbolic `β_i` and numerically evaluated
/// exponential weights. This is how `e^f ω` and `e^f λ` are carried after
/// a gauge transformation.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiForm {
    degree: usize,
    terms: Vec<(Weight, Form)>,
}

impl SemiForm {
    pub fn plain(form: Form) -> Self {
        SemiForm {
            degree: form.degree(),
            terms: vec![(Weight::One, form)],
        }
    }

    pub fn weighted(weight: ExpSeries, form: Form) -> Self {
        SemiForm {
            degree: form.degree(),
            terms: vec![(Weight::Exp(weight), form)],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[(Weight, Form)] {
        &self.terms
    }

    /// The symbolic form if no term carries a weight.
    pub fn as_plain(&self) -> Option<Form> {
        let mut it = self.terms.iter();
        let (w, first) = it.next()?;
        if *w != Weight::One {
            return None;
        }
        let mut acc = first.clone();
        for (w, f) in it {
            if *w != Weight::One {
                return None;
            }
            acc = acc.add(f);
        }
        Some(acc)
    }

    pub fn add(&self, other: &SemiForm) -> SemiForm {
        assert_eq!(self.degree, other.degree);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        SemiForm {
            degree: self.degree,
            terms,
        }
    }

    pub fn neg(&self) -> SemiForm {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> SemiForm {
        SemiForm {
            degree: self.degree,
            terms: self.terms.iter().map(|(w, f)| (w.clone(), f.scale(c))).collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> NumForm {
        let mut out = NumForm::new();
        for (w, f) in &self.terms {
            out = add_num(&out, &scale_num(&f.eval(x), w.eval(x)));
        }
        out.retain(|_, v| *v != 0.0);
        out
    }

    pub fn eval_vec(&self, x: &[f64]) -> DVector<f64> {
        let mut v: Option<DVector<f64>> = None;
        for (w, f) in &self.terms {
            let term = f.eval_vec(x) * w.eval(x);
            v = Some(match v {
                Some(acc) => acc + term,
                None => term,
            });
        }
        v.expect("semi-form has at least one term")
    }

    pub fn eval_matrix(&self, x: &[f64]) -> DMatrix<f64> {
        let mut m: Option<DMatrix<f64>> = None;
        for (w, f) in &self.terms {
            let term = f.eval_matrix(x) * w.eval(x);
            m = Some(match m {
                Some(acc) => acc + term,
                None => term,
            });
        }
        m.expect("semi-form has at least one term")
    }

    /// `d_η` using `d E_N(g) = E_{N−1}(g) dg`. Terms already carrying an
    /// `E_{N−1}` weight cannot be differentiated again.
    pub fn d_eta(&self, eta: &Form) -> Result<SemiForm, CalculusError> {
        super::form::check_lee_form(eta)?;
        let mut terms = Vec::new();
        for (w, f) in &self.terms {
            match w {
                Weight::One => terms.push((Weight::One, f.d_eta_unchecked(eta))),
                Weight::Exp(e) => {
                    let dg = Form::function(e.log().clone()).d();
                    terms.push((Weight::ExpLower(e.clone()), dg.wedge(f)));
                    terms.push((Weight::Exp(e.clone()), f.d_eta_unchecked(eta)));
                }
                Weight::ExpLower(_) => {
                    return Err(CalculusError::Unsupported(
                        "second derivative of a truncated exponential weight".into(),
                    ))
                }
            }
        }
        Ok(SemiForm {
            degree: self.degree + 1,
            terms,
        })
    }

    /// Multiplies by `e^f`, merging with existing exponential weights.
    pub fn reweight(&self, f: &TrigPoly, line_box: f64) -> Result<SemiForm, CalculusError> {
        let mut terms = Vec::new();
        for (w, form) in &self.terms {
            let log = match w {
                Weight::One => f.clone(),
                Weight::Exp(e) => e.log().add(f),
                Weight::ExpLower(_) => {
                    return Err(CalculusError::Unsupported(
                        "gauge transformation of a derivative weight".into(),
                    ))
                }
            };
            let w = if log.is_zero() {
                Weight::One
            } else {
                Weight::Exp(ExpSeries::new(log, line_box))
            };
            terms.push((w, form.clone()));
        }
        Ok(SemiForm {
            degree: self.degree,
            terms,
        })
    }
}

/// A vector field in the coordinate frame `∂_q, ∂_x`.
#[derive(Clone, Debug, PartialEq)]
pub enum VectorFieldExpr {
    /// Exact components.
    Symbolic(Vec<TrigPoly>),
    /// The solution `X` of `X⌟ω = rhs`, solved pointwise.
    Dual { omega: SemiForm, rhs: SemiForm },
    /// `(1 − λ(R))∂_z − R` on `M × R` for a field `R` on `M`; `z` is the
    /// last coordinate.
    Reeb { lee: Box<VectorFieldExpr>, lambda: Form },
}

impl VectorFieldExpr {
    pub fn dim(&self) -> usize {
        match self {
            VectorFieldExpr::Symbolic(c) => c.len(),
            VectorFieldExpr::Dual { omega, .. } => omega.terms()[0].1.dim(),
            VectorFieldExpr::Reeb { lee, .. } => lee.dim() + 1,
        }
    }

    pub fn components(&self) -> Option<&[TrigPoly]> {
        match self {
            VectorFieldExpr::Symbolic(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, VectorFieldExpr::Symbolic(_))
    }

    pub fn eval(&self, x: &[f64]) -> Result<DVector<f64>, CalculusError> {
        match self {
            VectorFieldExpr::Symbolic(c) => Ok(DVector::from_iterator(c.len(), c.iter().map(|p| p.eval(x)))),
            VectorFieldExpr::Dual { omega, rhs } => {
                let w = omega.eval_matrix(x);
                let r = rhs.eval_vec(x);
                solve_dual(&w, &r).ok_or_else(|| CalculusError::Singular { point: x.to_vec() })
            }
            VectorFieldExpr::Reeb { lee, lambda } => {
                let n = lee.dim();
                let r = lee.eval(&x[..n])?;
                let l = lambda.eval_vec(&x[..n]);
                let mut out = DVector::zeros(n + 1);
                for i in 0..n {
                    out[i] = -r[i];
                }
                out[n] = 1.0 - l.dot(&r);
                Ok(out)
            }
        }
    }
}

/// Solves `X⌟ω = r`, i.e. `Wᵀ X = r` with `W` antisymmetric, so `X = −W⁻¹ r`.
pub fn solve_dual(w: &DMatrix<f64>, r: &DVector<f64>) -> Option<DVector<f64>> {
    if !is_nondegenerate(w) {
        return None;
    }
    let lu = (-w).lu();
    lu.solve(r)
}

/// Determinant test for a square matrix, relative to its largest entry
/// once that exceeds one.
pub fn is_nondegenerate(w: &DMatrix<f64>) -> bool {
    let n = w.nrows();
    if n == 0 {
        return true;
    }
    let scale = w.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let det = (w / scale).determinant();
    det.abs() > 1e-10
}

/// Exact solve of `X⌟ω = rhs` for `ω` with constant rational coefficients.
pub(crate) fn symbolic_dual(omega: &Form, rhs: &Form) -> Result<Vec<TrigPoly>, CalculusError> {
    let n = omega.dim();
    let mut w = vec![vec![BigRational::zero(); n]; n];
    for (k, c) in omega.terms() {
        let c = c.as_constant().expect("constant coefficients");
        w[k[0]][k[1]] = c.clone();
        w[k[1]][k[0]] = -c;
    }
    // M = −W⁻¹ by Gauss–Jordan on [−W | I].
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = w[i].iter().map(|v| -v.clone()).collect();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(CalculusError::Singular { point: vec![] })?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (v, p) in a[r].iter_mut().zip(pivot_row) {
                    *v -= &factor * p;
                }
            }
        }
    }
    let r = rhs.components();
    Ok((0..n)
        .map(|i| {
            (0..n).fold(TrigPoly::zero(omega.angles(), omega.lines()), |acc, j| {
                acc.add(&r[j].scale(&a[i][n + j]))
            })
        })
        .collect())
}
