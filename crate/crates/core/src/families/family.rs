use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde_json::Value;

use super::FamilyError;
use crate::calculus::{parse_coeff_json, parse_function, Form, TrigPoly};

/// Value, gradient and Hessian at a point of `Tⁿ × Rᵐ` (angles first).
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl Jet {
    fn zeros(d: usize) -> Self {
        Jet {
            value: 0.0,
            grad: DVector::zeros(d),
            hess: DMatrix::zeros(d, d),
        }
    }
}

/// A function on `Tⁿ × Rᵐ` with analytic second-order jets.
pub trait FamilyFunction: Sync {
    fn base_dim(&self) -> usize;

    fn fiber_dim(&self) -> usize;

    /// Half-width of the fiber box used for seeding searches.
    fn fiber_radius(&self) -> f64;

    /// Index of the quadratic form at infinity.
    fn quad_index(&self) -> usize;

    fn jet(&self, x: &[f64]) -> Jet;

    fn value(&self, x: &[f64]) -> f64 {
        self.jet(x).value
    }

    fn dim(&self) -> usize {
        self.base_dim() + self.fiber_dim()
    }
}

impl<T: FamilyFunction + ?Sized> FamilyFunction for &T {
    fn base_dim(&self) -> usize {
        (**self).base_dim()
    }
    fn fiber_dim(&self) -> usize {
        (**self).fiber_dim()
    }
    fn fiber_radius(&self) -> f64 {
        (**self).fiber_radius()
    }
    fn quad_index(&self) -> usize {
        (**self).quad_index()
    }
    fn jet(&self, x: &[f64]) -> Jet {
        (**self).jet(x)
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
}

/// A trig polynomial on `Tⁿ` with its first and second partials.
#[derive(Clone, Debug)]
pub struct TrigJet {
    f: TrigPoly,
    d: Vec<TrigPoly>,
    dd: Vec<Vec<TrigPoly>>,
}

impl TrigJet {
    pub fn new(f: TrigPoly) -> Self {
        let n = f.angles();
        let d: Vec<TrigPoly> = (0..n).map(|i| f.partial(i)).collect();
        let dd = d.iter().map(|di| (0..n).map(|j| di.partial(j)).collect()).collect();
        TrigJet { f, d, dd }
    }

    pub fn poly(&self) -> &TrigPoly {
        &self.f
    }

    pub fn eval(&self, q: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = self.d.len();
        (
            self.f.eval(q),
            DVector::from_fn(n, |i, _| self.d[i].eval(q)),
            DMatrix::from_fn(n, n, |i, j| self.dd[i][j].eval(q)),
        )
    }
}

/// One perturbation term `h(q) · ξ^α · ρ(ξ)`.
#[derive(Clone, Debug)]
pub struct CoreTerm {
    coeff: TrigJet,
    xi_powers: Vec<u32>,
}

impl CoreTerm {
    pub fn new(coeff: TrigPoly, xi_powers: Vec<u32>) -> Self {
        CoreTerm {
            coeff: TrigJet::new(coeff),
            xi_powers,
        }
    }
}

/// `F(q, ξ) = ξᵀAξ + Σ h_j(q) ξ^{α_j} ρ(ξ)` on `Tⁿ × Rᵐ`, where
/// `ρ(ξ) = exp(1 − 1/(1 − |ξ|²/R²))` inside the ball of radius `R` and
/// `0` outside. For `m = 0` the bump is omitted and `F = Σ h_j(q)`.
#[derive(Clone, Debug)]
pub struct GeneratingFamily {
    n: usize,
    m: usize,
    quad: DMatrix<f64>,
    ball_radius: f64,
    core: Vec<CoreTerm>,
    index: usize,
}

/// Value, gradient and Hessian of the bump as a function of `ξ`.
fn bump(xi: &[f64], r: f64) -> (f64, DVector<f64>, DMatrix<f64>) {
    let m = xi.len();
    let r2 = r * r;
    let s: f64 = xi.iter().map(|v| v * v).sum::<f64>() / r2;
    if s >= 1.0 {
        return (0.0, DVector::zeros(m), DMatrix::zeros(m, m));
    }
    let u = 1.0 / (1.0 - s);
    let rho = (1.0 - u).exp();
    let rho_s = -rho * u * u;
    let rho_ss = rho * u.powi(4) - 2.0 * rho * u.powi(3);
    let ds = DVector::from_fn(m, |i, _| 2.0 * xi[i] / r2);
    let grad = &ds * rho_s;
    let hess = &ds * ds.transpose() * rho_ss + DMatrix::identity(m, m) * (2.0 * rho_s / r2);
    (rho, grad, hess)
}

fn monomial(xi: &[f64], powers: &[u32]) -> (f64, DVector<f64>, DMatrix<f64>) {
    let m = xi.len();
    let pow = |v: f64, e: i64| if e < 0 { 0.0 } else { v.powi(e as i32) };
    let term = |shift: &[i64]| -> f64 {
        let mut acc = 1.0;
        for k in 0..m {
            let e = powers[k] as i64 - shift[k];
            let mut c = 1.0;
            for s in 0..shift[k] {
                c *= (powers[k] as i64 - s) as f64;
            }
            acc *= c * pow(xi[k], e);
        }
        acc
    };
    let mut shift = vec![0i64; m];
    let value = term(&shift);
    let grad = DVector::from_fn(m, |i, _| {
        shift.iter_mut().for_each(|s| *s = 0);
        shift[i] = 1;
        term(&shift)
    });
    let hess = DMatrix::from_fn(m, m, |i, j| {
        shift.iter_mut().for_each(|s| *s = 0);
        shift[i] += 1;
        shift[j] += 1;
        term(&shift)
    });
    (value, grad, hess)
}

impl GeneratingFamily {
    pub fn new(quad: DMatrix<f64>, ball_radius: f64, core: Vec<CoreTerm>, n: usize) -> Result<Self, FamilyError> {
        let m = quad.nrows();
        if quad.ncols() != m {
            return Err(FamilyError::InvalidFamily("quadratic form must be square".into()));
        }
        if (&quad - quad.transpose()).amax() > 1e-12 {
            return Err(FamilyError::InvalidFamily("quadratic form must be symmetric".into()));
        }
        let eig = if m == 0 {
            DVector::zeros(0)
        } else {
            SymmetricEigen::new(quad.clone()).eigenvalues
        };
        if eig.iter().any(|l| l.abs() < 1e-12) {
            return Err(FamilyError::InvalidFamily("quadratic form is degenerate".into()));
        }
        if m > 0 && !(ball_radius > 0.0 && ball_radius.is_finite()) {
            return Err(FamilyError::InvalidFamily("ball radius must be positive".into()));
        }
        if n == 0 {
            return Err(FamilyError::InvalidFamily("the base torus needs at least one angle".into()));
        }
        for t in &core {
            if t.coeff.f.angles() != n || t.coeff.f.lines() != 0 {
                return Err(FamilyError::InvalidFamily(format!("core coefficient must live on T^{n}")));
            }
            if t.xi_powers.len() != m {
                return Err(FamilyError::InvalidFamily(format!(
                    "xi_powers has {} entries, expected {m}",
                    t.xi_powers.len()
                )));
            }
        }
        let index = eig.iter().filter(|l| **l < 0.0).count();
        Ok(GeneratingFamily {
            n,
            m,
            quad,
            ball_radius: if m == 0 { 1.0 } else { ball_radius },
            core,
            index,
        })
    }

    /// `F(q) = h(q)` with no fiber.
    pub fn from_function(h: TrigPoly) -> Result<Self, FamilyError> {
        let n = h.angles();
        Self::new(DMatrix::zeros(0, 0), 1.0, vec![CoreTerm::new(h, vec![])], n)
    }

    pub fn quad(&self) -> &DMatrix<f64> {
        &self.quad
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    /// Largest `|F − ξᵀAξ|` at deterministic sample points outside the ball.
    pub fn deviation_at_infinity(&self) -> f64 {
        if self.m == 0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for k in 0..64 {
            let mut x = vec![0.0; self.n + self.m];
            for (i, xi) in x.iter_mut().enumerate() {
                let a = (k * (i + 3)) as f64 * 0.7;
                *xi = if i < self.n {
                    a % std::f64::consts::TAU
                } else {
                    a.sin()
                };
            }
            let norm = x[self.n..].iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
            let scale = self.ball_radius * (1.0 + 0.05 * (k % 7) as f64 + 1e-9) / norm;
            x[self.n..].iter_mut().for_each(|v| *v *= scale);
            let xi = DVector::from_column_slice(&x[self.n..]);
            let q = (xi.transpose() * &self.quad * &xi)[(0, 0)];
            worst = worst.max((self.value(&x) - q).abs());
        }
        worst
    }

    /// Reads `{ "n", "m", "quad", "ball_radius", "core": [{ "coeff", "xi_powers" }] }`.
    /// A coefficient is a function string such as `"2 + cos(q)"` or a
    /// coefficient JSON object.
    pub fn from_json(v: &Value) -> Result<Self, FamilyError> {
        let bad = |msg: &str| FamilyError::InvalidFamily(msg.to_string());
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| bad("family needs 'n'"))? as usize;
        let m = v.get("m").and_then(Value::as_u64).unwrap_or(0) as usize;
        let quad = match v.get("quad") {
            None => DMatrix::zeros(0, 0),
            Some(Value::Array(rows)) => {
                let mut data = Vec::new();
                for r in rows {
                    let r = r.as_array().ok_or_else(|| bad("quad rows must be arrays"))?;
                    if r.len() != rows.len() {
                        return Err(bad("quad must be square"));
                    }
                    for x in r {
                        data.push(x.as_f64().ok_or_else(|| bad("quad entries must be numbers"))?);
                    }
                }
                DMatrix::from_row_slice(rows.len(), rows.len(), &data)
            }
            Some(_) => return Err(bad("'quad' must be a matrix")),
        };
        if quad.nrows() != m {
            return Err(bad("'quad' size must equal 'm'"));
        }
        let ball_radius = v.get("ball_radius").and_then(Value::as_f64).unwrap_or(1.0);
        let mut core = Vec::new();
        for t in v.get("core").and_then(Value::as_array).ok_or_else(|| bad("family needs a 'core' list"))? {
            let c = t.get("coeff").ok_or_else(|| bad("core term needs 'coeff'"))?;
            let coeff = match c {
                Value::String(s) => parse_function(s, n)?,
                other => parse_coeff_json(other, n, 0)?,
            };
            if coeff.angles() != n {
                return Err(bad("core coefficient uses more angles than 'n'"));
            }
            let powers = match t.get("xi_powers") {
                None => vec![0; m],
                Some(Value::Array(p)) => p
                    .iter()
                    .map(|e| e.as_u64().map(|e| e as u32).ok_or_else(|| bad("xi_powers are non-negative integers")))
                    .collect::<Result<_, _>>()?,
                Some(_) => return Err(bad("'xi_powers' must be a list")),
            };
            core.push(CoreTerm::new(coeff, powers));
        }
        Self::new(quad, ball_radius, core, n)
    }
}

impl FamilyFunction for GeneratingFamily {
    fn base_dim(&self) -> usize {
        self.n
    }

    fn fiber_dim(&self) -> usize {
        self.m
    }

    fn fiber_radius(&self) -> f64 {
        self.ball_radius
    }

    fn quad_index(&self) -> usize {
        self.index
    }

    fn jet(&self, x: &[f64]) -> Jet {
        let (n, m) = (self.n, self.m);
        let (q, xi) = x.split_at(n);
        let mut out = Jet::zeros(n + m);
        if m > 0 {
            let v = DVector::from_column_slice(xi);
            let av = &self.quad * &v;
            out.value = v.dot(&av);
            out.grad.rows_mut(n, m).copy_from(&(av * 2.0));
            out.hess.view_mut((n, n), (m, m)).copy_from(&(&self.quad * 2.0));
        }
        let (rho, drho, ddrho) = if m > 0 {
            bump(xi, self.ball_radius)
        } else {
            (1.0, DVector::zeros(0), DMatrix::zeros(0, 0))
        };
        if rho == 0.0 {
            return out;
        }
        for t in &self.core {
            let (mono, dmono, ddmono) = monomial(xi, &t.xi_powers);
            let p = mono * rho;
            let dp = &dmono * rho + &drho * mono;
            let ddp = &ddmono * rho + &dmono * drho.transpose() + &drho * dmono.transpose() + &ddrho * mono;
            let (h, dh, ddh) = t.coeff.eval(q);
            out.value += h * p;
            for i in 0..n {
                out.grad[i] += dh[i] * p;
                for j in 0..n {
                    out.hess[(i, j)] += ddh[(i, j)] * p;
                }
                for a in 0..m {
                    out.hess[(i, n + a)] += dh[i] * dp[a];
                    out.hess[(n + a, i)] += dh[i] * dp[a];
                }
            }
            for a in 0..m {
                out.grad[n + a] += h * dp[a];
                for b in 0..m {
                    out.hess[(n + a, n + b)] += h * ddp[(a, b)];
                }
            }
        }
        out
    }
}

/// `e^f F` for a function `f` on the base.
pub struct Gauged<F> {
    inner: F,
    f: TrigJet,
}

impl<F: FamilyFunction> Gauged<F> {
    pub fn new(inner: F, f: TrigPoly) -> Result<Self, FamilyError> {
        if f.angles() != inner.base_dim() || f.lines() != 0 {
            return Err(FamilyError::InvalidFamily("gauge function must live on the base torus".into()));
        }
        Ok(Gauged {
            inner,
            f: TrigJet::new(f),
        })
    }
}

impl<F: FamilyFunction> FamilyFunction for Gauged<F> {
    fn base_dim(&self) -> usize {
        self.inner.base_dim()
    }
    fn fiber_dim(&self) -> usize {
        self.inner.fiber_dim()
    }
    fn fiber_radius(&self) -> f64 {
        self.inner.fiber_radius()
    }
    fn quad_index(&self) -> usize {
        self.inner.quad_index()
    }

    fn jet(&self, x: &[f64]) -> Jet {
        let n = self.base_dim();
        let d = self.dim();
        let j = self.inner.jet(x);
        let (f, df, ddf) = self.f.eval(&x[..n]);
        let e = f.exp();
        let mut g = DVector::zeros(d);
        g.rows_mut(0, n).copy_from(&df);
        let mut gg = DMatrix::zeros(d, d);
        gg.view_mut((0, 0), (n, n)).copy_from(&ddf);
        let hess = ((&g * g.transpose() + gg) * j.value + &g * j.grad.transpose() + &j.grad * g.transpose() + j.hess) * e;
        Jet {
            value: e * j.value,
            grad: (&g * j.value + &j.grad) * e,
            hess,
        }
    }
}

/// `F(q, ξ) + sign·ξ'²` with one extra fiber coordinate `ξ'` (last).
pub struct Stabilized<F> {
    inner: F,
    sign: f64,
}

impl<F: FamilyFunction> Stabilized<F> {
    pub fn positive(inner: F) -> Self {
        Stabilized { inner, sign: 1.0 }
    }

    pub fn negative(inner: F) -> Self {
        Stabilized { inner, sign: -1.0 }
    }
}

impl<F: FamilyFunction> FamilyFunction for Stabilized<F> {
    fn base_dim(&self) -> usize {
        self.inner.base_dim()
    }
    fn fiber_dim(&self) -> usize {
        self.inner.fiber_dim() + 1
    }
    fn fiber_radius(&self) -> f64 {
        self.inner.fiber_radius()
    }
    fn quad_index(&self) -> usize {
        self.inner.quad_index() + usize::from(self.sign < 0.0)
    }

    fn jet(&self, x: &[f64]) -> Jet {
        let d = self.dim();
        let s = x[d - 1];
        let j = self.inner.jet(&x[..d - 1]);
        let mut grad = DVector::zeros(d);
        grad.rows_mut(0, d - 1).copy_from(&j.grad);
        grad[d - 1] = 2.0 * self.sign * s;
        let mut hess = DMatrix::zeros(d, d);
        hess.view_mut((0, 0), (d - 1, d - 1)).copy_from(&j.hess);
        hess[(d - 1, d - 1)] = 2.0 * self.sign;
        Jet {
            value: j.value + self.sign * s * s,
            grad,
            hess,
        }
    }
}

/// `−F`, which swaps the sublevel regions.
pub struct Negated<F>(pub F);

impl<F: FamilyFunction> FamilyFunction for Negated<F> {
    fn base_dim(&self) -> usize {
        self.0.base_dim()
    }
    fn fiber_dim(&self) -> usize {
        self.0.fiber_dim()
    }
    fn fiber_radius(&self) -> f64 {
        self.0.fiber_radius()
    }
    fn quad_index(&self) -> usize {
        self.0.fiber_dim() - self.0.quad_index()
    }
    fn jet(&self, x: &[f64]) -> Jet {
        let j = self.0.jet(x);
        Jet {
            value: -j.value,
            grad: -j.grad,
            hess: -j.hess,
        }
    }
}

/// A closed 1-form on `Tⁿ` with its derivative matrix `∂_j β_i`.
#[derive(Clone, Debug)]
pub struct BetaJet {
    form: Form,
    comps: Vec<TrigJet>,
}

impl BetaJet {
    pub fn new(beta: &Form, n: usize) -> Result<Self, FamilyError> {
        if beta.lines() != 0 || (beta.degree() != 1 && !beta.is_zero()) {
            return Err(FamilyError::InvalidFamily("β must be a 1-form on the base torus".into()));
        }
        if beta.angles() > n {
            return Err(FamilyError::DimensionMismatch {
                family: n,
                beta: beta.angles(),
            });
        }
        let comps: Vec<TrigJet> = (0..n)
            .map(|i| {
                let c = if beta.is_zero() || beta.angles() != n {
                    None
                } else {
                    Some(beta.component(&[i]))
                };
                TrigJet::new(c.unwrap_or_else(|| TrigPoly::zero(n, 0)))
            })
            .collect();
        if beta.angles() != n && !beta.is_zero() {
            return Err(FamilyError::DimensionMismatch {
                family: n,
                beta: beta.angles(),
            });
        }
        if !beta.is_zero() && !beta.is_closed() {
            return Err(crate::calculus::CalculusError::EtaNotClosed.into());
        }
        Ok(BetaJet {
            form: beta.clone(),
            comps,
        })
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    /// `β(q)` and `∂_j β_i(q)`.
    pub fn eval(&self, q: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.comps.len();
        let mut b = DVector::zeros(n);
        let mut db = DMatrix::zeros(n, n);
        for (i, c) in self.comps.iter().enumerate() {
            let (v, d, _) = c.eval(q);
            b[i] = v;
            for j in 0..n {
                db[(i, j)] = d[j];
            }
        }
        (b, db)
    }

    /// `β + df`.
    pub fn gauged(&self, f: &TrigPoly) -> Result<Self, FamilyError> {
        let n = self.dim();
        let df = Form::function(f.clone()).d();
        let base = if self.form.is_zero() {
            Form::zero(&crate::calculus::Space::torus(n), 1)
        } else {
            self.form.clone()
        };
        Self::new(&base.add(&df), n)
    }
}
