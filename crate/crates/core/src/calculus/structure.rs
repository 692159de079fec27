use nalgebra::DVector;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::field::{is_nondegenerate, symbolic_dual};
use super::form::{add_num, interior_num, max_abs_diff, scale_num, wedge_num, NumForm};
use super::random::{random_field, random_form, random_trig_poly};
use super::{CalculusError, ExpSeries, Form, Grid, SemiForm, Space, TrigPoly, VectorFieldExpr};

/// Grid tolerance for identities that are exact up to floating point and
/// the certified exponential truncation.
pub const GRID_TOL: f64 = 1e-9;

/// A conformal symplectic pair `(η, ω)` on `Tᵃ × Rˡ`, with `ω` possibly
/// carrying a gauge weight `e^f`.
#[derive(Clone, Debug)]
pub struct ConformalStructure {
    space: Space,
    eta: Form,
    omega: SemiForm,
    grid: Grid,
}

impl ConformalStructure {
    /// Checks `dη = 0` and `d_η ω = 0` exactly and nondegeneracy on the grid.
    pub fn new(space: Space, eta: Form, omega: Form, grid: Grid) -> Result<Self, CalculusError> {
        check_space(&space, &eta)?;
        check_space(&space, &omega)?;
        if omega.degree() != 2 {
            return Err(CalculusError::Degree {
                expected: 2,
                found: omega.degree(),
            });
        }
        let d_omega = omega.d_eta(&eta)?;
        if !d_omega.is_zero() {
            return Err(CalculusError::NotConformal(format!(
                "d_η ω = {}",
                d_omega.fmt_with(&space)
            )));
        }
        let st = ConformalStructure {
            space,
            eta,
            omega: SemiForm::plain(omega),
            grid,
        };
        st.check_nondegenerate()?;
        Ok(st)
    }

    /// `T*Tⁿ` with Lee form `β` pulled back from `Tⁿ` and `ω = d_β λ_std`,
    /// `λ_std = Σ p_i dq_i`. Returns the structure and `λ_std`.
    pub fn cotangent(beta: &Form, grid: Grid) -> Result<(Self, Form), CalculusError> {
        let n = beta.angles();
        if beta.lines() != 0 {
            return Err(CalculusError::SpaceMismatch(
                "the Lee form of a cotangent model lives on the base torus".into(),
            ));
        }
        let space = Space::cotangent(n);
        let eta = if beta.is_zero() {
            Form::zero(&space, 1)
        } else {
            beta.extend_lines(n)
        };
        let lambda = tautological_form(n);
        let omega = lambda.d_eta(&eta)?;
        Ok((Self::new(space, eta, omega, grid)?, lambda))
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn eta(&self) -> &Form {
        &self.eta
    }

    pub fn omega(&self) -> &SemiForm {
        &self.omega
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn with_grid(mut self, grid: Grid) -> Self {
        self.grid = grid;
        self
    }

    fn grid_points(&self) -> Vec<Vec<f64>> {
        self.grid.points(&self.space)
    }

    fn check_nondegenerate(&self) -> Result<(), CalculusError> {
        let bad = self
            .grid_points()
            .into_par_iter()
            .find_first(|x| !is_nondegenerate(&self.omega.eval_matrix(x)));
        match bad {
            Some(point) => Err(CalculusError::Degenerate { point }),
            None => Ok(()),
        }
    }

    /// Largest coefficient of `d_η ω` over the grid.
    pub fn closedness_residual(&self) -> Result<f64, CalculusError> {
        let d = self.omega.d_eta(&self.eta)?;
        Ok(self
            .grid_points()
            .par_iter()
            .map(|x| max_abs_diff(&d.eval(x), &NumForm::new()))
            .reduce(|| 0.0, f64::max))
    }

    /// Brings a function on the base torus (or on the full space) to the
    /// structure's coordinates.
    pub fn lift_function(&self, f: &TrigPoly) -> Result<TrigPoly, CalculusError> {
        if f.angles() != self.space.angles() || f.lines() > self.space.lines() {
            return Err(CalculusError::SpaceMismatch(format!(
                "function on T^{} × R^{} does not live on {:?}",
                f.angles(),
                f.lines(),
                self.space.names()
            )));
        }
        Ok(f.extend_lines(self.space.lines() - f.lines()))
    }

    pub fn lift_form(&self, beta: &Form) -> Result<Form, CalculusError> {
        if beta.angles() != self.space.angles() || beta.lines() > self.space.lines() {
            return Err(CalculusError::SpaceMismatch("form does not live on this space".into()));
        }
        Ok(beta.extend_lines(self.space.lines() - beta.lines()))
    }
}

fn check_space(space: &Space, form: &Form) -> Result<(), CalculusError> {
    if form.angles() != space.angles() || form.lines() != space.lines() {
        return Err(CalculusError::SpaceMismatch(format!(
            "form on T^{} × R^{} given for {:?}",
            form.angles(),
            form.lines(),
            space.names()
        )));
    }
    Ok(())
}

/// `λ_std = Σ p_i dq_i` on `T*Tⁿ`.
pub fn tautological_form(n: usize) -> Form {
    let mut lambda = Form::zero_on(n, n, 1);
    for i in 0..n {
        lambda = lambda.add(&Form::monomial(&[i], TrigPoly::line_power(n, n, i, 1)));
    }
    lambda
}

/// `(η, ω) ↦ (η + df, e^f ω)`, with `e^f` truncated as in [`ExpSeries`].
/// Closedness of the result is re-verified on the grid.
pub fn gauge_transform(st: &ConformalStructure, f: &TrigPoly) -> Result<ConformalStructure, CalculusError> {
    let f = st.lift_function(f)?;
    let eta = st.eta.add(&Form::function(f.clone()).d());
    let omega = st.omega.reweight(&f, st.grid.line_box)?;
    let out = ConformalStructure {
        space: st.space.clone(),
        eta,
        omega,
        grid: st.grid,
    };
    let residual = out.closedness_residual()?;
    if residual > GRID_TOL {
        return Err(CalculusError::NotConformal(format!(
            "gauge-transformed d_η ω has grid residual {residual:e}"
        )));
    }
    out.check_nondegenerate()?;
    Ok(out)
}

/// `e^f β` as a semi-symbolic form.
pub fn gauge_form(st: &ConformalStructure, beta: &SemiForm, f: &TrigPoly) -> Result<SemiForm, CalculusError> {
    beta.reweight(&st.lift_function(f)?, st.grid.line_box)
}

fn solve(st: &ConformalStructure, rhs: SemiForm) -> Result<VectorFieldExpr, CalculusError> {
    if let (Some(omega), Some(r)) = (st.omega.as_plain(), rhs.as_plain()) {
        if omega.has_constant_coefficients() {
            let r = if r.is_zero() { Form::zero(&st.space, 1) } else { r };
            return Ok(VectorFieldExpr::Symbolic(symbolic_dual(&omega, &r)?));
        }
    }
    Ok(VectorFieldExpr::Dual {
        omega: st.omega.clone(),
        rhs,
    })
}

/// `X_H⌟ω = −d_η H`.
pub fn hamiltonian_vector_field(st: &ConformalStructure, h: &TrigPoly) -> Result<VectorFieldExpr, CalculusError> {
    let h = st.lift_function(h)?;
    let rhs = Form::function(h).d_eta(&st.eta)?.neg();
    solve(st, SemiForm::plain(rhs))
}

/// Hamiltonian field of a weighted function such as `e^f H`.
pub fn hamiltonian_vector_field_semi(st: &ConformalStructure, h: &SemiForm) -> Result<VectorFieldExpr, CalculusError> {
    if h.degree() != 0 {
        return Err(CalculusError::Degree {
            expected: 0,
            found: h.degree(),
        });
    }
    solve(st, h.d_eta(&st.eta)?.neg())
}

/// The Lee field `R_η = X_1`, so `R_η⌟ω = η`.
pub fn lee_vector_field(st: &ConformalStructure) -> Result<VectorFieldExpr, CalculusError> {
    hamiltonian_vector_field(st, &TrigPoly::from_int(st.space.angles(), st.space.lines(), 1))
}

/// Checks `d_η λ = ω`, exactly when both are symbolic and on the grid
/// otherwise.
pub fn check_primitive(st: &ConformalStructure, lambda: &SemiForm) -> Result<(), CalculusError> {
    if lambda.degree() != 1 {
        return Err(CalculusError::Degree {
            expected: 1,
            found: lambda.degree(),
        });
    }
    if let (Some(l), Some(omega)) = (lambda.as_plain(), st.omega.as_plain()) {
        check_space(&st.space, &l)?;
        return if l.d_eta(&st.eta)? == omega {
            Ok(())
        } else {
            Err(CalculusError::NotPrimitive("d_η λ ≠ ω".into()))
        };
    }
    let d = lambda.d_eta(&st.eta)?;
    let residual = st
        .grid_points()
        .par_iter()
        .map(|x| max_abs_diff(&d.eval(x), &st.omega.eval(x)))
        .reduce(|| 0.0, f64::max);
    if residual > GRID_TOL {
        return Err(CalculusError::NotPrimitive(format!("grid residual {residual:e}")));
    }
    Ok(())
}

/// `Z_λ⌟ω = λ` for a primitive `d_η λ = ω`.
pub fn liouville_vector_field(st: &ConformalStructure, lambda: &SemiForm) -> Result<VectorFieldExpr, CalculusError> {
    check_primitive(st, lambda)?;
    solve(st, lambda.clone())
}

/// Reeb field of the contactization `α = dz − zη − λ` on `M × R`.
#[derive(Clone, Debug)]
pub struct ReebField {
    pub field: VectorFieldExpr,
    pub alpha: Form,
    pub space: Space,
    /// `max |α(R) − 1|` over the grid.
    pub alpha_residual: f64,
    /// `max |R⌟dα|` over the grid.
    pub kernel_residual: f64,
}

/// `R_α = (1 − λ(R_η))∂_z − R_η`, verified on the grid of `M × [−b, b]`.
pub fn contactization_reeb(st: &ConformalStructure, lambda: &Form) -> Result<ReebField, CalculusError> {
    check_primitive(st, &SemiForm::plain(lambda.clone()))?;
    let lee = lee_vector_field(st)?;
    let n = st.space.dim();
    let space = st.space.with_line("z");
    let z = TrigPoly::line_power(space.angles(), space.lines(), space.lines() - 1, 1);
    let eta_e = st.eta.extend_lines(1);
    let lambda_e = lambda.extend_lines(1);
    let dz = Form::monomial(&[n], TrigPoly::from_int(space.angles(), space.lines(), 1));
    let alpha = dz.sub(&eta_e.mul_fn(&z)).sub(&lambda_e);
    let field = match lee.components() {
        Some(r) => {
            let mut comps: Vec<TrigPoly> = r.iter().map(|c| c.neg().extend_lines(1)).collect();
            let lr = lambda
                .components()
                .iter()
                .zip(r)
                .fold(TrigPoly::zero(st.space.angles(), st.space.lines()), |acc, (l, c)| acc.add(&l.mul(c)));
            comps.push(TrigPoly::from_int(st.space.angles(), st.space.lines(), 1).sub(&lr).extend_lines(1));
            VectorFieldExpr::Symbolic(comps)
        }
        None => VectorFieldExpr::Reeb {
            lee: Box::new(lee),
            lambda: lambda.clone(),
        },
    };
    let d_alpha = alpha.d();
    let half_dim = n / 2;
    let mut top = alpha.clone();
    for _ in 0..half_dim {
        top = top.wedge(&d_alpha);
    }
    let points = st.grid.points(&space);
    let results: Vec<Result<(f64, f64), CalculusError>> = points
        .par_iter()
        .map(|x| {
            let vol = top.eval(x).values().fold(0.0f64, |m, v| m.max(v.abs()));
            if vol < 1e-9 {
                return Err(CalculusError::NotContact { point: x.clone() });
            }
            let r = field.eval(x)?;
            let a = alpha.eval_vec(x);
            let kernel = interior_num(&d_alpha.eval(x), r.as_slice());
            Ok(((a.dot(&r) - 1.0).abs(), kernel.values().fold(0.0f64, |m, v| m.max(v.abs()))))
        })
        .collect();
    let mut alpha_residual: f64 = 0.0;
    let mut kernel_residual: f64 = 0.0;
    for r in results {
        let (a, k) = r?;
        alpha_residual = alpha_residual.max(a);
        kernel_residual = kernel_residual.max(k);
    }
    Ok(ReebField {
        field,
        alpha,
        space,
        alpha_residual,
        kernel_residual,
    })
}

/// `ℒ_X β` at a point from the coordinate formula
/// `(ℒ_X β)_I = X^j ∂_j β_I + Σ_r β_{I[r ↦ j]} ∂_{i_r} X^j`.
pub fn lie_derivative_at(beta: &Form, field: &[TrigPoly], x: &[f64]) -> NumForm {
    let dim = beta.dim();
    let k = beta.degree();
    let values = beta.eval(x);
    let lookup = |tuple: &[usize]| -> f64 {
        let mut sorted = tuple.to_vec();
        let mut odd = false;
        for i in 0..sorted.len() {
            for j in 0..sorted.len().saturating_sub(1 + i) {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    odd = !odd;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return 0.0;
        }
        let v = values.get(&sorted).copied().unwrap_or(0.0);
        if odd {
            -v
        } else {
            v
        }
    };
    let xv: Vec<f64> = field.iter().map(|c| c.eval(x)).collect();
    let dx: Vec<Vec<f64>> = field
        .iter()
        .map(|c| (0..dim).map(|i| c.partial(i).eval(x)).collect())
        .collect();
    let mut out = NumForm::new();
    for key in subsets(dim, k) {
        let coeff = beta.component(&key);
        let mut v = 0.0;
        for j in 0..dim {
            v += xv[j] * coeff.partial(j).eval(x);
        }
        for r in 0..k {
            for j in 0..dim {
                let mut t = key.clone();
                t[r] = j;
                v += lookup(&t) * dx[j][key[r]];
            }
        }
        if v != 0.0 {
            out.insert(key, v);
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Max grid residual of `ℒ_X β − (X⌟d_η β + d_η(X⌟β) + η(X)β)`.
pub fn cartan_residual(eta: &Form, beta: &Form, field: &[TrigPoly], points: &[Vec<f64>]) -> Result<f64, CalculusError> {
    let rhs = beta
        .interior(field)
        .d_eta(eta)?
        .add(&beta.d_eta(eta)?.interior(field))
        .add(&beta.mul_fn(&Form::one_form(eta_components(eta)).interior(field).scalar()));
    Ok(points
        .par_iter()
        .map(|x| max_abs_diff(&lie_derivative_at(beta, field, x), &rhs.eval(x)))
        .reduce(|| 0.0, f64::max))
}

fn eta_components(eta: &Form) -> Vec<TrigPoly> {
    (0..eta.dim()).map(|i| eta.component(&[i])).collect()
}

/// Max grid residual of `d_{η+df}β − e^f d_η(e^{−f}β)` with both
/// exponentials truncated.
pub fn gauge_identity_residual(
    eta: &Form,
    f: &TrigPoly,
    beta: &Form,
    points: &[Vec<f64>],
    line_box: f64,
) -> Result<f64, CalculusError> {
    let df = Form::function(f.clone()).d();
    let lhs = beta.d_eta(&eta.add(&df))?;
    let inner = SemiForm::weighted(ExpSeries::new(f.neg(), line_box), beta.clone()).d_eta(eta)?;
    let outer = ExpSeries::new(f.clone(), line_box);
    Ok(points
        .par_iter()
        .map(|x| {
            let rhs = scale_num(&inner.eval(x), outer.value(x));
            max_abs_diff(&lhs.eval(x), &rhs)
        })
        .reduce(|| 0.0, f64::max))
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentitiesReport {
    pub grid_points: usize,
    /// `max |λ(R_η) + η(Z_λ)|`.
    pub lee_liouville_residual: f64,
    /// True if `λ(R_η) + η(Z_λ)` vanishes identically as a trig polynomial.
    pub lee_liouville_exact: bool,
    pub cartan_trials: usize,
    pub cartan_residual: f64,
    pub gauge_residual: f64,
    /// Points where `dλ` is degenerate.
    pub kernel_degenerate_points: usize,
    /// Points where `η(Z_λ) = −1`.
    pub kernel_criterion_points: usize,
    /// Points where the two tests disagree.
    pub kernel_mismatches: usize,
    /// "first" if `η(Z_λ) = −1` everywhere, "second" if nowhere, else "mixed".
    pub kind: String,
    pub passed: bool,
}

/// Residuals of `λ(R_η) = −η(Z_λ)`, the `d_η` Cartan formula on seeded
/// random data, the gauge identity, and the kernel criterion
/// `ker dλ ≠ 0 ⇔ η(Z_λ) = −1`.
pub fn structural_identities_report(
    st: &ConformalStructure,
    lambda: &SemiForm,
    seed: u64,
) -> Result<IdentitiesReport, CalculusError> {
    let lee = lee_vector_field(st)?;
    let z = liouville_vector_field(st, lambda)?;
    let points = st.grid_points();
    let eta = &st.eta;

    let lee_liouville_exact = match (lee.components(), z.components(), lambda.as_plain()) {
        (Some(r), Some(zc), Some(l)) => {
            let a = l.interior(r).scalar();
            let b = eta_or_zero(eta, &st.space).interior(zc).scalar();
            a.add(&b).is_zero()
        }
        _ => false,
    };
    let d_lambda = lambda.d_eta(&Form::zero(&st.space, 1))?;
    let per_point: Vec<Result<(f64, bool, bool), CalculusError>> = points
        .par_iter()
        .map(|x| {
            let r = lee.eval(x)?;
            let zv = z.eval(x)?;
            let l = lambda.eval_vec(x);
            let e = eta_vec(eta, x);
            let eta_z = e.dot(&zv);
            let resid = (l.dot(&r) + eta_z).abs();
            let degenerate = !is_nondegenerate(&d_lambda.eval_matrix(x));
            let criterion = (eta_z + 1.0).abs() < GRID_TOL;
            Ok((resid, degenerate, criterion))
        })
        .collect();
    let mut lee_liouville_residual: f64 = 0.0;
    let (mut degenerate_pts, mut criterion_pts, mut mismatches) = (0, 0, 0);
    for r in per_point {
        let (res, deg, crit) = r?;
        lee_liouville_residual = lee_liouville_residual.max(res);
        degenerate_pts += deg as usize;
        criterion_pts += crit as usize;
        mismatches += (deg != crit) as usize;
    }
    let kind = if criterion_pts == points.len() {
        "first"
    } else if criterion_pts == 0 {
        "second"
    } else {
        "mixed"
    }
    .to_string();

    // Random Cartan and gauge data on a grid capped at 5 points per line.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let small = Grid {
        per_line: st.grid.per_line.min(5),
        ..st.grid
    }
    .points(&st.space);
    let (a, l) = (st.space.angles(), st.space.lines());
    let trials = 4;
    let mut cartan: f64 = 0.0;
    let mut gauge: f64 = 0.0;
    let eta_full = eta_or_zero(eta, &st.space);
    for t in 0..trials {
        let degree = 1 + t % st.space.dim().min(2);
        let beta = random_form(&mut rng, a, l, degree);
        let field = random_field(&mut rng, a, l);
        cartan = cartan.max(cartan_residual(&eta_full, &beta, &field, &small)?);
        let f = random_trig_poly(&mut rng, a, l, 2).scale(&BigRational::new(BigInt::from(1), BigInt::from(4)));
        gauge = gauge.max(gauge_identity_residual(&eta_full, &f, &beta, &small, st.grid.line_box)?);
    }
    let passed = lee_liouville_residual < GRID_TOL && cartan < GRID_TOL && gauge < GRID_TOL && mismatches == 0;
    Ok(IdentitiesReport {
        grid_points: points.len(),
        lee_liouville_residual,
        lee_liouville_exact,
        cartan_trials: trials,
        cartan_residual: cartan,
        gauge_residual: gauge,
        kernel_degenerate_points: degenerate_pts,
        kernel_criterion_points: criterion_pts,
        kernel_mismatches: mismatches,
        kind,
        passed,
    })
}

fn eta_or_zero(eta: &Form, space: &Space) -> Form {
    if eta.is_zero() {
        Form::zero(space, 1)
    } else {
        eta.clone()
    }
}

fn eta_vec(eta: &Form, x: &[f64]) -> DVector<f64> {
    if eta.is_zero() {
        DVector::zeros(x.len())
    } else {
        eta.eval_vec(x)
    }
}

/// `ω(X, ·) + d_η H` at a point, for round-trip checks of a solved field.
pub fn hamiltonian_residual_at(
    st: &ConformalStructure,
    h: &SemiForm,
    field: &VectorFieldExpr,
    x: &[f64],
) -> Result<f64, CalculusError> {
    let xv = field.eval(x)?;
    let lhs = interior_num(&st.omega.eval(x), xv.as_slice());
    let dh = h.d_eta(&st.eta)?.eval(x);
    Ok(max_abs_diff(&add_num(&lhs, &dh), &NumForm::new()))
}

/// `a ∧ b` evaluated numerically, exposed for report code.
pub fn wedge_at(a: &Form, b: &Form, x: &[f64]) -> NumForm {
    wedge_num(&a.eval(x), &b.eval(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn circle_beta(c: BigRational) -> Form {
        Form::monomial(&[0], TrigPoly::constant(1, 0, c))
    }

    #[test]
    fn lee_field_translates_fibers() {
        let (st, _) = ConformalStructure::cotangent(&circle_beta(rat(3, 2)), Grid::coarse()).unwrap();
        let r = lee_vector_field(&st).unwrap();
        let c = r.components().unwrap();
        assert!(c[0].is_zero());
        assert_eq!(c[1], TrigPoly::constant(1, 1, rat(3, 2)));
    }

    #[test]
    fn geodesic_convention() {
        let (st, _) = ConformalStructure::cotangent(&Form::zero(&Space::torus(1), 1), Grid::coarse()).unwrap();
        let h = TrigPoly::line_power(1, 1, 0, 2).scale(&rat(1, 2));
        let x = hamiltonian_vector_field(&st, &h).unwrap();
        let c = x.components().unwrap();
        assert_eq!(c[0], TrigPoly::line_power(1, 1, 0, 1));
        assert!(c[1].is_zero());
        let zero = hamiltonian_vector_field(&st, &TrigPoly::zero(1, 1)).unwrap();
        assert!(zero.components().unwrap().iter().all(TrigPoly::is_zero));
    }

    #[test]
    fn liouville_field_and_errors() {
        let (st, lambda) = ConformalStructure::cotangent(&circle_beta(rat(1, 1)), Grid::coarse()).unwrap();
        let z = liouville_vector_field(&st, &SemiForm::plain(lambda.clone())).unwrap();
        assert_eq!(z.components().unwrap()[1], TrigPoly::line_power(1, 1, 0, 1));
        let err = liouville_vector_field(&st, &SemiForm::plain(Form::zero(st.space(), 1))).unwrap_err();
        assert!(matches!(err, CalculusError::NotPrimitive(_)));
        let _ = lambda;
    }

    #[test]
    fn reeb_on_twisted_circle() {
        let (st, lambda) = ConformalStructure::cotangent(&circle_beta(rat(2, 1)), Grid::coarse()).unwrap();
        let reeb = contactization_reeb(&st, &lambda).unwrap();
        let c = reeb.field.components().unwrap();
        assert!(c[0].is_zero());
        assert_eq!(c[1], TrigPoly::from_int(1, 2, -2));
        assert_eq!(c[2], TrigPoly::from_int(1, 2, 1));
        assert!(reeb.alpha_residual < 1e-12 && reeb.kernel_residual < 1e-12);
    }

    #[test]
    fn degenerate_omega_rejected() {
        let space = Space::torus(2);
        let omega = Form::monomial(&[0, 1], TrigPoly::harmonic(2, 0, vec![1, 0], false, rat(1, 1)));
        let err = ConformalStructure::new(space.clone(), Form::zero(&space, 1), omega, Grid::coarse()).unwrap_err();
        assert!(matches!(err, CalculusError::Degenerate { .. }));
    }
}
