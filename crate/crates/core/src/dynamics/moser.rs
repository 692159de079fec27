use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{integrate_flow, DynamicsError, Field, FlowConfig, Trajectory};
use crate::calculus::{d_eta, is_nondegenerate, solve_dual, CalculusError, Form, Grid, Space};

/// The path `ω_t = ω₀ + d_η(λ_t − λ₀)` with `λ_t = (1 − t)λ₀ + tλ₁` on `Tⁿ`.
#[derive(Clone, Debug)]
pub struct MoserProblem {
    eta: Form,
    omega0: Form,
    lambda0: Form,
    lambda1: Form,
    domega: Form,
    lambda_dot: Form,
}

impl MoserProblem {
    pub fn new(eta: Form, omega0: Form, lambda0: Form, lambda1: Form) -> Result<Self, DynamicsError> {
        let n = eta.angles();
        for (name, form, degree) in [("ω₀", &omega0, 2), ("λ₀", &lambda0, 1), ("λ₁", &lambda1, 1), ("η", &eta, 1)] {
            if form.angles() != n || form.lines() != 0 {
                return Err(DynamicsError::InvalidConfig(format!("{name} must live on T^{n}")));
            }
            if form.degree() != degree && !form.is_zero() {
                return Err(CalculusError::Degree {
                    expected: degree,
                    found: form.degree(),
                }
                .into());
            }
        }
        if n == 0 || !n.is_multiple_of(2) {
            return Err(DynamicsError::InvalidConfig(format!("T^{n} is not even-dimensional")));
        }
        let space = Space::torus(n);
        let as_degree = |f: &Form, k: usize| if f.is_zero() { Form::zero(&space, k) } else { f.clone() };
        let (eta, omega0) = (as_degree(&eta, 1), as_degree(&omega0, 2));
        let (lambda0, lambda1) = (as_degree(&lambda0, 1), as_degree(&lambda1, 1));
        if !d_eta(&omega0, &eta)?.is_zero() {
            return Err(CalculusError::NotConformal("d_η ω₀ ≠ 0".into()).into());
        }
        let lambda_dot = lambda1.sub(&lambda0);
        let domega = d_eta(&lambda_dot, &eta)?;
        Ok(MoserProblem {
            eta,
            omega0,
            lambda0,
            lambda1,
            domega,
            lambda_dot,
        })
    }

    pub fn dim(&self) -> usize {
        self.eta.angles()
    }

    pub fn eta(&self) -> &Form {
        &self.eta
    }

    pub fn lambdas(&self) -> (&Form, &Form) {
        (&self.lambda0, &self.lambda1)
    }

    pub fn omega_matrix(&self, t: f64, x: &[f64]) -> DMatrix<f64> {
        self.omega0.eval_matrix(x) + self.domega.eval_matrix(x) * t
    }

    /// `X_t` with `X_t⌟ω_t = −λ̇` and the rate `μ_t = η(X_t)`.
    pub fn field(&self) -> MoserField<'_> {
        MoserField { prob: self }
    }

    /// Checks nondegeneracy of `ω_t` on the grid for `t = 0, 1/8, …, 1`.
    pub fn check_path(&self, grid: Grid) -> Result<(), DynamicsError> {
        let points = grid.points(&Space::torus(self.dim()));
        for k in 0..=8 {
            let t = k as f64 / 8.0;
            if let Some(x) = points.iter().find(|x| !is_nondegenerate(&self.omega_matrix(t, x))) {
                return Err(DynamicsError::Degenerate { t, point: x.clone() });
            }
        }
        Ok(())
    }
}

pub struct MoserField<'a> {
    prob: &'a MoserProblem,
}

impl Field for MoserField<'_> {
    fn dim(&self) -> usize {
        self.prob.dim()
    }

    fn eval(&self, t: f64, x: &[f64]) -> Result<(DVector<f64>, f64), DynamicsError> {
        let w = self.prob.omega_matrix(t, x);
        let rhs = -self.prob.lambda_dot.eval_vec(x);
        let v = solve_dual(&w, &rhs).ok_or_else(|| DynamicsError::Degenerate { t, point: x.to_vec() })?;
        let mu = self.prob.eta.eval_vec(x).dot(&v);
        Ok((v, mu))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MoserConfig {
    pub dt: f64,
    /// Step of the central differences that push frames forward.
    pub fd_step: f64,
    pub seeds_per_circle: usize,
    pub check_times: Vec<f64>,
}

impl Default for MoserConfig {
    fn default() -> Self {
        MoserConfig {
            dt: 1e-3,
            fd_step: 1e-3,
            seeds_per_circle: 32,
            check_times: vec![0.25, 0.5, 0.75, 1.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MoserResidual {
    pub t: f64,
    /// `max |φ_t*ω_t − e^{f_t} ω₀|` over seeds and frame pairs.
    pub residual: f64,
    pub max_abs_f: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MoserReport {
    pub dt: f64,
    pub fd_step: f64,
    pub seeds: usize,
    pub residuals: Vec<MoserResidual>,
    pub max_residual: f64,
}

#[derive(Clone, Debug)]
pub struct MoserOutput {
    /// Trajectories of the seeds themselves, sampled at the check times.
    pub trajectories: Vec<Trajectory>,
    pub report: MoserReport,
}

/// Integrates the Moser field from a grid of seeds, accumulating
/// `f_t = ∫ μ_s∘φ_s ds`, and compares `φ_t*ω_t` with `e^{f_t}ω₀`.
pub fn moser_flow(prob: &MoserProblem, cfg: &MoserConfig) -> Result<MoserOutput, DynamicsError> {
    if !(cfg.fd_step > 0.0) || cfg.seeds_per_circle == 0 || cfg.check_times.is_empty() {
        return Err(DynamicsError::InvalidConfig(
            "need fd_step > 0, at least one seed and one check time".into(),
        ));
    }
    let n = prob.dim();
    let grid = Grid {
        per_circle: cfg.seeds_per_circle,
        per_line: 1,
        line_box: 0.0,
    };
    prob.check_path(grid)?;
    let seeds = grid.points(&Space::torus(n));
    let h = cfg.fd_step;
    // Each seed is followed by its 2n perturbed copies x ± h e_j.
    let stride = 1 + 2 * n;
    let mut initial = Vec::with_capacity(seeds.len() * stride);
    for x in &seeds {
        initial.push(x.clone());
        for j in 0..n {
            for s in [1.0, -1.0] {
                let mut y = x.clone();
                y[j] += s * h;
                initial.push(y);
            }
        }
    }
    let t_end = cfg.check_times.iter().cloned().fold(0.0, f64::max);
    let flow = FlowConfig::new(t_end, cfg.dt, initial).sampled_at(cfg.check_times.clone());
    let field = prob.field();
    let all = integrate_flow(&field, &flow)?;

    let mut times = cfg.check_times.clone();
    times.sort_by(f64::total_cmp);
    let mut residuals = Vec::new();
    for &t in &times {
        let mut worst: f64 = 0.0;
        let mut max_f: f64 = 0.0;
        for (s, x) in seeds.iter().enumerate() {
            let group = &all[s * stride..(s + 1) * stride];
            let centre = group[0].at(t).expect("sampled");
            let mut dphi = DMatrix::zeros(n, n);
            for j in 0..n {
                let plus = &group[1 + 2 * j].at(t).expect("sampled").x;
                let minus = &group[2 + 2 * j].at(t).expect("sampled").x;
                for i in 0..n {
                    dphi[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
                }
            }
            let pulled = dphi.transpose() * prob.omega_matrix(t, &centre.x) * &dphi;
            let target = prob.omega0.eval_matrix(x) * centre.f.exp();
            worst = worst.max((pulled - target).amax());
            max_f = max_f.max(centre.f.abs());
        }
        residuals.push(MoserResidual {
            t,
            residual: worst,
            max_abs_f: max_f,
        });
    }
    let max_residual = residuals.iter().map(|r| r.residual).fold(0.0, f64::max);
    let trajectories = all.into_iter().step_by(stride).collect();
    Ok(MoserOutput {
        trajectories,
        report: MoserReport {
            dt: cfg.dt,
            fd_step: h,
            seeds: seeds.len(),
            residuals,
            max_residual,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinementReport {
    pub levels: Vec<MoserReport>,
    /// Residuals strictly decrease from level to level.
    pub monotone: bool,
}

/// Runs [`moser_flow`] at each `(dt, fd_step)` level.
pub fn moser_refinement(prob: &MoserProblem, base: &MoserConfig, levels: &[(f64, f64)]) -> Result<RefinementReport, DynamicsError> {
    let mut out = Vec::new();
    for &(dt, fd_step) in levels {
        let cfg = MoserConfig {
            dt,
            fd_step,
            ..base.clone()
        };
        out.push(moser_flow(prob, &cfg)?.report);
    }
    let monotone = out.windows(2).all(|w| w[1].max_residual < w[0].max_residual);
    Ok(RefinementReport { levels: out, monotone })
}

/// The T² model: `η = ½dq₁`, `ω₀ = dq₁∧dq₂`, `λ₀ = 0`,
/// `λ₁ = scale·sin(q₁)dq₂`.
pub fn torus_example(scale: &str) -> Result<MoserProblem, DynamicsError> {
    use crate::calculus::parse_one_form;
    let eta = parse_one_form("1/2 dq1", 2)?;
    let space = Space::torus(2);
    let omega0 = Form::from_terms(
        &space,
        2,
        [(vec![0, 1], crate::calculus::TrigPoly::from_int(2, 0, 1))],
    );
    let lambda1 = parse_one_form(&format!("{scale} sin(q1) dq2"), 2)?;
    MoserProblem::new(eta, omega0, Form::zero(&space, 1), lambda1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> MoserConfig {
        MoserConfig {
            dt: 1e-2,
            fd_step: 1e-3,
            seeds_per_circle: 6,
            check_times: vec![0.5, 1.0],
        }
    }

    #[test]
    fn constant_path_is_identity() {
        let p = torus_example("0").unwrap();
        let out = moser_flow(&p, &quick()).unwrap();
        for tr in &out.trajectories {
            assert_eq!(tr.last().x, tr.samples[0].x);
            assert_eq!(tr.last().f, 0.0);
        }
        assert!(out.report.max_residual < 1e-12);
    }

    #[test]
    fn pullback_matches_conformal_factor() {
        let p = torus_example("0.1").unwrap();
        let out = moser_flow(&p, &quick()).unwrap();
        assert!(out.report.max_residual < 1e-5, "{:?}", out.report);
        assert!(out.report.residuals.iter().any(|r| r.max_abs_f > 1e-3));
    }

    #[test]
    fn reversing_the_perturbation_reverses_the_field() {
        let a = torus_example("0.1").unwrap();
        let b = torus_example("-0.1").unwrap();
        let x = [0.4, 1.3];
        let (va, ma) = a.field().eval(0.0, &x).unwrap();
        let (vb, mb) = b.field().eval(0.0, &x).unwrap();
        assert!((va + vb).amax() < 1e-15);
        assert!((ma + mb).abs() < 1e-15);
    }

    #[test]
    fn degenerate_path_is_rejected() {
        // ω_1 = (1 + 2cos q₁ − sin q₁) dq₁∧dq₂ vanishes somewhere.
        assert!(matches!(
            moser_flow(&torus_example("2").unwrap(), &quick()),
            Err(DynamicsError::Degenerate { .. })
        ));
    }
}
