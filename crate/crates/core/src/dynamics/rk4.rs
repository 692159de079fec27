use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use super::DynamicsError;
use crate::calculus::VectorFieldExpr;

/// A time-dependent vector field together with the rate of a scalar that is
/// accumulated along trajectories (zero for plain flows).
pub trait Field: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, t: f64, x: &[f64]) -> Result<(DVector<f64>, f64), DynamicsError>;
}

impl Field for VectorFieldExpr {
    fn dim(&self) -> usize {
        VectorFieldExpr::dim(self)
    }

    fn eval(&self, _t: f64, x: &[f64]) -> Result<(DVector<f64>, f64), DynamicsError> {
        Ok((VectorFieldExpr::eval(self, x)?, 0.0))
    }
}

/// A field given by a closure, mostly for tests and quick experiments.
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(f64, &[f64]) -> DVector<f64> + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnField { dim, f }
    }
}

impl<F> Field for FnField<F>
where
    F: Fn(f64, &[f64]) -> DVector<f64> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, x: &[f64]) -> Result<(DVector<f64>, f64), DynamicsError> {
        Ok(((self.f)(t, x), 0.0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    pub t_end: f64,
    /// Largest step. Each interval between recorded times is split into
    /// equal steps no longer than this.
    pub dt: f64,
    pub initial_points: Vec<Vec<f64>>,
    /// Times to record in `(0, t_end]`; `None` records every step.
    pub sample_times: Option<Vec<f64>>,
    /// Trajectories stop once a coordinate with index `≥ angles` leaves
    /// `[−b, b]`.
    pub exit_box: Option<(usize, f64)>,
}

impl FlowConfig {
    pub fn new(t_end: f64, dt: f64, initial_points: Vec<Vec<f64>>) -> Self {
        FlowConfig {
            t_end,
            dt,
            initial_points,
            sample_times: None,
            exit_box: None,
        }
    }

    pub fn sampled_at(mut self, times: Vec<f64>) -> Self {
        self.sample_times = Some(times);
        self
    }

    pub fn with_exit_box(mut self, angles: usize, bound: f64) -> Self {
        self.exit_box = Some((angles, bound));
        self
    }

    fn validate(&self, dim: usize) -> Result<Vec<f64>, DynamicsError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(DynamicsError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(DynamicsError::InvalidConfig(format!("t_end must be ≥ 0, got {}", self.t_end)));
        }
        for x in &self.initial_points {
            if x.len() != dim {
                return Err(DynamicsError::InvalidConfig(format!(
                    "initial point has {} coordinates, field has {dim}",
                    x.len()
                )));
            }
            if let Some(p) = self.outside_box(x) {
                return Err(DynamicsError::InvalidConfig(format!("initial point {p:?} lies outside the box")));
            }
        }
        let mut stops = match &self.sample_times {
            Some(ts) => {
                for &t in ts {
                    if !(t > 0.0 && t <= self.t_end) {
                        return Err(DynamicsError::InvalidConfig(format!(
                            "sample time {t} outside (0, {}]",
                            self.t_end
                        )));
                    }
                }
                let mut ts = ts.clone();
                ts.push(self.t_end);
                ts
            }
            None => vec![self.t_end],
        };
        stops.sort_by(f64::total_cmp);
        stops.dedup();
        stops.retain(|&t| t > 0.0);
        Ok(stops)
    }

    fn outside_box<'a>(&self, x: &'a [f64]) -> Option<&'a [f64]> {
        let (angles, b) = self.exit_box?;
        x[angles..].iter().any(|v| v.abs() > b).then_some(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    /// The accumulated scalar `∫ rate dt`.
    pub f: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Set when the trajectory left the box; sampling stops there.
    pub exited_at: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory starts with its initial point")
    }

    pub fn at(&self, t: f64) -> Option<&Sample> {
        self.samples.iter().find(|s| (s.t - t).abs() <= 1e-12 * t.abs().max(1.0))
    }
}

/// One classical Runge–Kutta step on the state `(x, f)`.
pub fn rk4_step<F: Field + ?Sized>(
    field: &F,
    t: f64,
    x: &DVector<f64>,
    f: f64,
    h: f64,
) -> Result<(DVector<f64>, f64), DynamicsError> {
    let (k1, r1) = field.eval(t, x.as_slice())?;
    let x2 = x + &k1 * (0.5 * h);
    let (k2, r2) = field.eval(t + 0.5 * h, x2.as_slice())?;
    let x3 = x + &k2 * (0.5 * h);
    let (k3, r3) = field.eval(t + 0.5 * h, x3.as_slice())?;
    let x4 = x + &k3 * h;
    let (k4, r4) = field.eval(t + h, x4.as_slice())?;
    let x_next = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    let f_next = f + (r1 + 2.0 * r2 + 2.0 * r3 + r4) * (h / 6.0);
    Ok((x_next, f_next))
}

fn integrate_one<F: Field + ?Sized>(
    field: &F,
    cfg: &FlowConfig,
    stops: &[f64],
    x0: &[f64],
) -> Result<Trajectory, DynamicsError> {
    let mut x = DVector::from_column_slice(x0);
    let mut f = 0.0;
    let mut t = 0.0;
    let mut samples = vec![Sample {
        t,
        x: x0.to_vec(),
        f,
    }];
    let every_step = cfg.sample_times.is_none();
    for &stop in stops {
        let steps = ((stop - t) / cfg.dt - 1e-9).ceil().max(1.0) as usize;
        let h = (stop - t) / steps as f64;
        let start = t;
        for s in 1..=steps {
            let (xn, fn_) = rk4_step(field, t, &x, f, h)?;
            x = xn;
            f = fn_;
            t = if s == steps { stop } else { start + s as f64 * h };
            if cfg.outside_box(x.as_slice()).is_some() {
                samples.push(Sample {
                    t,
                    x: x.as_slice().to_vec(),
                    f,
                });
                return Ok(Trajectory {
                    samples,
                    exited_at: Some(t),
                });
            }
            if every_step || s == steps {
                samples.push(Sample {
                    t,
                    x: x.as_slice().to_vec(),
                    f,
                });
            }
        }
    }
    Ok(Trajectory {
        samples,
        exited_at: None,
    })
}

/// Integrates every initial point with fixed-step RK4. Trajectories are
/// computed in parallel and returned in seed order.
pub fn integrate_flow<F: Field + ?Sized>(field: &F, cfg: &FlowConfig) -> Result<Vec<Trajectory>, DynamicsError> {
    let stops = cfg.validate(field.dim())?;
    cfg.initial_points
        .par_iter()
        .map(|x0| integrate_one(field, cfg, &stops, x0))
        .collect()
}

/// CSV with columns `t, <coordinate names>, f_t`, trajectories in seed order.
pub fn trajectories_csv(names: &[String], trajectories: &[Trajectory]) -> String {
    let mut out = String::from("t");
    for n in names {
        out.push(',');
        out.push_str(n);
    }
    out.push_str(",f_t\n");
    for tr in trajectories {
        for s in &tr.samples {
            out.push_str(&format!("{:.12e}", s.t));
            for v in &s.x {
                out.push_str(&format!(",{v:.12e}"));
            }
            out.push_str(&format!(",{:.12e}\n", s.f));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pendulum() -> FnField<impl Fn(f64, &[f64]) -> DVector<f64> + Sync> {
        FnField::new(2, |_, x: &[f64]| DVector::from_vec(vec![x[1], -x[0].sin()]))
    }

    #[test]
    fn zero_field_is_constant() {
        let field = FnField::new(2, |_, _: &[f64]| DVector::zeros(2));
        let cfg = FlowConfig::new(1.0, 0.1, vec![vec![0.3, -1.2]]);
        let tr = integrate_flow(&field, &cfg).unwrap();
        assert_eq!(tr[0].samples.len(), 11);
        assert!(tr[0].samples.iter().all(|s| s.x == vec![0.3, -1.2]));
    }

    #[test]
    fn linear_field_is_exact() {
        let field = FnField::new(2, |_, _: &[f64]| DVector::from_vec(vec![0.0, 1.0]));
        let cfg = FlowConfig::new(1.0, 0.01, vec![vec![0.0, 0.5]]);
        let tr = integrate_flow(&field, &cfg).unwrap();
        assert!((tr[0].last().x[1] - 1.5).abs() < 1e-13);
    }

    #[test]
    fn fourth_order_convergence() {
        let x0 = vec![vec![1.0, 0.0]];
        let end = |dt: f64| {
            let tr = integrate_flow(&pendulum(), &FlowConfig::new(2.0, dt, x0.clone())).unwrap();
            tr[0].last().x.clone()
        };
        let reference = end(0.1 / 128.0);
        let err = |dt: f64| {
            let x = end(dt);
            ((x[0] - reference[0]).powi(2) + (x[1] - reference[1]).powi(2)).sqrt()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((14.0..=18.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn sample_times_and_exit() {
        let field = FnField::new(2, |_, _: &[f64]| DVector::from_vec(vec![0.0, 1.0]));
        let cfg = FlowConfig::new(1.0, 0.03, vec![vec![0.0, 0.0], vec![0.0, 3.5]])
            .sampled_at(vec![0.01, 0.1])
            .with_exit_box(1, 4.0);
        let tr = integrate_flow(&field, &cfg).unwrap();
        let ts: Vec<f64> = tr[0].samples.iter().map(|s| s.t).collect();
        assert_eq!(ts, vec![0.0, 0.01, 0.1, 1.0]);
        assert!(tr[0].exited_at.is_none());
        let exit = tr[1].exited_at.unwrap();
        assert!(exit > 0.5 && exit < 0.55);
    }

    #[test]
    fn invalid_configs() {
        let field = pendulum();
        assert!(integrate_flow(&field, &FlowConfig::new(1.0, 0.0, vec![])).is_err());
        assert!(integrate_flow(&field, &FlowConfig::new(1.0, 0.1, vec![vec![0.0]])).is_err());
        let cfg = FlowConfig::new(1.0, 0.1, vec![vec![0.0, 0.0]]).sampled_at(vec![2.0]);
        assert!(integrate_flow(&field, &cfg).is_err());
    }

    #[test]
    fn csv_layout() {
        let tr = Trajectory {
            samples: vec![Sample {
                t: 0.0,
                x: vec![1.0, 2.0],
                f: 0.0,
            }],
            exited_at: None,
        };
        let csv = trajectories_csv(&["q1".into(), "p1".into()], &[tr]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,q1,p1,f_t"));
        assert_eq!(lines.next().unwrap().split(',').count(), 4);
    }
}
