use std::f64::consts::TAU;

use serde::Serialize;

use super::{integrate_flow, DynamicsError, FlowConfig};
use crate::calculus::{lee_vector_field, ConformalStructure, Form, Grid};

#[derive(Clone, Debug, PartialEq)]
pub struct DisplaceConfig {
    pub times: Vec<f64>,
    pub dt: f64,
    /// Seeds on the zero section: this many points per circle, `p = 0`.
    pub per_circle: usize,
    pub grid: Grid,
}

impl Default for DisplaceConfig {
    fn default() -> Self {
        DisplaceConfig {
            times: vec![0.01, 0.1, 1.0],
            dt: 1e-2,
            per_circle: 16,
            grid: Grid::default(),
        }
    }
}

impl DisplaceConfig {
    /// `samples` equally spaced times in `(0, t_max]`, plus the default
    /// checkpoints that fall in range.
    pub fn up_to(t_max: f64, samples: usize) -> Self {
        let mut times: Vec<f64> = (1..=samples.max(1))
            .map(|k| t_max * k as f64 / samples.max(1) as f64)
            .collect();
        times.extend([0.01, 0.1, 1.0].into_iter().filter(|&t| t <= t_max));
        times.sort_by(f64::total_cmp);
        times.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        DisplaceConfig {
            times,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DisplaceRow {
    pub t: f64,
    pub min_distance: f64,
    /// Base point of a seed attaining the minimum.
    pub argmin: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DisplaceReport {
    pub rows: Vec<DisplaceRow>,
    pub seeds: usize,
    pub exited: usize,
    pub all_positive: bool,
    pub increasing: bool,
}

/// Flows the zero section of `T*_β Tⁿ` by the Lee field and measures the
/// flat fiber distance `min_z |p(φ_t(z))|` at each requested time.
pub fn displaceability_check(beta: &Form, cfg: &DisplaceConfig) -> Result<DisplaceReport, DynamicsError> {
    let n = beta.angles();
    if beta.lines() != 0 || beta.degree() != 1 || n == 0 {
        return Err(DynamicsError::InvalidConfig("β must be a 1-form on Tⁿ".into()));
    }
    if cfg.times.is_empty() || cfg.per_circle == 0 {
        return Err(DynamicsError::InvalidConfig("need at least one time and one seed".into()));
    }
    let base = Grid {
        per_circle: cfg.per_circle,
        per_line: 1,
        line_box: 0.0,
    };
    let space = crate::calculus::Space::torus(n);
    let seeds: Vec<Vec<f64>> = base.points(&space);
    let check = Grid {
        per_circle: cfg.grid.per_circle,
        per_line: 1,
        line_box: 0.0,
    };
    for q in check.points(&space).into_iter().chain(seeds.iter().cloned()) {
        if beta.eval_vec(&q).amax() <= 1e-12 {
            return Err(DynamicsError::VanishingBeta { point: q });
        }
    }
    let (st, _) = ConformalStructure::cotangent(beta, cfg.grid)?;
    let lee = lee_vector_field(&st)?;

    let initial: Vec<Vec<f64>> = seeds
        .iter()
        .map(|q| {
            let mut x = q.clone();
            x.resize(2 * n, 0.0);
            x
        })
        .collect();
    let t_end = cfg.times.iter().cloned().fold(0.0, f64::max);
    let flow = FlowConfig::new(t_end, cfg.dt, initial)
        .sampled_at(cfg.times.clone())
        .with_exit_box(n, cfg.grid.line_box);
    let trajectories = integrate_flow(&lee, &flow)?;

    let mut times = cfg.times.clone();
    times.sort_by(f64::total_cmp);
    let rows: Vec<DisplaceRow> = times
        .iter()
        .map(|&t| {
            let mut best = (f64::INFINITY, Vec::new());
            for tr in &trajectories {
                if let Some(s) = tr.at(t) {
                    let d = s.x[n..].iter().map(|v| v * v).sum::<f64>().sqrt();
                    if d < best.0 {
                        best = (d, s.x[..n].iter().map(|q| q.rem_euclid(TAU)).collect());
                    }
                }
            }
            DisplaceRow {
                t,
                min_distance: best.0,
                argmin: best.1,
            }
        })
        .collect();
    let exited = trajectories.iter().filter(|t| t.exited_at.is_some()).count();
    let all_positive = rows.iter().all(|r| r.min_distance > 0.0);
    let increasing = rows.windows(2).all(|w| w[1].min_distance > w[0].min_distance);
    Ok(DisplaceReport {
        rows,
        seeds: trajectories.len(),
        exited,
        all_positive,
        increasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::parse_one_form;

    #[test]
    fn circle_fiber_translation() {
        let beta = parse_one_form("dq", 1).unwrap();
        let r = displaceability_check(&beta, &DisplaceConfig::default()).unwrap();
        for row in &r.rows {
            assert!((row.min_distance - row.t).abs() < 1e-10, "{row:?}");
        }
        assert!(r.all_positive && r.increasing);
        assert_eq!(r.exited, 0);
    }

    #[test]
    fn scaled_beta_moves_faster() {
        let beta = parse_one_form("2 dq + cos(q) dq", 1).unwrap();
        let cfg = DisplaceConfig {
            times: vec![0.5],
            ..DisplaceConfig::default()
        };
        let r = displaceability_check(&beta, &cfg).unwrap();
        // The slowest seed sits where |β| = 1, at q = π.
        assert!((r.rows[0].min_distance - 0.5).abs() < 1e-3);
    }

    #[test]
    fn vanishing_beta_is_rejected() {
        let beta = parse_one_form("sin(q) dq", 1).unwrap();
        assert!(matches!(
            displaceability_check(&beta, &DisplaceConfig::default()),
            Err(DynamicsError::VanishingBeta { .. })
        ));
    }

    #[test]
    fn time_grid() {
        let cfg = DisplaceConfig::up_to(1.0, 4);
        assert_eq!(cfg.times, vec![0.01, 0.1, 0.25, 0.5, 0.75, 1.0]);
    }
}
