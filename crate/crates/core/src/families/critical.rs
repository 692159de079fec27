use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::newton::{seed_grid, solve_from_seeds, torus_distance, Converged, NewtonParams};
use super::{BetaJet, FamilyError, FamilyFunction};
use crate::calculus::Form;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub per_circle: usize,
    pub per_fiber: usize,
    pub tol: f64,
    pub dedup_radius: f64,
    pub max_iter: usize,
    pub max_step: f64,
    /// Threshold separating `X₊`, `X₋` and `X₀`.
    pub epsilon: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            per_circle: 64,
            per_fiber: 33,
            tol: 1e-10,
            dedup_radius: 1e-4,
            max_iter: 60,
            max_step: 0.5,
            epsilon: 0.1,
        }
    }
}

impl SearchConfig {
    pub(crate) fn params<F: FamilyFunction + ?Sized>(&self, family: &F) -> NewtonParams {
        NewtonParams {
            tol: self.tol,
            max_iter: self.max_iter,
            max_step: self.max_step,
            fiber_bound: 3.0 * family.fiber_radius() + 1.0,
        }
    }

    pub(crate) fn seeds<F: FamilyFunction + ?Sized>(&self, family: &F) -> Vec<Vec<f64>> {
        seed_grid(
            family.base_dim(),
            family.fiber_dim(),
            self.per_circle,
            self.per_fiber,
            family.fiber_radius(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Region {
    #[serde(rename = "X+")]
    Plus,
    #[serde(rename = "X-")]
    Minus,
    #[serde(rename = "X0")]
    Zero,
}

impl Region {
    pub fn of(value: f64, epsilon: f64) -> Self {
        if value >= epsilon {
            Region::Plus
        } else if value <= -epsilon {
            Region::Minus
        } else {
            Region::Zero
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaCriticalPoint {
    pub q: Vec<f64>,
    pub xi: Vec<f64>,
    /// `max |dF − Fβ|` at the point.
    pub residual: f64,
    pub value: f64,
    pub region: Region,
    /// Number of negative eigenvalues of the Hessian of `γ = dH − β`,
    /// i.e. of the symmetrized Jacobian divided by `F`.
    pub index: usize,
    pub sigma_min: f64,
}

impl BetaCriticalPoint {
    pub fn location(&self) -> Vec<f64> {
        self.q.iter().chain(&self.xi).cloned().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchWarning {
    /// Lower corner of the grid cell.
    pub cell: Vec<f64>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalSearch {
    pub points: Vec<BetaCriticalPoint>,
    pub warnings: Vec<SearchWarning>,
    pub seeds: usize,
    pub converged_seeds: usize,
    /// Smallest distance between two distinct zeros (∞ with fewer than two).
    pub min_separation: f64,
    /// Every zero is nondegenerate, zeros are well separated relative to
    /// the dedup radius, and no sign-change cell lacks a zero.
    pub exact_on_grid: bool,
}

impl CriticalSearch {
    pub fn count(&self) -> usize {
        self.points.len()
    }
}

/// `Φ = (∂_q F − F β, ∂_ξ F)` and its Jacobian
/// `J_ij = F_ij − F_j β_i − F ∂_j β_i` (the β terms only in base rows).
pub fn beta_map<F: FamilyFunction + ?Sized>(family: &F, beta: &BetaJet, x: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let n = family.base_dim();
    let d = family.dim();
    let jet = family.jet(x);
    let (b, db) = beta.eval(&x[..n]);
    let mut r = jet.grad.clone();
    let mut j = jet.hess.clone();
    for i in 0..n {
        r[i] -= jet.value * b[i];
        for k in 0..d {
            j[(i, k)] -= jet.grad[k] * b[i];
            if k < n {
                j[(i, k)] -= jet.value * db[(i, k)];
            }
        }
    }
    (r, j)
}

pub(crate) fn negative_index(sym: &DMatrix<f64>) -> usize {
    SymmetricEigen::new(sym.clone()).eigenvalues.iter().filter(|l| **l < 0.0).count()
}

fn record<F: FamilyFunction + ?Sized>(family: &F, c: &Converged, epsilon: f64) -> BetaCriticalPoint {
    let n = family.base_dim();
    let value = family.value(&c.x);
    let sym = (&c.jacobian + c.jacobian.transpose()) * 0.5;
    let index = if value != 0.0 {
        negative_index(&(sym / value))
    } else {
        negative_index(&sym)
    };
    BetaCriticalPoint {
        q: c.x[..n].to_vec(),
        xi: c.x[n..].to_vec(),
        residual: c.residual,
        value,
        region: Region::of(value, epsilon),
        index,
        sigma_min: c.sigma_min,
    }
}

/// Cells of the seed grid in which every component of the map changes
/// sign but no located zero lies within half a cell.
pub(crate) fn missed_cells(
    values: &[DVector<f64>],
    seeds: &[Vec<f64>],
    zeros: &[Vec<f64>],
    angles: usize,
    fibers: usize,
    per_circle: usize,
    per_fiber: usize,
    r: f64,
) -> Vec<SearchWarning> {
    let d = angles + fibers;
    if d == 0 || values.is_empty() {
        return Vec::new();
    }
    let sizes: Vec<usize> = (0..d).map(|k| if k < angles { per_circle } else { per_fiber }).collect();
    let spacing: Vec<f64> = (0..d)
        .map(|k| {
            if k < angles {
                TAU / per_circle as f64
            } else if per_fiber > 1 {
                2.0 * r / (per_fiber - 1) as f64
            } else {
                0.0
            }
        })
        .collect();
    let flat = |idx: &[usize]| idx.iter().zip(&sizes).fold(0usize, |acc, (i, s)| acc * s + i);
    let mut warnings = Vec::new();
    let mut idx = vec![0usize; d];
    'cells: for cell in 0..seeds.len() {
        let mut rem = cell;
        for k in (0..d).rev() {
            idx[k] = rem % sizes[k];
            rem /= sizes[k];
        }
        if (angles..d).any(|k| idx[k] + 1 >= sizes[k]) {
            continue;
        }
        let mut lo = vec![f64::INFINITY; values[0].len()];
        let mut hi = vec![f64::NEG_INFINITY; values[0].len()];
        for corner in 0..(1usize << d) {
            let c: Vec<usize> = (0..d)
                .map(|k| {
                    let step = (corner >> k) & 1;
                    if k < angles {
                        (idx[k] + step) % sizes[k]
                    } else {
                        idx[k] + step
                    }
                })
                .collect();
            let v = &values[flat(&c)];
            for (i, vi) in v.iter().enumerate() {
                lo[i] = lo[i].min(*vi);
                hi[i] = hi[i].max(*vi);
            }
        }
        if !lo.iter().zip(&hi).all(|(l, h)| *l <= 0.0 && *h >= 0.0) {
            continue;
        }
        let base = &seeds[cell];
        for z in zeros {
            let inside = (0..d).all(|k| {
                let off = if k < angles {
                    (z[k] - base[k]).rem_euclid(TAU)
                } else {
                    z[k] - base[k]
                };
                let slack = 0.5 * spacing[k];
                (off >= -slack && off <= spacing[k] + slack) || (k < angles && off >= TAU - slack)
            });
            if inside {
                continue 'cells;
            }
        }
        warnings.push(SearchWarning {
            cell: base.clone(),
            message: "all components change sign in this cell but no zero was located; possible missed zero".into(),
        });
    }
    warnings
}

/// Zeros of `dF − Fβ` on `Tⁿ × Rᵐ` by Newton from a seed grid.
pub fn beta_critical_points<F: FamilyFunction + ?Sized>(
    family: &F,
    beta: &Form,
    cfg: &SearchConfig,
) -> Result<CriticalSearch, FamilyError> {
    let beta = BetaJet::new(beta, family.base_dim())?;
    critical_points_with(family, &beta, cfg)
}

pub(crate) fn critical_points_with<F: FamilyFunction + ?Sized>(
    family: &F,
    beta: &BetaJet,
    cfg: &SearchConfig,
) -> Result<CriticalSearch, FamilyError> {
    if cfg.per_circle == 0 || cfg.per_fiber == 0 || !(cfg.tol > 0.0) || !(cfg.epsilon > 0.0) {
        return Err(FamilyError::InvalidConfig(
            "grid sizes, tolerance and ε must be positive".into(),
        ));
    }
    let n = family.base_dim();
    let seeds = cfg.seeds(family);
    let map = |x: &[f64]| beta_map(family, beta, x);
    let (zeros, converged) = solve_from_seeds(&map, &seeds, n, cfg.params(family), cfg.dedup_radius);
    let points: Vec<BetaCriticalPoint> = zeros.iter().map(|c| record(family, c, cfg.epsilon)).collect();

    let values: Vec<DVector<f64>> = seeds.iter().map(|s| map(s).0).collect();
    let located: Vec<Vec<f64>> = zeros.iter().map(|c| c.x.clone()).collect();
    let warnings = missed_cells(
        &values,
        &seeds,
        &located,
        n,
        family.fiber_dim(),
        cfg.per_circle,
        cfg.per_fiber,
        family.fiber_radius(),
    );
    let mut min_separation = f64::INFINITY;
    for (i, a) in located.iter().enumerate() {
        for b in &located[i + 1..] {
            min_separation = min_separation.min(torus_distance(a, b, n));
        }
    }
    let exact_on_grid = warnings.is_empty()
        && points.iter().all(|p| p.sigma_min > 1e-8 && p.residual < cfg.tol)
        && min_separation > 10.0 * cfg.dedup_radius;
    Ok(CriticalSearch {
        points,
        warnings,
        seeds: seeds.len(),
        converged_seeds: converged,
        min_separation,
        exact_on_grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{parse_function, parse_one_form};
    use crate::families::GeneratingFamily;

    fn circle(f: &str) -> GeneratingFamily {
        GeneratingFamily::from_function(parse_function(f, 1).unwrap()).unwrap()
    }

    #[test]
    fn ordinary_critical_points() {
        let r = beta_critical_points(&circle("2 + cos(q)"), &parse_one_form("0", 1).unwrap(), &SearchConfig::default())
            .unwrap();
        assert_eq!(r.count(), 2);
        assert!(r.points[0].q[0].abs() < 1e-12);
        assert!((r.points[1].q[0] - std::f64::consts::PI).abs() < 1e-10);
        // F = 2 + cos θ: maximum at 0 (index 1 of log F), minimum at π.
        assert_eq!(r.points[0].index, 1);
        assert_eq!(r.points[1].index, 0);
        assert!(r.exact_on_grid);
        assert!(r.points.iter().all(|p| p.region == Region::Plus));
    }

    #[test]
    fn beta_critical_counts() {
        let f = circle("2 + cos(q)");
        let cfg = SearchConfig::default();
        let small = beta_critical_points(&f, &parse_one_form("0.1 dq", 1).unwrap(), &cfg).unwrap();
        assert_eq!(small.count(), 2);
        for p in &small.points {
            let t = p.q[0];
            assert!((-t.sin() - 0.1 * (2.0 + t.cos())).abs() < 1e-10);
        }
        let large = beta_critical_points(&f, &parse_one_form("2 dq", 1).unwrap(), &cfg).unwrap();
        assert_eq!(large.count(), 0);
        assert!(large.warnings.is_empty());
    }

    #[test]
    fn region_labels() {
        assert_eq!(Region::of(0.2, 0.1), Region::Plus);
        assert_eq!(Region::of(-0.1, 0.1), Region::Minus);
        assert_eq!(Region::of(0.05, 0.1), Region::Zero);
    }

    #[test]
    fn missed_zero_is_flagged() {
        // A map whose only zero is hidden from the located list.
        let seeds = seed_grid(1, 0, 8, 1, 1.0);
        let values: Vec<DVector<f64>> = seeds.iter().map(|s| DVector::from_element(1, s[0].sin())).collect();
        let w = missed_cells(&values, &seeds, &[vec![0.0]], 1, 0, 8, 1, 1.0);
        assert_eq!(w.len(), 1);
        assert!((w[0].cell[0] - 3.0 * TAU / 8.0).abs() < 1e-12 || (w[0].cell[0] - TAU / 2.0).abs() < 1e-12);
    }
}
