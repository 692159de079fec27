use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// Result of one Newton run.
#[derive(Clone, Debug)]
pub struct Converged {
    pub x: Vec<f64>,
    pub residual: f64,
    pub sigma_min: f64,
    pub jacobian: DMatrix<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct NewtonParams {
    pub tol: f64,
    pub max_iter: usize,
    pub max_step: f64,
    /// Runs whose fiber coordinates leave `[−b, b]` are abandoned.
    pub fiber_bound: f64,
}

/// Damped Newton for a square system on `Tⁿ × Rᵐ`. Angles are reduced to
/// `[0, 2π)` on success.
pub fn newton<M>(map: &M, x0: &[f64], angles: usize, p: NewtonParams) -> Option<Converged>
where
    M: Fn(&[f64]) -> (DVector<f64>, DMatrix<f64>) + ?Sized,
{
    let mut x = DVector::from_column_slice(x0);
    for _ in 0..=p.max_iter {
        let (r, j) = map(x.as_slice());
        if !r.iter().all(|v| v.is_finite()) {
            return None;
        }
        let res = r.amax();
        if res < p.tol {
            let mut out = x.as_slice().to_vec();
            for a in out.iter_mut().take(angles) {
                *a = a.rem_euclid(TAU);
            }
            let sigma_min = j.singular_values().iter().cloned().fold(f64::INFINITY, f64::min);
            return Some(Converged {
                x: out,
                residual: res,
                sigma_min: if sigma_min.is_finite() { sigma_min } else { 0.0 },
                jacobian: j,
            });
        }
        let mut step = j.lu().solve(&r)?;
        let norm = step.norm();
        if !norm.is_finite() {
            return None;
        }
        if norm > p.max_step {
            step *= p.max_step / norm;
        }
        x -= step;
        if x.iter().skip(angles).any(|v| v.abs() > p.fiber_bound) {
            return None;
        }
    }
    None
}

/// Distance on `Tⁿ × Rᵐ` with the flat metric.
pub fn torus_distance(a: &[f64], b: &[f64], angles: usize) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| {
            let d = if i < angles {
                let d = (x - y).rem_euclid(TAU);
                d.min(TAU - d)
            } else {
                x - y
            };
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Tensor grid with `per_circle` points per angle and `per_fiber` points
/// on `[−r, r]` per fiber axis, row-major.
pub fn seed_grid(angles: usize, fibers: usize, per_circle: usize, per_fiber: usize, r: f64) -> Vec<Vec<f64>> {
    let total = per_circle.pow(angles as u32) * per_fiber.pow(fibers as u32);
    (0..total)
        .map(|mut i| {
            let mut x = vec![0.0; angles + fibers];
            for d in (0..angles + fibers).rev() {
                if d < angles {
                    x[d] = TAU * (i % per_circle) as f64 / per_circle as f64;
                    i /= per_circle;
                } else {
                    let k = i % per_fiber;
                    i /= per_fiber;
                    x[d] = if per_fiber == 1 {
                        0.0
                    } else {
                        -r + 2.0 * r * k as f64 / (per_fiber - 1) as f64
                    };
                }
            }
            x
        })
        .collect()
}

/// Runs Newton from every seed in parallel and keeps the first
/// representative of each zero in seed order.
pub fn solve_from_seeds<M>(
    map: &M,
    seeds: &[Vec<f64>],
    angles: usize,
    p: NewtonParams,
    dedup_radius: f64,
) -> (Vec<Converged>, usize)
where
    M: Fn(&[f64]) -> (DVector<f64>, DMatrix<f64>) + Sync + ?Sized,
{
    let runs: Vec<Option<Converged>> = seeds.par_iter().map(|s| newton(map, s, angles, p)).collect();
    let converged = runs.iter().filter(|r| r.is_some()).count();
    let mut out: Vec<Converged> = Vec::new();
    for c in runs.into_iter().flatten() {
        if out.iter().all(|o| torus_distance(&o.x, &c.x, angles) >= dedup_radius) {
            out.push(c);
        }
    }
    (out, converged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_both_zeros_of_sine() {
        let map = |x: &[f64]| (DVector::from_element(1, x[0].sin()), DMatrix::from_element(1, 1, x[0].cos()));
        let seeds = seed_grid(1, 0, 16, 1, 1.0);
        let p = NewtonParams {
            tol: 1e-12,
            max_iter: 50,
            max_step: 0.5,
            fiber_bound: 10.0,
        };
        let (zeros, _) = solve_from_seeds(&map, &seeds, 1, p, 1e-4);
        assert_eq!(zeros.len(), 2);
        assert!(zeros[0].x[0].abs() < 1e-12);
        assert!((zeros[1].x[0] - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn wrapped_distance() {
        assert!((torus_distance(&[0.1, 1.0], &[TAU - 0.1, 1.0], 1) - 0.2).abs() < 1e-12);
        assert!((torus_distance(&[0.1, 1.0], &[0.1, -1.0], 1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn grid_shape() {
        let g = seed_grid(1, 1, 4, 3, 2.0);
        assert_eq!(g.len(), 12);
        assert_eq!(g[0], vec![0.0, -2.0]);
        assert_eq!(g[4], vec![TAU / 4.0, 0.0]);
    }
}
