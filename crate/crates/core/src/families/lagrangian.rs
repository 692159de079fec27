//! The Lagrangian `L_F = {(q, ∂_q F − F β) : ∂_ξ F = 0}` and its
//! intersections with the zero section, computed without solving the full
//! β-critical system.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::newton::{newton, seed_grid, torus_distance, NewtonParams};
use super::{BetaJet, FamilyError, FamilyFunction};
use crate::calculus::Form;

#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianConfig {
    /// Base samples per circle.
    pub per_circle: usize,
    /// Fiber seeds per axis for solving `∂_ξ F = 0`.
    pub per_fiber: usize,
    pub tol: f64,
    pub dedup_radius: f64,
    /// Fiber Hessians with smallest singular value below this are flagged.
    pub hessian_tol: f64,
}

impl Default for LagrangianConfig {
    fn default() -> Self {
        LagrangianConfig {
            per_circle: 128,
            per_fiber: 33,
            tol: 1e-10,
            dedup_radius: 1e-4,
            hessian_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LagrangianSample {
    pub q: Vec<f64>,
    pub xi: Vec<f64>,
    /// `∂_q F − F β` at `(q, ξ)`.
    pub p: Vec<f64>,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Intersection {
    pub q: Vec<f64>,
    pub xi: Vec<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LagrangianReport {
    pub samples: Vec<LagrangianSample>,
    pub flagged: usize,
    pub intersections: Vec<Intersection>,
    pub count: usize,
    pub warnings: Vec<String>,
}

struct Fiber<'a, F: ?Sized> {
    family: &'a F,
    beta: BetaJet,
    cfg: &'a LagrangianConfig,
    params: NewtonParams,
}

impl<F: FamilyFunction + ?Sized> Fiber<'_, F> {
    fn point(&self, q: &[f64], xi: &[f64]) -> Vec<f64> {
        q.iter().chain(xi).cloned().collect()
    }

    /// Newton for `∂_ξ F(q, ·) = 0` from `xi0`.
    fn solve(&self, q: &[f64], xi0: &[f64]) -> Option<Vec<f64>> {
        let n = q.len();
        let m = xi0.len();
        if m == 0 {
            return Some(Vec::new());
        }
        let map = |xi: &[f64]| {
            let j = self.family.jet(&self.point(q, xi));
            (
                j.grad.rows(n, m).into_owned(),
                j.hess.view((n, n), (m, m)).into_owned(),
            )
        };
        newton(&map, xi0, 0, self.params).map(|c| c.x)
    }

    fn all_solutions(&self, q: &[f64]) -> Vec<Vec<f64>> {
        let m = self.family.fiber_dim();
        let seeds = seed_grid(0, m, 1, self.cfg.per_fiber, self.family.fiber_radius());
        let mut out: Vec<Vec<f64>> = Vec::new();
        for s in seeds {
            if let Some(xi) = self.solve(q, &s) {
                if out.iter().all(|o| torus_distance(o, &xi, 0) >= self.cfg.dedup_radius) {
                    out.push(xi);
                }
            }
        }
        out
    }

    fn hessian_ok(&self, q: &[f64], xi: &[f64]) -> bool {
        let n = q.len();
        let m = xi.len();
        if m == 0 {
            return true;
        }
        let j = self.family.jet(&self.point(q, xi));
        let h = j.hess.view((n, n), (m, m)).into_owned();
        h.singular_values().min() > self.cfg.hessian_tol
    }

    fn p(&self, q: &[f64], xi: &[f64]) -> DVector<f64> {
        let n = q.len();
        let j = self.family.jet(&self.point(q, xi));
        let (b, _) = self.beta.eval(q);
        DVector::from_fn(n, |i, _| j.grad[i] - j.value * b[i])
    }
}

/// Samples `L_F` over a base grid and counts its intersections with the
/// zero section: by sign changes and bisection along each sheet on the
/// circle, by Newton on the reduced map `q ↦ p(q)` in higher dimension.
pub fn lagrangian_from_family<F: FamilyFunction + ?Sized>(
    family: &F,
    beta: &Form,
    cfg: &LagrangianConfig,
) -> Result<LagrangianReport, FamilyError> {
    let n = family.base_dim();
    if cfg.per_circle < 2 || cfg.per_fiber == 0 {
        return Err(FamilyError::InvalidConfig("need at least two base samples per circle".into()));
    }
    let fiber = Fiber {
        family,
        beta: BetaJet::new(beta, n)?,
        cfg,
        params: NewtonParams {
            tol: cfg.tol * 1e-2,
            max_iter: 60,
            max_step: 0.5,
            fiber_bound: 3.0 * family.fiber_radius() + 1.0,
        },
    };
    let base = seed_grid(n, 0, cfg.per_circle, 1, 0.0);
    let mut warnings = Vec::new();
    let mut samples = Vec::new();
    let mut sheets: Vec<Vec<Vec<f64>>> = Vec::with_capacity(base.len());
    for q in &base {
        let sols = fiber.all_solutions(q);
        let mut kept = Vec::new();
        for xi in sols {
            let ok = fiber.hessian_ok(q, &xi);
            if !ok {
                warnings.push(format!("degenerate fiber Hessian at q = {q:?}, ξ = {xi:?}; sample excluded"));
            }
            samples.push(LagrangianSample {
                q: q.clone(),
                xi: xi.clone(),
                p: fiber.p(q, &xi).as_slice().to_vec(),
                flagged: !ok,
            });
            if ok {
                kept.push(xi);
            }
        }
        sheets.push(kept);
    }
    let mut found: Vec<Intersection> = Vec::new();
    let push = |c: Intersection, found: &mut Vec<Intersection>| {
        let key: Vec<f64> = c.q.iter().chain(&c.xi).cloned().collect();
        if found.iter().all(|o| {
            let k: Vec<f64> = o.q.iter().chain(&o.xi).cloned().collect();
            torus_distance(&k, &key, n) >= cfg.dedup_radius
        }) {
            found.push(c);
        }
    };
    if n == 1 {
        let h = TAU / cfg.per_circle as f64;
        for (k, sheet) in sheets.iter().enumerate() {
            let a = k as f64 * h;
            for xi in sheet {
                let pa = fiber.p(&[a], xi)[0];
                if pa == 0.0 {
                    push(
                        Intersection {
                            q: vec![a],
                            xi: xi.clone(),
                            residual: 0.0,
                        },
                        &mut found,
                    );
                    continue;
                }
                let Some(xb) = fiber.solve(&[a + h], xi) else {
                    warnings.push(format!("sheet through θ = {a}, ξ = {xi:?} could not be continued"));
                    continue;
                };
                let pb = fiber.p(&[a + h], &xb)[0];
                if (pa < 0.0) == (pb < 0.0) || pb == 0.0 {
                    continue;
                }
                if let Some(c) = bisect_sheet(&fiber, a, a + h, xi.clone(), pa) {
                    push(c, &mut found);
                } else {
                    warnings.push(format!("bisection lost the sheet between θ = {a} and {}", a + h));
                }
            }
        }
    } else {
        for (q, sheet) in base.iter().zip(&sheets) {
            for xi in sheet {
                if let Some(c) = reduced_newton(&fiber, q, xi, cfg.tol) {
                    push(c, &mut found);
                }
            }
        }
    }
    let flagged = samples.iter().filter(|s| s.flagged).count();
    Ok(LagrangianReport {
        count: found.len(),
        intersections: found,
        samples,
        flagged,
        warnings,
    })
}

fn bisect_sheet<F: FamilyFunction + ?Sized>(
    fiber: &Fiber<'_, F>,
    mut a: f64,
    mut b: f64,
    mut xi: Vec<f64>,
    pa: f64,
) -> Option<Intersection> {
    let neg = pa < 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let xm = fiber.solve(&[m], &xi)?;
        let pm = fiber.p(&[m], &xm)[0];
        if pm == 0.0 {
            a = m;
            b = m;
            xi = xm;
            break;
        }
        if (pm < 0.0) == neg {
            a = m;
            xi = xm;
        } else {
            b = m;
        }
    }
    let t = 0.5 * (a + b);
    let xi = fiber.solve(&[t], &xi)?;
    let residual = fiber.p(&[t], &xi).amax();
    (residual < fiber.cfg.tol).then(|| Intersection {
        q: vec![t.rem_euclid(TAU)],
        xi,
        residual,
    })
}

fn reduced_newton<F: FamilyFunction + ?Sized>(
    fiber: &Fiber<'_, F>,
    q0: &[f64],
    xi0: &[f64],
    tol: f64,
) -> Option<Intersection> {
    let n = q0.len();
    let mut q = q0.to_vec();
    let mut xi = xi0.to_vec();
    let h = 1e-6;
    for _ in 0..60 {
        let p = fiber.p(&q, &xi);
        let res = p.amax();
        if res < tol {
            return Some(Intersection {
                q: q.iter().map(|v| v.rem_euclid(TAU)).collect(),
                xi,
                residual: res,
            });
        }
        let mut jac = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut qp = q.clone();
            let mut qm = q.clone();
            qp[j] += h;
            qm[j] -= h;
            let pp = fiber.p(&qp, &fiber.solve(&qp, &xi)?);
            let pm = fiber.p(&qm, &fiber.solve(&qm, &xi)?);
            jac.set_column(j, &((pp - pm) / (2.0 * h)));
        }
        let mut step = jac.lu().solve(&p)?;
        let norm = step.norm();
        if !norm.is_finite() {
            return None;
        }
        if norm > 0.5 {
            step *= 0.5 / norm;
        }
        for j in 0..n {
            q[j] -= step[j];
        }
        xi = fiber.solve(&q, &xi)?;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{parse_function, parse_one_form};
    use crate::families::{beta_critical_points, GeneratingFamily, SearchConfig};

    #[test]
    fn section_case() {
        let f = GeneratingFamily::from_function(parse_function("2 + cos(q)", 1).unwrap()).unwrap();
        let beta = parse_one_form("0.1 dq", 1).unwrap();
        let l = lagrangian_from_family(&f, &beta, &LagrangianConfig::default()).unwrap();
        assert_eq!(l.count, 2);
        assert_eq!(l.samples.len(), 128);
        let direct = beta_critical_points(&f, &beta, &SearchConfig::default()).unwrap();
        for a in &l.intersections {
            assert!(direct.points.iter().any(|b| torus_distance(&a.q, &b.q, 1) < 1e-8), "{a:?}");
        }
    }

    #[test]
    fn fiber_bump_family() {
        let json = serde_json::json!({
            "n": 1, "m": 1, "quad": [[1.0]], "ball_radius": 1.0,
            "core": [{"coeff": "0.3 cos(q)", "xi_powers": [0]}]
        });
        let f = GeneratingFamily::from_json(&json).unwrap();
        let beta = parse_one_form("0.1 dq", 1).unwrap();
        let l = lagrangian_from_family(&f, &beta, &LagrangianConfig::default()).unwrap();
        assert_eq!(l.flagged, 0);
        assert!(l.samples.iter().all(|s| s.xi[0].abs() < 1e-9));
        assert_eq!(l.count, 2);
    }

    #[test]
    fn torus_reduced_route() {
        let f = GeneratingFamily::from_function(parse_function("3 + cos(q1) + cos(q2)", 2).unwrap()).unwrap();
        let cfg = LagrangianConfig {
            per_circle: 12,
            ..LagrangianConfig::default()
        };
        let l = lagrangian_from_family(&f, &parse_one_form("0", 2).unwrap(), &cfg).unwrap();
        assert_eq!(l.count, 4);
    }
}
