//! Regions `X₊ = {F ≥ ε}`, `X₋ = {F ≤ −ε}`, `X₀`, the positive function
//! `G` with `G = |F|` off `X₀`, `H = log G` and the closed form
//! `γ = dH − β`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;
use serde::Serialize;

use super::critical::{beta_map, critical_points_with, negative_index};
use super::newton::{solve_from_seeds, torus_distance};
use super::{BetaCriticalPoint, BetaJet, CriticalSearch, FamilyError, FamilyFunction, Region, SearchConfig};
use crate::calculus::{normalized_periods, Form, Space};

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub epsilon: f64,
    /// `δ = smoothing_delta · ε`.
    pub smoothing_delta: f64,
    pub search: SearchConfig,
    /// Lower bound for `|d_β F|` and `|dF|` on `{|F| < 2ε}`.
    pub separation_tol: f64,
    pub pairing_tol: f64,
    pub curl_step: f64,
    /// Base samples per circle for the curl check (fiber axes use 9).
    pub curl_per_circle: usize,
    pub period_samples: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            epsilon: 0.1,
            smoothing_delta: 0.1,
            search: SearchConfig::default(),
            separation_tol: 1e-6,
            pairing_tol: 1e-6,
            curl_step: 1e-3,
            curl_per_circle: 16,
            period_samples: 4096,
        }
    }
}

/// `χ`: smooth, `1` on `[−½, ½]`, `0` outside `(−1, 1)`.
pub fn chi(s: f64) -> (f64, f64) {
    let a = s.abs();
    if a >= 1.0 {
        return (0.0, 0.0);
    }
    if a <= 0.5 {
        return (1.0, 0.0);
    }
    // step(u) = φ(u) / (φ(u) + φ(1 − u)), φ(u) = e^{−1/u}, u = 2(1 − |s|).
    let u = 2.0 * (1.0 - a);
    let phi = |u: f64| if u <= 0.0 { 0.0 } else { (-1.0 / u).exp() };
    let dphi = |u: f64| if u <= 0.0 { 0.0 } else { (-1.0 / u).exp() / (u * u) };
    let (p, q) = (phi(u), phi(1.0 - u));
    let step = p / (p + q);
    let dstep = (dphi(u) * q + p * dphi(1.0 - u)) / ((p + q) * (p + q));
    (step, -2.0 * s.signum() * dstep)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Smoothing {
    pub epsilon: f64,
    pub delta: f64,
}

impl Smoothing {
    /// `G(F) = sqrt(F² + δ²χ(F/ε))`, which is `|F|` once `|F| ≥ ε`.
    pub fn g(&self, f: f64) -> f64 {
        let (c, _) = chi(f / self.epsilon);
        if c == 0.0 {
            f.abs()
        } else {
            (f * f + self.delta * self.delta * c).sqrt()
        }
    }

    /// `κ(F) = G′(F)/G(F)`, so that `dH = κ dF`.
    pub fn kappa(&self, f: f64) -> f64 {
        let (c, dc) = chi(f / self.epsilon);
        if c == 0.0 {
            return 1.0 / f;
        }
        let d2 = self.delta * self.delta;
        (f + d2 * dc / (2.0 * self.epsilon)) / (f * f + d2 * c)
    }

    fn dkappa(&self, f: f64) -> f64 {
        let h = 1e-6 * self.epsilon.max(f.abs());
        (self.kappa(f + h) - self.kappa(f - h)) / (2.0 * h)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaZero {
    pub location: Vec<f64>,
    pub value: f64,
    pub region: Region,
    pub residual: f64,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pairing {
    pub gamma: usize,
    pub critical: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionCounts {
    pub plus: usize,
    pub minus: usize,
    pub zero: usize,
}

/// Everything built from `(F, β, ε, δ)`. The samplers `g`, `h`, `gamma`
/// evaluate the smoothed objects anywhere.
pub struct PipelineArtifacts<'a, F: ?Sized> {
    family: &'a F,
    beta: BetaJet,
    pub smoothing: Smoothing,
    pub critical: CriticalSearch,
    pub gamma_zeros: Vec<GammaZero>,
    pub gamma_counts: RegionCounts,
    pub pairings: Vec<Pairing>,
    /// Zeros of `γ` on `X₊ ∪ X₋` match zeros of `dF − Fβ` one to one.
    pub bijection: bool,
    pub max_pairing_distance: f64,
    pub curl_residual: f64,
    /// `max_i |∮_{q_i} γ + ∮_{q_i} β|` along the loops at `ξ = 0`.
    pub period_residual: f64,
    pub min_separation_residual: f64,
}

impl<F: FamilyFunction + ?Sized> PipelineArtifacts<'_, F> {
    pub fn g(&self, x: &[f64]) -> f64 {
        self.smoothing.g(self.family.value(x))
    }

    pub fn h(&self, x: &[f64]) -> f64 {
        self.g(x).ln()
    }

    pub fn gamma(&self, x: &[f64]) -> DVector<f64> {
        gamma_map(self.family, &self.beta, &self.smoothing, x).0
    }

    pub fn summary(&self) -> PipelineSummary {
        PipelineSummary {
            epsilon: self.smoothing.epsilon,
            delta: self.smoothing.delta,
            critical_points: self.critical.points.clone(),
            gamma_zeros: self.gamma_zeros.clone(),
            gamma_counts: self.gamma_counts.clone(),
            pairings: self.pairings.clone(),
            bijection: self.bijection,
            max_pairing_distance: self.max_pairing_distance,
            curl_residual: self.curl_residual,
            period_residual: self.period_residual,
            min_separation_residual: self.min_separation_residual,
        }
    }
}

/// Serializable view of [`PipelineArtifacts`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineSummary {
    pub epsilon: f64,
    pub delta: f64,
    pub critical_points: Vec<BetaCriticalPoint>,
    pub gamma_zeros: Vec<GammaZero>,
    pub gamma_counts: RegionCounts,
    pub pairings: Vec<Pairing>,
    pub bijection: bool,
    pub max_pairing_distance: f64,
    pub curl_residual: f64,
    pub period_residual: f64,
    pub min_separation_residual: f64,
}

fn padded_beta(beta: &BetaJet, x: &[f64], d: usize) -> (DVector<f64>, DMatrix<f64>) {
    let n = beta.dim();
    let (b, db) = beta.eval(&x[..n]);
    let mut bb = DVector::zeros(d);
    bb.rows_mut(0, n).copy_from(&b);
    let mut dbb = DMatrix::zeros(d, d);
    dbb.view_mut((0, 0), (n, n)).copy_from(&db);
    (bb, dbb)
}

/// `γ = κ(F) dF − β` and its Jacobian `κ′ dF dFᵀ + κ ∇²F − ∂β`.
fn gamma_map<F: FamilyFunction + ?Sized>(
    family: &F,
    beta: &BetaJet,
    s: &Smoothing,
    x: &[f64],
) -> (DVector<f64>, DMatrix<f64>) {
    let d = family.dim();
    let jet = family.jet(x);
    let (b, db) = padded_beta(beta, x, d);
    let k = s.kappa(jet.value);
    let dk = s.dkappa(jet.value);
    let r = &jet.grad * k - b;
    let j = &jet.grad * jet.grad.transpose() * dk + &jet.hess * k - db;
    (r, j)
}

fn fourth_order<G: Fn(&[f64]) -> DVector<f64>>(g: &G, x: &[f64], j: usize, h: f64) -> DVector<f64> {
    let at = |s: f64| {
        let mut y = x.to_vec();
        y[j] += s * h;
        g(&y)
    };
    (at(-2.0) - at(-1.0) * 8.0 + at(1.0) * 8.0 - at(2.0)) / (12.0 * h)
}

/// Fourth-order differences at `h` and `h/2`, Richardson-combined.
fn sixth_order<G: Fn(&[f64]) -> DVector<f64>>(g: &G, x: &[f64], j: usize, h: f64) -> DVector<f64> {
    let coarse = fourth_order(g, x, j, h);
    let fine = fourth_order(g, x, j, 0.5 * h);
    (fine * 16.0 - coarse) / 15.0
}

/// Builds the pipeline after checking the separation condition for `ε`:
/// `d_β F ≠ 0` and `dF ≠ 0` wherever `|F| < 2ε`.
pub fn build_pipeline<'a, F: FamilyFunction + ?Sized>(
    family: &'a F,
    beta: &Form,
    cfg: &PipelineConfig,
) -> Result<PipelineArtifacts<'a, F>, FamilyError> {
    if !(cfg.epsilon > 0.0) || !(cfg.smoothing_delta > 0.0) {
        return Err(FamilyError::InvalidConfig("ε and δ must be positive".into()));
    }
    let n = family.base_dim();
    let d = family.dim();
    let eps = cfg.epsilon;
    let beta = BetaJet::new(beta, n)?;
    let search = SearchConfig {
        epsilon: eps,
        ..cfg.search.clone()
    };

    // Separation: sampled on the seed grid, and exact at located zeros.
    let zero_beta = BetaJet::new(&Form::zero(&Space::torus(n), 1), n)?;
    let seeds = search.seeds(family);
    let mut min_sep = f64::INFINITY;
    for x in &seeds {
        let jet = family.jet(x);
        if jet.value.abs() >= 2.0 * eps {
            continue;
        }
        let r = beta_map(family, &beta, x).0.amax().min(jet.grad.amax());
        min_sep = min_sep.min(r);
        if r <= cfg.separation_tol {
            return Err(FamilyError::EpsilonTooLarge {
                epsilon: eps,
                point: x.clone(),
                residual: r,
            });
        }
    }
    let critical = critical_points_with(family, &beta, &search)?;
    let plain = critical_points_with(family, &zero_beta, &search)?;
    for p in critical.points.iter().chain(&plain.points) {
        if p.value.abs() < 2.0 * eps {
            return Err(FamilyError::CriticalValueNearZero {
                point: p.location(),
                value: p.value,
                epsilon: eps,
            });
        }
    }

    let smoothing = Smoothing {
        epsilon: eps,
        delta: cfg.smoothing_delta * eps,
    };
    let map = |x: &[f64]| gamma_map(family, &beta, &smoothing, x);
    let (zeros, _) = solve_from_seeds(&map, &seeds, n, search.params(family), search.dedup_radius);
    let gamma_zeros: Vec<GammaZero> = zeros
        .iter()
        .map(|c| {
            let value = family.value(&c.x);
            let sym = (&c.jacobian + c.jacobian.transpose()) * 0.5;
            GammaZero {
                location: c.x.clone(),
                value,
                region: Region::of(value, eps),
                residual: c.residual,
                index: negative_index(&sym),
            }
        })
        .collect();
    let count = |r: Region| gamma_zeros.iter().filter(|z| z.region == r).count();
    let gamma_counts = RegionCounts {
        plus: count(Region::Plus),
        minus: count(Region::Minus),
        zero: count(Region::Zero),
    };

    let mut pairings = Vec::new();
    let mut used = vec![false; critical.points.len()];
    let mut bijection = true;
    for (gi, z) in gamma_zeros.iter().enumerate() {
        if z.region == Region::Zero {
            continue;
        }
        let best = critical
            .points
            .iter()
            .enumerate()
            .map(|(ci, p)| (ci, torus_distance(&z.location, &p.location(), n)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((ci, dist)) if dist < cfg.pairing_tol && !used[ci] => {
                used[ci] = true;
                pairings.push(Pairing {
                    gamma: gi,
                    critical: ci,
                    distance: dist,
                });
            }
            _ => bijection = false,
        }
    }
    bijection &= used.iter().all(|u| *u);
    let max_pairing_distance = pairings.iter().map(|p| p.distance).fold(0.0, f64::max);

    let gamma_of = |x: &[f64]| map(x).0;
    let mut curl_residual: f64 = 0.0;
    if d >= 2 {
        let curl_seeds = super::newton::seed_grid(n, d - n, cfg.curl_per_circle, 9, family.fiber_radius() * 1.2);
        for x in &curl_seeds {
            // Inside the smoothing band γ varies on the scale min(G, ε)/|dF|.
            let jet = family.jet(x);
            let scale = smoothing.g(jet.value).min(0.2 * eps) / jet.grad.norm().max(1e-300);
            let h = cfg.curl_step.min(0.01 * scale);
            let cols: Vec<DVector<f64>> = (0..d).map(|j| sixth_order(&gamma_of, x, j, h)).collect();
            for i in 0..d {
                for j in i + 1..d {
                    curl_residual = curl_residual.max((cols[j][i] - cols[i][j]).abs());
                }
            }
        }
    }

    let periods = normalized_periods(beta.form());
    let mut period_residual: f64 = 0.0;
    let k = cfg.period_samples.max(8);
    for i in 0..n {
        let mut sum = 0.0;
        for s in 0..k {
            let mut x = vec![0.0; d];
            x[i] = TAU * s as f64 / k as f64;
            sum += gamma_of(&x)[i];
        }
        let gamma_period = sum * TAU / k as f64;
        let beta_period = TAU * periods.get(i).and_then(|p| p.to_f64()).unwrap_or(0.0);
        period_residual = period_residual.max((gamma_period + beta_period).abs());
    }

    Ok(PipelineArtifacts {
        family,
        beta,
        smoothing,
        critical,
        gamma_zeros,
        gamma_counts,
        pairings,
        bijection,
        max_pairing_distance,
        curl_residual,
        period_residual,
        min_separation_residual: min_sep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{parse_function, parse_one_form};
    use crate::families::{GeneratingFamily, Negated};

    #[test]
    fn chi_shape() {
        assert_eq!(chi(0.3), (1.0, 0.0));
        assert_eq!(chi(-1.2), (0.0, 0.0));
        let (v, _) = chi(0.75);
        assert!((v - 0.5).abs() < 1e-12);
        let h = 1e-6;
        for s in [0.6, 0.8, -0.7, 0.95] {
            let fd = (chi(s + h).0 - chi(s - h).0) / (2.0 * h);
            assert!((fd - chi(s).1).abs() < 1e-6, "{s}");
        }
    }

    #[test]
    fn smoothing_is_positive_and_exact_off_x0() {
        let s = Smoothing { epsilon: 0.1, delta: 0.01 };
        assert!((s.g(0.0) - 0.01).abs() < 1e-15);
        assert_eq!(s.g(-0.1), 0.1);
        assert_eq!(s.g(0.3), 0.3);
        for f in [-0.09, -0.04, 0.0, 0.02, 0.07] {
            let h = 1e-7;
            let fd = (s.g(f + h).ln() - s.g(f - h).ln()) / (2.0 * h);
            assert!((fd - s.kappa(f)).abs() < 1e-4 * (1.0 + fd.abs()), "{f}");
        }
    }

    #[test]
    fn positive_family_has_empty_x0() {
        let f = GeneratingFamily::from_function(parse_function("2 + cos(q)", 1).unwrap()).unwrap();
        let cfg = PipelineConfig {
            epsilon: 0.5,
            ..PipelineConfig::default()
        };
        let p = build_pipeline(&f, &parse_one_form("0.1 dq", 1).unwrap(), &cfg).unwrap();
        assert_eq!(p.gamma_counts, RegionCounts { plus: 2, minus: 0, zero: 0 });
        assert!(p.bijection);
        assert!(p.max_pairing_distance < 1e-6);
        for x in [[0.3], [2.0], [4.0]] {
            assert_eq!(p.g(&x), f.value(&x));
        }
        assert!(p.period_residual < 1e-6);
    }

    #[test]
    fn sign_flip_swaps_regions() {
        let f = GeneratingFamily::from_function(parse_function("2 + cos(q)", 1).unwrap()).unwrap();
        let beta = parse_one_form("0.1 dq", 1).unwrap();
        let cfg = PipelineConfig::default();
        let a = build_pipeline(&f, &beta, &cfg).unwrap();
        let neg = Negated(&f);
        let b = build_pipeline(&neg, &beta, &cfg).unwrap();
        assert_eq!(a.gamma_counts.plus, b.gamma_counts.minus);
        assert_eq!(a.gamma_counts.minus, b.gamma_counts.plus);
        assert_eq!(a.critical.count(), b.critical.count());
    }

    #[test]
    fn epsilon_too_large() {
        let f = GeneratingFamily::from_function(parse_function("cos(q)", 1).unwrap()).unwrap();
        let cfg = PipelineConfig {
            epsilon: 0.6,
            ..PipelineConfig::default()
        };
        assert!(matches!(
            build_pipeline(&f, &parse_one_form("0", 1).unwrap(), &cfg),
            Err(FamilyError::CriticalValueNearZero { .. }) | Err(FamilyError::EpsilonTooLarge { .. })
        ));
    }
}
