use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::critical::critical_points_with;
use super::{BetaCriticalPoint, BetaJet, FamilyError, FamilyFunction, SearchConfig, Stabilized};
use crate::calculus::{normalized_periods, Form};
use crate::novikov::{novikov_betti, CellComplex, Cocycle};
use crate::ring::FieldTag;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremReport {
    /// Number of β-critical points of the (possibly stabilized) family.
    pub count: usize,
    /// Sum of the Novikov Betti numbers.
    pub rank: usize,
    pub satisfied: bool,
    pub betti: Vec<usize>,
    pub field: FieldTag,
    /// The family had index 0 at infinity and `−ξ′²` was added.
    pub stabilized: bool,
    pub quad_index: usize,
    /// Integral class used for the Novikov computation.
    pub cocycle: Vec<String>,
    pub exact_on_grid: bool,
    /// The family's existence hypothesis is the caller's assertion.
    pub hypothesis: &'static str,
    pub points: Vec<BetaCriticalPoint>,
}

fn rational_strings(v: &[BigRational]) -> Vec<String> {
    v.iter().map(|r| r.to_string()).collect()
}

/// Loops in the complex representing the torus generators.
fn torus_cycles(complex: &CellComplex, n: usize) -> Result<Vec<Vec<(usize, i64)>>, FamilyError> {
    let cycles: Vec<Vec<(usize, i64)>> = match complex.cycles() {
        Some(c) => c.to_vec(),
        None if complex.count(0) == 1 && complex.num_edges() == n => (0..n).map(|i| vec![(i, 1)]).collect(),
        None => {
            return Err(FamilyError::MissingCocycle(
                "the complex needs a 'cycles' list identifying the torus generators".into(),
            ))
        }
    };
    if cycles.len() != n {
        return Err(FamilyError::MissingCocycle(format!(
            "{} cycles given for a base torus of dimension {n}",
            cycles.len()
        )));
    }
    Ok(cycles)
}

/// Checks that the cocycle's periods are a positive multiple of the
/// periods of `β`; both may vanish.
fn check_periods(beta: &[BigRational], cocycle: &[BigRational]) -> Result<(), FamilyError> {
    let mismatch = || FamilyError::PeriodMismatch {
        beta: rational_strings(beta),
        cocycle: rational_strings(cocycle),
    };
    let Some(i) = beta.iter().position(|b| !b.is_zero()) else {
        return if cocycle.iter().all(Zero::is_zero) { Ok(()) } else { Err(mismatch()) };
    };
    let scale = &cocycle[i] / &beta[i];
    if !scale.is_positive() {
        return Err(mismatch());
    }
    if beta.iter().zip(cocycle).all(|(b, c)| &(b * &scale) == c) {
        Ok(())
    } else {
        Err(mismatch())
    }
}

/// Compares the number of β-critical points of `family` with the total
/// Novikov rank of `(complex, [β])`. Without a cocycle, a one-vertex
/// complex takes the class of `β` on its edges.
pub fn theorem_bound_report<F: FamilyFunction + ?Sized>(
    family: &F,
    beta: &Form,
    complex: &CellComplex,
    cocycle: Option<&Cocycle>,
    field: FieldTag,
    cfg: &SearchConfig,
) -> Result<TheoremReport, FamilyError> {
    let n = family.base_dim();
    let beta_jet = BetaJet::new(beta, n)?;
    let periods = {
        let mut p = normalized_periods(beta);
        p.resize(n, BigRational::zero());
        p
    };
    let cycles = torus_cycles(complex, n)?;
    let cocycle = match cocycle {
        Some(c) => {
            c.validate(complex)?;
            let along: Vec<BigRational> = cycles.iter().map(|w| c.evaluate(w)).collect();
            check_periods(&periods, &along)?;
            c.clone()
        }
        None => {
            if complex.count(0) != 1 || cycles.iter().any(|w| w.len() != 1 || w[0].1 != 1) {
                return Err(FamilyError::MissingCocycle(
                    "a cocycle is required unless each torus generator is a single edge of a one-vertex complex".into(),
                ));
            }
            let mut values = vec![BigRational::zero(); complex.num_edges()];
            for (w, p) in cycles.iter().zip(&periods) {
                values[w[0].0] = p.clone();
            }
            Cocycle::rational(values)
        }
    };
    let betti = novikov_betti(complex, &cocycle, field)?;
    let stabilized = family.quad_index() == 0;
    let search = if stabilized {
        critical_points_with(&Stabilized::negative(family), &beta_jet, cfg)?
    } else {
        critical_points_with(family, &beta_jet, cfg)?
    };
    let count = search.count();
    let rank = betti.total();
    Ok(TheoremReport {
        count,
        rank,
        satisfied: count >= rank,
        betti: betti.betti,
        field,
        stabilized,
        quad_index: family.quad_index() + usize::from(stabilized),
        cocycle: rational_strings(cocycle.values()),
        exact_on_grid: search.exact_on_grid,
        hypothesis: "assumed",
        points: search.points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{parse_function, parse_one_form};
    use crate::families::GeneratingFamily;

    fn circle_family() -> GeneratingFamily {
        GeneratingFamily::from_function(parse_function("2 + cos(q)", 1).unwrap()).unwrap()
    }

    #[test]
    fn circle_configs() {
        let cfg = SearchConfig::default();
        let cx = CellComplex::circle();
        let r = theorem_bound_report(&circle_family(), &parse_one_form("0", 1).unwrap(), &cx, None, FieldTag::Rational, &cfg)
            .unwrap();
        assert_eq!((r.count, r.rank, r.satisfied, r.stabilized), (2, 2, true, true));
        let r = theorem_bound_report(
            &circle_family(),
            &parse_one_form("2 dq", 1).unwrap(),
            &cx,
            None,
            FieldTag::Rational,
            &cfg,
        )
        .unwrap();
        assert_eq!((r.count, r.rank, r.satisfied), (0, 0, true));
        let r = theorem_bound_report(
            &circle_family(),
            &parse_one_form("0.1 dq", 1).unwrap(),
            &cx,
            Some(&Cocycle::integral(&[1])),
            FieldTag::Rational,
            &cfg,
        )
        .unwrap();
        assert_eq!((r.count, r.rank, r.satisfied), (2, 0, true));
    }

    #[test]
    fn period_mismatch() {
        let cfg = SearchConfig::default();
        let cx = CellComplex::circle();
        let beta = parse_one_form("0.1 dq", 1).unwrap();
        for bad in [[-1], [0]] {
            assert!(matches!(
                theorem_bound_report(&circle_family(), &beta, &cx, Some(&Cocycle::integral(&bad)), FieldTag::Rational, &cfg),
                Err(FamilyError::PeriodMismatch { .. })
            ));
        }
        assert!(check_periods(
            &[BigRational::from_integer(1.into()), BigRational::zero()],
            &[BigRational::from_integer(3.into()), BigRational::from_integer(1.into())]
        )
        .is_err());
    }
}
