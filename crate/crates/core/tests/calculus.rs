use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lcs_lab::calculus::random::{random_closed_one_form, random_form, random_trig_poly};
use lcs_lab::calculus::{
    gauge_identity_residual, gauge_transform, hamiltonian_vector_field, hamiltonian_vector_field_semi,
    parse_function, parse_one_form, ConformalStructure, ExpSeries, Form, Grid, SemiForm, Space,
};

/// A random base `Tᵃ × Rˡ` with `a + l ≤ 4`.
fn shape(rng: &mut ChaCha8Rng) -> (usize, usize) {
    let a = rng.gen_range(1..=3);
    (a, rng.gen_range(0..=(4 - a).min(1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn twisted_differential_squares_to_zero(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, l) = shape(&mut rng);
        let eta = random_closed_one_form(&mut rng, a, l);
        let k = rng.gen_range(0..a + l);
        let beta = random_form(&mut rng, a, l, k);
        let dd = beta.d_eta(&eta).unwrap().d_eta(&eta).unwrap();
        prop_assert!(dd.is_zero());
    }

    #[test]
    fn leibniz_rule(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, l) = shape(&mut rng);
        let eta = random_closed_one_form(&mut rng, a, l);
        let f = random_trig_poly(&mut rng, a, l, 3);
        let k = rng.gen_range(0..a + l);
        let beta = random_form(&mut rng, a, l, k);
        let lhs = beta.mul_fn(&f).d_eta(&eta).unwrap();
        let rhs = Form::function(f.clone()).d().wedge(&beta).add(&beta.d_eta(&eta).unwrap().mul_fn(&f));
        prop_assert_eq!(lhs, rhs);
    }

    /// `d_{η₁+η₂}(α∧γ) = d_{η₁}α ∧ γ + (−1)^k α ∧ d_{η₂}γ`.
    #[test]
    fn wedge_adds_lee_forms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, l) = shape(&mut rng);
        let (e1, e2) = (random_closed_one_form(&mut rng, a, l), random_closed_one_form(&mut rng, a, l));
        let k = rng.gen_range(0..a + l);
        let alpha = random_form(&mut rng, a, l, k);
        let j = rng.gen_range(0..a + l - k);
        let gamma = random_form(&mut rng, a, l, j);
        let lhs = alpha.wedge(&gamma).d_eta(&e1.add(&e2)).unwrap();
        let second = alpha.wedge(&gamma.d_eta(&e2).unwrap());
        let second = if k % 2 == 1 { second.neg() } else { second };
        prop_assert_eq!(lhs, alpha.d_eta(&e1).unwrap().wedge(&gamma).add(&second));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn gauge_identity_holds_on_a_grid(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rng.gen_range(1..=2);
        let eta = random_closed_one_form(&mut rng, a, 1);
        let f = random_trig_poly(&mut rng, a, 0, 2).extend_lines(1);
        let k = rng.gen_range(0..=a);
        let beta = random_form(&mut rng, a, 1, k);
        let space = Space::torus(a).with_line("p");
        let grid = Grid { per_circle: 7, per_line: 3, line_box: 1.0 };
        let residual = gauge_identity_residual(&eta, &f, &beta, &grid.points(&space), 1.0).unwrap();
        prop_assert!(residual < 1e-8, "residual {residual:e}");
    }

    /// The Hamiltonian field of `H` for `(η, ω)` equals that of `e^f H` for
    /// `(η + df, e^f ω)`.
    #[test]
    fn gauge_related_hamiltonians_share_a_field(seed in any::<u64>(), c in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let beta = parse_one_form(&format!("{c:.3} dq"), 1).unwrap();
        let grid = Grid { per_circle: 8, per_line: 5, line_box: 2.0 };
        let (st, _) = ConformalStructure::cotangent(&beta, grid).unwrap();
        let f = random_trig_poly(&mut rng, 1, 0, 2);
        let h = random_trig_poly(&mut rng, 1, 1, 3);
        let moved = gauge_transform(&st, &f).unwrap();
        let x = hamiltonian_vector_field(&st, &h).unwrap();
        let weight = ExpSeries::new(f.extend_lines(1), grid.line_box);
        let y = hamiltonian_vector_field_semi(&moved, &SemiForm::weighted(weight, Form::function(h))).unwrap();
        for p in grid.points(&Space::cotangent(1)) {
            let (u, v) = (x.eval(&p).unwrap(), y.eval(&p).unwrap());
            prop_assert!((u - v).amax() < 1e-8, "at {p:?}");
        }
    }
}

#[test]
fn lee_form_of_a_gauge_transform_shifts_by_df() {
    let beta = parse_one_form("1/2 dq1", 2).unwrap();
    let (st, _) = ConformalStructure::cotangent(&beta, Grid::coarse()).unwrap();
    let f = parse_function("cos(q2)", 2).unwrap();
    let moved = gauge_transform(&st, &f).unwrap();
    let df = Form::function(f.extend_lines(2)).d();
    assert_eq!(moved.eta(), &st.eta().add(&df));
}
