use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lcs_lab::calculus::random::random_trig_poly;
use lcs_lab::calculus::{
    gauge_transform, hamiltonian_vector_field, hamiltonian_vector_field_semi, parse_function, parse_one_form,
    ConformalStructure, ExpSeries, Form, Grid, SemiForm,
};
use lcs_lab::dynamics::{integrate_flow, FlowConfig, FnField};

fn oscillator_error(dt: f64) -> f64 {
    let field = FnField::new(2, |_t, x: &[f64]| DVector::from_vec(vec![x[1], -x[0]]));
    let traj = integrate_flow(&field, &FlowConfig::new(2.0, dt, vec![vec![1.0, 0.0]])).unwrap();
    let x = &traj[0].last().x;
    (x[0] - 2f64.cos()).hypot(x[1] + 2f64.sin())
}

#[test]
fn rk4_is_fourth_order() {
    let (coarse, fine) = (oscillator_error(0.1), oscillator_error(0.05));
    let order = (coarse / fine).log2();
    assert!((order - 4.0).abs() < 0.2, "observed order {order}");
}

#[test]
fn sample_times_are_hit_exactly() {
    let field = FnField::new(1, |_t, _x: &[f64]| DVector::from_vec(vec![1.0]));
    let cfg = FlowConfig::new(1.0, 0.3, vec![vec![0.0]]).sampled_at(vec![0.25, 0.5]);
    let traj = integrate_flow(&field, &cfg).unwrap();
    let times: Vec<f64> = traj[0].samples.iter().map(|s| s.t).collect();
    assert_eq!(times, vec![0.0, 0.25, 0.5, 1.0]);
    assert!((traj[0].last().x[0] - 1.0).abs() < 1e-14);
}

#[test]
fn exit_box_stops_the_trajectory() {
    let field = FnField::new(2, |_t, _x: &[f64]| DVector::from_vec(vec![0.0, 1.0]));
    let cfg = FlowConfig::new(5.0, 0.1, vec![vec![0.0, 0.0]]).with_exit_box(1, 1.0);
    let traj = integrate_flow(&field, &cfg).unwrap();
    let t = traj[0].exited_at.expect("left the box");
    assert!((1.0..=1.1 + 1e-12).contains(&t), "exited at {t}");
}

/// Gauge-equivalent data `(η, ω, H)` and `(η + df, e^f ω, e^f H)` generate
/// the same flow.
#[test]
fn gauge_related_flows_coincide() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grid = Grid { per_circle: 8, per_line: 5, line_box: 3.0 };
    for (beta, f) in [("0.3 dq", "cos(q)"), ("-1 dq", "1/2 sin(q) + 1/4 cos(2q)")] {
        let (st, _) = ConformalStructure::cotangent(&parse_one_form(beta, 1).unwrap(), grid).unwrap();
        let f = parse_function(f, 1).unwrap();
        let moved = gauge_transform(&st, &f).unwrap();
        let h = random_trig_poly(&mut rng, 1, 1, 3);
        let x = hamiltonian_vector_field(&st, &h).unwrap();
        let weight = ExpSeries::new(f.extend_lines(1), grid.line_box);
        let y = hamiltonian_vector_field_semi(&moved, &SemiForm::weighted(weight, Form::function(h))).unwrap();
        let start = vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![4.0, -0.5]];
        let cfg = FlowConfig::new(0.5, 0.01, start).with_exit_box(1, grid.line_box);
        let (a, b) = (integrate_flow(&x, &cfg).unwrap(), integrate_flow(&y, &cfg).unwrap());
        for (u, v) in a.iter().zip(&b) {
            assert_eq!(u.samples.len(), v.samples.len());
            for (s, r) in u.samples.iter().zip(&v.samples) {
                let gap = s.x.iter().zip(&r.x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
                assert!(gap < 1e-9, "{beta}: gap {gap:e} at t = {}", s.t);
            }
        }
    }
}
