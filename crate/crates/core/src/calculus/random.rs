//! Seeded random trig polynomials and forms for identity checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use super::{Form, Monomial, TrigPoly};

pub fn random_rational<R: Rng>(rng: &mut R) -> BigRational {
    let mut n = rng.gen_range(-5i64..=5);
    if n == 0 {
        n = 1;
    }
    BigRational::new(BigInt::from(n), BigInt::from(rng.gen_range(1i64..=4)))
}

/// A sum of up to `max_terms` monomials with frequencies in `[−2, 2]` and
/// line degrees at most 2.
pub fn random_trig_poly<R: Rng>(rng: &mut R, angles: usize, lines: usize, max_terms: usize) -> TrigPoly {
    let count = rng.gen_range(1..=max_terms.max(1));
    TrigPoly::from_terms(
        angles,
        lines,
        (0..count).map(|_| {
            let m = Monomial {
                powers: (0..lines).map(|_| rng.gen_range(0..=2)).collect(),
                freq: (0..angles).map(|_| rng.gen_range(-2..=2)).collect(),
                sin: rng.gen_bool(0.5),
            };
            (m, random_rational(rng))
        }),
    )
}

/// A random `degree`-form with one to three basis terms.
pub fn random_form<R: Rng>(rng: &mut R, angles: usize, lines: usize, degree: usize) -> Form {
    let dim = angles + lines;
    let mut out = Form::zero_on(angles, lines, degree);
    if degree > dim {
        return out;
    }
    for _ in 0..rng.gen_range(1..=3) {
        let mut idx: Vec<usize> = (0..dim).collect();
        for i in 0..degree {
            let j = rng.gen_range(i..dim);
            idx.swap(i, j);
        }
        idx.truncate(degree);
        out = out.add(&Form::monomial(&idx, random_trig_poly(rng, angles, lines, 3)));
    }
    out
}

/// A closed 1-form `Σ c_i dq_i + dg`.
pub fn random_closed_one_form<R: Rng>(rng: &mut R, angles: usize, lines: usize) -> Form {
    let mut eta = Form::function(random_trig_poly(rng, angles, lines, 3)).d();
    for i in 0..angles {
        let c = TrigPoly::constant(angles, lines, random_rational(rng));
        eta = eta.add(&Form::monomial(&[i], c));
    }
    eta
}

/// Random field components.
pub fn random_field<R: Rng>(rng: &mut R, angles: usize, lines: usize) -> Vec<TrigPoly> {
    (0..angles + lines).map(|_| random_trig_poly(rng, angles, lines, 2)).collect()
}
