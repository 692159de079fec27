use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use lcs_lab::ring::{FieldTag, LaurentMatrix, LaurentPoly};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn poly(field: FieldTag) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-3i64..=3, -4i64..=4), 0..4).prop_map(move |terms| {
        LaurentPoly::from_terms(field, terms)
    })
}

fn field() -> impl Strategy<Value = FieldTag> {
    prop_oneof![Just(FieldTag::Rational), Just(FieldTag::Two)]
}

/// Sparse matrices up to 8×8: each entry is zero with probability 1/2.
fn matrix(field: FieldTag) -> impl Strategy<Value = LaurentMatrix> {
    (1usize..=8, 1usize..=8).prop_flat_map(move |(r, c)| {
        prop::collection::vec(prop_oneof![Just(LaurentPoly::zero(field)), poly(field)], r * c).prop_map(move |v| {
            let rows = v.chunks(c).map(<[_]>::to_vec).collect();
            LaurentMatrix::from_rows(field, rows).unwrap()
        })
    })
}

/// Rank over Q by plain Gaussian elimination.
fn rank_q(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                for k in c..cols {
                    let v = &m[rank][k] * &f;
                    m[r][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ring_axioms((f, a, b, c) in field().prop_flat_map(|f| (Just(f), poly(f), poly(f), poly(f)))) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.mul(&LaurentPoly::one(f)).unwrap(), a.clone());
        prop_assert!(a.sub(&a).unwrap().is_zero());
        prop_assert_eq!(a.shift(2).shift(-2), a.clone());
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly(FieldTag::Rational), b in poly(FieldTag::Rational)) {
        let t = rat(3, 2);
        prop_assert_eq!(a.mul(&b).unwrap().eval(&t), a.eval(&t) * b.eval(&t));
        prop_assert_eq!(a.add(&b).unwrap().eval(&t), a.eval(&t) + b.eval(&t));
    }

    #[test]
    fn rank_of_transpose(m in field().prop_flat_map(matrix)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn monomial_row_scaling_keeps_rank(m in field().prop_flat_map(matrix), k in -3i64..=3, c in 1i64..=3) {
        let mut s = m.clone();
        let i = (k.unsigned_abs() as usize) % m.rows();
        s.scale_row(i, &LaurentPoly::monomial(m.field(), c, k));
        // Over F2 only odd scalars are units.
        if m.field() == FieldTag::Rational || c % 2 == 1 {
            prop_assert_eq!(s.rank(), m.rank());
        }
    }

    /// The rank over Q(t) equals the largest rank of the matrix evaluated
    /// at a handful of rational points (a generic point is not a root of
    /// every nonzero minor).
    #[test]
    fn rank_matches_evaluation_oracle(m in matrix(FieldTag::Rational)) {
        let points = [rat(2, 1), rat(3, 1), rat(-5, 3), rat(7, 5), rat(13, 11), rat(17, 1)];
        let oracle = points
            .iter()
            .map(|t| {
                rank_q(
                    (0..m.rows())
                        .map(|i| (0..m.cols()).map(|j| m.get(i, j).eval(t)).collect())
                        .collect(),
                )
            })
            .max()
            .unwrap();
        prop_assert_eq!(m.rank(), oracle);
    }
}

#[test]
fn rank_of_a_singular_laurent_matrix() {
    // [[1, t], [t⁻¹, 1]] has determinant 0.
    let f = FieldTag::Rational;
    let m = LaurentMatrix::from_rows(
        f,
        vec![
            vec![LaurentPoly::one(f), LaurentPoly::monomial(f, 1, 1)],
            vec![LaurentPoly::monomial(f, 1, -1), LaurentPoly::one(f)],
        ],
    )
    .unwrap();
    assert_eq!(m.rank(), 1);
    assert!(BigRational::one() == m.get(0, 0).eval(&rat(5, 1)));
}
