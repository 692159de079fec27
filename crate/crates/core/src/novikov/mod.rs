//! Novikov Betti numbers of a finite CW complex and an integral class.
//!
//! Homology with coefficients in the Novikov ring is computed as cellular
//! homology of the infinite cyclic cover over `F[t, t⁻¹]`; free ranks are
//! ranks over `F(t)`. The circle additionally has an exact Morse–Novikov
//! complex built from the zeros of a 1-form (see [`circle_morse_novikov`]).

mod circle;
mod complex;
pub mod io;
mod twisted;

pub use circle::{circle_morse_novikov, subdivision_complex, CircleMorseNovikov, CircleZero};
pub use complex::{CellComplex, Cocycle, ComplexFlags, FaceIncidence};
pub use twisted::{twisted_boundary, twisted_chain_complex, LiftOptions, TwistedComplex};

use serde::Serialize;

use crate::ring::FieldTag;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HomologyError {
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("cocycle has {found} values but the complex has {expected} edges")]
    CocycleLength { expected: usize, found: usize },
    #[error("cocycle condition fails on 2-cell {cell} (coboundary value {value})")]
    NotACocycle { cell: usize, value: String },
    #[error("degree {k} outside 1..={dim}")]
    DegreeOutOfRange { k: usize, dim: usize },
    #[error("cannot determine lifts for the faces of cell ({dim}, {cell}); give explicit paths")]
    AmbiguousLift { dim: usize, cell: usize },
    #[error("path for face {face} of cell ({dim}, {cell}) does not end at the face's base vertex")]
    BadPath { dim: usize, cell: usize, face: usize },
    #[error("lift choices produce a twisted boundary with ∂∘∂ ≠ 0 in degree {dim}")]
    InconsistentLifts { dim: usize },
    #[error("duality requires a closed manifold")]
    NotClosedManifold,
    #[error("duality on a non-orientable manifold requires F2 coefficients")]
    NonOrientable,
    #[error("degenerate zero of the 1-form near θ = {theta}")]
    DegenerateZero { theta: f64 },
    #[error("1-form is not a function times dθ on the circle: {0}")]
    NotACircleForm(String),
    #[error("period {period} is inconsistent with the 1-form (mean value {mean})")]
    PeriodMismatch { period: i64, mean: f64 },
    #[error("integer overflow while clearing denominators")]
    Overflow,
}

/// Novikov Betti numbers `b_0, …, b_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NovikovBetti {
    pub betti: Vec<usize>,
    pub field: FieldTag,
}

impl NovikovBetti {
    pub fn total(&self) -> usize {
        self.betti.iter().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.betti.len();
        (0..n).all(|k| self.betti[k] == self.betti[n - 1 - k])
    }
}

/// `b_k = dim C_k − rank ∂_k − rank ∂_{k+1}` over `F(t)`.
pub fn novikov_betti(
    complex: &CellComplex,
    eta: &Cocycle,
    field: FieldTag,
) -> Result<NovikovBetti, HomologyError> {
    novikov_betti_with(complex, eta, field, &LiftOptions::default())
}

pub fn novikov_betti_with(
    complex: &CellComplex,
    eta: &Cocycle,
    field: FieldTag,
    opts: &LiftOptions,
) -> Result<NovikovBetti, HomologyError> {
    let cx = twisted_chain_complex(complex, eta, field, opts)?;
    Ok(NovikovBetti {
        betti: cx.betti(),
        field,
    })
}

/// Checks `b_k = b_{n−k}` on a closed manifold. Non-orientable manifolds
/// are only accepted over F₂.
pub fn verify_duality(
    complex: &CellComplex,
    eta: &Cocycle,
    field: FieldTag,
) -> Result<bool, HomologyError> {
    let flags = complex.flags();
    if !flags.is_closed_manifold {
        return Err(HomologyError::NotClosedManifold);
    }
    if !flags.is_orientable && field != FieldTag::Two {
        return Err(HomologyError::NonOrientable);
    }
    Ok(novikov_betti(complex, eta, field)?.is_symmetric())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn betti(cx: &CellComplex, eta: &[i64], field: FieldTag) -> Vec<usize> {
        novikov_betti(cx, &Cocycle::integral(eta), field).unwrap().betti
    }

    #[test]
    fn circle() {
        let s1 = CellComplex::circle();
        assert_eq!(betti(&s1, &[1], FieldTag::Rational), vec![0, 0]);
        assert_eq!(betti(&s1, &[0], FieldTag::Rational), vec![1, 1]);
        assert_eq!(betti(&s1, &[2], FieldTag::Rational), vec![0, 0]);
        assert_eq!(betti(&s1, &[-3], FieldTag::Two), vec![0, 0]);
    }

    #[test]
    fn torus() {
        let t2 = CellComplex::torus();
        assert_eq!(betti(&t2, &[1, 0], FieldTag::Rational), vec![0, 0, 0]);
        assert_eq!(betti(&t2, &[0, 0], FieldTag::Rational), vec![1, 2, 1]);
        assert_eq!(betti(&t2, &[2, -3], FieldTag::Rational), vec![0, 0, 0]);
    }

    #[test]
    fn klein_bottle() {
        let k = CellComplex::klein_bottle();
        assert_eq!(betti(&k, &[0, 0], FieldTag::Two), vec![1, 2, 1]);
        assert_eq!(betti(&k, &[0, 0], FieldTag::Rational), vec![1, 1, 0]);
        assert_eq!(betti(&k, &[1, 0], FieldTag::Two), vec![0, 0, 0]);
    }

    #[test]
    fn projective_plane_and_sphere() {
        assert_eq!(betti(&CellComplex::projective_plane(), &[0], FieldTag::Two), vec![1, 1, 1]);
        assert_eq!(betti(&CellComplex::projective_plane(), &[0], FieldTag::Rational), vec![1, 0, 0]);
        assert_eq!(betti(&CellComplex::sphere2(), &[], FieldTag::Rational), vec![1, 0, 1]);
    }

    #[test]
    fn three_torus() {
        let t3 = CellComplex::torus_n(3);
        assert_eq!(betti(&t3, &[0, 0, 0], FieldTag::Rational), vec![1, 3, 3, 1]);
        assert_eq!(betti(&t3, &[0, 1, 0], FieldTag::Rational), vec![0, 0, 0, 0]);
    }

    #[test]
    fn circle_times_sphere_uses_propagated_lifts() {
        let m = CellComplex::subdivided_circle(2).product(&CellComplex::regular_sphere2()).unwrap();
        assert_eq!(m.dim(), 3);
        let zero = vec![0; m.num_edges()];
        assert_eq!(betti(&m, &zero, FieldTag::Rational), vec![1, 1, 1, 1]);
        // Edges of the product: four S¹-vertex × S²-edge cells, then
        // S¹-edge i × S²-vertex j at 4 + 2i + j. Put the class on S¹-edge 1.
        let mut eta = vec![0; m.num_edges()];
        eta[6] = 1;
        eta[7] = 1;
        assert_eq!(betti(&m, &eta, FieldTag::Rational), vec![0, 0, 0, 0]);
        assert!(verify_duality(&m, &Cocycle::integral(&eta), FieldTag::Rational).unwrap());
    }

    #[test]
    fn duality_flags() {
        let k = CellComplex::klein_bottle();
        assert!(verify_duality(&k, &Cocycle::integral(&[0, 0]), FieldTag::Two).unwrap());
        assert_eq!(
            verify_duality(&k, &Cocycle::integral(&[0, 0]), FieldTag::Rational),
            Err(HomologyError::NonOrientable)
        );
        let mut open = CellComplex::circle();
        open.set_flags(ComplexFlags::default());
        assert_eq!(
            verify_duality(&open, &Cocycle::integral(&[1]), FieldTag::Rational),
            Err(HomologyError::NotClosedManifold)
        );
    }
}
