//! Boundary operators of the infinite cyclic cover determined by an integral
//! cocycle, written over `F[t, t⁻¹]`.
//!
//! Every cell gets a base vertex and a chosen lift. Vertices are lifted by a
//! spanning forest of the 1-skeleton: tree edges carry weight `t⁰`, so the
//! lift of vertex `v` sits at height `φ(v)`, the cocycle integrated along the
//! tree from its root. A face occurrence whose lift is the deck translate
//! `tʷ` of the face's chosen lift contributes `c·tʷ` to the matrix.

use std::collections::BTreeMap;

use crate::ring::{FieldTag, LaurentMatrix, LaurentPoly};

use super::{CellComplex, Cocycle, HomologyError};

/// Choices that fix the lifts. Ranks never depend on them.
#[derive(Clone, Debug, Default)]
pub struct LiftOptions {
    /// Priority order in which edges are offered to the spanning forest.
    /// Defaults to index order.
    pub edge_order: Option<Vec<usize>>,
}

/// The twisted cellular chain complex: `boundaries[k - 1]` is `∂_k`, with
/// rows indexed by (k−1)-cells and columns by k-cells.
#[derive(Clone, Debug)]
pub struct TwistedComplex {
    field: FieldTag,
    counts: Vec<usize>,
    boundaries: Vec<LaurentMatrix>,
}

impl TwistedComplex {
    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// `∂_k` for `1 ≤ k ≤ dim`.
    pub fn boundary(&self, k: usize) -> &LaurentMatrix {
        &self.boundaries[k - 1]
    }

    /// Rank of `∂_k` over `F(t)`; zero outside `1..=dim`.
    pub fn boundary_rank(&self, k: usize) -> usize {
        if k == 0 || k > self.boundaries.len() {
            0
        } else {
            self.boundaries[k - 1].rank()
        }
    }

    pub fn betti(&self) -> Vec<usize> {
        let ranks: Vec<usize> = (0..=self.counts.len()).map(|k| self.boundary_rank(k)).collect();
        (0..self.counts.len())
            .map(|k| self.counts[k] - ranks[k] - ranks[k + 1])
            .collect()
    }
}

struct Lifts {
    weights: Vec<i64>,
    potential: Vec<i64>,
    base: Vec<Vec<usize>>,
}

fn spanning_potential(
    complex: &CellComplex,
    weights: &[i64],
    opts: &LiftOptions,
) -> Result<Vec<i64>, HomologyError> {
    let nv = complex.count(0);
    let ne = complex.num_edges();
    let order: Vec<usize> = match &opts.edge_order {
        Some(o) => {
            let mut sorted = o.clone();
            sorted.sort_unstable();
            if sorted != (0..ne).collect::<Vec<_>>() {
                return Err(HomologyError::InvalidComplex(
                    "edge order is not a permutation of the edges".into(),
                ));
            }
            o.clone()
        }
        None => (0..ne).collect(),
    };
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); nv];
    for &e in &order {
        let (tail, head) = complex.edge_endpoints(e);
        let (rt, rh) = (find(&mut parent, tail), find(&mut parent, head));
        if rt != rh {
            parent[rt] = rh;
            adj[tail].push((head, weights[e]));
            adj[head].push((tail, -weights[e]));
        }
    }
    let mut potential = vec![0i64; nv];
    let mut seen = vec![false; nv];
    for root in 0..nv {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &(u, w) in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    potential[u] = potential[v] + w;
                    stack.push(u);
                }
            }
        }
    }
    Ok(potential)
}

fn base_vertices(complex: &CellComplex) -> Vec<Vec<usize>> {
    let mut base: Vec<Vec<usize>> = vec![(0..complex.count(0)).collect()];
    for k in 1..=complex.dim() {
        let row = (0..complex.count(k))
            .map(|i| {
                if k == 1 {
                    return complex.edge_endpoints(i).0;
                }
                let faces = complex.faces(k, i);
                match faces.first() {
                    None => 0,
                    Some(f) if k == 2 && f.path.is_none() => {
                        let (tail, head) = complex.edge_endpoints(f.face);
                        if f.coeff > 0 {
                            tail
                        } else {
                            head
                        }
                    }
                    Some(f) => base[k - 1][f.face],
                }
            })
            .collect();
        base.push(row);
    }
    base
}

fn monomial(field: FieldTag, c: i64, k: i64) -> LaurentPoly {
    LaurentPoly::monomial(field, c, k)
}

impl Lifts {
    fn new(complex: &CellComplex, eta: &Cocycle, opts: &LiftOptions) -> Result<Self, HomologyError> {
        eta.validate(complex)?;
        let weights = eta.cleared()?;
        let potential = spanning_potential(complex, &weights, opts)?;
        Ok(Lifts {
            weights,
            potential,
            base: base_vertices(complex),
        })
    }

    fn walk_weight(&self, walk: &[(usize, i64)]) -> i64 {
        walk.iter().map(|&(e, s)| s * self.weights[e]).sum()
    }

    fn edge_column(&self, complex: &CellComplex, field: FieldTag, e: usize) -> Vec<(usize, LaurentPoly)> {
        let (tail, head) = complex.edge_endpoints(e);
        let w = self.potential[tail] + self.weights[e] - self.potential[head];
        vec![(head, monomial(field, 1, w)), (tail, monomial(field, -1, 0))]
    }

    fn word_column(&self, complex: &CellComplex, field: FieldTag, cell: usize) -> Vec<(usize, LaurentPoly)> {
        let b = self.base[2][cell];
        let mut s = 0i64;
        let mut out = Vec::new();
        for (e, sgn) in complex.word(cell) {
            let (tail, _) = complex.edge_endpoints(e);
            if sgn > 0 {
                let w = self.potential[b] + s - self.potential[tail];
                out.push((e, monomial(field, 1, w)));
                s += self.weights[e];
            } else {
                s -= self.weights[e];
                let w = self.potential[b] + s - self.potential[tail];
                out.push((e, monomial(field, -1, w)));
            }
        }
        out
    }

    fn path_column(
        &self,
        complex: &CellComplex,
        field: FieldTag,
        k: usize,
        cell: usize,
    ) -> Result<Vec<(usize, LaurentPoly)>, HomologyError> {
        let b = self.base[k][cell];
        let mut out = Vec::new();
        for f in complex.faces(k, cell) {
            let path = f.path.as_deref().unwrap_or(&[]);
            let end = complex.walk_end(b, path)?;
            let target = self.base[k - 1][f.face];
            if end != target {
                return Err(HomologyError::BadPath {
                    dim: k,
                    cell,
                    face: f.face,
                });
            }
            let w = self.potential[b] + self.walk_weight(path) - self.potential[target];
            out.push((f.face, monomial(field, f.coeff, w)));
        }
        Ok(out)
    }

    /// Lifts for a cell of dimension ≥ 3 given without paths: face lifts are
    /// chained together by requiring their twisted boundaries to cancel.
    fn propagated_column(
        &self,
        complex: &CellComplex,
        field: FieldTag,
        lower: &LaurentMatrix,
        k: usize,
        cell: usize,
    ) -> Result<Vec<(usize, LaurentPoly)>, HomologyError> {
        let faces = complex.faces(k, cell);
        let ambiguous = || HomologyError::AmbiguousLift { dim: k, cell };
        let mut seen = std::collections::BTreeSet::new();
        if faces.iter().any(|f| !seen.insert(f.face)) {
            return Err(ambiguous());
        }
        let coeff_poly = |c: i64| monomial(field, c, 0);
        let columns: Vec<BTreeMap<usize, LaurentPoly>> = faces
            .iter()
            .map(|f| {
                (0..lower.rows())
                    .filter_map(|r| {
                        let e = lower.get(r, f.face).mul_unchecked(&coeff_poly(f.coeff));
                        (!e.is_zero()).then_some((r, e))
                    })
                    .collect()
            })
            .collect();
        let mut shift: Vec<Option<i64>> = vec![None; faces.len()];
        if let Some(first) = shift.first_mut() {
            *first = Some(0);
        }
        loop {
            let mut progressed = false;
            for i in 0..faces.len() {
                if shift[i].is_some() {
                    continue;
                }
                'search: for j in 0..faces.len() {
                    let Some(sj) = shift[j] else { continue };
                    for (row, pi) in &columns[i] {
                        let Some(pj) = columns[j].get(row) else { continue };
                        for (ei, ci) in pi.terms() {
                            for (ej, cj) in pj.terms() {
                                let cancels = match field {
                                    FieldTag::Two => true,
                                    FieldTag::Rational => (ci + cj).numer() == &0.into(),
                                };
                                if cancels {
                                    shift[i] = Some(ej + sj - ei);
                                    progressed = true;
                                    break 'search;
                                }
                            }
                        }
                    }
                }
            }
            if !progressed {
                break;
            }
        }
        let mut total: BTreeMap<usize, LaurentPoly> = BTreeMap::new();
        let mut out = Vec::new();
        for (i, f) in faces.iter().enumerate() {
            let s = shift[i].ok_or_else(ambiguous)?;
            for (row, p) in &columns[i] {
                let entry = total.entry(*row).or_insert_with(|| LaurentPoly::zero(field));
                *entry = entry.add_unchecked(&p.shift(s));
            }
            out.push((f.face, monomial(field, f.coeff, s)));
        }
        if total.values().any(|p| !p.is_zero()) {
            return Err(ambiguous());
        }
        Ok(out)
    }
}

/// Builds every twisted boundary matrix and checks `∂_k ∘ ∂_{k+1} = 0`.
pub fn twisted_chain_complex(
    complex: &CellComplex,
    eta: &Cocycle,
    field: FieldTag,
    opts: &LiftOptions,
) -> Result<TwistedComplex, HomologyError> {
    let lifts = Lifts::new(complex, eta, opts)?;
    let mut boundaries: Vec<LaurentMatrix> = Vec::new();
    for k in 1..=complex.dim() {
        let mut m = LaurentMatrix::zeros(field, complex.count(k - 1), complex.count(k));
        for cell in 0..complex.count(k) {
            let has_paths = complex.faces(k, cell).iter().any(|f| f.path.is_some());
            let column = match k {
                1 => lifts.edge_column(complex, field, cell),
                _ if has_paths => lifts.path_column(complex, field, k, cell)?,
                2 => lifts.word_column(complex, field, cell),
                _ => lifts.propagated_column(complex, field, &boundaries[k - 2], k, cell)?,
            };
            for (row, p) in column {
                m.accumulate(row, cell, &p);
            }
        }
        boundaries.push(m);
    }
    for k in 1..boundaries.len() {
        let composite = boundaries[k - 1]
            .mul(&boundaries[k])
            .expect("consecutive boundaries have compatible shapes");
        if !composite.is_zero() {
            return Err(HomologyError::InconsistentLifts { dim: k + 1 });
        }
    }
    Ok(TwistedComplex {
        field,
        counts: complex.counts().to_vec(),
        boundaries,
    })
}

/// The twisted boundary `∂_k` for `1 ≤ k ≤ dim`, with default lift choices.
pub fn twisted_boundary(
    complex: &CellComplex,
    eta: &Cocycle,
    k: usize,
    field: FieldTag,
) -> Result<LaurentMatrix, HomologyError> {
    if k == 0 || k > complex.dim() {
        return Err(HomologyError::DegreeOutOfRange { k, dim: complex.dim() });
    }
    let cx = twisted_chain_complex(complex, eta, field, &LiftOptions::default())?;
    Ok(cx.boundary(k).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::novikov::FaceIncidence;
    use crate::novikov::ComplexFlags;

    fn q(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(FieldTag::Rational, terms.iter().copied())
    }

    #[test]
    fn circle_class_one() {
        let d = twisted_boundary(&CellComplex::circle(), &Cocycle::integral(&[1]), 1, FieldTag::Rational)
            .unwrap();
        assert_eq!(d.get(0, 0), &q(&[(1, 1), (0, -1)]));
    }

    #[test]
    fn circle_class_zero() {
        let d = twisted_boundary(&CellComplex::circle(), &Cocycle::integral(&[0]), 1, FieldTag::Rational)
            .unwrap();
        assert!(d.is_zero());
    }

    fn word_torus() -> CellComplex {
        let edge = || vec![FaceIncidence::new(0, 1), FaceIncidence::new(0, -1)];
        CellComplex::new(
            vec![1, 2, 1],
            vec![
                Vec::new(),
                vec![edge(), edge()],
                vec![vec![
                    FaceIncidence::new(0, 1),
                    FaceIncidence::new(1, 1),
                    FaceIncidence::new(0, -1),
                    FaceIncidence::new(1, -1),
                ]],
            ],
            ComplexFlags {
                is_closed_manifold: true,
                is_orientable: true,
            },
        )
        .unwrap()
    }

    #[test]
    fn torus_fox_derivatives() {
        // ∂(aba⁻¹b⁻¹)/∂a = 1 − b ↦ 0 and ∂/∂b = a − 1 ↦ t − 1.
        for cx in [word_torus(), CellComplex::torus()] {
            let d2 = twisted_boundary(&cx, &Cocycle::integral(&[1, 0]), 2, FieldTag::Rational).unwrap();
            assert!(d2.get(0, 0).is_zero());
            assert_eq!(d2.get(1, 0), &q(&[(1, 1), (0, -1)]));
        }
    }

    #[test]
    fn degree_out_of_range() {
        let err = twisted_boundary(&CellComplex::circle(), &Cocycle::integral(&[1]), 2, FieldTag::Rational)
            .unwrap_err();
        assert!(matches!(err, HomologyError::DegreeOutOfRange { .. }));
    }

    #[test]
    fn rejects_non_cocycle() {
        let err = twisted_boundary(
            &CellComplex::klein_bottle(),
            &Cocycle::integral(&[0, 1]),
            1,
            FieldTag::Two,
        )
        .unwrap_err();
        assert!(matches!(err, HomologyError::NotACocycle { .. }));
    }

    #[test]
    fn three_torus_propagated_lifts_match_paths() {
        // Strip the paths from the top cell of T³: every face appears twice,
        // so propagation must refuse rather than guess.
        let t3 = CellComplex::torus_n(3);
        let mut incidence: Vec<Vec<Vec<FaceIncidence>>> = (0..=3)
            .map(|k| (0..t3.count(k)).map(|i| if k == 0 { Vec::new() } else { t3.faces(k, i).to_vec() }).collect())
            .collect();
        for f in incidence[3][0].iter_mut() {
            f.path = None;
        }
        let stripped = CellComplex::new(t3.counts().to_vec(), incidence, t3.flags()).unwrap();
        let err = twisted_chain_complex(
            &stripped,
            &Cocycle::integral(&[1, 0, 0]),
            FieldTag::Rational,
            &LiftOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, HomologyError::AmbiguousLift { dim: 3, .. }));
    }
}
