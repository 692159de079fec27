use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::HomologyError;

/// One occurrence of a face in the boundary of a cell.
///
/// For a 1-cell the faces are its endpoints: coefficient `+1` marks the head
/// and `-1` the tail. For a 2-cell without explicit paths the faces are read
/// in order as the attaching word, each edge traversed forwards (`+c`) or
/// backwards (`-c`) `|c|` times. `path`, when present, is an edge path
/// from the cell's base vertex to the face's base vertex inside the closed
/// cell; it pins the lift of the face on the infinite cyclic cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceIncidence {
    pub face: usize,
    pub coeff: i64,
    pub path: Option<Vec<(usize, i64)>>,
}

impl FaceIncidence {
    pub fn new(face: usize, coeff: i64) -> Self {
        FaceIncidence {
            face,
            coeff,
            path: None,
        }
    }

    pub fn with_path(face: usize, coeff: i64, path: Vec<(usize, i64)>) -> Self {
        FaceIncidence {
            face,
            coeff,
            path: Some(path),
        }
    }
}

/// User-asserted topological flags. Neither is verified.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ComplexFlags {
    pub is_closed_manifold: bool,
    pub is_orientable: bool,
}

/// A finite CW complex with signed, ordered incidence data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplex {
    counts: Vec<usize>,
    /// `incidence[k][i]` lists the faces of the i-th k-cell; `incidence[0]`
    /// is empty per vertex.
    incidence: Vec<Vec<Vec<FaceIncidence>>>,
    flags: ComplexFlags,
    /// Optional edge loops representing the standard generators of the
    /// first homology of a torus factor.
    cycles: Option<Vec<Vec<(usize, i64)>>>,
}

impl CellComplex {
    /// Validates and builds a complex. `incidence[k]` must have `counts[k]`
    /// entries for every `k ≥ 1`.
    pub fn new(
        counts: Vec<usize>,
        incidence: Vec<Vec<Vec<FaceIncidence>>>,
        flags: ComplexFlags,
    ) -> Result<Self, HomologyError> {
        let mut incidence = incidence;
        if incidence.len() < counts.len() {
            incidence.resize(counts.len(), Vec::new());
        }
        if incidence[0].is_empty() {
            incidence[0] = vec![Vec::new(); counts[0]];
        }
        let cx = CellComplex {
            counts,
            incidence,
            flags,
            cycles: None,
        };
        cx.validate()?;
        Ok(cx)
    }

    pub fn with_cycles(mut self, cycles: Vec<Vec<(usize, i64)>>) -> Result<Self, HomologyError> {
        for cycle in &cycles {
            self.check_loop(cycle)?;
        }
        self.cycles = Some(cycles);
        Ok(self)
    }

    fn validate(&self) -> Result<(), HomologyError> {
        if self.counts.is_empty() {
            return Err(HomologyError::InvalidComplex("no cells".into()));
        }
        if self.incidence.len() != self.counts.len() {
            return Err(HomologyError::InvalidComplex(
                "incidence dimensions do not match cell counts".into(),
            ));
        }
        for k in 1..self.counts.len() {
            if self.incidence[k].len() != self.counts[k] {
                return Err(HomologyError::InvalidComplex(format!(
                    "dimension {k}: {} cells but {} incidence lists",
                    self.counts[k],
                    self.incidence[k].len()
                )));
            }
            for (i, faces) in self.incidence[k].iter().enumerate() {
                for f in faces {
                    if f.face >= self.counts[k - 1] {
                        return Err(HomologyError::InvalidComplex(format!(
                            "cell ({k}, {i}) references missing face {}",
                            f.face
                        )));
                    }
                    if f.coeff == 0 {
                        return Err(HomologyError::InvalidComplex(format!(
                            "cell ({k}, {i}) has a zero incidence coefficient"
                        )));
                    }
                    if let Some(path) = &f.path {
                        for &(e, s) in path {
                            if self.counts.len() < 2 || e >= self.counts[1] || s.abs() != 1 {
                                return Err(HomologyError::InvalidComplex(format!(
                                    "cell ({k}, {i}) has an invalid path step ({e}, {s})"
                                )));
                            }
                        }
                    }
                }
                if k == 1 {
                    self.edge_endpoints_checked(i)?;
                }
            }
        }
        for k in 2..self.counts.len() {
            for i in 0..self.counts[k] {
                if k == 2 && !self.has_paths(2, i) {
                    self.check_word(i)?;
                }
                let all = self.incidence[k][i].iter().all(|f| f.path.is_some());
                if self.has_paths(k, i) && !all {
                    return Err(HomologyError::InvalidComplex(format!(
                        "cell ({k}, {i}) mixes faces with and without paths"
                    )));
                }
            }
        }
        // ∂∘∂ = 0 for the untwisted integral boundary.
        for k in 2..self.counts.len() {
            for i in 0..self.counts[k] {
                let mut acc = vec![0i64; self.counts[k - 2]];
                for f in &self.incidence[k][i] {
                    for g in &self.incidence[k - 1][f.face] {
                        acc[g.face] += f.coeff * g.coeff;
                    }
                }
                if let Some(bad) = acc.iter().position(|&c| c != 0) {
                    return Err(HomologyError::InvalidComplex(format!(
                        "boundary of boundary of cell ({k}, {i}) is nonzero at ({}, {bad})",
                        k - 2
                    )));
                }
            }
        }
        Ok(())
    }

    fn has_paths(&self, k: usize, i: usize) -> bool {
        self.incidence[k][i].iter().any(|f| f.path.is_some())
    }

    fn edge_endpoints_checked(&self, e: usize) -> Result<(usize, usize), HomologyError> {
        let faces = &self.incidence[1][e];
        let head = faces.iter().filter(|f| f.coeff == 1).collect::<Vec<_>>();
        let tail = faces.iter().filter(|f| f.coeff == -1).collect::<Vec<_>>();
        if faces.len() != 2 || head.len() != 1 || tail.len() != 1 {
            return Err(HomologyError::InvalidComplex(format!(
                "edge {e} must have exactly one head (+1) and one tail (-1)"
            )));
        }
        Ok((tail[0].face, head[0].face))
    }

    /// `(tail, head)` of an edge.
    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        self.edge_endpoints_checked(e)
            .expect("validated complex has well-formed edges")
    }

    /// The attaching word of a 2-cell as unit traversals.
    pub(crate) fn word(&self, cell: usize) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        for f in &self.incidence[2][cell] {
            let s = f.coeff.signum();
            for _ in 0..f.coeff.unsigned_abs() {
                out.push((f.face, s));
            }
        }
        out
    }

    fn check_word(&self, cell: usize) -> Result<(), HomologyError> {
        let word = self.word(cell);
        self.check_loop(&word).map_err(|_| {
            HomologyError::InvalidComplex(format!(
                "2-cell {cell}: faces do not form a closed edge loop in the given order"
            ))
        })
    }

    /// Checks that an edge walk is connected and closed.
    fn check_loop(&self, walk: &[(usize, i64)]) -> Result<(), HomologyError> {
        let Some(&(e0, s0)) = walk.first() else {
            return Ok(());
        };
        if self.counts.len() < 2 || e0 >= self.counts[1] {
            return Err(HomologyError::InvalidComplex("loop uses a missing edge".into()));
        }
        let start = self.step_start(e0, s0);
        let end = self.walk_end(start, walk)?;
        if end != start {
            return Err(HomologyError::InvalidComplex("edge walk is not closed".into()));
        }
        Ok(())
    }

    fn step_start(&self, e: usize, s: i64) -> usize {
        let (tail, head) = self.edge_endpoints(e);
        if s > 0 {
            tail
        } else {
            head
        }
    }

    /// Follows a walk from `start`, returning the final vertex.
    pub(crate) fn walk_end(&self, start: usize, walk: &[(usize, i64)]) -> Result<usize, HomologyError> {
        let mut at = start;
        for &(e, s) in walk {
            if self.counts.len() < 2 || e >= self.counts[1] {
                return Err(HomologyError::InvalidComplex(format!("walk uses missing edge {e}")));
            }
            let (tail, head) = self.edge_endpoints(e);
            let (from, to) = if s > 0 { (tail, head) } else { (head, tail) };
            if from != at {
                return Err(HomologyError::InvalidComplex(format!(
                    "walk is disconnected at edge {e}"
                )));
            }
            at = to;
        }
        Ok(at)
    }

    pub fn dim(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn count(&self, k: usize) -> usize {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn faces(&self, k: usize, i: usize) -> &[FaceIncidence] {
        &self.incidence[k][i]
    }

    pub fn flags(&self) -> ComplexFlags {
        self.flags
    }

    pub fn set_flags(&mut self, flags: ComplexFlags) {
        self.flags = flags;
    }

    pub fn cycles(&self) -> Option<&[Vec<(usize, i64)>]> {
        self.cycles.as_deref()
    }

    pub fn num_edges(&self) -> usize {
        self.count(1)
    }

    /// Euler characteristic.
    pub fn euler_characteristic(&self) -> i64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    // ---- Standard complexes ----

    /// The circle with one vertex and one edge.
    pub fn circle() -> Self {
        Self::subdivided_circle(1)
    }

    /// The circle with `n` vertices and `n` edges, edge `i` running from
    /// vertex `i` to vertex `i + 1 mod n`.
    pub fn subdivided_circle(n: usize) -> Self {
        assert!(n >= 1);
        let edges = (0..n)
            .map(|i| vec![FaceIncidence::new((i + 1) % n, 1), FaceIncidence::new(i, -1)])
            .collect();
        Self::new(
            vec![n, n],
            vec![Vec::new(), edges],
            ComplexFlags {
                is_closed_manifold: true,
                is_orientable: true,
            },
        )
        .expect("subdivided circle is valid")
        .with_cycles(vec![(0..n).map(|i| (i, 1)).collect()])
        .expect("circle cycle is closed")
    }

    /// The two-torus with one vertex, edges `a, b` and one 2-cell attached
    /// along `a b a⁻¹ b⁻¹`.
    pub fn torus() -> Self {
        Self::torus_n(2)
    }

    /// The n-torus as a product of one-vertex circles: one k-cell per
    /// k-subset of the coordinate directions. Cells of dimension ≥ 2 carry
    /// explicit lift paths.
    pub fn torus_n(n: usize) -> Self {
        assert!(n >= 1);
        let subsets: Vec<Vec<Vec<usize>>> = (0..=n).map(|k| k_subsets(n, k)).collect();
        let index = |s: &[usize]| -> usize {
            subsets[s.len()]
                .iter()
                .position(|t| t.as_slice() == s)
                .expect("subset present")
        };
        let mut incidence = vec![vec![Vec::new()]];
        for k in 1..=n {
            let mut cells = Vec::new();
            for s in &subsets[k] {
                if k == 1 {
                    cells.push(vec![FaceIncidence::new(0, 1), FaceIncidence::new(0, -1)]);
                    continue;
                }
                // Cube boundary: Σ_r (−1)^r (front face − back face) where the
                // front face is reached by moving along direction s[r].
                let mut faces = Vec::new();
                for (r, &dir) in s.iter().enumerate() {
                    let sign = if r % 2 == 0 { 1 } else { -1 };
                    let rest: Vec<usize> = s.iter().copied().filter(|&d| d != dir).collect();
                    let face = index(&rest);
                    faces.push(FaceIncidence::with_path(face, sign, vec![(dir, 1)]));
                    faces.push(FaceIncidence::with_path(face, -sign, vec![]));
                }
                // Start with an empty path so the base vertex is consistent.
                faces.rotate_left(1);
                cells.push(faces);
            }
            incidence.push(cells);
        }
        let counts = subsets.iter().map(Vec::len).collect();
        Self::new(
            counts,
            incidence,
            ComplexFlags {
                is_closed_manifold: true,
                is_orientable: true,
            },
        )
        .expect("torus is valid")
        .with_cycles((0..n).map(|i| vec![(i, 1)]).collect())
        .expect("torus cycles are closed")
    }

    /// The Klein bottle with one vertex, edges `a, b` and a 2-cell attached
    /// along `a b a⁻¹ b`.
    pub fn klein_bottle() -> Self {
        let edge = || vec![FaceIncidence::new(0, 1), FaceIncidence::new(0, -1)];
        Self::new(
            vec![1, 2, 1],
            vec![
                Vec::new(),
                vec![edge(), edge()],
                vec![vec![
                    FaceIncidence::new(0, 1),
                    FaceIncidence::new(1, 1),
                    FaceIncidence::new(0, -1),
                    FaceIncidence::new(1, 1),
                ]],
            ],
            ComplexFlags {
                is_closed_manifold: true,
                is_orientable: false,
            },
        )
        .expect("Klein bottle is valid")
    }

    /// The real projective plane: one vertex, one edge `a`, a 2-cell on `a a`.
    pub fn projective_plane() -> Self {
        Self::new(
            vec![1, 1, 1],
            vec![
                Vec::new(),
                vec![vec![FaceIncidence::new(0, 1), FaceIncidence::new(0, -1)]],
                vec![vec![FaceIncidence::new(0, 2)]],
            ],
            ComplexFlags {
                is_closed_manifold: true,
                is_orientable: false,
            },
        )
        .expect("projective plane is valid")
    }

    /// The 2-sphere as one vertex and one 2-cell.
    pub fn sphere2() -> Self {
        Self::new(
            vec![1, 0, 1],
            vec![Vec::new(), Vec::new(), vec![Vec::new()]],
            ComplexFlags {
                is_closed_manifold: true,
                is_orientable: true,
            },
        )
        .expect("sphere is valid")
    }

    /// A regular square-grid subdivision of the 2-torus with `a × b`
    /// vertices. Horizontal edge `(i, j)` runs from vertex `(i, j)` to
    /// `(i+1, j)`; vertical edges follow all horizontal ones.
    pub fn torus_grid(a: usize, b: usize) -> Self {
        assert!(a >= 1 && b >= 1);
        let v = |i: usize, j: usize| (i % a) + a * (j % b);
        let h = |i: usize, j: usize| (i % a) + a * (j % b);
        let vert = |i: usize, j: usize| a * b + (i % a) + a * (j % b);
        let mut edges = Vec::new();
        for j in 0..b {
            for i in 0..a {
                edges.push(vec![FaceIncidence::new(v(i + 1, j), 1), FaceIncidence::new(v(i, j), -1)]);
            }
        }
        for j in 0..b {
            for i in 0..a {
                edges.push(vec![FaceIncidence::new(v(i, j + 1), 1), FaceIncidence::new(v(i, j), -1)]);
            }
        }
        let mut squares = Vec::new();
        for j in 0..b {
            for i in 0..a {
                squares.push(vec![
                    FaceIncidence::new(h(i, j), 1),
                    FaceIncidence::new(vert(i + 1, j), 1),
                    FaceIncidence::new(h(i, j + 1), -1),
                    FaceIncidence::new(vert(i, j), -1),
                ]);
            }
        }
        let horizontal_loop = (0..a).map(|i| (h(i, 0), 1)).collect();
        let vertical_loop = (0..b).map(|j| (vert(0, j), 1)).collect();
        Self::new(
            vec![a * b, 2 * a * b, a * b],
            vec![Vec::new(), edges, squares],
            ComplexFlags {
                is_closed_manifold: true,
                is_orientable: true,
            },
        )
        .expect("torus grid is valid")
        .with_cycles(vec![horizontal_loop, vertical_loop])
        .expect("grid cycles are closed")
    }

    /// Product CW structure. Cells of dimension ≥ 3 are attached without
    /// paths, so both factors should be regular enough for the lifts to be
    /// determined by cancellation; cells with explicit paths are rejected.
    pub fn product(&self, other: &CellComplex) -> Result<Self, HomologyError> {
        let has_paths = |cx: &CellComplex| {
            (2..=cx.dim()).any(|k| (0..cx.count(k)).any(|i| cx.has_paths(k, i)))
        };
        if has_paths(self) || has_paths(other) {
            return Err(HomologyError::InvalidComplex(
                "product of complexes with explicit lift paths is not supported".into(),
            ));
        }
        let dim = self.dim() + other.dim();
        // index[p][i][j] = id of (i-th p-cell) × (j-th (k−p)-cell) among k-cells.
        let mut offsets = vec![vec![0usize; self.dim() + 1]; dim + 1];
        let mut counts = vec![0usize; dim + 1];
        for (k, count) in counts.iter_mut().enumerate() {
            for p in 0..=self.dim() {
                if k >= p && k - p <= other.dim() {
                    offsets[k][p] = *count;
                    *count += self.count(p) * other.count(k - p);
                }
            }
        }
        let id = |p: usize, i: usize, q: usize, j: usize| offsets[p + q][p] + i * other.count(q) + j;
        let mut incidence: Vec<Vec<Vec<FaceIncidence>>> =
            counts.iter().map(|&c| vec![Vec::new(); c]).collect();
        for p in 0..=self.dim() {
            for q in 0..=other.dim() {
                let k = p + q;
                if k == 0 {
                    continue;
                }
                for i in 0..self.count(p) {
                    for j in 0..other.count(q) {
                        let faces = if p == 1 && q == 1 {
                            let (ta, ha) = self.edge_endpoints(i);
                            let (tb, hb) = other.edge_endpoints(j);
                            vec![
                                FaceIncidence::new(id(1, i, 0, tb), 1),
                                FaceIncidence::new(id(0, ha, 1, j), 1),
                                FaceIncidence::new(id(1, i, 0, hb), -1),
                                FaceIncidence::new(id(0, ta, 1, j), -1),
                            ]
                        } else {
                            let sign = if p % 2 == 0 { 1 } else { -1 };
                            let mut faces = Vec::new();
                            if p > 0 {
                                for f in self.faces(p, i) {
                                    faces.push(FaceIncidence::new(id(p - 1, f.face, q, j), f.coeff));
                                }
                            }
                            if q > 0 {
                                for f in other.faces(q, j) {
                                    faces.push(FaceIncidence::new(id(p, i, q - 1, f.face), sign * f.coeff));
                                }
                            }
                            faces
                        };
                        incidence[k][id(p, i, q, j)] = faces;
                    }
                }
            }
        }
        let flags = ComplexFlags {
            is_closed_manifold: self.flags.is_closed_manifold && other.flags.is_closed_manifold,
            is_orientable: self.flags.is_orientable && other.flags.is_orientable,
        };
        Self::new(counts, incidence, flags)
    }

    /// A regular CW 2-sphere: two vertices, two edges, two hemispheres.
    pub fn regular_sphere2() -> Self {
        Self::new(
            vec![2, 2, 2],
            vec![
                Vec::new(),
                vec![
                    vec![FaceIncidence::new(1, 1), FaceIncidence::new(0, -1)],
                    vec![FaceIncidence::new(1, 1), FaceIncidence::new(0, -1)],
                ],
                vec![
                    vec![FaceIncidence::new(0, 1), FaceIncidence::new(1, -1)],
                    vec![FaceIncidence::new(1, 1), FaceIncidence::new(0, -1)],
                ],
            ],
            ComplexFlags {
                is_closed_manifold: true,
                is_orientable: true,
            },
        )
        .expect("regular sphere is valid")
    }

    /// Relabels cells: `perms[k][old] = new`. Face lists keep their order so
    /// attaching words are unchanged.
    pub fn relabeled(&self, perms: &[Vec<usize>]) -> Result<Self, HomologyError> {
        let mut incidence: Vec<Vec<Vec<FaceIncidence>>> = self
            .counts
            .iter()
            .map(|&c| vec![Vec::new(); c])
            .collect();
        let map_path = |p: &Vec<(usize, i64)>| -> Vec<(usize, i64)> {
            p.iter().map(|&(e, s)| (perms[1][e], s)).collect()
        };
        for k in 1..self.counts.len() {
            for i in 0..self.counts[k] {
                incidence[k][perms[k][i]] = self.incidence[k][i]
                    .iter()
                    .map(|f| FaceIncidence {
                        face: perms[k - 1][f.face],
                        coeff: f.coeff,
                        path: f.path.as_ref().map(map_path),
                    })
                    .collect();
            }
        }
        let mut out = Self::new(self.counts.clone(), incidence, self.flags)?;
        if let Some(cycles) = &self.cycles {
            out = out.with_cycles(cycles.iter().map(map_path).collect())?;
        }
        Ok(out)
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// A real 1-cocycle with rational values on the edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    values: Vec<BigRational>,
}

impl Cocycle {
    pub fn integral(values: &[i64]) -> Self {
        Cocycle {
            values: values
                .iter()
                .map(|&v| BigRational::from_integer(BigInt::from(v)))
                .collect(),
        }
    }

    pub fn rational(values: Vec<BigRational>) -> Self {
        Cocycle { values }
    }

    pub fn zero(edges: usize) -> Self {
        Self::integral(&vec![0; edges])
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Checks length and that the coboundary vanishes on every 2-cell.
    pub fn validate(&self, complex: &CellComplex) -> Result<(), HomologyError> {
        if self.values.len() != complex.num_edges() {
            return Err(HomologyError::CocycleLength {
                expected: complex.num_edges(),
                found: self.values.len(),
            });
        }
        for cell in 0..complex.count(2) {
            let sum: BigRational = complex
                .faces(2, cell)
                .iter()
                .map(|f| &self.values[f.face] * BigRational::from_integer(BigInt::from(f.coeff)))
                .sum();
            if !sum.is_zero() {
                return Err(HomologyError::NotACocycle {
                    cell,
                    value: sum.to_string(),
                });
            }
        }
        Ok(())
    }

    /// The cocycle scaled by the least common denominator. Positive scaling
    /// does not change Novikov ranks.
    pub fn cleared(&self) -> Result<Vec<i64>, HomologyError> {
        let lcm = self
            .values
            .iter()
            .fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()));
        self.values
            .iter()
            .map(|v| {
                (v * BigRational::from_integer(lcm.clone()))
                    .to_integer()
                    .to_i64()
                    .ok_or(HomologyError::Overflow)
            })
            .collect()
    }

    /// Value of the cocycle on an edge walk.
    pub fn evaluate(&self, walk: &[(usize, i64)]) -> BigRational {
        walk.iter()
            .map(|&(e, s)| &self.values[e] * BigRational::from_integer(BigInt::from(s)))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_complexes_validate() {
        assert_eq!(CellComplex::circle().euler_characteristic(), 0);
        assert_eq!(CellComplex::torus().euler_characteristic(), 0);
        assert_eq!(CellComplex::torus_n(3).counts(), &[1, 3, 3, 1]);
        assert_eq!(CellComplex::klein_bottle().euler_characteristic(), 0);
        assert_eq!(CellComplex::projective_plane().euler_characteristic(), 1);
        assert_eq!(CellComplex::sphere2().euler_characteristic(), 2);
        assert_eq!(CellComplex::torus_grid(3, 2).euler_characteristic(), 0);
    }

    #[test]
    fn rejects_open_word() {
        let edge = || vec![FaceIncidence::new(1, 1), FaceIncidence::new(0, -1)];
        let err = CellComplex::new(
            vec![2, 1, 1],
            vec![Vec::new(), vec![edge()], vec![vec![FaceIncidence::new(0, 1)]]],
            ComplexFlags::default(),
        )
        .unwrap_err();
        assert!(matches!(err, HomologyError::InvalidComplex(_)));
    }

    #[test]
    fn rejects_missing_face() {
        let err = CellComplex::new(
            vec![1, 1],
            vec![Vec::new(), vec![vec![FaceIncidence::new(3, 1), FaceIncidence::new(0, -1)]]],
            ComplexFlags::default(),
        )
        .unwrap_err();
        assert!(matches!(err, HomologyError::InvalidComplex(_)));
    }

    #[test]
    fn cocycle_condition() {
        let t = CellComplex::torus();
        assert!(Cocycle::integral(&[1, 0]).validate(&t).is_ok());
        let k = CellComplex::klein_bottle();
        // a b a⁻¹ b evaluates to 2·η(b).
        assert!(matches!(
            Cocycle::integral(&[0, 1]).validate(&k),
            Err(HomologyError::NotACocycle { .. })
        ));
        assert!(Cocycle::integral(&[1, 0]).validate(&k).is_ok());
        assert!(matches!(
            Cocycle::integral(&[1]).validate(&t),
            Err(HomologyError::CocycleLength { .. })
        ));
    }

    #[test]
    fn clearing_denominators() {
        let c = Cocycle::rational(vec![
            BigRational::new(1.into(), 10.into()),
            BigRational::new(1.into(), 4.into()),
        ]);
        assert_eq!(c.cleared().unwrap(), vec![2, 5]);
    }
}
