use std::fmt;

use super::{FieldTag, LaurentPoly, RingError};

/// A dense matrix over `F[t, t⁻¹]`, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentMatrix {
    field: FieldTag,
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn zeros(field: FieldTag, rows: usize, cols: usize) -> Self {
        LaurentMatrix {
            field,
            rows,
            cols,
            entries: vec![LaurentPoly::zero(field); rows * cols],
        }
    }

    pub fn from_fn<F>(field: FieldTag, rows: usize, cols: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> LaurentPoly,
    {
        let mut m = Self::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let e = f(i, j);
                assert_eq!(e.field(), field, "entry field differs from matrix field");
                m.entries[i * cols + j] = e;
            }
        }
        m
    }

    /// Builds a matrix from rows; all entries must share `field`.
    pub fn from_rows(field: FieldTag, rows: Vec<Vec<LaurentPoly>>) -> Result<Self, RingError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(RingError::Dimension("ragged rows".into()));
            }
            for e in row {
                if e.field() != field {
                    return Err(RingError::FieldMismatch {
                        left: field,
                        right: e.field(),
                    });
                }
                entries.push(e);
            }
        }
        Ok(LaurentMatrix {
            field,
            rows: r,
            cols: c,
            entries,
        })
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: LaurentPoly) {
        assert_eq!(value.field(), self.field);
        self.entries[i * self.cols + j] = value;
    }

    /// Adds `value` to entry `(i, j)`.
    pub fn accumulate(&mut self, i: usize, j: usize, value: &LaurentPoly) {
        let idx = i * self.cols + j;
        self.entries[idx] = self.entries[idx].add_unchecked(value);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, RingError> {
        if self.field != other.field {
            return Err(RingError::FieldMismatch {
                left: self.field,
                right: other.field,
            });
        }
        if self.cols != other.rows {
            return Err(RingError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.field, self.rows, other.cols, |i, j| {
            (0..self.cols).fold(LaurentPoly::zero(self.field), |acc, k| {
                acc.add_unchecked(&self.get(i, k).mul_unchecked(other.get(k, j)))
            })
        }))
    }

    /// Multiplies row `i` by `c`.
    pub fn scale_row(&mut self, i: usize, c: &LaurentPoly) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.entries[idx] = self.entries[idx].mul_unchecked(c);
        }
    }

    /// Rank over the fraction field `F(t)`.
    pub fn rank(&self) -> usize {
        rank_over_fraction_field(self)
    }
}

/// Rank of a Laurent matrix over the fraction field of `F[t, t⁻¹]`.
///
/// Rows are first shifted by units so that every entry is an ordinary
/// polynomial, then reduced by fraction-free (Bareiss) elimination with full
/// pivoting. The pivot at each step is the entry of smallest span, ties
/// broken by fewest terms. Every division is exact, so intermediate entries
/// stay in the polynomial ring.
pub fn rank_over_fraction_field(m: &LaurentMatrix) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    if rows == 0 || cols == 0 {
        return 0;
    }
    let field = m.field;
    let mut a: Vec<Vec<LaurentPoly>> = (0..rows)
        .map(|i| {
            let row: Vec<LaurentPoly> = (0..cols).map(|j| m.get(i, j).clone()).collect();
            let low = row.iter().filter_map(LaurentPoly::min_exponent).min();
            match low {
                Some(low) => row.into_iter().map(|e| e.shift(-low)).collect(),
                None => row,
            }
        })
        .collect();

    let mut prev = LaurentPoly::one(field);
    let mut rank = 0;
    for r in 0..rows.min(cols) {
        let mut best: Option<(usize, usize, (i64, usize))> = None;
        for (i, row) in a.iter().enumerate().skip(r) {
            for (j, e) in row.iter().enumerate().skip(r) {
                if let Some(span) = e.span() {
                    let key = (span, e.num_terms());
                    if best.as_ref().is_none_or(|b| key < b.2) {
                        best = Some((i, j, key));
                    }
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        a.swap(r, pi);
        if pj != r {
            for row in a.iter_mut() {
                row.swap(r, pj);
            }
        }
        let pivot = a[r][r].clone();
        for i in (r + 1)..rows {
            let lead = a[i][r].clone();
            for j in (r + 1)..cols {
                let num = pivot
                    .mul_unchecked(&a[i][j])
                    .sub_unchecked(&lead.mul_unchecked(&a[r][j]));
                a[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss step must divide exactly by the previous pivot");
            }
            a[i][r] = LaurentPoly::zero(field);
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

impl fmt::Debug for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LaurentMatrix {}x{} over {} [", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(FieldTag::Rational, terms.iter().copied())
    }

    #[test]
    fn one_by_one_nonzero() {
        let m = LaurentMatrix::from_rows(FieldTag::Rational, vec![vec![q(&[(0, 1), (1, -1)])]])
            .unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(LaurentMatrix::zeros(FieldTag::Rational, 2, 2).rank(), 0);
        assert_eq!(LaurentMatrix::zeros(FieldTag::Two, 0, 3).rank(), 0);
    }

    #[test]
    fn full_rank_two_by_two() {
        // det = (1 − t)² − t² = 1 − 2t.
        let a = q(&[(0, 1), (1, -1)]);
        let b = q(&[(1, 1)]);
        let m = LaurentMatrix::from_rows(
            FieldTag::Rational,
            vec![vec![a.clone(), b.clone()], vec![b, a]],
        )
        .unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn same_matrix_drops_rank_over_f2() {
        // Over F₂ the determinant 1 − 2t reduces to 1, still full rank;
        // [[1+t, 1+t],[1, 1]] has determinant 0 in every characteristic.
        let f = FieldTag::Two;
        let a = LaurentPoly::from_terms(f, [(0, 1), (1, 1)]);
        let one = LaurentPoly::one(f);
        let m = LaurentMatrix::from_rows(f, vec![vec![a.clone(), a], vec![one.clone(), one]])
            .unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn dependent_rows_with_laurent_multiples() {
        let r0 = vec![q(&[(0, 1), (1, -1)]), q(&[(-1, 1)])];
        let r1: Vec<LaurentPoly> = r0.iter().map(|e| e.mul_unchecked(&q(&[(-3, 2), (0, 1)]))).collect();
        let m = LaurentMatrix::from_rows(FieldTag::Rational, vec![r0, r1]).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn product_dimension_checked() {
        let a = LaurentMatrix::zeros(FieldTag::Rational, 2, 3);
        assert!(a.mul(&a).is_err());
        assert!(a.mul(&a.transpose()).unwrap().is_zero());
    }
}
