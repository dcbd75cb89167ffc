//! Dense exact matrices and Smith reduction.
//!
//! Matrices here are small (totalized complexes stay in the low hundreds of
//! rows) and mostly zero, so a dense representation with zero-skipping inner
//! loops is the right trade. Smith reduction pivots on a nonzero entry of
//! least magnitude and restores the divisibility chain afterwards.

use crate::error::{Error, Result};
use crate::ring::Ring;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<R: Ring> {
    rows: usize,
    cols: usize,
    entries: Vec<R>,
}

impl<R: Ring> std::fmt::Debug for Matrix<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<R: Ring> Matrix<R> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![R::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = R::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        for r in &rows {
            if r.len() != ncols {
                return Err(Error::ShapeMismatch(nrows, ncols, 1, r.len()));
            }
        }
        Ok(Matrix {
            rows: nrows,
            cols: ncols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds from integer literals, row-major.
    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        assert_eq!(rows * cols, data.len(), "literal length mismatch");
        Matrix {
            rows,
            cols,
            entries: data.iter().map(|&v| R::from_i64(v)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn entries(&self) -> &[R] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map(|e| -e.clone())
    }

    pub fn map(&self, f: impl Fn(&R) -> R) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.clone() * b.clone();
                    out[(i, j)] += prod;
                }
            }
        }
        Ok(out)
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn apply(&self, v: &[R]) -> Result<Vec<R>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch(self.rows, self.cols, v.len(), 1));
        }
        let mut out = vec![R::zero(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() || v[j].is_zero() {
                    continue;
                }
                out[i] += a.clone() * v[j].clone();
            }
        }
        Ok(out)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    pub(crate) fn add_row_multiple(&mut self, dst: usize, src: usize, q: &R) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self[(src, j)].clone();
            if v.is_zero() {
                continue;
            }
            let add = q.clone() * v;
            self[(dst, j)] += add;
        }
    }

    /// col[dst] += q * col[src]
    pub(crate) fn add_col_multiple(&mut self, dst: usize, src: usize, q: &R) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self[(i, src)].clone();
            if v.is_zero() {
                continue;
            }
            let add = q.clone() * v;
            self[(i, dst)] += add;
        }
    }

    pub(crate) fn scale_row(&mut self, r: usize, u: &R) {
        for j in 0..self.cols {
            let v = self[(r, j)].clone();
            self[(r, j)] = u.clone() * v;
        }
    }

    pub(crate) fn scale_col(&mut self, c: usize, u: &R) {
        for i in 0..self.rows {
            let v = self[(i, c)].clone();
            self[(i, c)] = u.clone() * v;
        }
    }

    /// Smith reduction. Returns the nonzero diagonal (invariant factors,
    /// normalized, each dividing the next). The rank is the diagonal length.
    pub fn smith_diagonal(&self) -> Vec<R> {
        let mut m = self.clone();
        let mut diag = Vec::new();
        let n = m.rows.min(m.cols);
        let mut k = 0;
        while k < n {
            // smallest-magnitude nonzero pivot in the remaining block;
            // over a field every nonzero entry serves equally well
            let mut pivot: Option<(usize, usize)> = None;
            'scan_pivot: for i in k..m.rows {
                for j in k..m.cols {
                    if m[(i, j)].is_zero() {
                        continue;
                    }
                    let better = match pivot {
                        None => true,
                        Some((pi, pj)) => m[(i, j)].pivot_size() < m[(pi, pj)].pivot_size(),
                    };
                    if better {
                        pivot = Some((i, j));
                        if R::IS_FIELD {
                            break 'scan_pivot;
                        }
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                break;
            };
            m.swap_rows(k, pi);
            m.swap_cols(k, pj);

            // clear the pivot row and column
            let mut dirty = true;
            while dirty {
                dirty = false;
                for i in (k + 1)..m.rows {
                    if m[(i, k)].is_zero() {
                        continue;
                    }
                    let (q, r) = m[(i, k)].div_rem(&m[(k, k)]);
                    m.add_row_multiple(i, k, &(-q));
                    debug_assert_eq!(m[(i, k)], r);
                    if !r.is_zero() {
                        // remainder became the smaller entry: promote it
                        m.swap_rows(k, i);
                        dirty = true;
                    }
                }
                for j in (k + 1)..m.cols {
                    if m[(k, j)].is_zero() {
                        continue;
                    }
                    let (q, r) = m[(k, j)].div_rem(&m[(k, k)]);
                    m.add_col_multiple(j, k, &(-q));
                    debug_assert_eq!(m[(k, j)], r);
                    if !r.is_zero() {
                        m.swap_cols(k, j);
                        dirty = true;
                    }
                }
            }

            // restore divisibility: pivot must divide the rest of the block
            if !R::IS_FIELD {
                let mut fixed = false;
                'scan: for i in (k + 1)..m.rows {
                    for j in (k + 1)..m.cols {
                        if m[(i, j)].is_zero() {
                            continue;
                        }
                        let (_, r) = m[(i, j)].div_rem(&m[(k, k)]);
                        if !r.is_zero() {
                            m.add_row_multiple(k, i, &R::one());
                            fixed = true;
                            break 'scan;
                        }
                    }
                }
                if fixed {
                    continue; // re-run the elimination at position k
                }
            }

            let u = m[(k, k)].normalizing_unit();
            m.scale_row(k, &u);
            diag.push(m[(k, k)].clone());
            k += 1;
        }
        diag
    }

    pub fn rank(&self) -> usize {
        self.smith_diagonal().len()
    }
}

impl<R: Ring> std::ops::Index<(usize, usize)> for Matrix<R> {
    type Output = R;
    fn index(&self, (i, j): (usize, usize)) -> &R {
        &self.entries[i * self.cols + j]
    }
}

impl<R: Ring> std::ops::IndexMut<(usize, usize)> for Matrix<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut R {
        &mut self.entries[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Int, Rat};
    use num_traits::{One, Zero};

    #[test]
    fn smith_of_known_matrix() {
        // classic example with invariant factors 1, 3, 21
        let m: Matrix<Int> = Matrix::from_i64(
            4,
            4,
            &[
                -6, 111, -36, 6, 5, -672, 210, 74, 0, -255, 81, 24, -7, 255, -81, -10,
            ],
        );
        let d = m.smith_diagonal();
        let want: Vec<Int> = [1, 3, 21].iter().map(|&v| Int::from(v)).collect();
        assert_eq!(d, want);
    }

    #[test]
    fn smith_divisibility_chain() {
        let m: Matrix<Int> = Matrix::from_i64(3, 3, &[2, 4, 4, -6, 6, 12, 10, 4, 16]);
        let d = m.smith_diagonal();
        for w in d.windows(2) {
            let (_, r) = w[1].div_rem(&w[0]);
            assert!(r.is_zero(), "{:?} does not divide {:?}", w[0], w[1]);
        }
    }

    #[test]
    fn rank_over_rationals() {
        let m: Matrix<Rat> = Matrix::from_i64(3, 3, &[1, 2, 3, 2, 4, 6, 1, 0, 1]);
        assert_eq!(m.rank(), 2);
        let d = m.smith_diagonal();
        assert!(d.iter().all(|e| e.is_one()));
    }

    #[test]
    fn rank_of_zero_and_empty() {
        let z: Matrix<Int> = Matrix::zero(3, 2);
        assert_eq!(z.rank(), 0);
        let e: Matrix<Int> = Matrix::zero(0, 5);
        assert_eq!(e.rank(), 0);
        assert!(e.mul(&Matrix::zero(5, 0)).unwrap().is_zero());
    }

    #[test]
    fn mul_shapes_and_values() {
        let a: Matrix<Int> = Matrix::from_i64(2, 3, &[1, 2, 0, 0, -1, 1]);
        let b: Matrix<Int> = Matrix::from_i64(3, 1, &[3, 1, 2]);
        let c = a.mul(&b).unwrap();
        assert_eq!(c.rows(), 2);
        assert_eq!(c.cols(), 1);
        assert_eq!(c[(0, 0)], Int::from(5));
        assert_eq!(c[(1, 0)], Int::from(1));
        assert!(a.mul(&a).is_err());
    }
}
