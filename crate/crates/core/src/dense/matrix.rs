use std::ops::{Index, IndexMut};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

/// Number of row chunks used by the reductions in [`DenseMatrix::t_matmul`].
/// Fixed so that results do not depend on the worker count.
const REDUCTION_CHUNKS: usize = 64;

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::dims("dense data", n_rows * n_cols, data.len()));
        }
        Ok(Self {
            n_rows,
            n_cols,
            data,
        })
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in 0..n_rows {
            for c in 0..n_cols {
                data.push(f(r, c));
            }
        }
        Self {
            n_rows,
            n_cols,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(n_rows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        for col in columns {
            if col.len() != n_rows {
                return Err(Error::dims("column length", n_rows, col.len()));
            }
        }
        Ok(Self::from_fn(n_rows, columns.len(), |r, c| columns[c][r]))
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.n_cols..(r + 1) * self.n_cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.n_cols..(r + 1) * self.n_cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.n_rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_column(&mut self, c: usize, values: &[f64]) {
        for (r, &v) in values.iter().enumerate() {
            self[(r, c)] = v;
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n_cols, self.n_rows, |r, c| self[(c, r)])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn column_norm(&self, c: usize) -> f64 {
        (0..self.n_rows)
            .map(|r| self[(r, c)] * self[(r, c)])
            .sum::<f64>()
            .sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n_rows.min(self.n_cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) -> Result<()> {
        self.check_same_shape(other, "axpy")?;
        for (s, o) in self.data.iter_mut().zip(&other.data) {
            *s += alpha * o;
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data,
        })
    }

    fn check_same_shape(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.n_rows != other.n_rows {
            return Err(Error::dims(context, self.n_rows, other.n_rows));
        }
        if self.n_cols != other.n_cols {
            return Err(Error::dims(context, self.n_cols, other.n_cols));
        }
        Ok(())
    }

    /// Copies the listed columns, in order, into a new matrix.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.n_rows, cols.len(), |r, c| self[(r, cols[c])])
    }

    /// Copies the column range `start..end`.
    pub fn column_range(&self, start: usize, end: usize) -> Self {
        Self::from_fn(self.n_rows, end - start, |r, c| self[(r, start + c)])
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Self) -> Result<Self> {
        if self.n_rows != other.n_rows {
            return Err(Error::dims("hcat", self.n_rows, other.n_rows));
        }
        let n_cols = self.n_cols + other.n_cols;
        let mut data = Vec::with_capacity(self.n_rows * n_cols);
        for r in 0..self.n_rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(Self {
            n_rows: self.n_rows,
            n_cols,
            data,
        })
    }

    /// `self · rhs`, parallel over output rows.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.n_cols != rhs.n_rows {
            return Err(Error::dims("matmul", self.n_cols, rhs.n_rows));
        }
        let q = rhs.n_cols;
        let mut out = Self::zeros(self.n_rows, q);
        if q == 0 {
            return Ok(out);
        }
        out.data
            .par_chunks_mut(q)
            .zip(self.data.par_chunks(self.n_cols.max(1)))
            .for_each(|(out_row, lhs_row)| {
                for (k, &a) in lhs_row.iter().enumerate() {
                    if a == 0.0 {
                        continue;
                    }
                    for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                        *o += a * b;
                    }
                }
            });
        Ok(out)
    }

    /// `selfᵀ · rhs` for tall operands.
    ///
    /// Rows are split into a fixed number of chunks whose partial products are
    /// summed in chunk order, so the result is bitwise independent of the
    /// number of worker threads.
    pub fn t_matmul(&self, rhs: &Self) -> Result<Self> {
        if self.n_rows != rhs.n_rows {
            return Err(Error::dims("t_matmul", self.n_rows, rhs.n_rows));
        }
        let (p, q, n) = (self.n_cols, rhs.n_cols, self.n_rows);
        let mut out = Self::zeros(p, q);
        if n == 0 || p == 0 || q == 0 {
            return Ok(out);
        }
        let chunk = n.div_ceil(REDUCTION_CHUNKS.min(n));
        let partials: Vec<Vec<f64>> = (0..n.div_ceil(chunk))
            .into_par_iter()
            .map(|ci| {
                let mut acc = vec![0.0; p * q];
                for r in ci * chunk..((ci + 1) * chunk).min(n) {
                    let rhs_row = rhs.row(r);
                    for (i, &a) in self.row(r).iter().enumerate() {
                        if a == 0.0 {
                            continue;
                        }
                        for (o, &b) in acc[i * q..(i + 1) * q].iter_mut().zip(rhs_row) {
                            *o += a * b;
                        }
                    }
                }
                acc
            })
            .collect();
        for part in partials {
            for (o, v) in out.data.iter_mut().zip(part) {
                *o += v;
            }
        }
        Ok(out)
    }

    /// `(self + selfᵀ) / 2` for square matrices.
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.n_rows, self.n_cols, |r, c| {
            0.5 * (self[(r, c)] + self[(c, r)])
        })
    }

    /// `‖selfᵀself − I‖_F`, the orthonormality defect of the columns.
    pub fn orthogonality_error(&self) -> f64 {
        let g = self.t_matmul(self).expect("shapes agree");
        let mut acc = 0.0;
        for i in 0..g.n_rows {
            for j in 0..g.n_cols {
                let target = if i == j { 1.0 } else { 0.0 };
                acc += (g[(i, j)] - target).powi(2);
            }
        }
        acc.sqrt()
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.n_cols + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.n_cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_and_transpose_products_agree() {
        let a = DenseMatrix::from_fn(7, 3, |r, c| (r as f64 + 1.0) * 0.5 - c as f64);
        let b = DenseMatrix::from_fn(7, 2, |r, c| (r * c) as f64 + 1.0);
        let direct = a.transpose().matmul(&b).unwrap();
        let fused = a.t_matmul(&b).unwrap();
        assert!(direct.sub(&fused).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn hcat_and_select() {
        let a = DenseMatrix::identity(3);
        let b = DenseMatrix::from_fn(3, 1, |r, _| r as f64);
        let c = a.hcat(&b).unwrap();
        assert_eq!(c.n_cols(), 4);
        assert_eq!(c.column(3), vec![0.0, 1.0, 2.0]);
        assert_eq!(c.select_columns(&[3, 0]).column(1), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn identity_is_orthonormal() {
        assert_eq!(DenseMatrix::identity(4).orthogonality_error(), 0.0);
    }
}
