//! Compressed sparse row storage, generic over the entry type so the same
//! container holds plain doubles and [`LogScaled`] entries.

use crate::error::{Error, Result};
use crate::fitting::LogScaled;

pub trait Scalar: Copy + std::fmt::Debug + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(self, other: Self) -> Self;
    fn times(self, c: f64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn plus(self, other: Self) -> Self {
        self + other
    }
    fn times(self, c: f64) -> Self {
        self * c
    }
}

impl Scalar for LogScaled {
    fn zero() -> Self {
        LogScaled::ZERO
    }
    fn is_zero(&self) -> bool {
        LogScaled::is_zero(self)
    }
    fn plus(self, other: Self) -> Self {
        self + other
    }
    fn times(self, c: f64) -> Self {
        self.scale(c)
    }
}

/// Row-compressed sparse matrix; columns ascend within each row and exact
/// zeros are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

pub type SparseMatrix = CsrMatrix<f64>;

impl<T: Scalar> CsrMatrix<T> {
    /// Duplicate entries are summed; entries that end up exactly zero are
    /// dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, T)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        let mut it = triplets.into_iter().peekable();
        while let Some((r, c, mut v)) = it.next() {
            assert!(r < nrows && c < ncols, "entry ({r}, {c}) out of bounds {nrows}x{ncols}");
            while let Some(&(r2, c2, v2)) = it.peek() {
                if r2 == r && c2 == c {
                    v = v.plus(v2);
                    it.next();
                } else {
                    break;
                }
            }
            if !v.is_zero() {
                rows.push(r);
                col_idx.push(c);
                values.push(v);
            }
        }
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_triplets(nrows, ncols, Vec::new())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => T::zero(),
        }
    }

    /// All stored entries as `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> CsrMatrix<U> {
        CsrMatrix::from_triplets(self.nrows, self.ncols, self.iter().map(|(i, j, v)| (i, j, f(v))).collect())
    }

    /// Rows `rows` and columns `cols` of `self`, renumbered in the given
    /// order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new;
        }
        let mut trip = Vec::new();
        for (new_r, &r) in rows.iter().enumerate() {
            let (cs, vs) = self.row(r);
            for (&c, &v) in cs.iter().zip(vs) {
                if col_map[c] != usize::MAX {
                    trip.push((new_r, col_map[c], v));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), trip)
    }

    /// `P A P^T` for the permutation that sends old index `order[k]` to `k`.
    pub fn permute_symmetric(&self, order: &[usize]) -> Self {
        self.submatrix(order, order)
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.iter().map(|(i, j, v)| (j, i, v)).collect())
    }
}

impl CsrMatrix<f64> {
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut trip = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                trip.push((i, j, v));
            }
        }
        Self::from_triplets(nrows, ncols, trip)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.iter() {
            d[i][j] = v;
        }
        d
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                let (cs, vs) = self.row(i);
                cs.iter().zip(vs).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn row_max_abs(&self, i: usize) -> f64 {
        self.row(i).1.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl CsrMatrix<LogScaled> {
    /// Plain-double copy; fails if any entry overflows.
    pub fn to_f64(&self, what: &str) -> Result<CsrMatrix<f64>> {
        let mut trip = Vec::with_capacity(self.nnz());
        for (i, j, v) in self.iter() {
            let x = v.try_to_f64().ok_or_else(|| Error::Overflow(format!("{what} entry ({i}, {j})")))?;
            trip.push((i, j, x));
        }
        Ok(CsrMatrix::from_triplets(self.nrows, self.ncols, trip))
    }

    pub fn max_abs(&self) -> LogScaled {
        self.values.iter().fold(LogScaled::ZERO, |m, v| m.max_abs(*v))
    }

    pub fn row_max_abs(&self, i: usize) -> LogScaled {
        self.row(i).1.iter().fold(LogScaled::ZERO, |m, v| m.max_abs(*v))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(LogScaled::is_finite)
    }

    /// Divides every row by its largest magnitude. Returns the scaled matrix
    /// (entries in `[-1, 1]`, tiny ones flushed to exact zero) and the
    /// per-row log scale.
    pub fn equilibrate_rows(&self) -> (CsrMatrix<f64>, Vec<(f64, f64)>) {
        let scales: Vec<(f64, f64)> = (0..self.nrows)
            .map(|i| {
                let m = self.row_max_abs(i);
                if m.is_zero() {
                    (0.0, 0.0)
                } else {
                    m.log_parts()
                }
            })
            .collect();
        let trip = self.iter().map(|(i, j, v)| (i, j, v.to_f64_shifted(scales[i]))).collect();
        (CsrMatrix::from_triplets(self.nrows, self.ncols, trip), scales)
    }

    /// `self * x` evaluated in log arithmetic.
    pub fn mul_vec_log(&self, x: &[LogScaled]) -> Vec<LogScaled> {
        (0..self.nrows)
            .map(|i| {
                let (cs, vs) = self.row(i);
                cs.iter().zip(vs).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect()
    }
}
