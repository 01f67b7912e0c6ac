//! Square matrix storage shared by adjacencies and Laplacians.
//!
//! Graphs up to [`DENSE_LIMIT`] nodes are held densely; larger ones use a
//! row-compressed sparse layout with column indices sorted within each row.

use ndarray::{Array1, Array2, ArrayView2, Axis};

/// Largest node count stored densely.
pub const DENSE_LIMIT: usize = 4096;

/// Compressed sparse rows with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from (row, col, value) triplets. Duplicates are summed and
    /// explicit zeros are dropped.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            debug_assert!(r < n && c < n);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            indices.push(c);
            values.push(v);
            indptr[r + 1] += 1;
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        let mut m = Self {
            n,
            indptr,
            indices,
            values,
        };
        m.prune_zeros();
        m
    }

    fn prune_zeros(&mut self) {
        if self.values.iter().all(|v| *v != 0.0) {
            return;
        }
        let mut indptr = vec![0usize; self.n + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.n {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.values[k] != 0.0 {
                    indices.push(self.indices[k]);
                    values.push(self.values[k]);
                }
            }
            indptr[r + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.indptr[i]..self.indptr[i + 1];
        match self.indices[span.clone()].binary_search(&j) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                out[[i, j]] = v;
            }
        }
        out
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .collect()
    }
}

/// Square matrix, dense or sparse depending on size.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphMatrix {
    Dense(Array2<f64>),
    Sparse(CsrMatrix),
}

impl GraphMatrix {
    /// Chooses storage by node count: dense up to [`DENSE_LIMIT`].
    pub fn from_dense(m: Array2<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "matrix must be square");
        let n = m.nrows();
        if n <= DENSE_LIMIT {
            GraphMatrix::Dense(m)
        } else {
            let mut trip = Vec::new();
            for ((i, j), v) in m.indexed_iter() {
                if *v != 0.0 {
                    trip.push((i, j, *v));
                }
            }
            GraphMatrix::Sparse(CsrMatrix::from_triplets(n, trip))
        }
    }

    /// Chooses storage by node count: dense up to [`DENSE_LIMIT`].
    pub fn from_triplets(n: usize, triplets: Vec<(usize, usize, f64)>) -> Self {
        if n <= DENSE_LIMIT {
            let mut m = Array2::zeros((n, n));
            for (i, j, v) in triplets {
                m[[i, j]] += v;
            }
            GraphMatrix::Dense(m)
        } else {
            GraphMatrix::Sparse(CsrMatrix::from_triplets(n, triplets))
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn n(&self) -> usize {
        match self {
            GraphMatrix::Dense(m) => m.nrows(),
            GraphMatrix::Sparse(s) => s.n(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, GraphMatrix::Sparse(_))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            GraphMatrix::Dense(m) => m[[i, j]],
            GraphMatrix::Sparse(s) => s.get(i, j),
        }
    }

    /// Nonzero entries of row `i` in increasing column order.
    pub fn row_entries(&self, i: usize) -> Vec<(usize, f64)> {
        match self {
            GraphMatrix::Dense(m) => m
                .row(i)
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(j, v)| (j, *v))
                .collect(),
            GraphMatrix::Sparse(s) => s.row(i).collect(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            GraphMatrix::Dense(m) => m.iter().filter(|v| **v != 0.0).count(),
            GraphMatrix::Sparse(s) => s.nnz(),
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        match self {
            GraphMatrix::Dense(m) => m.clone(),
            GraphMatrix::Sparse(s) => s.to_dense(),
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        match self {
            GraphMatrix::Dense(m) => m
                .indexed_iter()
                .filter(|(_, v)| **v != 0.0)
                .map(|((i, j), v)| (i, j, *v))
                .collect(),
            GraphMatrix::Sparse(s) => s.triplets(),
        }
    }

    pub fn row_sums(&self) -> Array1<f64> {
        match self {
            GraphMatrix::Dense(m) => m.sum_axis(Axis(1)),
            GraphMatrix::Sparse(s) => (0..s.n()).map(|i| s.row(i).map(|(_, v)| v).sum()).collect(),
        }
    }

    /// `self * x` for an n×d right-hand side.
    pub fn matmul(&self, x: ArrayView2<f64>) -> Array2<f64> {
        assert_eq!(x.nrows(), self.n(), "row count mismatch in matmul");
        match self {
            GraphMatrix::Dense(m) => m.dot(&x),
            GraphMatrix::Sparse(s) => {
                let mut out = Array2::zeros((s.n(), x.ncols()));
                for i in 0..s.n() {
                    let mut row = out.row_mut(i);
                    for (j, v) in s.row(i) {
                        row.scaled_add(v, &x.row(j));
                    }
                }
                out
            }
        }
    }

    pub fn transpose(&self) -> Self {
        match self {
            GraphMatrix::Dense(m) => GraphMatrix::Dense(m.t().to_owned()),
            GraphMatrix::Sparse(s) => GraphMatrix::Sparse(CsrMatrix::from_triplets(
                s.n(),
                s.triplets().into_iter().map(|(i, j, v)| (j, i, v)).collect(),
            )),
        }
    }

    /// `(self + selfᵀ) / 2`.
    pub fn symmetrized(&self) -> Self {
        match self {
            GraphMatrix::Dense(m) => GraphMatrix::Dense((m + &m.t()) * 0.5),
            GraphMatrix::Sparse(s) => {
                let mut trip = Vec::with_capacity(2 * s.nnz());
                for (i, j, v) in s.triplets() {
                    trip.push((i, j, 0.5 * v));
                    trip.push((j, i, 0.5 * v));
                }
                GraphMatrix::Sparse(CsrMatrix::from_triplets(s.n(), trip))
            }
        }
    }

    /// Elementwise map over stored entries; zero entries of a sparse matrix
    /// are not visited, so `f(0.0)` must be `0.0` for sparse inputs.
    pub fn map_entries(&self, f: impl Fn(usize, usize, f64) -> f64) -> Self {
        match self {
            GraphMatrix::Dense(m) => {
                let mut out = m.clone();
                for ((i, j), v) in out.indexed_iter_mut() {
                    *v = f(i, j, *v);
                }
                GraphMatrix::Dense(out)
            }
            GraphMatrix::Sparse(s) => GraphMatrix::Sparse(CsrMatrix::from_triplets(
                s.n(),
                s.triplets()
                    .into_iter()
                    .map(|(i, j, v)| (i, j, f(i, j, v)))
                    .collect(),
            )),
        }
    }

    pub fn max_abs_asymmetry(&self) -> f64 {
        match self {
            GraphMatrix::Dense(m) => m
                .indexed_iter()
                .map(|((i, j), v)| (v - m[[j, i]]).abs())
                .fold(0.0, f64::max),
            GraphMatrix::Sparse(s) => s
                .triplets()
                .into_iter()
                .map(|(i, j, v)| (v - s.get(j, i)).abs())
                .fold(0.0, f64::max),
        }
    }
}
