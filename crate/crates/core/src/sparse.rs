//! Square sparse matrices with nonnegative integer entries (CSR layout) and a
//! minimal linear-operator interface for norm estimation.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Square matrix with positive integer entries stored row-major in CSR form.
///
/// Entries are kept sorted by `(row, col)` with duplicates merged, so two
/// matrices with the same entry multiset compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<u64>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Repeated positions
    /// are summed and zero values dropped.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        let mut t: Vec<(usize, usize, u64)> = triplets.into_iter().collect();
        if let Some(&(r, c, _)) = t.iter().find(|&&(r, c, _)| r >= dim || c >= dim) {
            return Err(Error::param(
                "entries",
                format!("index ({r}, {c}) outside a {dim}x{dim} matrix"),
            ));
        }
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut values: Vec<u64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            if v == 0 {
                continue;
            }
            if last == Some((r, c)) {
                *values.last_mut().expect("merged entry exists") += v;
            } else {
                cols.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            dim,
            row_ptr,
            cols,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored (nonzero) positions.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(col, value)` pairs of row `i`, ascending by column.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// All entries as `(row, col, value)`, sorted by `(row, col)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[span.clone()].binary_search(&col) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0,
        }
    }

    pub fn row_sums(&self) -> Vec<u64> {
        (0..self.dim).map(|r| self.row(r).map(|(_, v)| v).sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.dim];
        for (&c, &v) in self.cols.iter().zip(&self.values) {
            sums[c] += v;
        }
        sums
    }

    pub fn max_row_sum(&self) -> u64 {
        self.row_sums().into_iter().max().unwrap_or(0)
    }

    pub fn max_col_sum(&self) -> u64 {
        self.col_sums().into_iter().max().unwrap_or(0)
    }

    /// Sum of all entries.
    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.dim, self.entries().map(|(r, c, v)| (c, r, v)))
            .expect("transpose keeps indices in range")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        Self::from_triplets(self.dim, self.entries().chain(other.entries()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries().all(|(r, c, v)| self.get(c, r) == v)
    }

    /// A copy with `delta` added at `(row, col)`.
    pub fn with_added(&self, row: usize, col: usize, delta: u64) -> Result<Self> {
        Self::from_triplets(self.dim, self.entries().chain([(row, col, delta)]))
    }

    /// `⟨A y, y⟩` for a `±1` vector `y`, in exact arithmetic.
    pub fn sign_quadratic_form(&self, y: &[i8]) -> i128 {
        assert_eq!(y.len(), self.dim);
        self.entries()
            .map(|(r, c, v)| i128::from(v) * i128::from(y[r] * y[c]))
            .sum()
    }

    /// Dense copy as `f64`, row-major.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim * self.dim];
        for (r, c, v) in self.entries() {
            out[r * self.dim + c] = v as f64;
        }
        out
    }
}

/// `N nnz` header, then one `row col value` line per stored entry.
impl fmt::Display for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.dim, self.nnz())?;
        for (r, c, v) in self.entries() {
            writeln!(f, "{r} {c} {v}")?;
        }
        Ok(())
    }
}

impl FromStr for SparseMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse = |line: usize, text: &str| -> Result<Vec<u64>> {
            text.split_whitespace()
                .map(|t| {
                    t.parse().map_err(|_| Error::Parse {
                        line,
                        reason: format!("`{t}` is not a nonnegative integer"),
                    })
                })
                .collect()
        };
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "missing header `N nnz`".into(),
        })?;
        let [dim, nnz] = parse(line, header)?[..] else {
            return Err(Error::Parse {
                line,
                reason: "header must be `N nnz`".into(),
            });
        };
        let mut triplets = Vec::with_capacity(nnz as usize);
        for (line, text) in lines {
            let [r, c, v] = parse(line, text)?[..] else {
                return Err(Error::Parse {
                    line,
                    reason: "entry must be `row col value`".into(),
                });
            };
            triplets.push((r as usize, c as usize, v));
        }
        if triplets.len() as u64 != nnz {
            return Err(Error::Parse {
                line: 1,
                reason: format!("header announces {nnz} entries, found {}", triplets.len()),
            });
        }
        Self::from_triplets(dim as usize, triplets)
    }
}

/// A real square matrix accessed through products.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `out = A x`.
    fn apply(&self, x: &[f64], out: &mut [f64]);

    /// `out = Aᵀ x`.
    fn apply_transpose(&self, x: &[f64], out: &mut [f64]);

    /// A cheap upper bound on the spectral norm.
    fn norm_upper_bound(&self) -> f64;
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row(r).map(|(c, v)| v as f64 * x[c]).sum();
        }
    }

    fn apply_transpose(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (r, c, v) in self.entries() {
            out[c] += v as f64 * x[r];
        }
    }

    /// `sqrt(‖A‖_1 ‖A‖_∞)`; equals the maximum row sum for symmetric matrices.
    fn norm_upper_bound(&self) -> f64 {
        (self.max_row_sum() as f64 * self.max_col_sum() as f64).sqrt()
    }
}

/// `Σ_i w_i A_i` for matrices of a common dimension, never materialized.
#[derive(Debug, Clone)]
pub struct WeightedSum<'a> {
    matrices: &'a [SparseMatrix],
    weights: Vec<f64>,
}

impl<'a> WeightedSum<'a> {
    pub fn new(matrices: &'a [SparseMatrix], weights: Vec<f64>) -> Result<Self> {
        if matrices.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: matrices.len(),
                actual: weights.len(),
            });
        }
        if let Some(m) = matrices.iter().find(|m| m.dim() != matrices[0].dim()) {
            return Err(Error::LengthMismatch {
                expected: matrices[0].dim(),
                actual: m.dim(),
            });
        }
        Ok(Self { matrices, weights })
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let dim = LinearOperator::dim(self);
        let mut out = vec![0.0; dim * dim];
        for (m, &w) in self.matrices.iter().zip(&self.weights) {
            for (r, c, v) in m.entries() {
                out[r * dim + c] += w * v as f64;
            }
        }
        out
    }
}

impl LinearOperator for WeightedSum<'_> {
    fn dim(&self) -> usize {
        self.matrices.first().map_or(0, SparseMatrix::dim)
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (m, &w) in self.matrices.iter().zip(&self.weights) {
            for (r, c, v) in m.entries() {
                out[r] += w * v as f64 * x[c];
            }
        }
    }

    fn apply_transpose(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (m, &w) in self.matrices.iter().zip(&self.weights) {
            for (r, c, v) in m.entries() {
                out[c] += w * v as f64 * x[r];
            }
        }
    }

    fn norm_upper_bound(&self) -> f64 {
        self.matrices
            .iter()
            .zip(&self.weights)
            .map(|(m, w)| w.abs() * m.norm_upper_bound())
            .sum()
    }
}
