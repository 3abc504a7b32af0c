use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::StateVector;
use crate::error::{Error, Result};

const ZERO_CUTOFF: f64 = 1e-15;

/// Anything that can act on a vector of amplitudes.
///
/// Implementations must be deterministic: for a fixed input every output
/// element is summed in the same order regardless of thread count.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]);

    fn apply_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.apply_into(x, &mut y);
        y
    }
}

/// Row-compressed operator with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<Complex64>,
    hermitian: bool,
}

impl SparseOperator {
    /// Assembles from `(row, col, value)` triplets; duplicates are summed
    /// and entries below 1e-15 in magnitude dropped.
    pub fn from_triplets(
        dim: usize,
        mut triplets: Vec<(usize, usize, Complex64)>,
        hermitian: bool,
    ) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut rows: Vec<Vec<(u32, Complex64)>> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside dim {dim}");
            let row = &mut rows[r];
            match row.last_mut() {
                Some((lc, lv)) if *lc as usize == c => *lv += v,
                _ => row.push((c as u32, v)),
            }
        }
        Self::from_rows(dim, rows, hermitian)
    }

    /// Assembles from per-row entries; each row must be sorted by column
    /// without duplicates.
    pub fn from_rows(dim: usize, rows: Vec<Vec<(u32, Complex64)>>, hermitian: bool) -> Self {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0);
        let nnz: usize = rows.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        for row in rows {
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
            for (c, v) in row {
                if v.norm() > ZERO_CUTOFF {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseOperator {
            dim,
            row_ptr,
            cols,
            vals,
            hermitian,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let rows = diag
            .iter()
            .enumerate()
            .map(|(i, &d)| vec![(i as u32, Complex64::new(d, 0.0))])
            .collect();
        Self::from_rows(diag.len(), rows, true)
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .zip(&self.vals[span])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&(c as u32)) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Diagonal entries, when the operator has no off-diagonal part.
    pub fn as_diagonal(&self) -> Option<Vec<f64>> {
        let mut d = vec![0.0; self.dim];
        for (r, slot) in d.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                if c != r || v.im.abs() > ZERO_CUTOFF {
                    return None;
                }
                *slot = v.re;
            }
        }
        Some(d)
    }

    pub fn adjoint(&self) -> SparseOperator {
        let mut triplets = Vec::with_capacity(self.nnz());
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                triplets.push((c, r, v.conj()));
            }
        }
        Self::from_triplets(self.dim, triplets, self.hermitian)
    }

    /// `max |A - A^dagger|` over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        let adj = self.adjoint();
        self.sub(&adj).max_abs()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &SparseOperator) -> SparseOperator {
        self.combine(other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &SparseOperator) -> SparseOperator {
        self.combine(other, Complex64::new(-1.0, 0.0))
    }

    pub fn scaled(&self, c: f64) -> SparseOperator {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= c);
        out
    }

    fn combine(&self, other: &SparseOperator, sign: Complex64) -> SparseOperator {
        assert_eq!(self.dim, other.dim);
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.dim {
            triplets.extend(self.row(r).map(|(c, v)| (r, c, v)));
            triplets.extend(other.row(r).map(|(c, v)| (r, c, v * sign)));
        }
        Self::from_triplets(
            self.dim,
            triplets,
            self.hermitian && other.hermitian,
        )
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &SparseOperator) -> SparseOperator {
        assert_eq!(self.dim, other.dim);
        let rows: Vec<Vec<(u32, Complex64)>> = (0..self.dim)
            .into_par_iter()
            .map(|r| {
                let mut acc: Vec<(u32, Complex64)> = Vec::new();
                for (k, a) in self.row(r) {
                    for (c, b) in other.row(k) {
                        acc.push((c as u32, a * b));
                    }
                }
                acc.sort_by_key(|e| e.0);
                let mut merged: Vec<(u32, Complex64)> = Vec::with_capacity(acc.len());
                for (c, v) in acc {
                    match merged.last_mut() {
                        Some((lc, lv)) if *lc == c => *lv += v,
                        _ => merged.push((c, v)),
                    }
                }
                merged
            })
            .collect();
        Self::from_rows(self.dim, rows, false)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    /// `<a|A|b>`.
    pub fn matrix_element(&self, a: &StateVector, b: &StateVector) -> Complex64 {
        let ab = self.apply_vec(b.amplitudes());
        super::dot(a.amplitudes(), &ab)
    }

    pub fn expectation(&self, psi: &StateVector) -> f64 {
        self.matrix_element(psi, psi).re
    }
}

impl LinearOperator for SparseOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.par_iter_mut().enumerate().for_each(|(r, out)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            *out = acc;
        });
    }
}

/// `op * psi`, without renormalizing.
pub fn apply_operator<O: LinearOperator + ?Sized>(op: &O, psi: &StateVector) -> Result<StateVector> {
    if op.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            actual: psi.dim(),
        });
    }
    Ok(StateVector::from_amplitudes(op.apply_vec(psi.amplitudes())))
}
