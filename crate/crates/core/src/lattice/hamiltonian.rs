use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{Boundary, LatticeSpec, LinearOperator, SparseOperator, Sublattice};
use crate::error::Result;

/// Hopping amplitude when both neighbors carry flux.
pub const FRAC_1_2SQRT2: f64 = 0.5 * FRAC_1_SQRT_2;

/// One `P X P` hopping term: flips `middle` when its neighbors agree.
///
/// A missing neighbor is a phantom boundary link fixed to `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KineticTerm {
    pub left: Option<usize>,
    pub middle: usize,
    pub right: Option<usize>,
}

impl KineticTerm {
    /// Neighbor occupations `(left, right)` in a basis state.
    pub fn neighbors(&self, bits: usize) -> (bool, bool) {
        let get = |l: Option<usize>| l.is_some_and(|l| (bits >> l) & 1 == 1);
        (get(self.left), get(self.right))
    }

    /// Matrix element for flipping `middle` given angles for the `00` and
    /// `11` neighbor sectors.
    pub fn weight(&self, bits: usize, empty: f64, full: f64) -> f64 {
        match self.neighbors(bits) {
            (false, false) => empty,
            (true, true) => full,
            _ => 0.0,
        }
    }

    /// All hopping terms of a lattice, ordered by middle link.
    pub fn all(spec: &LatticeSpec) -> Vec<KineticTerm> {
        let n = spec.n_links;
        (0..n)
            .map(|b| match spec.boundary {
                Boundary::Periodic => KineticTerm {
                    left: Some((b + n - 1) % n),
                    middle: b,
                    right: Some((b + 1) % n),
                },
                Boundary::Open => KineticTerm {
                    left: b.checked_sub(1),
                    middle: b,
                    right: (b + 1 < n).then_some(b + 1),
                },
            })
            .collect()
    }

    pub fn sublattice(spec: &LatticeSpec, sub: Sublattice) -> Vec<KineticTerm> {
        Self::all(spec)
            .into_iter()
            .filter(|t| sub.contains(t.middle))
            .collect()
    }
}

/// Matrix-free link Hamiltonian. Rows are computed in gather form so the
/// result is independent of the thread count.
#[derive(Debug, Clone)]
pub struct QubitHamiltonian {
    spec: LatticeSpec,
    terms: Vec<KineticTerm>,
    diag: Vec<f64>,
}

impl QubitHamiltonian {
    pub fn new(spec: &LatticeSpec) -> Result<Self> {
        spec.check_statevector()?;
        let diag = (0..spec.dim())
            .into_par_iter()
            .map(|b| spec.diagonal_energy(b))
            .collect();
        Ok(QubitHamiltonian {
            spec: *spec,
            terms: KineticTerm::all(spec),
            diag,
        })
    }

    /// Only the hopping part.
    pub fn kinetic_only(spec: &LatticeSpec) -> Result<Self> {
        let mut h = Self::new(spec)?;
        h.diag.iter_mut().for_each(|d| *d = 0.0);
        Ok(h)
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    /// Eigenvalues of the electric plus mass terms.
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn terms(&self) -> &[KineticTerm] {
        &self.terms
    }

    /// Connected row entries `(column, value)` of basis state `bits`,
    /// excluding the diagonal.
    pub fn offdiagonal_row(&self, bits: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.terms.iter().filter_map(move |t| {
            let w = t.weight(bits, FRAC_1_SQRT_2, FRAC_1_2SQRT2);
            (w != 0.0).then_some((bits ^ (1 << t.middle), w))
        })
    }

    pub fn to_sparse(&self) -> SparseOperator {
        let rows = (0..self.spec.dim())
            .into_par_iter()
            .map(|b| {
                let mut row: Vec<(u32, Complex64)> = self
                    .offdiagonal_row(b)
                    .map(|(c, w)| (c as u32, Complex64::new(w, 0.0)))
                    .collect();
                row.push((b as u32, Complex64::new(self.diag[b], 0.0)));
                row.sort_by_key(|e| e.0);
                row
            })
            .collect();
        SparseOperator::from_rows(self.spec.dim(), rows, true)
    }
}

impl LinearOperator for QubitHamiltonian {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.par_iter_mut().enumerate().for_each(|(b, out)| {
            let mut acc = x[b] * self.diag[b];
            for t in &self.terms {
                let w = t.weight(b, FRAC_1_SQRT_2, FRAC_1_2SQRT2);
                if w != 0.0 {
                    acc += x[b ^ (1 << t.middle)] * w;
                }
            }
            *out = acc;
        });
    }
}

/// Sparse link Hamiltonian `H_kin + H_m + H_E`.
pub fn build_hamiltonian(spec: &LatticeSpec) -> Result<SparseOperator> {
    Ok(QubitHamiltonian::new(spec)?.to_sparse())
}
