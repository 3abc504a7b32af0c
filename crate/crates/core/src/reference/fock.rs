//! Second-quantized operators for two-color staggered fermions.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::SparseOperator;

/// Largest mode count the reference model will build.
pub const MODE_CAP: usize = 24;

/// Open chain of staggered sites with the gauge field integrated out.
///
/// Mode `2x + a` is color `a` (0 = up, 1 = down) on site `x`; Jordan-Wigner
/// strings run over lower mode indices. Even sites host quarks, odd sites
/// antiquarks (holes in a filled level).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FermionLattice {
    pub n_stag: usize,
    pub g: f64,
    pub m: f64,
}

impl FermionLattice {
    pub fn new(n_stag: usize, g: f64, m: f64) -> Result<Self> {
        if n_stag < 2 || !n_stag.is_multiple_of(2) {
            return Err(Error::InvalidLattice(format!(
                "need an even number (>= 2) of staggered sites, got {n_stag}"
            )));
        }
        if 2 * n_stag > MODE_CAP {
            return Err(Error::CapExceeded {
                n_links: 2 * n_stag,
                cap: MODE_CAP,
            });
        }
        Ok(FermionLattice { n_stag, g, m })
    }

    pub fn n_modes(&self) -> usize {
        2 * self.n_stag
    }

    pub fn dim(&self) -> usize {
        1 << self.n_modes()
    }

    /// Gauge links between neighboring sites.
    pub fn n_links(&self) -> usize {
        self.n_stag - 1
    }

    pub fn mode(x: usize, color: usize) -> usize {
        2 * x + color
    }

    pub fn site_occupation(&self, state: usize, x: usize) -> u32 {
        ((state >> (2 * x)) & 0b11).count_ones()
    }

    /// Even sites hold at most one quark and odd sites at most one antiquark.
    pub fn heavy_quark_allowed(&self, state: usize) -> bool {
        (0..self.n_stag).all(|x| {
            let occ = self.site_occupation(state, x);
            if x % 2 == 0 {
                occ <= 1
            } else {
                occ >= 1
            }
        })
    }

    /// Additive constant separating the fermion mass term from the
    /// link-qubit mass term: every filled odd site contributes `-2m`.
    pub fn mass_offset(&self) -> f64 {
        -2.0 * self.m * (self.n_stag / 2) as f64
    }
}

/// `sum_ij c_ij psi_i^dagger psi_j` over the full Fock space.
/// `hermitian` only tags the result; it is the caller's claim about `terms`.
pub fn one_body(
    n_modes: usize,
    terms: &[(usize, usize, Complex64)],
    hermitian: bool,
) -> SparseOperator {
    let dim = 1usize << n_modes;
    let rows: Vec<Vec<(usize, usize, Complex64)>> = (0..dim)
        .into_par_iter()
        .map(|s| {
            let mut out = Vec::new();
            for &(i, j, c) in terms {
                if let Some((t, sign)) = hop(s, i, j) {
                    out.push((t, s, c * sign));
                }
            }
            out
        })
        .collect();
    SparseOperator::from_triplets(dim, rows.into_iter().flatten().collect(), hermitian)
}

/// `psi_i^dagger psi_j` on basis state `s`, with its Jordan-Wigner sign.
pub fn hop(s: usize, i: usize, j: usize) -> Option<(usize, f64)> {
    if (s >> j) & 1 == 0 {
        return None;
    }
    let below = |state: usize, k: usize| (state & ((1usize << k) - 1)).count_ones();
    let s1 = s ^ (1 << j);
    if (s1 >> i) & 1 == 1 {
        return None;
    }
    let parity = below(s, j) + below(s1, i);
    let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
    Some((s1 | (1 << i), sign))
}

/// Color-diagonal nearest-neighbor hopping `(1/2) sum psi_x^dagger psi_{x+1} + h.c.`.
pub fn hopping(lat: &FermionLattice) -> SparseOperator {
    let half = Complex64::new(0.5, 0.0);
    let mut terms = Vec::new();
    for x in 0..lat.n_stag - 1 {
        for a in 0..2 {
            let (i, j) = (FermionLattice::mode(x, a), FermionLattice::mode(x + 1, a));
            terms.push((i, j, half));
            terms.push((j, i, half));
        }
    }
    one_body(lat.n_modes(), &terms, true)
}

/// Staggered mass term `m sum_x (-1)^x n_x`.
pub fn mass_term(lat: &FermionLattice) -> SparseOperator {
    let diag: Vec<f64> = (0..lat.dim())
        .map(|s| {
            (0..lat.n_stag)
                .map(|x| {
                    let sign = if x % 2 == 0 { 1.0 } else { -1.0 };
                    sign * lat.site_occupation(s, x) as f64
                })
                .sum::<f64>()
                * lat.m
        })
        .collect();
    SparseOperator::diagonal(&diag)
}
