//! Color charges and the cumulative electric Casimirs they induce.

use num_complex::Complex64;
use rayon::prelude::*;

use super::fock::{one_body, FermionLattice};
use crate::lattice::SparseOperator;

/// Fundamental SU(2) generators `T^c = sigma^c / 2` as `(a, b, T^c_ab)`.
fn generator(c: usize) -> Vec<(usize, usize, Complex64)> {
    let h = 0.5;
    match c {
        0 => vec![(0, 1, Complex64::new(h, 0.0)), (1, 0, Complex64::new(h, 0.0))],
        1 => vec![(0, 1, Complex64::new(0.0, -h)), (1, 0, Complex64::new(0.0, h))],
        2 => vec![(0, 0, Complex64::new(h, 0.0)), (1, 1, Complex64::new(-h, 0.0))],
        _ => unreachable!("SU(2) has three generators"),
    }
}

/// Per-site charges and per-link cumulative Casimirs.
#[derive(Debug, Clone)]
pub struct ChargeOperators {
    /// `casimirs[n]` is `L_n^2` with `L_n = sum_{x <= n} Q_x`. The last
    /// entry is the Casimir of the total charge.
    pub casimirs: Vec<SparseOperator>,
}

impl ChargeOperators {
    pub fn build(lat: &FermionLattice) -> Self {
        let casimirs = (0..lat.n_stag)
            .into_par_iter()
            .map(|n| {
                let comps = cumulative_charge(lat, n);
                let mut sum = comps[0].matmul(&comps[0]);
                for l in &comps[1..] {
                    sum = sum.add(&l.matmul(l));
                }
                sum
            })
            .collect();
        ChargeOperators { casimirs }
    }

    /// Casimir on the gauge link between sites `n` and `n + 1`.
    pub fn link(&self, n: usize) -> &SparseOperator {
        &self.casimirs[n]
    }

    pub fn total(&self) -> &SparseOperator {
        self.casimirs.last().expect("at least two sites")
    }

    pub fn n_links(&self) -> usize {
        self.casimirs.len() - 1
    }
}

/// `Q^c_x` for one site.
pub fn site_charge(lat: &FermionLattice, x: usize) -> [SparseOperator; 3] {
    charge_over(lat, x..x + 1)
}

/// `L^c_n = sum_{x <= n} Q^c_x`.
pub fn cumulative_charge(lat: &FermionLattice, n: usize) -> [SparseOperator; 3] {
    charge_over(lat, 0..n + 1)
}

fn charge_over(lat: &FermionLattice, sites: std::ops::Range<usize>) -> [SparseOperator; 3] {
    [0, 1, 2].map(|c| {
        let gen = generator(c);
        let terms: Vec<_> = sites
            .clone()
            .flat_map(|x| {
                gen.iter().map(move |&(a, b, t)| {
                    (FermionLattice::mode(x, a), FermionLattice::mode(x, b), t)
                })
            })
            .collect();
        one_body(lat.n_modes(), &terms, true)
    })
}
