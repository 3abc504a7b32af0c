//! Orthonormal bases for constrained sectors of the fermion Fock space.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::charges::ChargeOperators;
use super::fock::FermionLattice;
use crate::error::{Error, Result};
use crate::lattice::{SparseOperator, StateVector};

const CLUSTER_TOL: f64 = 1e-8;

/// Which restrictions define a sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    /// Even sites hold at most one quark, odd sites at most one antiquark.
    pub heavy_quark: bool,
    /// Every link Casimir at most `j_max (j_max + 1)`.
    pub j_max: Option<f64>,
    /// Total color charge vanishes.
    pub singlet: bool,
}

impl Constraints {
    pub const NONE: Constraints = Constraints {
        heavy_quark: false,
        j_max: None,
        singlet: false,
    };

    fn admits_occupation(&self, lat: &FermionLattice, state: usize) -> bool {
        !self.heavy_quark || lat.heavy_quark_allowed(state)
    }
}

/// Real orthonormal vectors spanning a sector, stored sparsely.
#[derive(Debug, Clone)]
pub struct Subspace {
    full_dim: usize,
    vectors: Vec<Vec<(usize, f64)>>,
}

impl Subspace {
    /// Builds the sector by splitting every occupation block into joint
    /// eigenspaces of the constrained Casimirs.
    pub fn build(
        lat: &FermionLattice,
        charges: &ChargeOperators,
        constraints: Constraints,
    ) -> Result<Self> {
        let mut tests: Vec<(&SparseOperator, f64)> = Vec::new();
        if let Some(j) = constraints.j_max {
            if j < 0.0 || (2.0 * j).fract() != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "j_max must be a non-negative half-integer, got {j}"
                )));
            }
            for n in 0..charges.n_links() {
                tests.push((charges.link(n), j * (j + 1.0)));
            }
        }
        if constraints.singlet {
            tests.push((charges.total(), 0.0));
        }

        let mut blocks: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for s in 0..lat.dim() {
            if constraints.admits_occupation(lat, s) {
                let key = (0..lat.n_stag).fold(0u64, |k, x| 3 * k + lat.site_occupation(s, x) as u64);
                blocks.entry(key).or_default().push(s);
            }
        }

        let per_block: Vec<Result<Vec<Vec<(usize, f64)>>>> = blocks
            .into_par_iter()
            .map(|(_, states)| split_block(&states, &tests))
            .collect();
        let mut vectors = Vec::new();
        for b in per_block {
            vectors.extend(b?);
        }
        if vectors.is_empty() {
            return Err(Error::Degenerate("constrained sector has rank zero".into()));
        }
        Ok(Subspace {
            full_dim: lat.dim(),
            vectors,
        })
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    pub fn vectors(&self) -> &[Vec<(usize, f64)>] {
        &self.vectors
    }

    /// `sum_i |v_i><v_i|` on the full space.
    pub fn projector(&self) -> SparseOperator {
        let triplets = self
            .vectors
            .iter()
            .flat_map(|v| {
                v.iter().flat_map(move |&(r, a)| {
                    v.iter().map(move |&(c, b)| (r, c, Complex64::new(a * b, 0.0)))
                })
            })
            .collect();
        SparseOperator::from_triplets(self.full_dim, triplets, true)
    }

    /// `V^T A V` for a full-space operator `A`.
    pub fn restrict(&self, op: &SparseOperator) -> Result<SparseOperator> {
        use crate::lattice::LinearOperator;
        if op.dim() != self.full_dim {
            return Err(Error::DimensionMismatch {
                expected: self.full_dim,
                actual: op.dim(),
            });
        }
        let mut membership: HashMap<usize, Vec<(u32, f64)>> = HashMap::new();
        for (i, v) in self.vectors.iter().enumerate() {
            for &(s, a) in v {
                membership.entry(s).or_default().push((i as u32, a));
            }
        }
        let adj = op.adjoint();
        let columns: Vec<Vec<(usize, usize, Complex64)>> = self
            .vectors
            .par_iter()
            .enumerate()
            .map(|(j, v)| {
                // (A v)_t = sum_s A_ts v_s, read off rows of A^dagger
                let mut image: HashMap<usize, Complex64> = HashMap::new();
                for &(s, a) in v {
                    for (t, x) in adj.row(s) {
                        *image.entry(t).or_default() += x.conj() * a;
                    }
                }
                let mut col: HashMap<usize, Complex64> = HashMap::new();
                for (t, val) in image {
                    if let Some(mem) = membership.get(&t) {
                        for &(i, b) in mem {
                            *col.entry(i as usize).or_default() += val * b;
                        }
                    }
                }
                col.into_iter().map(|(i, x)| (i, j, x)).collect()
            })
            .collect();
        Ok(SparseOperator::from_triplets(
            self.rank(),
            columns.into_iter().flatten().collect(),
            op.is_hermitian(),
        ))
    }

    /// Embeds subspace coordinates in the full Fock space.
    pub fn lift(&self, coeffs: &[Complex64]) -> Result<StateVector> {
        if coeffs.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                actual: coeffs.len(),
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); self.full_dim];
        for (v, &c) in self.vectors.iter().zip(coeffs) {
            for &(s, a) in v {
                amps[s] += c * a;
            }
        }
        Ok(StateVector::from_amplitudes(amps))
    }
}

/// Splits one occupation block by successive Casimir eigenspaces, keeping
/// those whose eigenvalue does not exceed the bound.
fn split_block(
    states: &[usize],
    tests: &[(&SparseOperator, f64)],
) -> Result<Vec<Vec<(usize, f64)>>> {
    let d = states.len();
    let local: HashMap<usize, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut spaces = vec![DMatrix::<f64>::identity(d, d)];
    for &(op, bound) in tests {
        let block = block_matrix(op, states, &local)?;
        let mut next = Vec::new();
        for q in spaces {
            let reduced = q.transpose() * &block * &q;
            let eig = SymmetricEigen::new(reduced);
            let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let kept: Vec<usize> = order
                .into_iter()
                .filter(|&k| eig.eigenvalues[k] <= bound + CLUSTER_TOL)
                .collect();
            for cluster in clusters(&kept, |k| eig.eigenvalues[k]) {
                let cols: Vec<_> = cluster.iter().map(|&k| eig.eigenvectors.column(k)).collect();
                next.push(&q * DMatrix::from_columns(&cols));
            }
        }
        spaces = next;
        if spaces.is_empty() {
            break;
        }
    }
    let mut out = Vec::new();
    for q in spaces {
        for col in q.column_iter() {
            out.push(
                col.iter()
                    .enumerate()
                    .filter(|(_, a)| a.abs() > 1e-14)
                    .map(|(i, &a)| (states[i], a))
                    .collect(),
            );
        }
    }
    Ok(out)
}

fn clusters(sorted: &[usize], value: impl Fn(usize) -> f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for &k in sorted {
        match out.last_mut() {
            Some(c) if (value(k) - value(*c.last().unwrap())).abs() < CLUSTER_TOL => c.push(k),
            _ => out.push(vec![k]),
        }
    }
    out
}

fn block_matrix(
    op: &SparseOperator,
    states: &[usize],
    local: &HashMap<usize, usize>,
) -> Result<DMatrix<f64>> {
    let d = states.len();
    let mut m = DMatrix::zeros(d, d);
    for (i, &s) in states.iter().enumerate() {
        for (t, x) in op.row(s) {
            let j = *local.get(&t).ok_or_else(|| {
                Error::InvalidArgument("operator does not preserve site occupations".into())
            })?;
            if x.im.abs() > 1e-12 {
                return Err(Error::InvalidArgument("Casimir block is not real".into()));
            }
            m[(i, j)] = x.re;
        }
    }
    Ok(m)
}
