//! Meson counting: moments of the wall-number operator, their inversion to
//! a distribution, and projective sampling.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BasisIndex, LatticeSpec, ObservableKind, StateVector};
use crate::vqe::{apply_ansatz, Direction, VqeParams};

/// Number of mesons in a basis state: half the count of domain walls.
pub fn meson_number(bits: usize, spec: &LatticeSpec) -> f64 {
    ObservableKind::TotalMesonPair.eigenvalue(bits, spec) / 2.0
}

/// `<O^k>` for `k = 1..=k_max`, with `O` the meson number.
pub fn moments(psi: &StateVector, spec: &LatticeSpec, k_max: usize) -> Result<Vec<f64>> {
    if psi.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            actual: psi.dim(),
        });
    }
    Ok(moments_from_probabilities(&psi.probabilities(), spec, k_max))
}

/// Moments from basis-state probabilities.
pub fn moments_from_probabilities(probs: &[f64], spec: &LatticeSpec, k_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; k_max];
    for (bits, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let n = meson_number(bits, spec);
        let mut pow = 1.0;
        for m in out.iter_mut() {
            pow *= n;
            *m += p * pow;
        }
    }
    out
}

/// Largest meson count energetically allowed: `floor(E_state / E_meson)`.
pub fn n_max_from_energy(e_state: f64, e_meson: f64) -> Result<usize> {
    if !(e_state > 0.0) || !(e_meson > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "energies must be positive, got state {e_state} and meson {e_meson}"
        )));
    }
    // tolerate rounding just below an integer ratio
    Ok((e_state / e_meson + 1e-12).floor() as usize)
}

/// Probabilities of `1..=n_max` mesons reproducing the given moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MesonDistribution {
    /// `probabilities[n - 1]` is `P(n)`.
    pub probabilities: Vec<f64>,
    pub n_max: usize,
    pub condition_number: f64,
}

impl MesonDistribution {
    pub fn p(&self, n: usize) -> f64 {
        if n == 0 || n > self.n_max {
            0.0
        } else {
            self.probabilities[n - 1]
        }
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// Solves `sum_n P(n) = 1`, `sum_n n^k P(n) = <O^k>` for `k < n_max`.
/// Small negative probabilities from conditioning are kept as they are.
pub fn meson_distribution(moments: &[f64], n_max: usize) -> Result<MesonDistribution> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if moments.len() + 1 < n_max {
        return Err(Error::InvalidArgument(format!(
            "{n_max} unknowns need {} moments, got {}",
            n_max - 1,
            moments.len()
        )));
    }
    let v = DMatrix::from_fn(n_max, n_max, |k, j| ((j + 1) as f64).powi(k as i32));
    let rhs = DVector::from_fn(n_max, |k, _| if k == 0 { 1.0 } else { moments[k - 1] });
    let sv = v.clone().singular_values();
    let condition_number = sv.max() / sv.min();
    let sol = v
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|x| x.is_finite()))
        .ok_or_else(|| Error::Degenerate(format!("moment system of size {n_max} is singular")))?;
    Ok(MesonDistribution {
        probabilities: sol.iter().copied().collect(),
        n_max,
        condition_number,
    })
}

/// Undoes the state preparation and samples link bitstrings (link 0
/// first) with a seeded generator.
pub fn sample_measurement(
    psi: &StateVector,
    params: &VqeParams,
    spec: &LatticeSpec,
    shots: usize,
    seed: u64,
) -> Result<BTreeMap<String, usize>> {
    let undone = apply_ansatz(params, psi, spec, Direction::Inverse)?;
    sample_basis(&undone, spec.n_links, shots, seed)
}

/// Samples computational-basis outcomes of `psi` directly.
pub fn sample_basis(
    psi: &StateVector,
    n_links: usize,
    shots: usize,
    seed: u64,
) -> Result<BTreeMap<String, usize>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    let dist = WeightedIndex::new(psi.probabilities())
        .map_err(|e| Error::InvalidArgument(format!("cannot sample this state: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(dist.sample(&mut rng)).or_default() += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(b, c)| (BasisIndex(b).to_links(n_links), c))
        .collect())
}
