//! Ground states, single-meson bands and the lattice speed of light.

pub mod dispersion;
pub mod eigen;
pub mod momentum;

pub use dispersion::{fit_dispersion, DispersionFit, DEFAULT_WINDOW};
pub use eigen::{ground_state, lowest_eigenpairs, spectrum, Eigenpair, SolverOptions};
pub use momentum::{momentum, translate, translation_phase, MomentumSector, OrbitTable};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{LatticeSpec, QubitHamiltonian, StateVector};

/// One point of the single-meson band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPoint {
    /// Grid index, `p = 2 pi k / n_links`.
    pub k: usize,
    /// One-link momentum in `(-pi, pi]`.
    pub p: f64,
    /// Momentum read off a two-link (one physical site) translation, folded
    /// into `(-pi, pi]`.
    pub p_physical: f64,
    /// Excitation energy above the vacuum.
    pub energy: f64,
    pub sector_dim: usize,
}

/// Exact vacuum and lowest meson state of every momentum sector.
#[derive(Debug, Clone)]
pub struct MesonSpectrum {
    pub vacuum_energy: f64,
    pub vacuum: StateVector,
    pub band: Vec<BandPoint>,
    /// Full-space meson eigenstates, index-aligned with `band`.
    pub mesons: Vec<StateVector>,
}

impl MesonSpectrum {
    pub fn band_pairs(&self) -> Vec<(f64, f64)> {
        self.band.iter().map(|b| (b.p, b.energy)).collect()
    }

    pub fn band_pairs_physical(&self) -> Vec<(f64, f64)> {
        self.band.iter().map(|b| (b.p_physical, b.energy)).collect()
    }

    /// Lowest band energy at each physical momentum, sorted by momentum.
    ///
    /// A one-link momentum `p` and `p + pi` fold onto the same physical
    /// momentum; the lower of the two is the physical meson.
    pub fn physical_band(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for b in &self.band {
            match out.iter_mut().find(|(p, _)| (p - b.p_physical).abs() < 1e-9) {
                Some(slot) => slot.1 = slot.1.min(b.energy),
                None => out.push((b.p_physical, b.energy)),
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    /// Band energy at zero momentum.
    pub fn rest_energy(&self) -> f64 {
        self.band
            .iter()
            .find(|b| b.k == 0)
            .expect("zero momentum is always on the grid")
            .energy
    }
}

/// Solves every momentum sector of a periodic lattice.
///
/// In the zero-momentum sector the lowest state is the vacuum and the next
/// one the meson; in all others the lowest state is the meson.
pub fn meson_spectrum(spec: &LatticeSpec) -> Result<MesonSpectrum> {
    let h = QubitHamiltonian::new(spec)?;
    let orbits = OrbitTable::new(spec)?;
    let opts = SolverOptions::default();
    let n = spec.n_links;
    // H is real, so sector n - k is the complex conjugate of sector k
    let solved: Vec<Result<(MomentumSector, Vec<Eigenpair>)>> = (0..=n / 2)
        .into_par_iter()
        .map(|k| {
            let sector = orbits.sector(k);
            let hk = sector.hamiltonian(&h, &orbits);
            let count = if k == 0 { 2 } else { 1 };
            let pairs = lowest_eigenpairs(&hk, count, &opts)?;
            Ok((sector, pairs))
        })
        .collect();
    let mut vacuum = None;
    let mut half = Vec::with_capacity(n / 2 + 1);
    for item in solved {
        let (sector, pairs) = item?;
        if sector.k == 0 {
            vacuum = Some((pairs[0].value, sector.expand(&pairs[0].vector)));
        }
        let meson = pairs.last().expect("at least one eigenpair");
        half.push((sector.dim(), meson.value, sector.expand(&meson.vector)));
    }
    let (vacuum_energy, vacuum) = vacuum.expect("zero momentum sector solved");
    let mut band = Vec::with_capacity(n);
    let mut mesons = Vec::with_capacity(n);
    for k in 0..n {
        let (dim, e, state) = if k <= n / 2 {
            let (dim, e, state) = &half[k];
            (*dim, *e, state.clone())
        } else {
            let (dim, e, state) = &half[n - k];
            let conj = state.amplitudes().iter().map(|a| a.conj()).collect();
            (*dim, *e, StateVector::from_amplitudes(conj))
        };
        let p = momentum(k, n);
        band.push(BandPoint {
            k,
            p,
            p_physical: fold(2.0 * p),
            energy: e - vacuum_energy,
            sector_dim: dim,
        });
        mesons.push(state);
    }
    Ok(MesonSpectrum {
        vacuum_energy,
        vacuum,
        band,
        mesons,
    })
}

/// Single-meson band `(p, E(p))` for every one-link momentum.
pub fn meson_band(spec: &LatticeSpec) -> Result<Vec<BandPoint>> {
    Ok(meson_spectrum(spec)?.band)
}

fn fold(p: f64) -> f64 {
    use std::f64::consts::PI;
    let mut q = p.rem_euclid(2.0 * PI);
    if q > PI + 1e-12 {
        q -= 2.0 * PI;
    }
    q
}

/// `<a|b>` for two statevectors.
pub fn overlap(a: &StateVector, b: &StateVector) -> Complex64 {
    a.inner(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_is_symmetric_and_vacuum_matches_unrestricted_solve() {
        let spec = LatticeSpec::periodic(10, 2.0, 1.0).unwrap();
        let ms = meson_spectrum(&spec).unwrap();
        assert_eq!(ms.band.len(), 10);
        for b in &ms.band {
            let mirror = ms.band.iter().find(|o| o.k == (10 - b.k) % 10).unwrap();
            assert!((b.energy - mirror.energy).abs() < 1e-9);
        }
        let distinct: std::collections::BTreeSet<i64> =
            ms.band.iter().map(|b| (b.p.abs() * 1e6).round() as i64).collect();
        assert_eq!(distinct.len(), 6);

        let h = QubitHamiltonian::new(&spec).unwrap();
        let g = ground_state(&h).unwrap();
        assert!((g.value - ms.vacuum_energy).abs() < 1e-9);
        let phase = translation_phase(&ms.vacuum, 1, &spec).unwrap();
        assert!((phase - Complex64::new(1.0, 0.0)).norm() < 1e-6);

        let phys = ms.physical_band();
        assert_eq!(phys.len(), 5);
        for (p, e) in &phys {
            let lower = ms
                .band
                .iter()
                .filter(|b| (b.p_physical - p).abs() < 1e-9)
                .map(|b| b.energy)
                .fold(f64::INFINITY, f64::min);
            assert_eq!(*e, lower);
        }
    }
}
