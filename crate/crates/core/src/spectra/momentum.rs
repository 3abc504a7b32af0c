//! One-link translation sectors of periodic lattices.
//!
//! A sector state built on orbit representative `r` with period `R` is
//! `|r, p> = R^{-1/2} sum_j e^{i p j} T^j |r>`, where `T` moves link `l` to
//! `l + 1`. With this convention `T |r, p> = e^{-i p} |r, p>`, matching
//! the single-meson plane waves `sum_x e^{i p x} |x>`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{rotate_bits, Boundary, LatticeSpec, QubitHamiltonian, SparseOperator, StateVector};

/// Orbit bookkeeping shared by all sectors of one lattice.
#[derive(Debug, Clone)]
pub struct OrbitTable {
    n_links: usize,
    rep_of: Vec<u32>,
    shift_of: Vec<u8>,
    /// Representatives in ascending order with their periods.
    reps: Vec<(usize, usize)>,
}

impl OrbitTable {
    pub fn new(spec: &LatticeSpec) -> Result<Self> {
        spec.check_statevector()?;
        if spec.boundary != Boundary::Periodic {
            return Err(Error::InvalidLattice(
                "momentum sectors need a periodic lattice".into(),
            ));
        }
        let n = spec.n_links;
        let pairs: Vec<(u32, u8)> = (0..spec.dim())
            .into_par_iter()
            .map(|s| {
                let mut best = (s, 0usize);
                for j in 1..n {
                    let c = rotate_bits(s, -(j as isize), n);
                    if c < best.0 {
                        best = (c, j);
                    }
                }
                (best.0 as u32, best.1 as u8)
            })
            .collect();
        let mut reps = Vec::new();
        for (s, &(r, _)) in pairs.iter().enumerate() {
            if r as usize == s {
                let period = (1..=n)
                    .find(|&j| rotate_bits(s, j as isize, n) == s)
                    .expect("rotation by n is the identity");
                reps.push((s, period));
            }
        }
        let (rep_of, shift_of) = pairs.into_iter().unzip();
        Ok(OrbitTable {
            n_links: n,
            rep_of,
            shift_of,
            reps,
        })
    }

    pub fn n_links(&self) -> usize {
        self.n_links
    }

    /// `(representative, l)` with `s = T^l representative`.
    pub fn locate(&self, s: usize) -> (usize, usize) {
        (self.rep_of[s] as usize, self.shift_of[s] as usize)
    }

    pub fn sector(&self, k: usize) -> MomentumSector {
        let n = self.n_links;
        let k = k % n;
        let reps: Vec<(usize, usize)> = self
            .reps
            .iter()
            .copied()
            .filter(|&(_, period)| (k * period).is_multiple_of(n))
            .collect();
        MomentumSector {
            k,
            n_links: n,
            reps,
        }
    }

    pub fn sectors(&self) -> Vec<MomentumSector> {
        (0..self.n_links).map(|k| self.sector(k)).collect()
    }
}

/// Momentum `2 pi k / n` folded into `(-pi, pi]`.
pub fn momentum(k: usize, n_links: usize) -> f64 {
    let k = k % n_links;
    let signed = if 2 * k > n_links {
        k as isize - n_links as isize
    } else {
        k as isize
    };
    2.0 * PI * signed as f64 / n_links as f64
}

/// Grid index of a momentum, if it lies on the grid.
pub fn grid_index(p: f64, n_links: usize) -> Result<usize> {
    let x = p * n_links as f64 / (2.0 * PI);
    let k = x.round();
    if (x - k).abs() > 1e-9 {
        return Err(Error::OffGrid(p));
    }
    Ok((k as i64).rem_euclid(n_links as i64) as usize)
}

#[derive(Debug, Clone)]
pub struct MomentumSector {
    pub k: usize,
    pub n_links: usize,
    /// `(representative, period)` pairs spanning the sector.
    pub reps: Vec<(usize, usize)>,
}

impl MomentumSector {
    pub fn p(&self) -> f64 {
        momentum(self.k, self.n_links)
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    fn phase(&self, j: usize) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * (self.k * j) as f64 / self.n_links as f64)
    }

    /// Sector block of the Hamiltonian in the `|r, p>` basis.
    pub fn hamiltonian(&self, h: &QubitHamiltonian, orbits: &OrbitTable) -> SparseOperator {
        let index: std::collections::HashMap<usize, usize> = self
            .reps
            .iter()
            .enumerate()
            .map(|(i, &(r, _))| (r, i))
            .collect();
        let columns: Vec<Vec<(usize, usize, Complex64)>> = self
            .reps
            .par_iter()
            .enumerate()
            .map(|(b, &(rb, period_b))| {
                let mut out = vec![(b, b, Complex64::new(h.diagonal()[rb], 0.0))];
                for (s, w) in h.offdiagonal_row(rb) {
                    let (ra, l) = orbits.locate(s);
                    // orbits outside this sector carry no weight here
                    if let Some(&a) = index.get(&ra) {
                        let period_a = self.reps[a].1;
                        let v = self.phase(l).conj() * (w * (period_b as f64 / period_a as f64).sqrt());
                        out.push((a, b, v));
                    }
                }
                out
            })
            .collect();
        SparseOperator::from_triplets(self.dim(), columns.into_iter().flatten().collect(), true)
    }

    /// Embeds sector coefficients into the full link basis.
    pub fn expand(&self, coeffs: &[Complex64]) -> StateVector {
        let n = self.n_links;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (&(r, period), &c) in self.reps.iter().zip(coeffs) {
            let norm = 1.0 / (period as f64).sqrt();
            for j in 0..period {
                amps[rotate_bits(r, j as isize, n)] += c * self.phase(j) * norm;
            }
        }
        StateVector::from_amplitudes(amps)
    }
}

/// `T_shift` on a statevector: amplitude of link configuration `b` moves to
/// `b` rotated by `shift`.
pub fn translate(psi: &StateVector, shift: isize, n_links: usize) -> StateVector {
    let mut out = vec![Complex64::new(0.0, 0.0); psi.dim()];
    for (b, &a) in psi.amplitudes().iter().enumerate() {
        out[rotate_bits(b, shift, n_links)] = a;
    }
    StateVector::from_amplitudes(out)
}

/// `<T_shift psi | psi>`, which equals `e^{i p shift}` for a momentum
/// eigenstate of momentum `p`.
pub fn translation_phase(psi: &StateVector, shift: isize, spec: &LatticeSpec) -> Result<Complex64> {
    if psi.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            actual: psi.dim(),
        });
    }
    let shifted = translate(psi, shift, spec.n_links);
    let phase = shifted.inner(psi);
    if phase.norm() < 1.0 - 1e-4 {
        return Err(Error::NotMomentumEigenstate(phase.norm()));
    }
    Ok(phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::eigen::spectrum;

    #[test]
    fn sector_dimensions_cover_the_space() {
        for n in [4, 6, 8, 10] {
            let spec = LatticeSpec::periodic(n, 2.0, 1.0).unwrap();
            let orbits = OrbitTable::new(&spec).unwrap();
            let total: usize = orbits.sectors().iter().map(|s| s.dim()).sum();
            assert_eq!(total, 1 << n);
        }
    }

    #[test]
    fn momentum_grid() {
        assert_eq!(momentum(0, 8), 0.0);
        assert!((momentum(4, 8) - PI).abs() < 1e-15);
        assert!((momentum(7, 8) + PI / 4.0).abs() < 1e-15);
        assert_eq!(grid_index(-PI / 4.0, 8).unwrap(), 7);
        assert!(grid_index(0.3, 8).is_err());
    }

    #[test]
    fn sector_spectra_reassemble_full_spectrum() {
        let spec = LatticeSpec::periodic(8, 2.0, 1.0).unwrap();
        let h = QubitHamiltonian::new(&spec).unwrap();
        let orbits = OrbitTable::new(&spec).unwrap();
        let mut merged: Vec<f64> = orbits
            .sectors()
            .iter()
            .flat_map(|s| spectrum(&s.hamiltonian(&h, &orbits)))
            .collect();
        merged.sort_by(f64::total_cmp);
        let full = spectrum(&h);
        for (a, b) in merged.iter().zip(&full) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn expanded_sector_states_carry_their_momentum() {
        let spec = LatticeSpec::periodic(6, 2.0, 1.0).unwrap();
        let orbits = OrbitTable::new(&spec).unwrap();
        for sector in orbits.sectors() {
            let coeffs: Vec<Complex64> = (0..sector.dim())
                .map(|i| Complex64::new(1.0 + i as f64, 0.5))
                .collect();
            let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let coeffs: Vec<Complex64> = coeffs.iter().map(|c| c / norm).collect();
            let psi = sector.expand(&coeffs);
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            let phase = translation_phase(&psi, 1, &spec).unwrap();
            assert!((phase - Complex64::from_polar(1.0, sector.p())).norm() < 1e-12);
        }
    }
}
