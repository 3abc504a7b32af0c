use num_complex::Complex64;
use rayon::prelude::*;

use super::{Boundary, LatticeSpec};
use crate::error::{Error, Result};

/// Complex amplitudes over the link-configuration basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(dim: usize) -> Self {
        StateVector {
            amps: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, limit: dim });
        }
        let mut psi = Self::zero(dim);
        psi.amps[index] = Complex64::new(1.0, 0.0);
        Ok(psi)
    }

    /// Wraps raw amplitudes without normalizing.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        StateVector { amps }
    }

    /// Wraps amplitudes and rescales to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let mut psi = StateVector { amps };
        let n = psi.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Degenerate("cannot normalize a zero vector".into()));
        }
        psi.scale(Complex64::new(1.0 / n, 0.0));
        Ok(psi)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.par_iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&mut self, c: Complex64) {
        self.amps.par_iter_mut().for_each(|a| *a *= c);
    }

    /// `<self|other>`, conjugating `self`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        dot(&self.amps, &other.amps)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Expectation of a diagonal operator given by its eigenvalues.
    pub fn expect_diagonal(&self, diag: &[f64]) -> f64 {
        self.amps
            .iter()
            .zip(diag)
            .map(|(a, d)| a.norm_sqr() * d)
            .sum()
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Conjugate-linear in the first argument.
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Basis state with every link in `links` excited.
///
/// The set must be a contiguous run; on periodic lattices the run may wrap
/// around the boundary.
pub fn string_basis_state(links: &[usize], spec: &LatticeSpec) -> Result<StateVector> {
    spec.check_statevector()?;
    let bits = string_bits(links, spec)?;
    StateVector::basis(spec.dim(), bits)
}

pub(crate) fn string_bits(links: &[usize], spec: &LatticeSpec) -> Result<usize> {
    let sorted = validate_string(links, spec)?;
    if spec.n_links >= usize::BITS as usize {
        return Err(Error::CapExceeded {
            n_links: spec.n_links,
            cap: usize::BITS as usize - 1,
        });
    }
    Ok(sorted.iter().fold(0usize, |acc, &l| acc | (1 << l)))
}

/// Sorted, deduplicated copy of a string's links after checking contiguity.
pub fn validate_string(links: &[usize], spec: &LatticeSpec) -> Result<Vec<usize>> {
    let n = spec.n_links;
    let mut sorted = links.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&bad) = sorted.iter().find(|&&l| l >= n) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            limit: n,
        });
    }
    if !is_contiguous(&sorted, n, spec.boundary) {
        return Err(Error::NonContiguous(links.to_vec()));
    }
    Ok(sorted)
}

fn is_contiguous(sorted: &[usize], n: usize, boundary: Boundary) -> bool {
    if sorted.len() <= 1 || sorted.len() == n {
        return true;
    }
    let gaps = sorted.windows(2).filter(|w| w[1] != w[0] + 1).count();
    match boundary {
        Boundary::Open => gaps == 0,
        Boundary::Periodic => {
            gaps == 0 || (gaps == 1 && sorted[0] == 0 && sorted[sorted.len() - 1] == n - 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_states() {
        let spec = LatticeSpec::periodic(20, 2.0, 1.0).unwrap();
        let vac = string_basis_state(&[], &spec).unwrap();
        assert_eq!(vac.amplitudes()[0], Complex64::new(1.0, 0.0));

        let single = string_basis_state(&[5], &spec).unwrap();
        assert_eq!(single.amplitudes()[1 << 5].re, 1.0);

        let wrapped = string_basis_state(&[19, 0, 1], &spec).unwrap();
        assert_eq!(wrapped.amplitudes()[(1 << 19) | 0b11].re, 1.0);

        assert!(matches!(
            string_basis_state(&[2, 4], &spec),
            Err(Error::NonContiguous(_))
        ));
        let open = LatticeSpec::open(6, 2.0, 1.0).unwrap();
        assert!(string_basis_state(&[5, 0], &open).is_err());
    }

    #[test]
    fn long_string_on_large_ring_is_accepted() {
        let spec = LatticeSpec::periodic(104, 2.0, 1.0).unwrap();
        let links: Vec<usize> = (29..=69).collect();
        assert_eq!(validate_string(&links, &spec).unwrap().len(), 41);
        assert!(string_bits(&links, &spec).is_err());
    }
}
