//! The two-layer conditioned-rotation circuit and its initial states.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::VqeParams;
use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeSpec, StateVector, Sublattice};
use crate::spectra::momentum::grid_index;

/// Whether to apply `U(theta)` or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Inverse,
}

pub(crate) fn check_ansatz_spec(spec: &LatticeSpec) -> Result<()> {
    spec.check_statevector()?;
    if spec.boundary != Boundary::Periodic || !spec.n_links.is_multiple_of(2) {
        return Err(Error::InvalidLattice(format!(
            "the ansatz needs a periodic lattice with an even number of links, got {} {:?}",
            spec.n_links, spec.boundary
        )));
    }
    Ok(())
}

/// `exp(i sum_{x in layer} [t0 P0 Y_x P0 + t1 P1 Y_x P1])` on amplitudes of a
/// periodic chain.
///
/// Terms with different middles commute, so the order within a layer is
/// irrelevant. On a middle link whose neighbors agree the rotation is
/// `[[c, s], [-s, c]]` in the `{0, 1}` basis.
pub fn apply_layer(amps: &mut [Complex64], n_links: usize, layer: Sublattice, t0: f64, t1: f64) {
    let (s0, c0) = t0.sin_cos();
    let (s1, c1) = t1.sin_cos();
    for x in (0..n_links).filter(|&x| layer.contains(x)) {
        let bit = 1usize << x;
        let left = (x + n_links - 1) % n_links;
        let right = (x + 1) % n_links;
        for i in 0..amps.len() {
            if i & bit != 0 {
                continue;
            }
            let nl = (i >> left) & 1;
            if nl != (i >> right) & 1 {
                continue;
            }
            let (s, c) = if nl == 0 { (s0, c0) } else { (s1, c1) };
            let (a, b) = (amps[i], amps[i | bit]);
            amps[i] = a * c + b * s;
            amps[i | bit] = b * c - a * s;
        }
    }
}

/// Applies the ansatz to raw amplitudes: the even-middle layer first, then
/// the odd-middle layer. The inverse undoes them in reverse order.
pub fn apply_ansatz_in_place(
    amps: &mut [Complex64],
    n_links: usize,
    params: &VqeParams,
    direction: Direction,
) {
    let (t0, t1) = (params.theta0, params.theta1);
    match direction {
        Direction::Forward => {
            apply_layer(amps, n_links, Sublattice::Even, t0, t1);
            apply_layer(amps, n_links, Sublattice::Odd, t0, t1);
        }
        Direction::Inverse => {
            apply_layer(amps, n_links, Sublattice::Odd, -t0, -t1);
            apply_layer(amps, n_links, Sublattice::Even, -t0, -t1);
        }
    }
}

pub fn apply_ansatz(
    params: &VqeParams,
    psi: &StateVector,
    spec: &LatticeSpec,
    direction: Direction,
) -> Result<StateVector> {
    check_ansatz_spec(spec)?;
    if psi.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            actual: psi.dim(),
        });
    }
    let mut out = psi.clone();
    apply_ansatz_in_place(out.amplitudes_mut(), spec.n_links, params, direction);
    Ok(out)
}

/// `n^{-1/2} sum_x e^{ipx} |x>` where `|x>` has only link `x` excited.
pub fn plane_wave_state(p: f64, spec: &LatticeSpec) -> Result<StateVector> {
    let k = grid_index(p, spec.n_links)?;
    plane_wave_k(k, spec)
}

/// Plane wave on grid index `k`, momentum `2 pi k / n`.
pub fn plane_wave_k(k: usize, spec: &LatticeSpec) -> Result<StateVector> {
    spec.check_statevector()?;
    let n = spec.n_links;
    let norm = 1.0 / (n as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); spec.dim()];
    for x in 0..n {
        let phase = 2.0 * std::f64::consts::PI * ((k * x) % n) as f64 / n as f64;
        amps[1 << x] = Complex64::from_polar(norm, phase);
    }
    Ok(StateVector::from_amplitudes(amps))
}
