//! Meson wavepackets and position readout through the inverse circuit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ansatz::{apply_ansatz, check_ansatz_spec, plane_wave_k, Direction};
use super::VqeParams;
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, StateVector};
use crate::spectra::momentum;

/// Momentum-space amplitudes `phi(p)` indexed by grid index `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavepacketSpec {
    pub phi: Vec<Complex64>,
}

impl WavepacketSpec {
    pub fn new(phi: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = phi.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "wavepacket weights sum to {norm}, not 1"
            )));
        }
        Ok(WavepacketSpec { phi })
    }

    /// All weight on grid index `k`.
    pub fn delta(k: usize, n_links: usize) -> Result<Self> {
        if k >= n_links {
            return Err(Error::IndexOutOfRange {
                index: k,
                limit: n_links,
            });
        }
        let mut phi = vec![Complex64::new(0.0, 0.0); n_links];
        phi[k] = Complex64::new(1.0, 0.0);
        Ok(WavepacketSpec { phi })
    }

    /// Gaussian of width `sigma` around `p0`, centered on link `x0`. The
    /// phase is chosen so the packet is real and positive at `x0`.
    pub fn gaussian(p0: f64, sigma: f64, x0: usize, n_links: usize) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidArgument(format!("width must be positive, got {sigma}")));
        }
        let phi: Vec<Complex64> = (0..n_links)
            .map(|k| {
                let p = momentum(k, n_links);
                let mut dp = (p - p0).rem_euclid(2.0 * std::f64::consts::PI);
                if dp > std::f64::consts::PI {
                    dp -= 2.0 * std::f64::consts::PI;
                }
                Complex64::from_polar((-dp * dp / (4.0 * sigma * sigma)).exp(), -p * x0 as f64)
            })
            .collect();
        let norm = phi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        Self::new(phi.into_iter().map(|a| a / norm).collect())
    }
}

/// `U(theta) sum_p phi(p) |p>`.
pub fn wavepacket_state(wp: &WavepacketSpec, params: &VqeParams, spec: &LatticeSpec) -> Result<StateVector> {
    check_ansatz_spec(spec)?;
    if wp.phi.len() != spec.n_links {
        return Err(Error::DimensionMismatch {
            expected: spec.n_links,
            actual: wp.phi.len(),
        });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); spec.dim()];
    for (k, &c) in wp.phi.iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        let pw = plane_wave_k(k, spec)?;
        for x in 0..spec.n_links {
            amps[1 << x] += c * pw.amplitudes()[1 << x];
        }
    }
    apply_ansatz(params, &StateVector::from_amplitudes(amps), spec, Direction::Forward)
}

/// `<x| U(theta)^dagger |psi>` for every link `x`.
pub fn meson_position_amplitudes(
    psi: &StateVector,
    params: &VqeParams,
    spec: &LatticeSpec,
) -> Result<Vec<Complex64>> {
    let undone = apply_ansatz(params, psi, spec, Direction::Inverse)?;
    Ok((0..spec.n_links).map(|x| undone.amplitudes()[1 << x]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> LatticeSpec {
        LatticeSpec::periodic(8, 2.0, 1.0).unwrap()
    }

    #[test]
    fn delta_packet_is_a_prepared_plane_wave() {
        let s = spec();
        let p = VqeParams::manual(0.2, -0.7);
        let wp = WavepacketSpec::delta(3, 8).unwrap();
        let a = wavepacket_state(&wp, &p, &s).unwrap();
        let b = apply_ansatz(&p, &plane_wave_k(3, &s).unwrap(), &s, Direction::Forward).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn uniform_weights_localize_at_the_origin() {
        let s = spec();
        let w = Complex64::new(1.0 / (8f64).sqrt(), 0.0);
        let wp = WavepacketSpec::new(vec![w; 8]).unwrap();
        let p = VqeParams::manual(0.2, -0.7);
        let psi = wavepacket_state(&wp, &p, &s).unwrap();
        let amps = meson_position_amplitudes(&psi, &p, &s).unwrap();
        assert!((amps[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(amps[1..].iter().all(|a| a.norm() < 1e-12));
    }

    #[test]
    fn readout_of_prepared_positions_and_vacuum() {
        let s = spec();
        let p = VqeParams::manual(0.3, -0.5);
        let x0 = StateVector::basis(s.dim(), 1 << 5).unwrap();
        let psi = apply_ansatz(&p, &x0, &s, Direction::Forward).unwrap();
        let amps = meson_position_amplitudes(&psi, &p, &s).unwrap();
        for (x, a) in amps.iter().enumerate() {
            let expect = if x == 5 { 1.0 } else { 0.0 };
            assert!((a.norm() - expect).abs() < 1e-12);
        }
        let vac = apply_ansatz(&p, &StateVector::basis(s.dim(), 0).unwrap(), &s, Direction::Forward).unwrap();
        let amps = meson_position_amplitudes(&vac, &p, &s).unwrap();
        assert!(amps.iter().all(|a| a.norm() < 1e-12));
    }

    #[test]
    fn gaussian_is_normalized_and_centered() {
        let wp = WavepacketSpec::gaussian(0.0, 0.4, 3, 12).unwrap();
        let norm: f64 = wp.phi.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        // position amplitude at x0 is real positive
        let at_x0: Complex64 = (0..12)
            .map(|k| wp.phi[k] * Complex64::from_polar(1.0, momentum(k, 12) * 3.0))
            .sum();
        assert!(at_x0.re > 0.0 && at_x0.im.abs() < 1e-12);
        assert!(WavepacketSpec::new(vec![Complex64::new(0.5, 0.0); 2]).is_err());
    }
}
