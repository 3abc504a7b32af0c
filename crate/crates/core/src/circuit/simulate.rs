use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{Axis, Gate, GateCircuit};
use crate::error::{Error, Result};
use crate::lattice::{StateVector, DEFAULT_STATEVECTOR_CAP};

type Mat2 = [[Complex64; 2]; 2];

fn matrix(g: &Gate) -> Mat2 {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match *g {
        Gate::H(_) => {
            let h = c(FRAC_1_SQRT_2, 0.0);
            [[h, h], [h, -h]]
        }
        Gate::S(_) => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]],
        Gate::Sdg(_) => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]],
        Gate::Rotation { axis, angle, .. } => {
            let (s, co) = (angle / 2.0).sin_cos();
            match axis {
                Axis::X => [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]],
                Axis::Y => [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]],
                Axis::Z => [[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]],
            }
        }
        Gate::Cx { .. } => unreachable!("two-qubit gate has no 2x2 matrix"),
    }
}

fn apply_gate(amps: &mut [Complex64], g: &Gate) {
    match *g {
        Gate::Cx { control, target } => {
            let (cb, tb) = (1usize << control, 1usize << target);
            for i in 0..amps.len() {
                if i & cb != 0 && i & tb == 0 {
                    amps.swap(i, i | tb);
                }
            }
        }
        _ => {
            let (q, _) = g.qubits();
            let m = matrix(g);
            let bit = 1usize << q;
            for i in 0..amps.len() {
                if i & bit != 0 {
                    continue;
                }
                let (a, b) = (amps[i], amps[i | bit]);
                amps[i] = m[0][0] * a + m[0][1] * b;
                amps[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }
}

/// Applies the circuit, including its global phase, to `psi`.
pub fn simulate_circuit(circ: &GateCircuit, psi: &StateVector) -> Result<StateVector> {
    let n = circ.n_qubits();
    if n > DEFAULT_STATEVECTOR_CAP {
        return Err(Error::CapExceeded {
            n_links: n,
            cap: DEFAULT_STATEVECTOR_CAP,
        });
    }
    if psi.dim() != 1 << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            actual: psi.dim(),
        });
    }
    let mut out = psi.clone();
    let amps = out.amplitudes_mut();
    for g in circ.gates() {
        apply_gate(amps, g);
    }
    out.scale(Complex64::from_polar(1.0, circ.phase()));
    Ok(out)
}
