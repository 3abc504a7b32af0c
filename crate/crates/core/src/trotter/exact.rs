//! Reference propagation by a sub-stepped Taylor series.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{LinearOperator, StateVector};

/// `exp(-i H t) psi`, given an upper bound on the spectral radius of `H`.
pub fn exact_evolution<O: LinearOperator + ?Sized>(
    h: &O,
    psi: &StateVector,
    t: f64,
    norm_bound: f64,
) -> Result<StateVector> {
    if psi.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: psi.dim(),
        });
    }
    if !(norm_bound > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need a positive norm bound and finite time, got {norm_bound} and {t}"
        )));
    }
    let steps = (norm_bound * t.abs() / 0.5).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let mut x = psi.amplitudes().to_vec();
    let mut term = vec![Complex64::new(0.0, 0.0); x.len()];
    let mut next = term.clone();
    for _ in 0..steps {
        term.copy_from_slice(&x);
        for k in 1..60 {
            h.apply_into(&term, &mut next);
            let c = Complex64::new(0.0, -dt / k as f64);
            let mut size = 0.0f64;
            for (tk, nk) in term.iter_mut().zip(&next) {
                *tk = nk * c;
                size = size.max(tk.norm());
            }
            for (xi, tk) in x.iter_mut().zip(&term) {
                *xi += tk;
            }
            if size < 1e-17 {
                break;
            }
        }
    }
    Ok(StateVector::from_amplitudes(x))
}
