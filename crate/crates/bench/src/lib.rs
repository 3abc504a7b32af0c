//! Shared inputs for the kernel benchmarks.

use stringbreak_core::lattice::string_basis_state;
use stringbreak_core::vqe::{apply_ansatz, Direction, VqeParams};
use stringbreak_core::{LatticeSpec, StateVector};

pub const THETA: (f64, f64) = (0.18, 0.1);

/// Periodic lattice at the usual couplings.
pub fn lattice(n_links: usize) -> LatticeSpec {
    LatticeSpec::periodic(n_links, 2.0, 1.0).expect("valid lattice")
}

/// A dressed central string, so every amplitude is nonzero.
pub fn dressed_string(spec: &LatticeSpec) -> StateVector {
    let mid = spec.n_links / 2;
    let bare = string_basis_state(&[mid - 1, mid, mid + 1], spec).expect("string fits");
    apply_ansatz(&VqeParams::manual(THETA.0, THETA.1), &bare, spec, Direction::Forward)
        .expect("ansatz applies")
}
