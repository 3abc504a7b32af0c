//! Classical simulation engine for heavy-quark SU(2) lattice gauge theory
//! in one spatial dimension.
//!
//! The crate is organized bottom-up:
//!
//! - [`lattice`]: link-qubit Hamiltonian, observables and the sparse kernels
//! - [`reference`]: the gauge-integrated fermion model used as an oracle
//! - [`spectra`]: eigensolvers, momentum sectors and the meson dispersion
//! - [`vqe`]: the two-angle scalable ansatz and its concurrent optimization
//! - [`trotter`]: second-order Trotter dynamics and meson counting
//! - [`circuit`]: gate-level compilation and cost accounting
//! - [`fixtures`]: reference tables bundled for regression

pub mod circuit;
pub mod error;
pub mod fixtures;
pub mod lattice;
pub mod reference;
pub mod spectra;
pub mod trotter;
pub mod vqe;

pub use error::{Error, Result};
pub use lattice::{
    build_hamiltonian, build_observable, Boundary, LatticeSpec, ObservableKind, SparseOperator,
    StateVector, Sublattice,
};
