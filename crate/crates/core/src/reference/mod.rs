//! Untruncated SU(2) reference with the gauge field integrated out.

mod charges;
mod fock;
mod subspace;

pub use charges::{cumulative_charge, site_charge, ChargeOperators};
pub use fock::{hop, hopping, mass_term, one_body, FermionLattice, MODE_CAP};
pub use subspace::{Constraints, Subspace};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::SparseOperator;
use crate::spectra::{lowest_eigenpairs, SolverOptions};

/// Full Hamiltonian split into its three pieces.
#[derive(Debug, Clone)]
pub struct ReferenceHamiltonian {
    pub lattice: FermionLattice,
    pub charges: ChargeOperators,
    pub hopping: SparseOperator,
    pub mass: SparseOperator,
    pub electric: SparseOperator,
}

impl ReferenceHamiltonian {
    pub fn build(lattice: FermionLattice) -> Self {
        let charges = ChargeOperators::build(&lattice);
        let mut electric = SparseOperator::diagonal(&vec![0.0; lattice.dim()]);
        for n in 0..charges.n_links() {
            electric = electric.add(charges.link(n));
        }
        let electric = electric.scaled(lattice.g * lattice.g / 2.0);
        ReferenceHamiltonian {
            hopping: hopping(&lattice),
            mass: mass_term(&lattice),
            electric,
            charges,
            lattice,
        }
    }

    pub fn total(&self) -> SparseOperator {
        self.hopping.add(&self.mass).add(&self.electric)
    }
}

/// `H = hopping + mass + (g^2/2) sum_n L_n^2` on the full Fock space.
pub fn build_untruncated_hamiltonian(lattice: &FermionLattice) -> SparseOperator {
    ReferenceHamiltonian::build(*lattice).total()
}

/// Diagonal projector onto heavy-quark occupations.
pub fn heavy_quark_projector(lattice: &FermionLattice) -> SparseOperator {
    let diag: Vec<f64> = (0..lattice.dim())
        .map(|s| if lattice.heavy_quark_allowed(s) { 1.0 } else { 0.0 })
        .collect();
    SparseOperator::diagonal(&diag)
}

/// Projector onto link Casimirs at most `j_max (j_max + 1)`.
pub fn electric_truncation_projector(lattice: &FermionLattice, j_max: f64) -> Result<SparseOperator> {
    let charges = ChargeOperators::build(lattice);
    let c = Constraints {
        j_max: Some(j_max),
        ..Constraints::NONE
    };
    Ok(Subspace::build(lattice, &charges, c)?.projector())
}

/// Which approximations the comparison keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    HqOnly,
    HqAndElectric,
    None,
}

impl Truncation {
    pub fn name(&self) -> &'static str {
        match self {
            Truncation::HqOnly => "hq_only",
            Truncation::HqAndElectric => "hq_and_electric",
            Truncation::None => "none",
        }
    }

    /// Physical states are always color singlets.
    pub fn constraints(&self) -> Constraints {
        let (heavy_quark, j_max) = match self {
            Truncation::HqOnly => (true, None),
            Truncation::HqAndElectric => (true, Some(0.5)),
            Truncation::None => (false, None),
        };
        Constraints {
            heavy_quark,
            j_max,
            singlet: true,
        }
    }
}

impl std::str::FromStr for Truncation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hq_only" => Ok(Truncation::HqOnly),
            "hq_and_electric" => Ok(Truncation::HqAndElectric),
            "none" => Ok(Truncation::None),
            _ => Err(Error::InvalidArgument(format!("unknown truncation `{s}`"))),
        }
    }
}

/// Ground-state energies in one truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VacuumEnergies {
    pub n_stag: usize,
    pub g: f64,
    pub m: f64,
    pub truncation: Truncation,
    pub sector_dim: usize,
    pub e0: f64,
    pub e_electric: f64,
    /// `<m sum (-1)^x n_x>` as defined on the fermions.
    pub e_mass: f64,
    /// Mass energy with the filled-odd-site constant removed, matching the
    /// link-qubit convention where the bare vacuum has zero energy.
    pub e_mass_shifted: f64,
}

/// Restricted Hamiltonian and its pieces in a constrained sector.
#[derive(Debug, Clone)]
pub struct RestrictedModel {
    pub subspace: Subspace,
    pub hamiltonian: SparseOperator,
    pub electric: SparseOperator,
    pub mass: SparseOperator,
}

impl RestrictedModel {
    pub fn new(h: &ReferenceHamiltonian, constraints: Constraints) -> Result<Self> {
        let subspace = Subspace::build(&h.lattice, &h.charges, constraints)?;
        Ok(RestrictedModel {
            hamiltonian: subspace.restrict(&h.total())?,
            electric: subspace.restrict(&h.electric)?,
            mass: subspace.restrict(&h.mass)?,
            subspace,
        })
    }
}

/// Vacuum energy and its electric and mass parts.
pub fn truncation_comparison(lattice: &FermionLattice, truncation: Truncation) -> Result<VacuumEnergies> {
    let h = ReferenceHamiltonian::build(*lattice);
    vacuum_energies(&h, truncation)
}

pub fn vacuum_energies(h: &ReferenceHamiltonian, truncation: Truncation) -> Result<VacuumEnergies> {
    let model = RestrictedModel::new(h, truncation.constraints())?;
    let gs = lowest_eigenpairs(&model.hamiltonian, 1, &SolverOptions::default())?.remove(0);
    let psi = gs.state();
    let e_mass = model.mass.expectation(&psi);
    let lat = h.lattice;
    Ok(VacuumEnergies {
        n_stag: lat.n_stag,
        g: lat.g,
        m: lat.m,
        truncation,
        sector_dim: model.subspace.rank(),
        e0: gs.value,
        e_electric: model.electric.expectation(&psi),
        e_mass,
        e_mass_shifted: e_mass - lat.mass_offset(),
    })
}
