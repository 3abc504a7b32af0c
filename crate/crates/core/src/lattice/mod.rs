//! Lattice geometry, the link-qubit Hamiltonian and its observables.
//!
//! Every link carries one qubit: `0` is the trivial irrep, `1` the
//! fundamental (j = 1/2). Bit `l` of a basis index is link `l`, so a
//! one-link translation is a bit rotation. A staggered site sits between
//! two consecutive links and hosts a quark or antiquark exactly when those
//! links differ.
//!
//! Open lattices of `n` links describe `n + 1` staggered sites: the two
//! edge sites see an unexcited phantom link beyond the boundary, which is
//! what the gauge-integrated fermion model reduces to.

mod hamiltonian;
mod observable;
mod operator;
mod state;

pub use hamiltonian::{build_hamiltonian, KineticTerm, QubitHamiltonian, FRAC_1_2SQRT2};
pub use observable::{build_observable, diagonal_values, ObservableKind};
pub use operator::{apply_operator, LinearOperator, SparseOperator};
pub use state::{string_basis_state, validate_string, StateVector};
pub(crate) use state::dot;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest lattice a statevector operation will touch unless overridden.
pub const DEFAULT_STATEVECTOR_CAP: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

/// Parity of the link a kinetic term flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sublattice {
    Even,
    Odd,
}

impl Sublattice {
    pub fn contains(self, link: usize) -> bool {
        match self {
            Sublattice::Even => link.is_multiple_of(2),
            Sublattice::Odd => link % 2 == 1,
        }
    }

    pub fn other(self) -> Sublattice {
        match self {
            Sublattice::Even => Sublattice::Odd,
            Sublattice::Odd => Sublattice::Even,
        }
    }
}

/// Lattice geometry and couplings shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n_links: usize,
    pub boundary: Boundary,
    pub g: f64,
    pub m: f64,
    #[serde(default = "default_cap")]
    pub statevector_cap: usize,
}

fn default_cap() -> usize {
    DEFAULT_STATEVECTOR_CAP
}

impl LatticeSpec {
    pub fn new(n_links: usize, boundary: Boundary, g: f64, m: f64) -> Result<Self> {
        let spec = LatticeSpec {
            n_links,
            boundary,
            g,
            m,
            statevector_cap: DEFAULT_STATEVECTOR_CAP,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn periodic(n_links: usize, g: f64, m: f64) -> Result<Self> {
        Self::new(n_links, Boundary::Periodic, g, m)
    }

    pub fn open(n_links: usize, g: f64, m: f64) -> Result<Self> {
        Self::new(n_links, Boundary::Open, g, m)
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.statevector_cap = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_links < 2 {
            return Err(Error::InvalidLattice(format!(
                "need at least 2 links, got {}",
                self.n_links
            )));
        }
        if self.boundary == Boundary::Periodic && !self.n_links.is_multiple_of(2) {
            return Err(Error::InvalidLattice(format!(
                "periodic lattice needs an even number of links, got {}",
                self.n_links
            )));
        }
        if !self.g.is_finite() || !self.m.is_finite() {
            return Err(Error::InvalidLattice("couplings must be finite".into()));
        }
        Ok(())
    }

    /// Fails unless a full statevector over this lattice is allowed.
    pub fn check_statevector(&self) -> Result<()> {
        self.validate()?;
        if self.n_links > self.statevector_cap || self.n_links >= 32 {
            return Err(Error::CapExceeded {
                n_links: self.n_links,
                cap: self.statevector_cap.min(31),
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_links
    }

    /// Number of physical (two-staggered-site) cells on a periodic lattice.
    pub fn physical_sites(&self) -> usize {
        self.n_links / 2
    }

    pub fn electric_coefficient(&self) -> f64 {
        0.375 * self.g * self.g
    }

    /// Number of quarks plus antiquarks in a link configuration.
    pub fn domain_walls(&self, bits: usize) -> u32 {
        let n = self.n_links;
        let mask = (1usize << n) - 1;
        match self.boundary {
            Boundary::Periodic => (bits ^ rotate_bits(bits, 1, n)).count_ones(),
            // phantom zero links on both sides
            Boundary::Open => ((bits ^ (bits << 1)) & ((mask << 1) | 1)).count_ones(),
        }
    }

    /// Eigenvalue of the electric plus mass terms on a basis state.
    pub fn diagonal_energy(&self, bits: usize) -> f64 {
        self.electric_coefficient() * bits.count_ones() as f64
            + self.m * self.domain_walls(bits) as f64
    }
}

/// A computational basis state; bit `l` set means link `l` carries j = 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex(pub usize);

impl BasisIndex {
    pub fn new(bits: usize, n_links: usize) -> Result<Self> {
        if n_links < usize::BITS as usize && bits >> n_links != 0 {
            return Err(Error::IndexOutOfRange {
                index: bits,
                limit: 1 << n_links,
            });
        }
        Ok(BasisIndex(bits))
    }

    pub fn link(self, l: usize) -> bool {
        (self.0 >> l) & 1 == 1
    }

    /// Parse a bitstring written with link 0 leftmost, e.g. `"010"`.
    pub fn from_links(s: &str) -> Result<Self> {
        let mut bits = 0usize;
        for (l, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << l,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "bad link character {other:?}"
                    )))
                }
            }
        }
        Ok(BasisIndex(bits))
    }

    pub fn to_links(self, n_links: usize) -> String {
        (0..n_links)
            .map(|l| if self.link(l) { '1' } else { '0' })
            .collect()
    }
}

/// Cyclic shift moving link `l` to link `l + shift`.
pub fn rotate_bits(bits: usize, shift: isize, n: usize) -> usize {
    let s = shift.rem_euclid(n as isize) as usize;
    if s == 0 {
        return bits;
    }
    let mask = (1usize << n) - 1;
    ((bits << s) | (bits >> (n - s))) & mask
}

/// Link reversal `l -> n - 1 - l`.
pub fn reflect_bits(bits: usize, n: usize) -> usize {
    let mut out = 0;
    for l in 0..n {
        if (bits >> l) & 1 == 1 {
            out |= 1 << (n - 1 - l);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lattices() {
        assert!(LatticeSpec::periodic(5, 1.0, 1.0).is_err());
        assert!(LatticeSpec::open(1, 1.0, 1.0).is_err());
        assert!(LatticeSpec::open(5, 1.0, 1.0).is_ok());
        let big = LatticeSpec::periodic(28, 1.0, 1.0).unwrap();
        assert!(matches!(
            big.check_statevector(),
            Err(Error::CapExceeded { .. })
        ));
        assert!(big.with_cap(28).check_statevector().is_ok());
    }

    #[test]
    fn domain_walls_count_both_boundaries() {
        let periodic = LatticeSpec::periodic(4, 1.0, 1.0).unwrap();
        let b = BasisIndex::from_links("0110").unwrap().0;
        assert_eq!(periodic.domain_walls(b), 2);
        assert_eq!(periodic.domain_walls(0b1111), 0);

        let open = LatticeSpec::open(3, 1.0, 1.0).unwrap();
        assert_eq!(open.domain_walls(0), 0);
        assert_eq!(open.domain_walls(BasisIndex::from_links("010").unwrap().0), 2);
        assert_eq!(open.domain_walls(BasisIndex::from_links("101").unwrap().0), 4);
        assert_eq!(open.domain_walls(BasisIndex::from_links("111").unwrap().0), 2);
    }

    #[test]
    fn rotation_and_reflection() {
        assert_eq!(rotate_bits(0b0001, 1, 4), 0b0010);
        assert_eq!(rotate_bits(0b1000, 1, 4), 0b0001);
        assert_eq!(rotate_bits(0b0001, -1, 4), 0b1000);
        assert_eq!(reflect_bits(0b0001, 4), 0b1000);
        assert_eq!(reflect_bits(0b0110, 4), 0b0110);
    }

    #[test]
    fn bitstrings_read_link_zero_first() {
        let b = BasisIndex::from_links("100").unwrap();
        assert_eq!(b.0, 1);
        assert_eq!(b.to_links(3), "100");
        assert!(BasisIndex::new(8, 3).is_err());
    }
}
