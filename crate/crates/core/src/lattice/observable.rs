use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Boundary, LatticeSpec, SparseOperator};
use crate::error::{Error, Result};

/// Diagonal observables tracked during string evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "x")]
pub enum ObservableKind {
    /// `P1` on link `x`.
    LinkOccupation(usize),
    /// `P0_x P1_{x+1} + P1_x P0_{x+1}`: a quark or antiquark between links `x` and `x + 1`.
    MesonPair(usize),
    TotalOccupation,
    TotalMesonPair,
}

impl ObservableKind {
    pub fn name(&self) -> String {
        match self {
            ObservableKind::LinkOccupation(x) => format!("p1[{x}]"),
            ObservableKind::MesonPair(x) => format!("meson_pair[{x}]"),
            ObservableKind::TotalOccupation => "total_p1".into(),
            ObservableKind::TotalMesonPair => "total_meson_pair".into(),
        }
    }

    fn check(&self, spec: &LatticeSpec) -> Result<()> {
        let n = spec.n_links;
        let pair_limit = match spec.boundary {
            Boundary::Periodic => n,
            Boundary::Open => n - 1,
        };
        match *self {
            ObservableKind::LinkOccupation(x) if x >= n => {
                Err(Error::IndexOutOfRange { index: x, limit: n })
            }
            ObservableKind::MesonPair(x) if x >= pair_limit => Err(Error::IndexOutOfRange {
                index: x,
                limit: pair_limit,
            }),
            _ => Ok(()),
        }
    }

    /// Eigenvalue on a single basis state.
    pub fn eigenvalue(&self, bits: usize, spec: &LatticeSpec) -> f64 {
        let n = spec.n_links;
        let bit = |l: usize| (bits >> l) & 1;
        let pair = |x: usize| (bit(x) != bit((x + 1) % n)) as u32 as f64;
        match *self {
            ObservableKind::LinkOccupation(x) => bit(x) as f64,
            ObservableKind::MesonPair(x) => pair(x),
            ObservableKind::TotalOccupation => bits.count_ones() as f64,
            ObservableKind::TotalMesonPair => {
                let pairs = match spec.boundary {
                    Boundary::Periodic => n,
                    Boundary::Open => n - 1,
                };
                (0..pairs).map(pair).sum()
            }
        }
    }
}

/// Eigenvalues of a diagonal observable over the whole basis.
pub fn diagonal_values(kind: ObservableKind, spec: &LatticeSpec) -> Result<Vec<f64>> {
    spec.check_statevector()?;
    kind.check(spec)?;
    Ok((0..spec.dim())
        .into_par_iter()
        .map(|b| kind.eigenvalue(b, spec))
        .collect())
}

pub fn build_observable(kind: ObservableKind, spec: &LatticeSpec) -> Result<SparseOperator> {
    Ok(SparseOperator::diagonal(&diagonal_values(kind, spec)?))
}
