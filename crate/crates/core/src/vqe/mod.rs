//! Concurrent variational preparation of the vacuum and single mesons with a
//! size-independent circuit.

mod ansatz;
mod fit;
mod optimize;
mod wavepacket;

pub use ansatz::{
    apply_ansatz, apply_ansatz_in_place, apply_layer, plane_wave_k, plane_wave_state, Direction,
};
pub use fit::{exp_fit, theta_eff, ExpFit};
pub use optimize::{maximize, OptimizerOptions, OptimizerResult};
pub use wavepacket::{meson_position_amplitudes, wavepacket_state, WavepacketSpec};

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, QubitHamiltonian, StateVector};
use crate::spectra::{meson_spectrum, MesonSpectrum};

/// Where a pair of angles came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    MagnusInit,
    /// Optimized on a periodic lattice of `l` physical sites.
    Optimized { l: usize },
    Extrapolated,
    Manual,
}

/// Angles of the two conditioned rotations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VqeParams {
    /// Rotation when both neighbors are empty.
    pub theta0: f64,
    /// Rotation when both neighbors are excited.
    pub theta1: f64,
    pub provenance: Provenance,
}

impl VqeParams {
    pub fn manual(theta0: f64, theta1: f64) -> Self {
        VqeParams {
            theta0,
            theta1,
            provenance: Provenance::Manual,
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.theta0, self.theta1]
    }
}

/// First-order adiabatic estimate of the angles.
pub fn magnus_init(g: f64, m: f64) -> Result<VqeParams> {
    let e = 0.375 * g * g;
    if (e - 2.0 * m).abs() < 1e-9 {
        return Err(Error::Degenerate(format!(
            "3/8 g^2 = 2m at g={g}, m={m}: the second angle diverges; supply initial angles manually"
        )));
    }
    Ok(VqeParams {
        theta0: FRAC_1_SQRT_2 / (e + 2.0 * m),
        theta1: FRAC_1_SQRT_2 / 2.0 / (e - 2.0 * m),
        provenance: Provenance::MagnusInit,
    })
}

/// Exact targets of the concurrent objective.
#[derive(Debug, Clone)]
pub struct ExactStates {
    pub vacuum: StateVector,
    /// `mesons[k]` has one-link momentum `2 pi k / n`.
    pub mesons: Vec<StateVector>,
}

impl ExactStates {
    pub fn from_spectrum(s: &MesonSpectrum) -> Result<Self> {
        let n = s.band.len();
        let mut mesons: Vec<Option<StateVector>> = vec![None; n];
        for (b, st) in s.band.iter().zip(&s.mesons) {
            if b.k < n {
                mesons[b.k] = Some(st.clone());
            }
        }
        Self::new(s.vacuum.clone(), mesons, n)
    }

    /// Checks that every grid momentum has a target.
    pub fn new(vacuum: StateVector, mesons: Vec<Option<StateVector>>, n_links: usize) -> Result<Self> {
        if mesons.len() != n_links {
            return Err(Error::InvalidArgument(format!(
                "{} meson targets for {n_links} momenta",
                mesons.len()
            )));
        }
        let mesons = mesons
            .into_iter()
            .enumerate()
            .map(|(k, m)| {
                m.ok_or_else(|| Error::InvalidArgument(format!("no meson target for momentum index {k}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExactStates { vacuum, mesons })
    }
}

/// Which quantity the concurrent optimization targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// Mean overlap with exact eigenstates.
    #[default]
    Overlap,
    /// Negative mean energy of the prepared states.
    Energy,
}

/// `(1/(n+1)) [|<Vac|U|0>|^2 + sum_p |<psi_p|U|p>|^2]`.
pub fn objective(params: &VqeParams, spec: &LatticeSpec, exact: &ExactStates) -> Result<f64> {
    ansatz::check_ansatz_spec(spec)?;
    let n = spec.n_links;
    if exact.mesons.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} meson targets for {n} momenta",
            exact.mesons.len()
        )));
    }
    let dim = spec.dim();
    if exact.vacuum.dim() != dim || exact.mesons.iter().any(|m| m.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: exact.vacuum.dim(),
        });
    }
    // <target| U |init> = conj((U^dagger target)[init])
    let targets: Vec<(Option<usize>, &StateVector)> = std::iter::once((None, &exact.vacuum))
        .chain(exact.mesons.iter().enumerate().map(|(k, m)| (Some(k), m)))
        .collect();
    let norm = 1.0 / (n as f64).sqrt();
    let terms: Vec<f64> = targets
        .par_iter()
        .map(|&(k, target)| {
            let mut amps = target.amplitudes().to_vec();
            apply_ansatz_in_place(&mut amps, n, params, Direction::Inverse);
            match k {
                None => amps[0].norm_sqr(),
                Some(k) => {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for x in 0..n {
                        let phase = 2.0 * PI * ((k * x) % n) as f64 / n as f64;
                        acc += amps[1 << x].conj() * Complex64::from_polar(norm, phase);
                    }
                    acc.norm_sqr()
                }
            }
        })
        .collect();
    Ok(terms.iter().sum::<f64>() / (n + 1) as f64)
}

/// Negative mean energy of `U|0>` and `U|p>` over all momenta.
pub fn energy_objective(params: &VqeParams, spec: &LatticeSpec, h: &QubitHamiltonian) -> Result<f64> {
    ansatz::check_ansatz_spec(spec)?;
    let n = spec.n_links;
    let energies: Vec<Result<f64>> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let init = if i == 0 {
                StateVector::basis(spec.dim(), 0)?
            } else {
                plane_wave_k(i - 1, spec)?
            };
            let mut amps = init.into_amplitudes();
            apply_ansatz_in_place(&mut amps, n, params, Direction::Forward);
            let psi = StateVector::from_amplitudes(amps);
            let hpsi = crate::lattice::apply_operator(h, &psi)?;
            Ok(psi.inner(&hpsi).re)
        })
        .collect();
    let mut total = 0.0;
    for e in energies {
        total += e?;
    }
    Ok(-total / (n + 1) as f64)
}

/// A lattice together with the exact targets needed to score angles.
#[derive(Debug, Clone)]
pub struct VqeProblem {
    pub spec: LatticeSpec,
    pub exact: ExactStates,
    pub kind: ObjectiveKind,
}

/// Outcome of one optimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub params: VqeParams,
    /// Overlap objective at the optimum, whichever quantity was optimized.
    pub o_star: f64,
    pub evaluations: usize,
    pub gradient_norm: f64,
}

impl VqeProblem {
    pub fn new(spec: LatticeSpec) -> Result<Self> {
        ansatz::check_ansatz_spec(&spec)?;
        let exact = ExactStates::from_spectrum(&meson_spectrum(&spec)?)?;
        Ok(VqeProblem {
            spec,
            exact,
            kind: ObjectiveKind::Overlap,
        })
    }

    pub fn with_kind(mut self, kind: ObjectiveKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn objective(&self, params: &VqeParams) -> Result<f64> {
        objective(params, &self.spec, &self.exact)
    }

    pub fn optimize(&self, init: &VqeParams, opts: &OptimizerOptions) -> Result<VqeResult> {
        let h = match self.kind {
            ObjectiveKind::Energy => Some(QubitHamiltonian::new(&self.spec)?),
            ObjectiveKind::Overlap => None,
        };
        let f = |x: &[f64]| {
            let p = VqeParams::manual(x[0], x[1]);
            match &h {
                Some(h) => energy_objective(&p, &self.spec, h),
                None => self.objective(&p),
            }
        };
        let r = maximize(f, &init.as_array(), opts)?;
        let params = VqeParams {
            theta0: r.x[0],
            theta1: r.x[1],
            provenance: Provenance::Optimized {
                l: self.spec.physical_sites(),
            },
        };
        Ok(VqeResult {
            o_star: self.objective(&params)?,
            params,
            evaluations: r.evaluations,
            gradient_norm: r.gradient_norm,
        })
    }
}

/// Optimizes on a periodic lattice of `l` physical sites (`2l` links),
/// starting from the first-order estimate.
pub fn optimize_size(g: f64, m: f64, l: usize, opts: &OptimizerOptions) -> Result<VqeResult> {
    let spec = LatticeSpec::periodic(2 * l, g, m)?;
    VqeProblem::new(spec)?.optimize(&magnus_init(g, m)?, opts)
}

/// One row of a size scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub l: usize,
    pub theta0: f64,
    pub theta1: f64,
    pub o_star: f64,
}

impl From<(usize, &VqeResult)> for ScanRow {
    fn from((l, r): (usize, &VqeResult)) -> Self {
        ScanRow {
            l,
            theta0: r.params.theta0,
            theta1: r.params.theta1,
            o_star: r.o_star,
        }
    }
}

/// Four-point extrapolation starting at size `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaEffRow {
    pub l: usize,
    pub theta0_eff: Option<f64>,
    pub theta1_eff: Option<f64>,
}

/// Line through `(x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub rss: f64,
}

/// Fits and extrapolations over a completed scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub theta0_fit: Option<ExpFit>,
    pub theta1_fit: Option<ExpFit>,
    /// `ln(1 - O*)` against `L`, first point excluded.
    pub deficit_fit: Option<LogLinearFit>,
    /// Same, including the first point.
    pub deficit_fit_all: Option<LogLinearFit>,
    /// Direct exponential fit of `O*`, first point excluded.
    pub overlap_fit: Option<ExpFit>,
    pub theta_eff: Vec<ThetaEffRow>,
}

impl ScanReport {
    /// Rows must be sorted by consecutive `l`.
    pub fn new(rows: Vec<ScanRow>) -> Self {
        let t0: Vec<(f64, f64)> = rows.iter().map(|r| (r.l as f64, r.theta0)).collect();
        let t1: Vec<(f64, f64)> = rows.iter().map(|r| (r.l as f64, r.theta1)).collect();
        let o: Vec<(f64, f64)> = rows.iter().map(|r| (r.l as f64, r.o_star)).collect();
        let deficit: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.o_star < 1.0)
            .map(|r| (r.l as f64, (1.0 - r.o_star).ln()))
            .collect();
        let theta_eff = rows
            .windows(4)
            .filter(|w| w[3].l == w[0].l + 3)
            .map(|w| ThetaEffRow {
                l: w[0].l,
                theta0_eff: theta_eff([w[0].theta0, w[1].theta0, w[2].theta0, w[3].theta0]).ok(),
                theta1_eff: theta_eff([w[0].theta1, w[1].theta1, w[2].theta1, w[3].theta1]).ok(),
            })
            .collect();
        ScanReport {
            theta0_fit: exp_fit(&t0, true).ok(),
            theta1_fit: exp_fit(&t1, true).ok(),
            deficit_fit: line_fit(deficit.get(1..).unwrap_or(&[])),
            deficit_fit_all: line_fit(&deficit),
            overlap_fit: exp_fit(&o, true).ok(),
            theta_eff,
            rows,
        }
    }
}

fn line_fit(pts: &[(f64, f64)]) -> Option<LogLinearFit> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let den = n * sxx - sx * sx;
    if den.abs() < 1e-300 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / den;
    let intercept = (sy - slope * sx) / n;
    let rss = pts.iter().map(|&(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Some(LogLinearFit {
        intercept,
        slope,
        rss,
    })
}
