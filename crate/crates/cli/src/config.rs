//! Run configuration. One TOML file may hold a section per subcommand; a
//! missing section or key takes the default shown here.

use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use stringbreak_core::reference::Truncation;
use stringbreak_core::trotter::MeasurementFrame;
use stringbreak_core::vqe::ObjectiveKind;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub vacuum: VacuumConfig,
    pub vqe_scan: ScanConfig,
    pub dispersion: DispersionConfig,
    pub evolve: EvolveConfig,
    pub compile: CompileConfig,
    pub reference_compare: ReferenceConfig,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Config::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Config> {
        // toml errors already name the line and column
        Ok(toml::from_str(text)?)
    }
}

/// Vacuum energies of the fermion model under each truncation, and of the
/// link-qubit model, over a grid of couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VacuumConfig {
    /// Staggered fermion sites; the qubit model gets `n_stag - 1` links.
    pub n_stag: usize,
    pub g: Vec<f64>,
    pub m: Vec<f64>,
    pub truncations: Vec<Truncation>,
    /// Also evaluate the open-chain link-qubit model.
    pub qubit_model: bool,
}

impl Default for VacuumConfig {
    fn default() -> Self {
        VacuumConfig {
            n_stag: 6,
            g: vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
            m: vec![2.0, 4.0, 8.0, 12.0],
            truncations: vec![Truncation::None, Truncation::HqOnly, Truncation::HqAndElectric],
            qubit_model: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub g: f64,
    pub m: f64,
    /// Physical sites; the lattice has `2 L` links.
    pub l_min: usize,
    pub l_max: usize,
    pub objective: ObjectiveKind,
    pub max_evaluations: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            g: 2.0,
            m: 1.0,
            l_min: 2,
            l_max: 8,
            objective: ObjectiveKind::Overlap,
            max_evaluations: 4000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionConfig {
    pub n_links: usize,
    pub g: f64,
    pub m: f64,
    /// Largest `|p|` in the fit, physical momentum units.
    pub window: f64,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        DispersionConfig {
            n_links: 20,
            g: 2.0,
            m: 1.0,
            window: stringbreak_core::spectra::DEFAULT_WINDOW,
        }
    }
}

/// Which observables an evolution records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableSet {
    MesonPairs,
    LinkOccupations,
    TotalOccupation,
    TotalMesonPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub n_links: usize,
    pub g: f64,
    pub m: f64,
    /// Contiguous links excited before state preparation; empty for the
    /// vacuum.
    pub string: Vec<usize>,
    pub dt: f64,
    pub n_steps: usize,
    /// Fixed angles. When absent the angles are optimized at `optimize_l`.
    pub theta0: Option<f64>,
    pub theta1: Option<f64>,
    /// Size used for the angle optimization; defaults to `n_links / 2`
    /// capped at 8.
    pub optimize_l: Option<usize>,
    pub observables: Vec<ObservableSet>,
    pub subtract_vacuum: bool,
    pub frame: MeasurementFrame,
    /// Extract `P(1..=n_max)` from meson-number moments; 0 disables.
    pub n_max: usize,
    /// Bitstring samples of the final state; 0 disables.
    pub shots: usize,
    /// Bundled table to compare against: `qubits12`, `qubits104` or empty.
    pub compare_table: String,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            n_links: 12,
            g: 2.0,
            m: 1.0,
            string: vec![6, 7, 8],
            dt: 0.5,
            n_steps: 26,
            theta0: None,
            theta1: None,
            optimize_l: None,
            observables: vec![ObservableSet::MesonPairs],
            subtract_vacuum: true,
            frame: MeasurementFrame::Undone,
            n_max: 0,
            shots: 0,
            compare_table: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompileConfig {
    pub n_links: Vec<usize>,
    pub n_steps: Vec<usize>,
    pub dt: f64,
    pub g: f64,
    pub m: f64,
    pub theta0: f64,
    pub theta1: f64,
    pub include_measure_undo: bool,
    /// Also write each canonical circuit in the text gate format.
    pub write_circuits: bool,
}

impl Default for CompileConfig {
    fn default() -> Self {
        CompileConfig {
            n_links: vec![12, 104],
            n_steps: vec![10, 12, 26],
            dt: 0.5,
            g: 2.0,
            m: 1.0,
            theta0: 0.18,
            theta1: 0.1,
            include_measure_undo: true,
            write_circuits: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReferenceConfig {
    pub n_stag: usize,
    pub g: Vec<f64>,
    pub m: Vec<f64>,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        ReferenceConfig {
            n_stag: 4,
            g: vec![0.5, 2.0],
            m: vec![0.5, 1.0, 2.5],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn sections_override_defaults() {
        let c = Config::parse(
            "[evolve]\nn_links = 8\nstring = [3]\nframe = \"lab\"\n[vacuum]\ntruncations = [\"hq_only\"]\n",
        )
        .unwrap();
        assert_eq!(c.evolve.n_links, 8);
        assert_eq!(c.evolve.frame, MeasurementFrame::Lab);
        assert_eq!(c.evolve.dt, 0.5);
        assert_eq!(c.vacuum.truncations, vec![Truncation::HqOnly]);
    }

    #[test]
    fn unknown_keys_report_their_line() {
        let err = Config::parse("[evolve]\nn_links = 8\nn_link = 3\n").unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("n_link"), "{msg}");
    }

    #[test]
    fn defaults_survive_a_round_trip() {
        let text = toml::to_string(&Config::default()).unwrap();
        assert_eq!(Config::parse(&text).unwrap(), Config::default());
    }
}
