//! One function per subcommand. Each writes its files into the output
//! directory; the caller writes the manifest.

use anyhow::{bail, ensure, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use stringbreak_core::circuit::{compile_full_evolution, convention_report};
use stringbreak_core::fixtures::{self, TableRow};
use stringbreak_core::lattice::{string_basis_state, QubitHamiltonian};
use stringbreak_core::reference::{
    vacuum_energies, FermionLattice, ReferenceHamiltonian, RestrictedModel, Truncation,
};
use stringbreak_core::spectra::{fit_dispersion, ground_state, meson_spectrum, spectrum};
use stringbreak_core::trotter::{
    meson_distribution, sample_measurement, trotter_evolve, StringEvolution, TimeSeries, TrotterPlan,
};
use stringbreak_core::vqe::{
    apply_ansatz, magnus_init, Direction, OptimizerOptions, Provenance, ScanReport, ScanRow, VqeParams,
    VqeProblem,
};
use stringbreak_core::{build_hamiltonian, LatticeSpec, ObservableKind};

use crate::config::{
    CompileConfig, DispersionConfig, EvolveConfig, ObservableSet, ReferenceConfig, ScanConfig, VacuumConfig,
};
use crate::output::OutputDir;

#[derive(Serialize)]
struct VacuumRow {
    g: f64,
    m: f64,
    model: &'static str,
    boundary: &'static str,
    sector_dim: usize,
    /// Ground-state energy with the bare vacuum at zero.
    e0: f64,
    e_electric: f64,
    /// Mass energy with the filled-odd-site constant removed.
    e_mass: f64,
    /// Mass energy including that constant.
    e_mass_raw: f64,
    /// `e_electric` minus the untruncated value, when that was computed.
    electric_deviation: Option<f64>,
}

pub fn vacuum(cfg: &VacuumConfig, out: &mut OutputDir) -> Result<()> {
    ensure!(!cfg.g.is_empty() && !cfg.m.is_empty(), "g and m grids must be nonempty");
    let points: Vec<(f64, f64)> = cfg
        .g
        .iter()
        .flat_map(|&g| cfg.m.iter().map(move |&m| (g, m)))
        .collect();
    let blocks: Vec<Result<Vec<VacuumRow>>> = points
        .par_iter()
        .map(|&(g, m)| vacuum_point(cfg, g, m))
        .collect();
    let mut rows = Vec::new();
    for b in blocks {
        rows.extend(b?);
    }
    out.write_csv("vacuum.csv", &rows)
}

fn vacuum_point(cfg: &VacuumConfig, g: f64, m: f64) -> Result<Vec<VacuumRow>> {
    let lattice = FermionLattice::new(cfg.n_stag, g, m)?;
    let h = ReferenceHamiltonian::build(lattice);
    let mut rows = Vec::new();
    let mut untruncated = None;
    for &t in &cfg.truncations {
        let v = vacuum_energies(&h, t).with_context(|| format!("g = {g}, m = {m}, {}", t.name()))?;
        if t == Truncation::None {
            untruncated = Some(v.e_electric);
        }
        rows.push(VacuumRow {
            g,
            m,
            model: t.name(),
            boundary: "open",
            sector_dim: v.sector_dim,
            e0: v.e0 - lattice.mass_offset(),
            e_electric: v.e_electric,
            e_mass: v.e_mass_shifted,
            e_mass_raw: v.e_mass,
            electric_deviation: None,
        });
    }
    if cfg.qubit_model {
        let spec = LatticeSpec::open(cfg.n_stag - 1, g, m)?;
        let gs = ground_state(&build_hamiltonian(&spec)?)?;
        let probs = gs.state().probabilities();
        let (mut e_el, mut e_mass) = (0.0, 0.0);
        for (b, p) in probs.iter().enumerate() {
            e_el += p * spec.electric_coefficient() * b.count_ones() as f64;
            e_mass += p * m * spec.domain_walls(b) as f64;
        }
        rows.push(VacuumRow {
            g,
            m,
            model: "qubit",
            boundary: "open",
            sector_dim: spec.dim(),
            e0: gs.value,
            e_electric: e_el,
            e_mass,
            e_mass_raw: e_mass + lattice.mass_offset(),
            electric_deviation: None,
        });
    }
    if let Some(base) = untruncated {
        for r in &mut rows {
            r.electric_deviation = Some(r.e_electric - base);
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
struct ScanCsvRow {
    l: usize,
    theta0: Option<f64>,
    theta1: Option<f64>,
    o_star: Option<f64>,
    evaluations: Option<usize>,
    gradient_norm: Option<f64>,
    status: String,
}

#[derive(Serialize)]
struct ThetaEffCsvRow {
    l: usize,
    theta0_eff: Option<f64>,
    theta1_eff: Option<f64>,
}

pub fn vqe_scan(cfg: &ScanConfig, out: &mut OutputDir) -> Result<()> {
    ensure!(
        cfg.l_min >= 2 && cfg.l_min <= cfg.l_max,
        "need 2 <= l_min <= l_max, got {}..{}",
        cfg.l_min,
        cfg.l_max
    );
    let opts = OptimizerOptions {
        max_evaluations: cfg.max_evaluations,
        ..OptimizerOptions::default()
    };
    let init = magnus_init(cfg.g, cfg.m)?;
    let results: Vec<(usize, Result<_, String>)> = (cfg.l_min..=cfg.l_max)
        .into_par_iter()
        .map(|l| {
            let r = LatticeSpec::periodic(2 * l, cfg.g, cfg.m)
                .and_then(VqeProblem::new)
                .and_then(|p| p.with_kind(cfg.objective).optimize(&init, &opts))
                .map_err(|e| e.to_string());
            (l, r)
        })
        .collect();
    let mut csv_rows = Vec::new();
    let mut ok_rows = Vec::new();
    for (l, r) in results {
        match r {
            Ok(v) => {
                ok_rows.push(ScanRow::from((l, &v)));
                csv_rows.push(ScanCsvRow {
                    l,
                    theta0: Some(v.params.theta0),
                    theta1: Some(v.params.theta1),
                    o_star: Some(v.o_star),
                    evaluations: Some(v.evaluations),
                    gradient_norm: Some(v.gradient_norm),
                    status: "ok".into(),
                });
            }
            Err(e) => {
                eprintln!("L = {l}: {e}");
                csv_rows.push(ScanCsvRow {
                    l,
                    theta0: None,
                    theta1: None,
                    o_star: None,
                    evaluations: None,
                    gradient_norm: None,
                    status: format!("error: {e}"),
                });
            }
        }
    }
    out.write_csv("scan.csv", &csv_rows)?;
    let report = ScanReport::new(ok_rows);
    let eff: Vec<ThetaEffCsvRow> = report
        .theta_eff
        .iter()
        .map(|r| ThetaEffCsvRow {
            l: r.l,
            theta0_eff: r.theta0_eff,
            theta1_eff: r.theta1_eff,
        })
        .collect();
    out.write_csv("theta_eff.csv", &eff)?;
    out.write_json("scan.json", &report)
}

#[derive(Serialize)]
struct PhysicalBandRow {
    p_physical: f64,
    energy: f64,
}

pub fn dispersion(cfg: &DispersionConfig, out: &mut OutputDir) -> Result<()> {
    let spec = LatticeSpec::periodic(cfg.n_links, cfg.g, cfg.m)?;
    let ms = meson_spectrum(&spec)?;
    out.write_csv("band.csv", &ms.band)?;
    let phys = ms.physical_band();
    let rows: Vec<PhysicalBandRow> = phys
        .iter()
        .map(|&(p_physical, energy)| PhysicalBandRow { p_physical, energy })
        .collect();
    out.write_csv("physical_band.csv", &rows)?;
    let fit = fit_dispersion(&phys, cfg.window)?;
    #[derive(Serialize)]
    struct Summary {
        vacuum_energy: f64,
        fit: stringbreak_core::spectra::DispersionFit,
    }
    out.write_json(
        "dispersion.json",
        &Summary {
            vacuum_energy: ms.vacuum_energy,
            fit,
        },
    )
}

#[derive(Serialize)]
struct SeriesRow {
    t: f64,
    observable: &'static str,
    x: Option<usize>,
    value: f64,
}

#[derive(Serialize)]
struct DistributionRow {
    t: f64,
    n: usize,
    probability: f64,
}

#[derive(Serialize)]
struct MomentRow {
    t: f64,
    k: usize,
    moment: f64,
}

#[derive(Serialize)]
struct SampleRow {
    bitstring: String,
    count: usize,
}

#[derive(Serialize)]
struct TableCompareRow {
    t: f64,
    x: usize,
    simulated: f64,
    classical_value: f64,
    difference: f64,
    hardware_value: f64,
    hardware_err: f64,
}

fn split_kind(k: ObservableKind) -> (&'static str, Option<usize>) {
    match k {
        ObservableKind::LinkOccupation(x) => ("p1", Some(x)),
        ObservableKind::MesonPair(x) => ("meson_pair", Some(x)),
        ObservableKind::TotalOccupation => ("total_p1", None),
        ObservableKind::TotalMesonPair => ("total_meson_pair", None),
    }
}

fn resolve_params(cfg: &EvolveConfig) -> Result<(VqeParams, Option<f64>)> {
    match (cfg.theta0, cfg.theta1) {
        (Some(a), Some(b)) => {
            ensure!(cfg.optimize_l.is_none(), "give either fixed angles or optimize_l, not both");
            Ok((VqeParams::manual(a, b), None))
        }
        (None, None) => {
            let l = cfg.optimize_l.unwrap_or((cfg.n_links / 2).min(8));
            let spec = LatticeSpec::periodic(2 * l, cfg.g, cfg.m)?;
            let r = VqeProblem::new(spec)?.optimize(&magnus_init(cfg.g, cfg.m)?, &OptimizerOptions::default())?;
            Ok((r.params.with_provenance(Provenance::Optimized { l }), Some(r.o_star)))
        }
        _ => bail!("theta0 and theta1 must be given together"),
    }
}

pub fn evolve(cfg: &EvolveConfig, seed: u64, out: &mut OutputDir) -> Result<()> {
    let spec = LatticeSpec::periodic(cfg.n_links, cfg.g, cfg.m)?;
    spec.check_statevector()?;
    let plan = TrotterPlan::new(cfg.dt, cfg.n_steps)?;
    let (params, o_star) = resolve_params(cfg)?;
    let n = spec.n_links;
    let mut observables = Vec::new();
    for set in &cfg.observables {
        match set {
            ObservableSet::MesonPairs => observables.extend((0..n).map(ObservableKind::MesonPair)),
            ObservableSet::LinkOccupations => observables.extend((0..n).map(ObservableKind::LinkOccupation)),
            ObservableSet::TotalOccupation => observables.push(ObservableKind::TotalOccupation),
            ObservableSet::TotalMesonPair => observables.push(ObservableKind::TotalMesonPair),
        }
    }
    let mut run = StringEvolution::new(spec, cfg.string.clone(), params, plan);
    run.observables = observables;
    run.subtract_vacuum = cfg.subtract_vacuum;
    run.frame = cfg.frame;
    run.moment_order = cfg.n_max.saturating_sub(1).max((cfg.n_max > 0) as usize);
    let ts = run.run()?;

    let rows: Vec<SeriesRow> = ts
        .rows()
        .map(|(t, k, value)| {
            let (observable, x) = split_kind(k);
            SeriesRow { t, observable, x, value }
        })
        .collect();
    out.write_csv("series.csv", &rows)?;

    if cfg.n_max > 0 {
        write_distribution(&ts, cfg.n_max, out)?;
    }
    if cfg.shots > 0 {
        let init = if cfg.string.is_empty() {
            stringbreak_core::StateVector::basis(spec.dim(), 0)?
        } else {
            string_basis_state(&cfg.string, &spec)?
        };
        let psi = apply_ansatz(&params, &init, &spec, Direction::Forward)?;
        let psi = trotter_evolve(&psi, &spec, &plan)?;
        let counts = sample_measurement(&psi, &params, &spec, cfg.shots, seed)?;
        let rows: Vec<SampleRow> = counts
            .into_iter()
            .map(|(bitstring, count)| SampleRow { bitstring, count })
            .collect();
        out.write_csv("samples.csv", &rows)?;
    }
    if !cfg.compare_table.is_empty() {
        let table = match cfg.compare_table.as_str() {
            "qubits12" => fixtures::qubits12(),
            "qubits104" => fixtures::qubits104(),
            other => bail!("unknown table `{other}` (expected qubits12 or qubits104)"),
        };
        out.write_csv("table_comparison.csv", &compare_table(&ts, &table, cfg.dt)?)?;
    }

    #[derive(Serialize)]
    struct ParamsOut {
        params: VqeParams,
        o_star: Option<f64>,
    }
    out.write_json("params.json", &ParamsOut { params, o_star })
}

fn write_distribution(ts: &TimeSeries, n_max: usize, out: &mut OutputDir) -> Result<()> {
    let mut dist = Vec::new();
    let mut moments = Vec::new();
    for (&t, mom) in ts.times.iter().zip(&ts.moments) {
        for (k, &v) in mom.iter().enumerate() {
            moments.push(MomentRow { t, k: k + 1, moment: v });
        }
        let d = meson_distribution(mom, n_max)?;
        for n in 1..=n_max {
            dist.push(DistributionRow {
                t,
                n,
                probability: d.p(n),
            });
        }
    }
    out.write_csv("moments.csv", &moments)?;
    out.write_csv("distribution.csv", &dist)
}

fn compare_table(ts: &TimeSeries, table: &[TableRow], dt: f64) -> Result<Vec<TableCompareRow>> {
    let mut rows = Vec::new();
    for r in table {
        let step = (r.t / dt).round() as usize;
        if ((step as f64) * dt - r.t).abs() > 1e-9 || step >= ts.times.len() {
            continue;
        }
        let simulated = ts
            .value(step, ObservableKind::MesonPair(r.x))
            .context("table comparison needs the meson_pairs observables on a matching lattice")?;
        rows.push(TableCompareRow {
            t: r.t,
            x: r.x,
            simulated,
            classical_value: r.classical_value,
            difference: simulated - r.classical_value,
            hardware_value: r.hardware_value,
            hardware_err: r.hardware_err,
        });
    }
    Ok(rows)
}

#[derive(Serialize)]
struct CompileRow {
    n_links: usize,
    n_steps: usize,
    convention: &'static str,
    cnot_count: usize,
    cnot_depth: usize,
    total_gates: usize,
    depth: usize,
}

pub fn compile(cfg: &CompileConfig, out: &mut OutputDir) -> Result<()> {
    let params = VqeParams::manual(cfg.theta0, cfg.theta1);
    let mut rows = Vec::new();
    for &n in &cfg.n_links {
        let spec = LatticeSpec::periodic(n, cfg.g, cfg.m)?;
        for &k in &cfg.n_steps {
            let plan = TrotterPlan::new(cfg.dt, k)?;
            for r in convention_report(&params, &plan, &spec)? {
                rows.push(CompileRow {
                    n_links: n,
                    n_steps: k,
                    convention: r.convention.name(),
                    cnot_count: r.metrics.cnot_count,
                    cnot_depth: r.metrics.cnot_depth,
                    total_gates: r.metrics.total_gates,
                    depth: r.metrics.depth,
                });
            }
            if cfg.write_circuits {
                let c = compile_full_evolution(&params, &plan, &spec, cfg.include_measure_undo)?;
                out.write(&format!("circuit_n{n}_k{k}.txt"), c.to_text().as_bytes())?;
            }
        }
    }
    out.write_csv("compile.csv", &rows)?;
    out.write_json("compile.json", &rows)
}

#[derive(Serialize)]
struct ReferenceRow {
    g: f64,
    m: f64,
    level: usize,
    reference: f64,
    qubit: f64,
    difference: f64,
}

pub fn reference_compare(cfg: &ReferenceConfig, out: &mut OutputDir) -> Result<()> {
    let points: Vec<(f64, f64)> = cfg
        .g
        .iter()
        .flat_map(|&g| cfg.m.iter().map(move |&m| (g, m)))
        .collect();
    let blocks: Vec<Result<Vec<ReferenceRow>>> = points
        .par_iter()
        .map(|&(g, m)| {
            let lattice = FermionLattice::new(cfg.n_stag, g, m)?;
            let h = ReferenceHamiltonian::build(lattice);
            let model = RestrictedModel::new(&h, Truncation::HqAndElectric.constraints())?;
            let reference: Vec<f64> = spectrum(&model.hamiltonian)
                .into_iter()
                .map(|e| e - lattice.mass_offset())
                .collect();
            let qubit = spectrum(&QubitHamiltonian::new(&LatticeSpec::open(cfg.n_stag - 1, g, m)?)?.to_sparse());
            ensure!(
                reference.len() == qubit.len(),
                "sector dimension {} differs from {} qubit states",
                reference.len(),
                qubit.len()
            );
            Ok(reference
                .into_iter()
                .zip(qubit)
                .enumerate()
                .map(|(level, (r, q))| ReferenceRow {
                    g,
                    m,
                    level,
                    reference: r,
                    qubit: q,
                    difference: r - q,
                })
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    for b in blocks {
        rows.extend(b?);
    }
    let max = rows.iter().map(|r| r.difference.abs()).fold(0.0, f64::max);
    eprintln!("max |reference - qubit| = {max:.3e}");
    out.write_csv("reference_compare.csv", &rows)
}
