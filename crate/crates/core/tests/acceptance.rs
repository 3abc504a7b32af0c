//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so that every verdict is printed even when the
//! test harness would capture output. Exits non-zero if any criterion fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use num_complex::Complex64;
use stringbreak_core::circuit::{compile_full_evolution, convention_report, simulate_circuit, CountingConvention};
use stringbreak_core::fixtures;
use stringbreak_core::lattice::{string_basis_state, BasisIndex, QubitHamiltonian, FRAC_1_2SQRT2};
use stringbreak_core::reference::{
    truncation_comparison, FermionLattice, ReferenceHamiltonian, RestrictedModel, Truncation,
};
use stringbreak_core::spectra::{fit_dispersion, meson_spectrum, spectrum, MesonSpectrum, DEFAULT_WINDOW};
use stringbreak_core::trotter::{
    all_meson_pairs, evolve_string, exact_evolution, meson_distribution, n_max_from_energy, trotter_evolve,
    MeasurementFrame, StringEvolution, TrotterPlan,
};
use stringbreak_core::vqe::{apply_ansatz, optimize_size, Direction, OptimizerOptions, ScanReport, ScanRow, VqeParams};
use stringbreak_core::{build_hamiltonian, LatticeSpec, ObservableKind, StateVector};

const G: f64 = 2.0;
const M: f64 = 1.0;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

/// Results shared between criteria.
#[derive(Default)]
struct Shared {
    spectrum20: Option<MesonSpectrum>,
    scan: Option<Vec<ScanRow>>,
}

impl Shared {
    fn spectrum20(&mut self) -> &MesonSpectrum {
        self.spectrum20.get_or_insert_with(|| {
            meson_spectrum(&LatticeSpec::periodic(20, G, M).unwrap()).expect("20-link spectrum")
        })
    }

    fn scan(&mut self) -> &[ScanRow] {
        self.scan.get_or_insert_with(|| {
            let opts = OptimizerOptions::default();
            (2..=8)
                .map(|l| ScanRow::from((l, &optimize_size(G, M, l, &opts).expect("scan point"))))
                .collect()
        })
    }

    fn theta_at(&mut self, l: usize) -> VqeParams {
        let row = self.scan().iter().find(|r| r.l == l).expect("size in scan");
        VqeParams::manual(row.theta0, row.theta1)
    }
}

fn matrix_elements() -> Verdict {
    let spec = LatticeSpec::open(3, G, M).unwrap();
    let h = build_hamiltonian(&spec).unwrap();
    let idx = |s: &str| BasisIndex::from_links(s).unwrap().0;
    let a = h.get(idx("010"), idx("000"));
    let b = h.get(idx("111"), idx("101"));
    let (ea, eb) = ((a - FRAC_1_SQRT_2).norm(), (b - FRAC_1_2SQRT2).norm());
    Verdict::new(
        ea < 1e-12 && eb < 1e-12,
        format!("<010|H|000> = {:.15}, <111|H|101> = {:.15} (errors {ea:.1e}, {eb:.1e})", a.re, b.re),
    )
}

fn truncation_equivalence() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for (g, m) in [(G, M), (1.3, 0.7), (0.5, 2.5)] {
        let lat = FermionLattice::new(4, g, m).unwrap();
        let reference = ReferenceHamiltonian::build(lat);
        let model = RestrictedModel::new(&reference, Truncation::HqAndElectric.constraints()).unwrap();
        let mut ref_spec = spectrum(&model.hamiltonian);
        ref_spec.iter_mut().for_each(|e| *e -= lat.mass_offset());
        let qubit = spectrum(&build_hamiltonian(&LatticeSpec::open(3, g, m).unwrap()).unwrap());
        if ref_spec.len() != qubit.len() {
            return Verdict::new(
                false,
                format!("sector dimension {} vs {} qubit states", ref_spec.len(), qubit.len()),
            );
        }
        let d = ref_spec.iter().zip(&qubit).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(d);
        notes.push(format!("(g={g}, m={m}) {d:.1e}"));
    }
    Verdict::new(worst < 1e-10, format!("max spectral difference {}", notes.join(", ")))
}

fn heavy_quark_convergence() -> Verdict {
    let masses = [2.0, 4.0, 8.0];
    let mut devs = Vec::new();
    for &m in &masses {
        let lat = FermionLattice::new(6, G, m).unwrap();
        let full = truncation_comparison(&lat, Truncation::None).unwrap();
        let hq = truncation_comparison(&lat, Truncation::HqOnly).unwrap();
        devs.push((full.e_electric - hq.e_electric).abs());
    }
    let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
    let scaled: Vec<f64> = devs.iter().zip(&masses).map(|(d, m)| d * m).collect();
    let spread = scaled.iter().cloned().fold(0.0, f64::max) / scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let upper = scaled.iter().all(|&s| s <= 2.0 * scaled[0]);
    Verdict::new(
        decreasing && spread <= 2.0,
        format!(
            "deviation {:.3e} {:.3e} {:.3e} (decreasing: {decreasing}); deviation*m {:.3e} {:.3e} {:.3e}, \
             spread {spread:.1} (limit 2; bounded above by 2x the m=2 value: {upper})",
            devs[0], devs[1], devs[2], scaled[0], scaled[1], scaled[2]
        ),
    )
}

fn speed_of_light(shared: &mut Shared) -> Verdict {
    let band = shared.spectrum20().physical_band();
    match fit_dispersion(&band, DEFAULT_WINDOW) {
        Ok(fit) => Verdict::new(
            (fit.c - 0.521).abs() <= 0.005,
            format!(
                "c = {:.5} from {} points (|p| <= {}), E0 = {:.5}; target 0.521 +- 0.005",
                fit.c, fit.n_points, fit.window, fit.e0
            ),
        ),
        Err(e) => Verdict::new(false, format!("fit failed: {e}")),
    }
}

struct TableScore {
    label: &'static str,
    params: VqeParams,
    bad: Vec<String>,
    worst: (f64, f64, usize),
    spot: f64,
}

fn score_table(label: &'static str, params: VqeParams) -> TableScore {
    let spec = LatticeSpec::periodic(12, G, M).unwrap();
    let plan = TrotterPlan::new(0.5, 26).unwrap();
    let ts = evolve_string(&spec, &[6, 7, 8], &params, &plan, &all_meson_pairs(&spec), true).unwrap();
    let mut worst = (0.0, 0.0, 0usize);
    let mut bad = Vec::new();
    for row in &fixtures::qubits12() {
        let step = (row.t / plan.dt).round() as usize;
        let d = ts.values[step][row.x] - row.classical_value;
        if d.abs() > worst.0 {
            worst = (d.abs(), row.t, row.x);
        }
        if d.abs() > 0.005 {
            bad.push(format!("(t={}, x={}: {:+.4})", row.t, row.x, d));
        }
    }
    TableScore {
        label,
        params,
        bad,
        worst,
        spot: ts.values[2][5],
    }
}

fn listed(cells: &[String]) -> String {
    if cells.len() <= 5 {
        cells.join(" ")
    } else {
        format!("{} ...", cells[..5].join(" "))
    }
}

// The table's source does not say whether its angles were optimized at L=6
// or extrapolated in L, so both are scored.
fn table_regression(shared: &mut Shared) -> Verdict {
    let cells = fixtures::qubits12().len();
    let report = ScanReport::new(shared.scan().to_vec());
    let mut scores = vec![score_table("optimized at L=6", shared.theta_at(6))];
    if let (Some(f0), Some(f1)) = (&report.theta0_fit, &report.theta1_fit) {
        scores.push(score_table(
            "extrapolated from L=2..8",
            VqeParams::manual(f0.asymptote, f1.asymptote),
        ));
    }
    let detail = scores
        .iter()
        .map(|s| {
            format!(
                "theta = ({:.6}, {:.6}) {}: {} of {cells} cells outside +-0.005 {}; max |diff| {:.4} at t={}, x={}; \
                 t=1, x=5 gives {:.4} (table 0.9861)",
                s.params.theta0,
                s.params.theta1,
                s.label,
                s.bad.len(),
                listed(&s.bad),
                s.worst.0,
                s.worst.1,
                s.worst.2,
                s.spot
            )
        })
        .collect::<Vec<_>>()
        .join(" | ");
    Verdict::new(scores.iter().any(|s| s.bad.is_empty()), detail)
}

fn single_meson(shared: &mut Shared) -> Verdict {
    let params = shared.theta_at(8);
    let spec = LatticeSpec::periodic(20, G, M).unwrap();
    let plan = TrotterPlan::new(0.5, 40).unwrap();
    let obs = [ObservableKind::TotalOccupation, ObservableKind::TotalMesonPair];
    let ts = evolve_string(&spec, &[10], &params, &plan, &obs, true).unwrap();
    let range = |i: usize| {
        ts.values
            .iter()
            .map(|r| r[i])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (p_lo, p_hi) = range(0);
    let (m_lo, m_hi) = range(1);
    Verdict::new(
        p_lo >= 0.85 && p_hi <= 1.15 && m_lo >= 1.7 && m_hi <= 2.3,
        format!(
            "over t in [0, 20]: sum P1 in [{p_lo:.4}, {p_hi:.4}] (allowed [0.85, 1.15]), \
             sum meson pairs in [{m_lo:.4}, {m_hi:.4}] (allowed [1.7, 2.3])"
        ),
    )
}

fn prepared_energy(spec: &LatticeSpec, params: &VqeParams, init: &StateVector) -> f64 {
    let h = QubitHamiltonian::new(spec).unwrap().to_sparse();
    let psi = apply_ansatz(params, init, spec, Direction::Forward).unwrap();
    h.expectation(&psi)
}

fn meson_distribution_check(shared: &mut Shared) -> Verdict {
    let e_meson = shared
        .spectrum20()
        .physical_band()
        .iter()
        .map(|&(_, e)| e)
        .fold(f64::INFINITY, f64::min);
    let params = shared.theta_at(8);
    let spec = LatticeSpec::periodic(20, G, M).unwrap();
    let string = [9, 10, 11];
    let e_vac = prepared_energy(&spec, &params, &StateVector::basis(spec.dim(), 0).unwrap());
    let e_state = prepared_energy(&spec, &params, &string_basis_state(&string, &spec).unwrap()) - e_vac;
    let n_max = n_max_from_energy(e_state, e_meson).unwrap();

    // the distribution over one and two mesons
    let mut run = StringEvolution::new(spec, string.to_vec(), params, TrotterPlan::new(0.5, 40).unwrap());
    run.frame = MeasurementFrame::Undone;
    run.moment_order = 1;
    let ts = run.run().unwrap();
    let mut worst_total: f64 = 0.0;
    let mut p2_range = (f64::INFINITY, f64::NEG_INFINITY);
    for mom in &ts.moments {
        let d = meson_distribution(mom, 2).unwrap();
        worst_total = worst_total.max((d.total() - 1.0).abs());
        p2_range = (p2_range.0.min(d.p(2)), p2_range.1.max(d.p(2)));
    }

    // synthetic round trip
    let mut worst_round: f64 = 0.0;
    for n in 2..=4 {
        for shift in 0..3 {
            let raw: Vec<f64> = (1..=n).map(|k| 1.0 + ((k * 7 + shift * 3) % 5) as f64).collect();
            let sum: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|r| r / sum).collect();
            let moments: Vec<f64> = (1..n)
                .map(|k| probs.iter().enumerate().map(|(j, p)| p * ((j + 1) as f64).powi(k as i32)).sum())
                .collect();
            let d = meson_distribution(&moments, n).unwrap();
            for (a, b) in d.probabilities.iter().zip(&probs) {
                worst_round = worst_round.max((a - b).abs());
            }
        }
    }
    Verdict::new(
        n_max == 2 && worst_total < 1e-9 && worst_round < 1e-10,
        format!(
            "string energy {e_state:.4}, meson mass {e_meson:.4}, ratio {:.3} -> N_max = {n_max} (expected 2); \
             with N_max = 2: max |P(1)+P(2)-1| = {worst_total:.1e}, P(2) in [{:.4}, {:.4}]; \
             synthetic round trip error {worst_round:.1e}",
            e_state / e_meson,
            p2_range.0,
            p2_range.1
        ),
    )
}

fn circuit_depths() -> Verdict {
    let params = VqeParams::manual(0.18, 0.1);
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, k, want) in [(12, 26, 428), (12, 12, 204), (104, 10, 172)] {
        let spec = LatticeSpec::periodic(n, G, M).unwrap();
        let plan = TrotterPlan::new(0.5, k).unwrap();
        let depth = compile_full_evolution(&params, &plan, &spec, true).unwrap().metrics().cnot_depth;
        ok &= depth == want;
        parts.push(format!("{n}q/{k} steps: {depth} (want {want})"));
    }
    let spec = LatticeSpec::periodic(104, G, M).unwrap();
    let report = convention_report(&params, &TrotterPlan::new(0.5, 10).unwrap(), &spec).unwrap();
    let counts: Vec<String> = report
        .iter()
        .map(|r| {
            let mark = if r.metrics.cnot_count == 8944 { " = 8944" } else { "" };
            format!("{} {}{mark}", r.convention.name(), r.metrics.cnot_count)
        })
        .collect();
    let canonical = report
        .iter()
        .find(|r| r.convention == CountingConvention::Canonical)
        .map(|r| r.metrics.cnot_count);
    Verdict::new(
        ok,
        format!(
            "{}; 104q CNOT counts: {} (canonical matches 8944: {})",
            parts.join(", "),
            counts.join(", "),
            canonical == Some(8944)
        ),
    )
}

fn gate_cross_check(shared: &mut Shared) -> Verdict {
    let params = shared.theta_at(6);
    let spec = LatticeSpec::periodic(12, G, M).unwrap();
    let plan = TrotterPlan::new(0.5, 4).unwrap();
    let init = string_basis_state(&[6, 7, 8], &spec).unwrap();
    let circ = compile_full_evolution(&params, &plan, &spec, true).unwrap();
    let gate = simulate_circuit(&circ, &init).unwrap();
    let prepared = apply_ansatz(&params, &init, &spec, Direction::Forward).unwrap();
    let evolved = trotter_evolve(&prepared, &spec, &plan).unwrap();
    let expect = apply_ansatz(&params, &evolved, &spec, Direction::Inverse).unwrap();
    let d = gate.max_abs_diff(&expect);
    Verdict::new(
        d <= 1e-9,
        format!("{} gates, max amplitude difference {d:.1e}", circ.len()),
    )
}

fn trotter_order(shared: &mut Shared) -> Verdict {
    let params = shared.theta_at(4);
    let spec = LatticeSpec::periodic(8, G, M).unwrap();
    let h = QubitHamiltonian::new(&spec).unwrap();
    let init = string_basis_state(&[3, 4], &spec).unwrap();
    let psi = apply_ansatz(&params, &init, &spec, Direction::Forward).unwrap();
    // |H| <= sum of term norms
    let bound = spec.n_links as f64 * (FRAC_1_SQRT_2 + spec.electric_coefficient() + spec.m);
    let exact = exact_evolution(&h, &psi, 2.0, bound).unwrap();
    let err = |dt: f64, n: usize| {
        let out = trotter_evolve(&psi, &spec, &TrotterPlan::new(dt, n).unwrap()).unwrap();
        out.amplitudes()
            .iter()
            .zip(exact.amplitudes())
            .map(|(a, b): (&Complex64, &Complex64)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let (coarse, fine) = (err(0.5, 4), err(0.25, 8));
    let ratio = coarse / fine;
    Verdict::new(
        (3.0..=5.0).contains(&ratio),
        format!("error {coarse:.3e} at dt=0.5, {fine:.3e} at dt=0.25, ratio {ratio:.3} (allowed [3, 5])"),
    )
}

fn vqe_scaling(shared: &mut Shared) -> Verdict {
    let rows = shared.scan().to_vec();
    let report = ScanReport::new(rows.clone());
    let monotone = rows.windows(2).filter(|w| w[0].l > 2).all(|w| w[1].o_star < w[0].o_star);
    let o: Vec<String> = rows.iter().map(|r| format!("{:.6}", r.o_star)).collect();
    let (Some(f0), Some(f1)) = (report.theta0_fit, report.theta1_fit) else {
        return Verdict::new(false, "exponential fits failed");
    };
    let mut agree = true;
    let mut eff = Vec::new();
    for row in &report.theta_eff {
        for (name, value, fit) in [("theta0", row.theta0_eff, &f0), ("theta1", row.theta1_eff, &f1)] {
            match value {
                Some(v) => {
                    let z = (v - fit.asymptote).abs() / fit.asymptote_err;
                    agree &= z <= 1.0;
                    eff.push(format!("L{} {name} {v:.6} ({z:.1} SE)", row.l));
                }
                None => {
                    agree = false;
                    eff.push(format!("L{} {name} undefined", row.l));
                }
            }
        }
    }
    Verdict::new(
        rows.len() == 7 && monotone && agree,
        format!(
            "O* = [{}] (decreasing for L>2: {monotone}); fit asymptotes theta0 {:.6} +- {:.1e}, theta1 {:.6} +- {:.1e}; \
             theta_eff {}",
            o.join(", "),
            f0.asymptote,
            f0.asymptote_err,
            f1.asymptote,
            f1.asymptote_err,
            eff.join(", ")
        ),
    )
}

fn main() {
    let mut shared = Shared::default();
    type Check<'a> = Box<dyn FnMut(&mut Shared) -> Verdict + 'a>;
    let checks: Vec<(usize, &str, Check)> = vec![
        (1, "hopping matrix elements", Box::new(|_| matrix_elements())),
        (2, "truncation equivalence", Box::new(|_| truncation_equivalence())),
        (3, "heavy-quark convergence", Box::new(|_| heavy_quark_convergence())),
        (4, "speed of light", Box::new(speed_of_light)),
        (5, "12-qubit table regression", Box::new(table_regression)),
        (6, "single-meson stability", Box::new(single_meson)),
        (7, "meson distribution", Box::new(meson_distribution_check)),
        (8, "circuit depth", Box::new(|_| circuit_depths())),
        (9, "gate-level cross-check", Box::new(gate_cross_check)),
        (10, "Trotter order", Box::new(trotter_order)),
        (11, "VQE scaling", Box::new(vqe_scaling)),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, name, mut check) in checks {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let v = check(&mut shared);
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {id:>2} ({name}, {:.1}s): {}",
            start.elapsed().as_secs_f64(),
            v.detail
        );
        if !v.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
