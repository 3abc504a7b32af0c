//! Circuits for the ansatz, the diagonal step and the hopping layers.
//!
//! A hopping triple `(a, b, c)` (middle `b`) implements
//! `exp(-i X_b [alpha (1 + Z_a Z_c) + beta (Z_a + Z_c)])` with
//! `alpha = (phi0 + phi1) / 4` and `beta = (phi0 - phi1) / 4`, which equals
//! `exp(-i (phi0 P0 X_b P0 + phi1 P1 X_b P1))`. In the Hadamard frame of `b`
//! this is a phase polynomial visited by the CNOT cycle `a, c, a, c`. The
//! upper variant starts with a rotation and ends on a CNOT, the lower one
//! starts on a CNOT and ends with a rotation, so an upper layer followed by a
//! lower layer on the other sublattice meets at `CX(b, b-1); H; H; CX(b-1, b)`
//! junctions that cancel.

use serde::{Deserialize, Serialize};

use super::peephole::peephole;
use super::{CircuitMetrics, Gate, GateCircuit};
use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeSpec, Sublattice, FRAC_1_2SQRT2};
use crate::trotter::TrotterPlan;
use crate::vqe::{Direction, VqeParams};
use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Upper,
    Lower,
}

fn check_ring(spec: &LatticeSpec) -> Result<()> {
    if spec.boundary != Boundary::Periodic || !spec.n_links.is_multiple_of(2) || spec.n_links < 4 {
        return Err(Error::InvalidLattice(format!(
            "circuits need a periodic lattice with an even number (>= 4) of links, got {} {:?}",
            spec.n_links, spec.boundary
        )));
    }
    Ok(())
}

/// `exp(-i sum_b (phi0 P0 X_b P0 + phi1 P1 X_b P1))` over middles `b` in
/// `sublattice`.
pub fn compile_kinetic_layer(
    phi0: f64,
    phi1: f64,
    sublattice: Sublattice,
    variant: Variant,
    spec: &LatticeSpec,
) -> Result<GateCircuit> {
    check_ring(spec)?;
    let n = spec.n_links;
    let alpha = 0.5 * (phi0 + phi1);
    let beta = 0.5 * (phi0 - phi1);
    let triples: Vec<(usize, usize, usize)> = (0..n)
        .filter(|&b| sublattice.contains(b))
        .map(|b| ((b + n - 1) % n, b, (b + 1) % n))
        .collect();
    let mut gates: Vec<Vec<Gate>> = vec![Vec::new(); 10];
    for &(a, b, c) in &triples {
        let seq = match variant {
            Variant::Upper => [
                Gate::H(b),
                Gate::rz(b, alpha),
                Gate::cx(a, b),
                Gate::rz(b, beta),
                Gate::cx(c, b),
                Gate::rz(b, alpha),
                Gate::cx(a, b),
                Gate::rz(b, beta),
                Gate::cx(c, b),
                Gate::H(b),
            ],
            Variant::Lower => [
                Gate::H(b),
                Gate::cx(a, b),
                Gate::rz(b, beta),
                Gate::cx(c, b),
                Gate::rz(b, alpha),
                Gate::cx(a, b),
                Gate::rz(b, beta),
                Gate::cx(c, b),
                Gate::rz(b, alpha),
                Gate::H(b),
            ],
        };
        for (slot, g) in gates.iter_mut().zip(seq) {
            slot.push(g);
        }
    }
    // moment by moment, so CNOTs of neighboring triples interleave
    Ok(GateCircuit::from_parts(n, gates.concat(), 0.0))
}

/// Upper layer on `first` followed by a lower layer on the other sublattice,
/// with the junction CNOTs cancelled.
pub fn compile_kinetic_pair(
    phi0: f64,
    phi1: f64,
    first: Sublattice,
    spec: &LatticeSpec,
) -> Result<GateCircuit> {
    let mut c = compile_kinetic_layer(phi0, phi1, first, Variant::Upper, spec)?;
    c.append(&compile_kinetic_layer(
        phi0,
        phi1,
        first.other(),
        Variant::Lower,
        spec,
    )?)?;
    Ok(peephole(&c))
}

/// `exp(-i dt (H_E + H_m))` as single-qubit `Rz` gates and `ZZ` phases on
/// even bonds, then odd bonds.
pub fn compile_diagonal_layer(dt: f64, spec: &LatticeSpec) -> Result<GateCircuit> {
    check_ring(spec)?;
    let n = spec.n_links;
    let e = spec.electric_coefficient();
    let mut c = GateCircuit::new(n);
    // c n = (c/2)(1 - Z) and m (1 - Z Z)/2 per bond
    c.add_phase(-dt * (0.5 * e * n as f64 + 0.5 * spec.m * n as f64));
    let mut gates = Vec::new();
    for l in 0..n {
        gates.push(Gate::rz(l, -e * dt));
    }
    for parity in [Sublattice::Even, Sublattice::Odd] {
        let bonds: Vec<(usize, usize)> = (0..n)
            .filter(|&l| parity.contains(l))
            .map(|l| (l, (l + 1) % n))
            .collect();
        gates.extend(bonds.iter().map(|&(l, r)| Gate::cx(l, r)));
        gates.extend(bonds.iter().map(|&(_, r)| Gate::rz(r, -spec.m * dt)));
        gates.extend(bonds.iter().map(|&(l, r)| Gate::cx(l, r)));
    }
    for g in gates {
        c.push(g)?;
    }
    Ok(c)
}

fn s_layer(n: usize, dagger: bool) -> GateCircuit {
    let gates = (0..n)
        .map(|q| if dagger { Gate::Sdg(q) } else { Gate::S(q) })
        .collect();
    GateCircuit::from_parts(n, gates, 0.0)
}

/// The two-layer ansatz as S-conjugated hopping layers: `Y = S X S^dag`, so
/// `exp(i theta P Y P) = S exp(-i (-theta) P X P) S^dag`.
pub fn compile_state_prep(
    params: &VqeParams,
    spec: &LatticeSpec,
    direction: Direction,
) -> Result<GateCircuit> {
    check_ring(spec)?;
    let n = spec.n_links;
    let (first, sign) = match direction {
        Direction::Forward => (Sublattice::Even, -1.0),
        Direction::Inverse => (Sublattice::Odd, 1.0),
    };
    let mut c = s_layer(n, true);
    c.append(&compile_kinetic_pair(
        sign * params.theta0,
        sign * params.theta1,
        first,
        spec,
    )?)?;
    c.append(&s_layer(n, false))?;
    Ok(peephole(&c))
}

/// What goes into a compiled evolution circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileOptions {
    /// Append the inverse state preparation before measurement.
    pub include_measure_undo: bool,
    /// Fuse the adjacent half-step hopping layers of consecutive Trotter
    /// steps into one full-step layer.
    pub merge_steps: bool,
    /// Run the peephole pass.
    pub peephole: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            include_measure_undo: true,
            merge_steps: false,
            peephole: true,
        }
    }
}

/// State preparation, `plan.n_steps` second-order Trotter steps and
/// optionally the undo of the state preparation.
pub fn compile_evolution(
    params: &VqeParams,
    plan: &TrotterPlan,
    spec: &LatticeSpec,
    opts: &CompileOptions,
) -> Result<GateCircuit> {
    check_ring(spec)?;
    let n = spec.n_links;
    let half = plan.dt / 2.0;
    let (h0, h1) = (half * FRAC_1_SQRT_2, half * FRAC_1_2SQRT2);
    let (f0, f1) = (2.0 * h0, 2.0 * h1);
    let layer = |p0: f64, p1: f64, s: Sublattice, v: Variant| compile_kinetic_layer(p0, p1, s, v, spec);
    let (even, odd) = (Sublattice::Even, Sublattice::Odd);

    let mut c = GateCircuit::new(n);
    c.append(&raw_state_prep(params, spec, Direction::Forward)?)?;
    let diag = compile_diagonal_layer(plan.dt, spec)?;
    for step in 0..plan.n_steps {
        let merged_in = opts.merge_steps && step > 0;
        let merged_out = opts.merge_steps && step + 1 < plan.n_steps;
        if !merged_in {
            c.append(&layer(h0, h1, even, Variant::Upper)?)?;
        }
        c.append(&layer(h0, h1, odd, Variant::Lower)?)?;
        c.append(&diag)?;
        c.append(&layer(h0, h1, odd, Variant::Upper)?)?;
        if merged_out {
            c.append(&layer(f0, f1, even, Variant::Lower)?)?;
        } else {
            c.append(&layer(h0, h1, even, Variant::Lower)?)?;
        }
    }
    if opts.include_measure_undo {
        c.append(&raw_state_prep(params, spec, Direction::Inverse)?)?;
    }
    Ok(if opts.peephole { peephole(&c) } else { c })
}

fn raw_state_prep(params: &VqeParams, spec: &LatticeSpec, direction: Direction) -> Result<GateCircuit> {
    let n = spec.n_links;
    let (first, sign) = match direction {
        Direction::Forward => (Sublattice::Even, -1.0),
        Direction::Inverse => (Sublattice::Odd, 1.0),
    };
    let (t0, t1) = (sign * params.theta0, sign * params.theta1);
    let mut c = s_layer(n, true);
    c.append(&compile_kinetic_layer(t0, t1, first, Variant::Upper, spec)?)?;
    c.append(&compile_kinetic_layer(t0, t1, first.other(), Variant::Lower, spec)?)?;
    c.append(&s_layer(n, false))?;
    Ok(c)
}

/// The canonical circuit: unmerged steps, peephole applied.
pub fn compile_full_evolution(
    params: &VqeParams,
    plan: &TrotterPlan,
    spec: &LatticeSpec,
    include_measure_undo: bool,
) -> Result<GateCircuit> {
    compile_evolution(
        params,
        plan,
        spec,
        &CompileOptions {
            include_measure_undo,
            ..CompileOptions::default()
        },
    )
}

/// Ways of counting the cost of an evolution circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountingConvention {
    /// Preparation, unmerged steps and undo, junction CNOTs cancelled.
    Canonical,
    /// As canonical, without any peephole cancellation.
    NoCancellation,
    /// As canonical, without preparation and undo.
    EvolutionOnly,
    /// As canonical, with consecutive half-step layers fused.
    MergedSteps,
}

impl CountingConvention {
    pub const ALL: [CountingConvention; 4] = [
        CountingConvention::Canonical,
        CountingConvention::NoCancellation,
        CountingConvention::EvolutionOnly,
        CountingConvention::MergedSteps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CountingConvention::Canonical => "canonical",
            CountingConvention::NoCancellation => "no_cancellation",
            CountingConvention::EvolutionOnly => "evolution_only",
            CountingConvention::MergedSteps => "merged_steps",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConventionMetrics {
    pub convention: CountingConvention,
    pub metrics: CircuitMetrics,
}

/// Metrics of the evolution circuit under every counting convention.
pub fn convention_report(
    params: &VqeParams,
    plan: &TrotterPlan,
    spec: &LatticeSpec,
) -> Result<Vec<ConventionMetrics>> {
    let canonical = CompileOptions::default();
    let mut out = Vec::new();
    for convention in CountingConvention::ALL {
        let metrics = match convention {
            CountingConvention::Canonical => {
                compile_evolution(params, plan, spec, &canonical)?.metrics()
            }
            CountingConvention::NoCancellation => {
                let opts = CompileOptions {
                    peephole: false,
                    ..canonical
                };
                compile_evolution(params, plan, spec, &opts)?.metrics()
            }
            CountingConvention::EvolutionOnly => {
                let full = compile_evolution(params, plan, spec, &canonical)?.metrics();
                let prep = compile_state_prep(params, spec, Direction::Forward)?.metrics();
                let undo = compile_state_prep(params, spec, Direction::Inverse)?.metrics();
                // with no steps prep and undo cancel, leaving less than either
                CircuitMetrics {
                    cnot_count: full.cnot_count.saturating_sub(prep.cnot_count + undo.cnot_count),
                    cnot_depth: full.cnot_depth.saturating_sub(prep.cnot_depth + undo.cnot_depth),
                    total_gates: full.total_gates.saturating_sub(prep.total_gates + undo.total_gates),
                    depth: full.depth.saturating_sub(prep.depth + undo.depth),
                }
            }
            CountingConvention::MergedSteps => {
                let opts = CompileOptions {
                    merge_steps: true,
                    ..canonical
                };
                compile_evolution(params, plan, spec, &opts)?.metrics()
            }
        };
        out.push(ConventionMetrics {
            convention,
            metrics,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::simulate_circuit;
    use super::*;
    use crate::lattice::{KineticTerm, StateVector};
    use crate::trotter::{apply_kinetic_layer, trotter_evolve};
    use crate::vqe::{apply_ansatz, magnus_init};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1 << n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        StateVector::normalized(amps).unwrap()
    }

    fn ring(n: usize) -> LatticeSpec {
        LatticeSpec::periodic(n, 2.0, 1.0).unwrap()
    }

    #[test]
    fn kinetic_layer_matches_exact_exponential() {
        let spec = ring(8);
        for (sub, variant, seed) in [
            (Sublattice::Even, Variant::Upper, 1),
            (Sublattice::Odd, Variant::Lower, 2),
        ] {
            // apply_kinetic_layer uses the Hamiltonian weights, so pick phi
            // to match tau
            let tau = 0.37;
            let c = compile_kinetic_layer(tau * FRAC_1_SQRT_2, tau * FRAC_1_2SQRT2, sub, variant, &spec)
                .unwrap();
            let psi = random_state(8, seed);
            let mut exact = psi.clone();
            apply_kinetic_layer(exact.amplitudes_mut(), &KineticTerm::sublattice(&spec, sub), tau);
            let d = simulate_circuit(&c, &psi).unwrap().max_abs_diff(&exact);
            assert!(d < 1e-12, "{d}");
        }
    }

    #[test]
    fn kinetic_pair_depth_is_six() {
        for n in [6, 8, 12, 20] {
            let c = compile_kinetic_pair(0.3, -0.7, Sublattice::Even, &ring(n)).unwrap();
            let m = c.metrics();
            assert_eq!(m.cnot_depth, 6, "n = {n}");
            assert_eq!(m.cnot_count, 3 * n);
        }
        let spec = ring(8);
        let c = compile_kinetic_pair(0.3, -0.7, Sublattice::Odd, &spec).unwrap();
        let mut raw = compile_kinetic_layer(0.3, -0.7, Sublattice::Odd, Variant::Upper, &spec).unwrap();
        raw.append(&compile_kinetic_layer(0.3, -0.7, Sublattice::Even, Variant::Lower, &spec).unwrap())
            .unwrap();
        let psi = random_state(8, 3);
        let d = simulate_circuit(&c, &psi)
            .unwrap()
            .max_abs_diff(&simulate_circuit(&raw, &psi).unwrap());
        assert!(d < 1e-12);
    }

    #[test]
    fn zero_angles_compile_to_identity() {
        let spec = ring(8);
        for v in [Variant::Upper, Variant::Lower] {
            let c = compile_kinetic_layer(0.0, 0.0, Sublattice::Even, v, &spec).unwrap();
            assert!(peephole(&c).is_empty());
        }
        assert!(peephole(&compile_diagonal_layer(0.0, &spec).unwrap()).is_empty());
    }

    #[test]
    fn diagonal_layer() {
        let spec = LatticeSpec::periodic(10, 1.3, 0.8).unwrap();
        let dt = 0.45;
        let c = compile_diagonal_layer(dt, &spec).unwrap();
        let m = c.metrics();
        assert_eq!((m.cnot_depth, m.cnot_count), (4, 20));
        let psi = random_state(10, 5);
        let exact: Vec<Complex64> = psi
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(b, a)| a * Complex64::from_polar(1.0, -dt * spec.diagonal_energy(b)))
            .collect();
        let d = simulate_circuit(&c, &psi)
            .unwrap()
            .max_abs_diff(&StateVector::from_amplitudes(exact));
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn state_prep_matches_ansatz() {
        let spec = ring(8);
        let params = magnus_init(2.0, 1.0).unwrap();
        let psi = random_state(8, 6);
        for dir in [Direction::Forward, Direction::Inverse] {
            let c = compile_state_prep(&params, &spec, dir).unwrap();
            assert_eq!(c.metrics().cnot_depth, 6);
            let d = simulate_circuit(&c, &psi)
                .unwrap()
                .max_abs_diff(&apply_ansatz(&params, &psi, &spec, dir).unwrap());
            assert!(d < 1e-10, "{dir:?} {d}");
        }
        let f = compile_state_prep(&params, &spec, Direction::Forward).unwrap();
        let b = compile_state_prep(&params, &spec, Direction::Inverse).unwrap();
        let back = simulate_circuit(&b, &simulate_circuit(&f, &psi).unwrap()).unwrap();
        assert!(back.max_abs_diff(&psi) < 1e-10);
    }

    #[test]
    fn evolution_matches_trotter_and_depth_formula() {
        let spec = ring(8);
        let params = VqeParams::manual(0.18, 0.1);
        let plan = TrotterPlan::new(0.5, 3).unwrap();
        let psi = random_state(8, 7);
        let mut expect = apply_ansatz(&params, &psi, &spec, Direction::Forward).unwrap();
        expect = trotter_evolve(&expect, &spec, &plan).unwrap();
        expect = apply_ansatz(&params, &expect, &spec, Direction::Inverse).unwrap();
        for merge_steps in [false, true] {
            for peep in [false, true] {
                let opts = CompileOptions {
                    include_measure_undo: true,
                    merge_steps,
                    peephole: peep,
                };
                let c = compile_evolution(&params, &plan, &spec, &opts).unwrap();
                let d = simulate_circuit(&c, &psi).unwrap().max_abs_diff(&expect);
                assert!(d < 1e-10, "merge {merge_steps} peephole {peep}: {d}");
            }
        }
        for k in 0..5 {
            let plan = TrotterPlan::new(0.5, k).unwrap();
            let c = compile_full_evolution(&params, &plan, &spec, true).unwrap();
            assert_eq!(c.metrics().cnot_depth, 16 * k + 12);
        }
    }

    #[test]
    fn conventions_are_ordered() {
        let spec = ring(12);
        let plan = TrotterPlan::new(0.5, 4).unwrap();
        let r = convention_report(&VqeParams::manual(0.18, 0.1), &plan, &spec).unwrap();
        let get = |c: CountingConvention| r.iter().find(|x| x.convention == c).unwrap().metrics;
        let canon = get(CountingConvention::Canonical);
        assert!(get(CountingConvention::NoCancellation).cnot_count > canon.cnot_count);
        assert!(get(CountingConvention::EvolutionOnly).cnot_count < canon.cnot_count);
        assert!(get(CountingConvention::MergedSteps).cnot_depth < canon.cnot_depth);
    }

    #[test]
    fn rejects_bad_lattices() {
        let open = LatticeSpec::open(8, 2.0, 1.0).unwrap();
        assert!(compile_diagonal_layer(0.5, &open).is_err());
        assert!(compile_kinetic_layer(0.1, 0.1, Sublattice::Even, Variant::Upper, &open).is_err());
    }
}
