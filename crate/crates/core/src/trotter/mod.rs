//! Second-order Trotter evolution of strings and the observables read off
//! along the way.

mod exact;
mod meson;

pub use exact::exact_evolution;
pub use meson::{
    meson_distribution, meson_number, moments, moments_from_probabilities, n_max_from_energy, sample_basis, sample_measurement,
    MesonDistribution,
};

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    string_basis_state, KineticTerm, LatticeSpec, ObservableKind, QubitHamiltonian, StateVector,
    Sublattice, FRAC_1_2SQRT2,
};
use crate::vqe::{apply_ansatz_in_place, Direction, VqeParams};

/// Default time step.
pub const DEFAULT_DT: f64 = 0.5;

/// Step size and count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrotterPlan {
    pub dt: f64,
    pub n_steps: usize,
}

impl TrotterPlan {
    pub fn new(dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        Ok(TrotterPlan { dt, n_steps })
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.n_steps as f64
    }
}

/// `exp(-i tau H_K)` restricted to hopping terms whose middle link lies in
/// `middles`. These terms commute, so each is applied as its own exact
/// two-level rotation.
pub fn apply_kinetic_layer(amps: &mut [Complex64], terms: &[KineticTerm], tau: f64) {
    let (s0, c0) = (tau * FRAC_1_SQRT_2).sin_cos();
    let (s1, c1) = (tau * FRAC_1_2SQRT2).sin_cos();
    for t in terms {
        let bit = 1usize << t.middle;
        for i in 0..amps.len() {
            if i & bit != 0 {
                continue;
            }
            let (s, c) = match t.neighbors(i) {
                (false, false) => (s0, c0),
                (true, true) => (s1, c1),
                _ => continue,
            };
            let (a, b) = (amps[i], amps[i | bit]);
            amps[i] = a * c - Complex64::new(0.0, s) * b;
            amps[i | bit] = b * c - Complex64::new(0.0, s) * a;
        }
    }
}

/// Precomputed pieces of one Trotter step.
#[derive(Debug, Clone)]
pub struct TrotterStepper {
    spec: LatticeSpec,
    plan: TrotterPlan,
    even: Vec<KineticTerm>,
    odd: Vec<KineticTerm>,
    phases: Vec<Complex64>,
}

impl TrotterStepper {
    pub fn new(spec: &LatticeSpec, plan: TrotterPlan) -> Result<Self> {
        let h = QubitHamiltonian::new(spec)?;
        let phases = h
            .diagonal()
            .iter()
            .map(|&d| Complex64::from_polar(1.0, -plan.dt * d))
            .collect();
        Ok(TrotterStepper {
            spec: *spec,
            plan,
            even: KineticTerm::sublattice(spec, Sublattice::Even),
            odd: KineticTerm::sublattice(spec, Sublattice::Odd),
            phases,
        })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn plan(&self) -> &TrotterPlan {
        &self.plan
    }

    /// Half steps on even-middle then odd-middle hopping, the full diagonal
    /// step, then the hopping halves in reverse.
    pub fn step_in_place(&self, amps: &mut [Complex64]) {
        let half = self.plan.dt / 2.0;
        apply_kinetic_layer(amps, &self.even, half);
        apply_kinetic_layer(amps, &self.odd, half);
        for (a, p) in amps.iter_mut().zip(&self.phases) {
            *a *= p;
        }
        apply_kinetic_layer(amps, &self.odd, half);
        apply_kinetic_layer(amps, &self.even, half);
    }
}

/// One Trotter step.
pub fn trotter_step(psi: &StateVector, spec: &LatticeSpec, plan: &TrotterPlan) -> Result<StateVector> {
    trotter_evolve(psi, spec, &TrotterPlan::new(plan.dt, 1)?)
}

/// `n_steps` Trotter steps.
pub fn trotter_evolve(psi: &StateVector, spec: &LatticeSpec, plan: &TrotterPlan) -> Result<StateVector> {
    if psi.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            actual: psi.dim(),
        });
    }
    let stepper = TrotterStepper::new(spec, *plan)?;
    let mut amps = psi.amplitudes().to_vec();
    for _ in 0..plan.n_steps {
        stepper.step_in_place(&mut amps);
    }
    Ok(StateVector::from_amplitudes(amps))
}

/// Basis in which observables are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementFrame {
    /// After undoing the state preparation, where excited links mark mesons.
    #[default]
    Undone,
    /// Directly on the evolved state.
    Lab,
}

/// Everything needed to evolve one string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StringEvolution {
    pub spec: LatticeSpec,
    /// Contiguous links excited before preparation; may be empty.
    pub string: Vec<usize>,
    pub params: VqeParams,
    pub plan: TrotterPlan,
    pub observables: Vec<ObservableKind>,
    pub subtract_vacuum: bool,
    pub frame: MeasurementFrame,
    /// Highest power of the meson number recorded at each step; 0 for none.
    pub moment_order: usize,
}

/// Observable values at every step, including `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub observables: Vec<ObservableKind>,
    /// `values[step][i]` for `observables[i]`.
    pub values: Vec<Vec<f64>>,
    /// Meson-number moments of the string state, `moments[step][k - 1]`.
    pub moments: Vec<Vec<f64>>,
}

impl TimeSeries {
    /// Value of one observable at one step.
    pub fn value(&self, step: usize, kind: ObservableKind) -> Option<f64> {
        let i = self.observables.iter().position(|&k| k == kind)?;
        self.values.get(step).map(|row| row[i])
    }

    /// `(t, observable, value)` triples in step-major order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, ObservableKind, f64)> + '_ {
        self.times.iter().zip(&self.values).flat_map(move |(&t, row)| {
            self.observables.iter().zip(row).map(move |(&k, &v)| (t, k, v))
        })
    }
}

impl StringEvolution {
    pub fn new(spec: LatticeSpec, string: Vec<usize>, params: VqeParams, plan: TrotterPlan) -> Self {
        StringEvolution {
            spec,
            string,
            params,
            plan,
            observables: Vec::new(),
            subtract_vacuum: false,
            frame: MeasurementFrame::Undone,
            moment_order: 0,
        }
    }

    pub fn run(&self) -> Result<TimeSeries> {
        let spec = &self.spec;
        let string_state = if self.string.is_empty() {
            StateVector::basis(spec.dim(), 0)?
        } else {
            string_basis_state(&self.string, spec)?
        };
        let stepper = TrotterStepper::new(spec, self.plan)?;
        let mut psi = self.prepare(string_state)?;
        let mut vac = if self.subtract_vacuum {
            Some(self.prepare(StateVector::basis(spec.dim(), 0)?)?)
        } else {
            None
        };

        let mut series = TimeSeries {
            times: Vec::with_capacity(self.plan.n_steps + 1),
            observables: self.observables.clone(),
            values: Vec::with_capacity(self.plan.n_steps + 1),
            moments: Vec::new(),
        };
        for step in 0..=self.plan.n_steps {
            if step > 0 {
                stepper.step_in_place(&mut psi);
                if let Some(v) = vac.as_mut() {
                    stepper.step_in_place(v);
                }
            }
            let probs = self.measured_probabilities(&psi);
            let mut row = expectations(&probs, &self.observables, spec);
            if let Some(v) = &vac {
                let base = expectations(&self.measured_probabilities(v), &self.observables, spec);
                for (a, b) in row.iter_mut().zip(base) {
                    *a -= b;
                }
            }
            if self.moment_order > 0 {
                series.moments.push(moments_from_probabilities(&probs, spec, self.moment_order));
            }
            series.times.push(step as f64 * self.plan.dt);
            series.values.push(row);
        }
        Ok(series)
    }

    fn prepare(&self, init: StateVector) -> Result<Vec<Complex64>> {
        crate::vqe::apply_ansatz(&self.params, &init, &self.spec, Direction::Forward)
            .map(StateVector::into_amplitudes)
    }

    fn measured_probabilities(&self, amps: &[Complex64]) -> Vec<f64> {
        match self.frame {
            MeasurementFrame::Lab => amps.iter().map(|a| a.norm_sqr()).collect(),
            MeasurementFrame::Undone => {
                let mut undone = amps.to_vec();
                apply_ansatz_in_place(&mut undone, self.spec.n_links, &self.params, Direction::Inverse);
                undone.iter().map(|a| a.norm_sqr()).collect()
            }
        }
    }
}

/// Prepares `U X_S |0>` (and the vacuum when subtracting), evolves both and
/// records the observables at every step.
pub fn evolve_string(
    spec: &LatticeSpec,
    string: &[usize],
    params: &VqeParams,
    plan: &TrotterPlan,
    observables: &[ObservableKind],
    subtract_vacuum: bool,
) -> Result<TimeSeries> {
    let mut run = StringEvolution::new(*spec, string.to_vec(), *params, *plan);
    run.observables = observables.to_vec();
    run.subtract_vacuum = subtract_vacuum;
    run.run()
}

fn expectations(probs: &[f64], kinds: &[ObservableKind], spec: &LatticeSpec) -> Vec<f64> {
    let mut out = vec![0.0; kinds.len()];
    for (bits, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (o, k) in out.iter_mut().zip(kinds) {
            *o += p * k.eigenvalue(bits, spec);
        }
    }
    out
}

/// Every `P0 P1 + P1 P0` pair observable of a lattice.
pub fn all_meson_pairs(spec: &LatticeSpec) -> Vec<ObservableKind> {
    let pairs = match spec.boundary {
        crate::lattice::Boundary::Periodic => spec.n_links,
        crate::lattice::Boundary::Open => spec.n_links - 1,
    };
    (0..pairs).map(ObservableKind::MesonPair).collect()
}

/// Every single-link occupation of a lattice.
pub fn all_link_occupations(spec: &LatticeSpec) -> Vec<ObservableKind> {
    (0..spec.n_links).map(ObservableKind::LinkOccupation).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::apply_operator;

    fn spec(n: usize) -> LatticeSpec {
        LatticeSpec::periodic(n, 2.0, 1.0).unwrap()
    }

    fn random_state(dim: usize) -> StateVector {
        let amps = (0..dim)
            .map(|i| Complex64::new((i as f64 * 0.913).sin(), (i as f64 * 1.37 + 0.2).cos()))
            .collect();
        StateVector::normalized(amps).unwrap()
    }

    fn norm_bound(spec: &LatticeSpec) -> f64 {
        let h = QubitHamiltonian::new(spec).unwrap();
        h.diagonal().iter().fold(0.0f64, |a, d| a.max(d.abs())) + spec.n_links as f64 * FRAC_1_SQRT_2
    }

    #[test]
    fn zero_steps_is_identity_and_norm_is_kept() {
        let s = spec(8);
        let psi = random_state(256);
        let out = trotter_evolve(&psi, &s, &TrotterPlan::new(0.5, 0).unwrap()).unwrap();
        assert_eq!(out, psi);
        let out = trotter_evolve(&psi, &s, &TrotterPlan::new(0.5, 40).unwrap()).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn small_step_matches_first_order_expansion() {
        let s = spec(6);
        let psi = random_state(64);
        let h = QubitHamiltonian::new(&s).unwrap();
        let hpsi = apply_operator(&h, &psi).unwrap();
        let mut errs = Vec::new();
        for dt in [1e-2, 5e-3] {
            let out = trotter_step(&psi, &s, &TrotterPlan::new(dt, 1).unwrap()).unwrap();
            let lin: Vec<Complex64> = psi
                .amplitudes()
                .iter()
                .zip(hpsi.amplitudes())
                .map(|(a, b)| a - Complex64::new(0.0, dt) * b)
                .collect();
            let lin = StateVector::from_amplitudes(lin);
            let diff: f64 = out
                .amplitudes()
                .iter()
                .zip(lin.amplitudes())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            errs.push(diff);
        }
        let ratio = errs[0] / errs[1];
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
    }

    #[test]
    fn second_order_convergence() {
        let s = spec(8);
        let psi = random_state(256);
        let exact = exact_evolution(&QubitHamiltonian::new(&s).unwrap(), &psi, 2.0, norm_bound(&s)).unwrap();
        let err = |dt: f64, n: usize| {
            let out = trotter_evolve(&psi, &s, &TrotterPlan::new(dt, n).unwrap()).unwrap();
            out.amplitudes()
                .iter()
                .zip(exact.amplitudes())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let ratio = err(0.5, 4) / err(0.25, 8);
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn empty_string_subtracts_to_zero() {
        let s = spec(8);
        let p = VqeParams::manual(0.18, 0.1);
        let plan = TrotterPlan::new(0.5, 3).unwrap();
        let ts = evolve_string(&s, &[], &p, &plan, &all_meson_pairs(&s), true).unwrap();
        assert_eq!(ts.times.len(), 4);
        assert!(ts.values.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn undone_frame_sees_the_bare_string_at_t0() {
        let s = spec(8);
        let p = VqeParams::manual(0.18, 0.1);
        let plan = TrotterPlan::new(0.5, 0).unwrap();
        let ts = evolve_string(&s, &[3, 4, 5], &p, &plan, &all_meson_pairs(&s), false).unwrap();
        for x in 0..8 {
            let expect = if x == 2 || x == 5 { 1.0 } else { 0.0 };
            assert!((ts.values[0][x] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn centered_string_is_reflection_symmetric() {
        // reflecting about link 4 keeps link parity, so it commutes with
        // both the circuit and the Trotter step
        let s = spec(10);
        let p = VqeParams::manual(0.18, 0.1);
        let plan = TrotterPlan::new(0.5, 6).unwrap();
        let ts = evolve_string(&s, &[3, 4, 5], &p, &plan, &all_meson_pairs(&s), true).unwrap();
        for row in &ts.values {
            for x in 0..10 {
                let mirror = (2 * 4 + 10 - x - 1) % 10;
                assert!((row[x] - row[mirror]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn moments_are_recorded_in_the_undone_frame() {
        let s = spec(8);
        let mut run = StringEvolution::new(s, vec![4], VqeParams::manual(0.18, 0.1), TrotterPlan::new(0.5, 2).unwrap());
        run.moment_order = 2;
        let ts = run.run().unwrap();
        assert_eq!(ts.moments.len(), 3);
        assert!((ts.moments[0][0] - 1.0).abs() < 1e-12);
        assert!((ts.moments[0][1] - 1.0).abs() < 1e-12);
    }
}
