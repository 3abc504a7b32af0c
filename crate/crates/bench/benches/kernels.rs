use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use stringbreak_bench::{dressed_string, lattice, THETA};
use stringbreak_core::circuit::{compile_evolution, peephole, CompileOptions};
use stringbreak_core::lattice::{KineticTerm, LinearOperator, QubitHamiltonian};
use stringbreak_core::spectra::meson_spectrum;
use stringbreak_core::trotter::{apply_kinetic_layer, TrotterPlan, TrotterStepper};
use stringbreak_core::vqe::{apply_ansatz_in_place, Direction, VqeParams};
use stringbreak_core::Sublattice;

fn hamiltonian_apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("hamiltonian_apply");
    for n in [12, 16, 20] {
        let spec = lattice(n);
        let h = QubitHamiltonian::new(&spec).unwrap();
        let psi = dressed_string(&spec);
        let mut y = vec![Default::default(); spec.dim()];
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| h.apply_into(black_box(psi.amplitudes()), &mut y))
        });
    }
    group.finish();
}

fn trotter_kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("trotter");
    for n in [12, 16, 20] {
        let spec = lattice(n);
        let stepper = TrotterStepper::new(&spec, TrotterPlan::new(0.5, 1).unwrap()).unwrap();
        let terms = KineticTerm::sublattice(&spec, Sublattice::Even);
        let mut amps = dressed_string(&spec).into_amplitudes();
        group.bench_with_input(BenchmarkId::new("step", n), &n, |b, _| {
            b.iter(|| stepper.step_in_place(black_box(&mut amps)))
        });
        group.bench_with_input(BenchmarkId::new("kinetic_layer", n), &n, |b, _| {
            b.iter(|| apply_kinetic_layer(black_box(&mut amps), &terms, 0.25))
        });
        let params = VqeParams::manual(THETA.0, THETA.1);
        group.bench_with_input(BenchmarkId::new("ansatz", n), &n, |b, _| {
            b.iter(|| apply_ansatz_in_place(black_box(&mut amps), n, &params, Direction::Forward))
        });
    }
    group.finish();
}

fn spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("meson_spectrum");
    group.sample_size(10);
    for n in [8, 12] {
        let spec = lattice(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| meson_spectrum(black_box(&spec)).unwrap())
        });
    }
    group.finish();
}

fn compile(c: &mut Criterion) {
    let mut group = c.benchmark_group("compile");
    group.sample_size(10);
    let spec = lattice(104);
    let params = VqeParams::manual(THETA.0, THETA.1);
    let plan = TrotterPlan::new(0.5, 12).unwrap();
    let raw = CompileOptions {
        peephole: false,
        ..CompileOptions::default()
    };
    group.bench_function("evolution_104x12", |b| {
        b.iter(|| compile_evolution(&params, &plan, &spec, &CompileOptions::default()).unwrap())
    });
    let circuit = compile_evolution(&params, &plan, &spec, &raw).unwrap();
    group.bench_function("peephole_104x12", |b| b.iter(|| peephole(black_box(&circuit))));
    group.finish();
}

criterion_group!(benches, hamiltonian_apply, trotter_kernels, spectrum, compile);
criterion_main!(benches);
