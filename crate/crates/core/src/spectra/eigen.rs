//! Lowest eigenpairs of Hermitian operators.
//!
//! Small problems go through a dense Hermitian eigendecomposition. Larger
//! ones use restarted Lanczos with full reorthogonalization; excited states
//! are found one at a time by deflating the already converged vectors.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{dot, LinearOperator, StateVector};

/// Dimension at or below which the dense solver is used.
pub const DENSE_LIMIT: usize = 400;

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub krylov_dim: usize,
    pub max_restarts: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-10,
            krylov_dim: 90,
            max_restarts: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<Complex64>,
    /// `||A v - value v||`.
    pub residual: f64,
}

impl Eigenpair {
    pub fn state(&self) -> StateVector {
        StateVector::from_amplitudes(self.vector.clone())
    }
}

/// Materializes an operator column by column.
pub fn to_dense<O: LinearOperator + ?Sized>(op: &O) -> DMatrix<Complex64> {
    let n = op.dim();
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = Complex64::new(1.0, 0.0);
        op.apply_into(&e, &mut col);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
        e[j] = Complex64::new(0.0, 0.0);
    }
    m
}

/// Full spectrum and eigenvectors (columns), ascending.
pub fn dense_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = m.nrows();
    // symmetrize away round-off before the Hermitian solve
    let h = DMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn spectrum<O: LinearOperator + ?Sized>(op: &O) -> Vec<f64> {
    dense_eigen(&to_dense(op)).0
}

/// Lowest eigenpair.
pub fn ground_state<O: LinearOperator + ?Sized>(op: &O) -> Result<Eigenpair> {
    Ok(lowest_eigenpairs(op, 1, &SolverOptions::default())?.remove(0))
}

/// The `k` lowest eigenpairs in ascending order.
pub fn lowest_eigenpairs<O: LinearOperator + ?Sized>(
    op: &O,
    k: usize,
    opts: &SolverOptions,
) -> Result<Vec<Eigenpair>> {
    let n = op.dim();
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "asked for {k} eigenpairs of a {n}-dimensional operator"
        )));
    }
    if n <= DENSE_LIMIT {
        let (values, vectors) = dense_eigen(&to_dense(op));
        return Ok((0..k)
            .map(|j| {
                let vector: Vec<Complex64> = vectors.column(j).iter().copied().collect();
                let residual = residual(op, values[j], &vector);
                Eigenpair {
                    value: values[j],
                    vector,
                    residual,
                }
            })
            .collect());
    }
    let mut found: Vec<Eigenpair> = Vec::with_capacity(k);
    for j in 0..k {
        let locked: Vec<&[Complex64]> = found.iter().map(|e| e.vector.as_slice()).collect();
        let pair = lanczos_lowest(op, &locked, start_vector(n, j as u64), opts)?;
        found.push(pair);
    }
    found.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(found)
}

pub(crate) fn residual<O: LinearOperator + ?Sized>(op: &O, value: f64, v: &[Complex64]) -> f64 {
    let av = op.apply_vec(v);
    av.iter()
        .zip(v)
        .map(|(a, x)| (a - x * value).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Deterministic dense start vector with no special symmetry.
fn start_vector(n: usize, salt: u64) -> Vec<Complex64> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ salt.wrapping_mul(0xD1B5_4A32_D192_ED03);
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    (0..n).map(|_| Complex64::new(next(), next())).collect()
}

fn project_out(v: &mut [Complex64], basis: &[&[Complex64]]) {
    for b in basis {
        let c = dot(b, v);
        for (x, y) in v.iter_mut().zip(b.iter()) {
            *x -= c * y;
        }
    }
}

/// Gram-Schmidt against `basis`, repeated once if the first pass lost more
/// than `1 - 1/sqrt(2)` of the norm.
fn orthogonalize(v: &mut [Complex64], basis: &[&[Complex64]]) {
    let before = norm(v);
    project_out(v, basis);
    if norm(v) < before * std::f64::consts::FRAC_1_SQRT_2 {
        project_out(v, basis);
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn lanczos_lowest<O: LinearOperator + ?Sized>(
    op: &O,
    locked: &[&[Complex64]],
    start: Vec<Complex64>,
    opts: &SolverOptions,
) -> Result<Eigenpair> {
    let n = op.dim();
    let m_max = opts.krylov_dim.min(n - locked.len()).max(1);
    let mut v = start;
    let mut best = f64::INFINITY;
    for restart in 0..opts.max_restarts {
        orthogonalize(&mut v, locked);
        let nv = norm(&v);
        if nv < 1e-300 {
            return Err(Error::Degenerate("start vector lies in the locked space".into()));
        }
        v.iter_mut().for_each(|x| *x /= nv);

        let mut basis: Vec<Vec<Complex64>> = vec![v.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..m_max {
            op.apply_into(&basis[j], &mut w);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            let mut refs: Vec<&[Complex64]> = locked.to_vec();
            refs.extend(basis.iter().map(Vec::as_slice));
            orthogonalize(&mut w, &refs);
            let b = norm(&w);
            if j + 1 == m_max || b < 1e-12 {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }

        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (idx, theta) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty tridiagonal");
        let mut ritz = vec![Complex64::new(0.0, 0.0); n];
        for (q, &y) in basis.iter().zip(eig.eigenvectors.column(idx).iter()) {
            for (r, x) in ritz.iter_mut().zip(q) {
                *r += x * y;
            }
        }
        orthogonalize(&mut ritz, locked);
        let nr = norm(&ritz);
        ritz.iter_mut().for_each(|x| *x /= nr);
        let res = residual(op, theta, &ritz);
        best = best.min(res);
        if res <= opts.tolerance {
            return Ok(Eigenpair {
                value: theta,
                vector: ritz,
                residual: res,
            });
        }
        v = ritz;
        // nudge a stalled restart out of an exact invariant subspace
        if m < 2 && restart + 1 < opts.max_restarts {
            let kick = start_vector(n, 1000 + restart as u64);
            v.iter_mut().zip(kick).for_each(|(x, k)| *x += k * 1e-3);
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_restarts,
        residual: best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SparseOperator;

    #[test]
    fn diagonal_operator_ground_state() {
        let d: Vec<f64> = (0..500).map(|i| i as f64).collect();
        let op = SparseOperator::diagonal(&d);
        let g = ground_state(&op).unwrap();
        assert!(g.value.abs() < 1e-10);
        assert!((g.vector[0].norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lanczos_agrees_with_dense_on_random_hermitian() {
        let n = 450;
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((i, i, Complex64::new((i as f64 * 0.7).sin() * 3.0, 0.0)));
            for d in [1usize, 7, 31] {
                let j = (i + d) % n;
                let v = Complex64::new((i as f64 * 0.3).cos(), (j as f64 * 0.2).sin());
                trip.push((i, j, v));
                trip.push((j, i, v.conj()));
            }
        }
        let op = SparseOperator::from_triplets(n, trip, true);
        let dense = spectrum(&op);
        let pairs = lowest_eigenpairs(&op, 3, &SolverOptions::default()).unwrap();
        for (p, d) in pairs.iter().zip(&dense) {
            assert!((p.value - d).abs() < 1e-9, "{} vs {}", p.value, d);
            assert!(p.residual < 1e-9);
        }
    }

    #[test]
    fn degenerate_levels_are_both_found() {
        let mut d: Vec<f64> = (0..600).map(|i| 1.0 + i as f64 * 0.01).collect();
        d[10] = -1.0;
        d[20] = -1.0;
        let pairs = lowest_eigenpairs(&SparseOperator::diagonal(&d), 3, &SolverOptions::default())
            .unwrap();
        assert!((pairs[0].value + 1.0).abs() < 1e-10);
        assert!((pairs[1].value + 1.0).abs() < 1e-10);
        assert!((pairs[2].value - 1.0).abs() < 1e-10);
    }
}
