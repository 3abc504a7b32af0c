//! Deterministic derivative-free maximization in a few dimensions.

use crate::error::{Error, Result};

/// Stopping rules for [`maximize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    pub initial_step: f64,
    /// Simplex diameter below which the search stops.
    pub x_tol: f64,
    /// Spread of simplex values below which the search stops.
    pub f_tol: f64,
    pub max_evaluations: usize,
    /// Finite-difference step of the Newton polish.
    pub fd_step: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            initial_step: 0.05,
            x_tol: 1e-8,
            f_tol: 1e-12,
            max_evaluations: 4000,
            fd_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Central-difference gradient norm at `x`.
    pub gradient_norm: f64,
}

/// Nelder-Mead simplex search for a local maximum, followed by Newton steps
/// on a central-difference model.
pub fn maximize<F>(f: F, x0: &[f64], opts: &OptimizerOptions) -> Result<OptimizerResult>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let d = x0.len();
    let evals = std::cell::Cell::new(0usize);
    let mut eval = |x: &[f64]| -> Result<f64> {
        evals.set(evals.get() + 1);
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("objective is not finite at {x:?}")));
        }
        // minimize the negative
        Ok(-v)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), eval(x0)?));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let v = eval(&x)?;
        simplex.push((x, v));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[d].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| dist(x, &simplex[0].0))
            .fold(0.0, f64::max);
        if diameter < opts.x_tol && spread < opts.f_tol {
            break;
        }
        if evals.get() >= opts.max_evaluations {
            return Err(Error::NoConvergence {
                iterations: evals.get(),
                residual: diameter,
            });
        }
        let centroid: Vec<f64> = (0..d)
            .map(|j| simplex[..d].iter().map(|(x, _)| x[j]).sum::<f64>() / d as f64)
            .collect();
        let worst = simplex[d].clone();
        let toward = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = toward(alpha);
        let fr = eval(&xr)?;
        if fr < simplex[0].1 {
            let xe = toward(gamma);
            let fe = eval(&xe)?;
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = toward(rho);
                let fc = eval(&xc)?;
                (xc, fc)
            } else {
                let xc = toward(-rho);
                let fc = eval(&xc)?;
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[d] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = best
                        .iter()
                        .zip(&item.0)
                        .map(|(b, x)| b + sigma * (x - b))
                        .collect();
                    let v = eval(&x)?;
                    *item = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (mut x, mut fx) = simplex.swap_remove(0);

    let h = opts.fd_step;
    let mut gradient_norm = f64::INFINITY;
    for _ in 0..20 {
        let (g, hess) = fd_model(&mut eval, &x, fx, h)?;
        gradient_norm = norm(&g);
        let step = match solve(&hess, &g) {
            Some(s) => s,
            None => break,
        };
        let trial: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a - s).collect();
        let ft = eval(&trial)?;
        if ft >= fx || norm(&step) < 1e-14 {
            break;
        }
        x = trial;
        fx = ft;
    }
    if gradient_norm.is_infinite() {
        gradient_norm = norm(&fd_model(&mut eval, &x, fx, h)?.0);
    }
    Ok(OptimizerResult {
        x,
        value: -fx,
        evaluations: evals.get(),
        gradient_norm,
    })
}

type Model = (Vec<f64>, Vec<Vec<f64>>);

fn fd_model<E>(eval: &mut E, x: &[f64], fx: f64, h: f64) -> Result<Model>
where
    E: FnMut(&[f64]) -> Result<f64>,
{
    let d = x.len();
    let shifted = |i: usize, a: f64, j: usize, b: f64| {
        let mut y = x.to_vec();
        y[i] += a;
        y[j] += b;
        y
    };
    let mut g = vec![0.0; d];
    let mut hess = vec![vec![0.0; d]; d];
    for i in 0..d {
        let fp = eval(&shifted(i, h, i, 0.0))?;
        let fm = eval(&shifted(i, -h, i, 0.0))?;
        g[i] = (fp - fm) / (2.0 * h);
        hess[i][i] = (fp - 2.0 * fx + fm) / (h * h);
        for j in 0..i {
            let fpp = eval(&shifted(i, h, j, h))?;
            let fpm = eval(&shifted(i, h, j, -h))?;
            let fmp = eval(&shifted(i, -h, j, h))?;
            let fmm = eval(&shifted(i, -h, j, -h))?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    Ok((g, hess))
}

/// Solves a small positive-definite system, returning `None` otherwise.
fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let d = b.len();
    let m = nalgebra::DMatrix::from_fn(d, d, |i, j| a[i][j]);
    let chol = m.cholesky()?;
    let x = chol.solve(&nalgebra::DVector::from_column_slice(b));
    Some(x.iter().copied().collect())
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}
