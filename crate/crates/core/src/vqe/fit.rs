//! Volume extrapolation of optimized angles and overlaps.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Infinite-volume estimate from four consecutive sizes, exact when
/// `theta(L) = c + A r^L`.
pub fn theta_eff(t: [f64; 4]) -> Result<f64> {
    let den = t[3] + t[0] - t[1] - t[2];
    if den.abs() <= 1e-12 {
        return Err(Error::Degenerate(format!(
            "four-point extrapolation denominator {den:e} vanishes"
        )));
    }
    Ok((t[0] * t[3] - t[1] * t[2]) / den)
}

/// Least-squares fit of `y = asymptote + amplitude * exp(-rate * x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub asymptote: f64,
    pub amplitude: f64,
    pub rate: f64,
    /// One-sigma standard errors from the residual variance; infinite when
    /// there are no spare degrees of freedom.
    pub asymptote_err: f64,
    pub amplitude_err: f64,
    pub rate_err: f64,
    pub residuals: Vec<f64>,
    pub rss: f64,
    pub n_points: usize,
}

impl ExpFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.asymptote + self.amplitude * (-self.rate * x).exp()
    }
}

/// Fits an exponential approach to a constant, optionally dropping the
/// first point. The decay rate is profiled on a grid and refined by golden
/// section; the final parameters come from Gauss-Newton iterations.
pub fn exp_fit(series: &[(f64, f64)], skip_first: bool) -> Result<ExpFit> {
    let pts: Vec<(f64, f64)> = if skip_first {
        series.iter().skip(1).copied().collect()
    } else {
        series.to_vec()
    };
    if pts.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "an exponential fit needs at least 3 points, got {}",
            pts.len()
        )));
    }

    let mean = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    if pts.iter().all(|p| (p.1 - mean).abs() <= 1e-14 * (1.0 + mean.abs())) {
        // flat data: the rate is undetermined and the amplitude vanishes
        return Ok(ExpFit {
            asymptote: mean,
            amplitude: 0.0,
            rate: 0.0,
            asymptote_err: 0.0,
            amplitude_err: 0.0,
            rate_err: f64::INFINITY,
            residuals: pts.iter().map(|p| p.1 - mean).collect(),
            rss: 0.0,
            n_points: pts.len(),
        });
    }

    let profile = |b: f64| linear_part(&pts, b).2;
    // log-spaced scan over rates
    let grid: Vec<f64> = (0..=240).map(|i| 10f64.powf(-3.0 + i as f64 * 5.0 / 240.0)).collect();
    let (mut ib, mut best) = (0, f64::INFINITY);
    for (i, &b) in grid.iter().enumerate() {
        let r = profile(b);
        if r < best {
            best = r;
            ib = i;
        }
    }
    let lo = grid[ib.saturating_sub(1)];
    let hi = grid[(ib + 1).min(grid.len() - 1)];
    let mut b = golden_section(profile, lo, hi, 1e-13);
    let (mut c, mut a, _) = linear_part(&pts, b);

    // polish in all three parameters
    let mut rss = rss_of(&pts, c, a, b);
    for _ in 0..50 {
        let (jtj, jtr) = normal_equations(&pts, c, a, b);
        let step = match jtj.lu().solve(&jtr) {
            Some(s) => s,
            None => break,
        };
        let (c2, a2, b2) = (c + step[0], a + step[1], b + step[2]);
        let r2 = rss_of(&pts, c2, a2, b2);
        if !(r2 < rss) {
            break;
        }
        c = c2;
        a = a2;
        b = b2;
        rss = r2;
    }
    if !(c.is_finite() && a.is_finite() && b.is_finite()) {
        return Err(Error::NoConvergence {
            iterations: 50,
            residual: rss,
        });
    }

    let n = pts.len();
    let dof = n as f64 - 3.0;
    let (jtj, _) = normal_equations(&pts, c, a, b);
    let errs = match (dof > 0.0, jtj.try_inverse()) {
        (true, Some(cov)) => {
            let s2 = rss / dof;
            [0, 1, 2].map(|i| (s2 * cov[(i, i)]).max(0.0).sqrt())
        }
        _ => [f64::INFINITY; 3],
    };
    let residuals = pts.iter().map(|&(x, y)| y - c - a * (-b * x).exp()).collect();
    Ok(ExpFit {
        asymptote: c,
        amplitude: a,
        rate: b,
        asymptote_err: errs[0],
        amplitude_err: errs[1],
        rate_err: errs[2],
        residuals,
        rss,
        n_points: n,
    })
}

/// Best `(c, A, rss)` at fixed rate.
fn linear_part(pts: &[(f64, f64)], b: f64) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let (mut se, mut see, mut sy, mut sey) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in pts {
        let e = (-b * x).exp();
        se += e;
        see += e * e;
        sy += y;
        sey += e * y;
    }
    let det = n * see - se * se;
    let (c, a) = if det.abs() < 1e-300 * (n * see).max(1.0) || det <= 0.0 {
        (sy / n, 0.0)
    } else {
        ((see * sy - se * sey) / det, (n * sey - se * sy) / det)
    };
    (c, a, rss_of(pts, c, a, b))
}

fn rss_of(pts: &[(f64, f64)], c: f64, a: f64, b: f64) -> f64 {
    pts.iter().map(|&(x, y)| (y - c - a * (-b * x).exp()).powi(2)).sum()
}

fn normal_equations(pts: &[(f64, f64)], c: f64, a: f64, b: f64) -> (Matrix3<f64>, Vector3<f64>) {
    let mut jtj = Matrix3::zeros();
    let mut jtr = Vector3::zeros();
    for &(x, y) in pts {
        let e = (-b * x).exp();
        let j = Vector3::new(1.0, e, -a * x * e);
        let r = y - c - a * e;
        jtj += j * j.transpose();
        jtr += j * r;
    }
    (jtj, jtr)
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol * (1.0 + lo.abs()) {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    (lo + hi) / 2.0
}
