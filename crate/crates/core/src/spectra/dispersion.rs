use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Low-momentum fit `E(p)^2 = E0^2 + c^2 p^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionFit {
    /// Rest energy (meson mass).
    pub e0: f64,
    /// Speed of light in the momentum units of the input.
    pub c: f64,
    /// Root-mean-square misfit of `E^2`.
    pub residual: f64,
    /// Largest `|p|` included in the fit.
    pub window: f64,
    pub n_points: usize,
}

/// Default fit window, in physical (two-link) momentum units.
pub const DEFAULT_WINDOW: f64 = 1.0;

/// Least-squares fit of `E^2` against `p^2` over points with `|p| <= window`.
pub fn fit_dispersion(band: &[(f64, f64)], window: f64) -> Result<DispersionFit> {
    let pts: Vec<(f64, f64)> = band
        .iter()
        .copied()
        .filter(|(p, _)| p.abs() <= window + 1e-12)
        .collect();
    if pts.len() < 3 {
        return Err(Error::Degenerate(format!(
            "need at least 3 band points inside |p| <= {window}, have {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(p, e) in &pts {
        let (x, y) = (p * p, e * e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let det = n * sxx - sx * sx;
    if det.abs() <= 1e-14 * (n * sxx).max(1.0) {
        return Err(Error::Degenerate("all momenta have the same |p|".into()));
    }
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / n;
    if slope <= 0.0 || intercept <= 0.0 {
        return Err(Error::Degenerate(format!(
            "fit gives nonpositive c^2 = {slope} or E0^2 = {intercept}"
        )));
    }
    let residual = (pts
        .iter()
        .map(|&(p, e)| (e * e - intercept - slope * p * p).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DispersionFit {
        e0: intercept.sqrt(),
        c: slope.sqrt(),
        residual,
        window,
        n_points: pts.len(),
    })
}
