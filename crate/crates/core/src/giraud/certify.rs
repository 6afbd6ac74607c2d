//! Numerical certification of composed envelopes.

use super::convolve::radial_convolve;
use super::envelope::EnvelopeSpec;
use crate::error::{Error, Result};
use crate::euclid::RadialKernel;
use crate::quad::QuadOptions;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    /// Fitted constants may differ by at most this factor across α.
    pub drift_factor: f64,
    /// If set, any sample above `declared_constant · envelope` is a counterexample.
    pub declared_constant: Option<f64>,
    pub quad: QuadOptions,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            drift_factor: 2.0,
            declared_constant: None,
            quad: QuadOptions::tight(1e-14, 1e-6),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CertifySample {
    pub alpha: f64,
    pub r: f64,
    pub conv: f64,
    pub envelope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyReport {
    /// (α, minimal C with conv ≤ C·envelope on the grid)
    pub fitted: Vec<(f64, f64)>,
    pub drift: f64,
    pub pass: bool,
    pub counterexample: Option<CertifySample>,
    pub samples: Vec<CertifySample>,
}

/// Convolves the sampled kernels on `t_grid` (distances in units of 1/√α)
/// for every α and fits the constant in conv ≤ C·composed.
pub fn certify_bound<FX, FY>(
    x_samples: FX,
    y_samples: FY,
    composed: &EnvelopeSpec,
    n: u32,
    alpha_list: &[f64],
    t_grid: &[f64],
    opts: CertifyOptions,
) -> Result<CertifyReport>
where
    FX: Fn(f64) -> RadialKernel + Sync,
    FY: Fn(f64) -> RadialKernel + Sync,
{
    if alpha_list.is_empty() || t_grid.is_empty() {
        return Err(Error::Domain("certify_bound needs nonempty α list and grid".into()));
    }
    let mut samples = Vec::new();
    let mut fitted = Vec::new();
    for &alpha in alpha_list {
        let x = x_samples(alpha);
        let y = y_samples(alpha);
        let sa = alpha.sqrt();
        let vals: Result<Vec<CertifySample>> = t_grid
            .par_iter()
            .map(|&t| {
                let r = t / sa;
                let c = radial_convolve(&x, &y, n, r, opts.quad)?;
                Ok(CertifySample { alpha, r, conv: c.value, envelope: composed.eval(alpha, r, n) })
            })
            .collect();
        let vals = vals?;
        let mut c_fit: f64 = 0.0;
        for s in &vals {
            if s.envelope > 0.0 {
                c_fit = c_fit.max(s.conv.abs() / s.envelope);
            } else if s.conv.abs() > 0.0 {
                c_fit = f64::INFINITY;
            }
        }
        fitted.push((alpha, c_fit));
        samples.extend(vals);
    }
    let cmax = fitted.iter().map(|f| f.1).fold(0.0, f64::max);
    let cmin = fitted.iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
    let drift = if cmin > 0.0 { cmax / cmin } else { f64::INFINITY };
    let counterexample = opts.declared_constant.and_then(|c| {
        samples.iter().find(|s| s.conv.abs() > c * s.envelope).cloned()
    });
    let pass = drift.is_finite() && drift <= opts.drift_factor && counterexample.is_none();
    Ok(CertifyReport { fitted, drift, pass, counterexample, samples })
}

/// Least-squares slope of log v + rate·√α r against log r.
pub fn far_slope(points: &[(f64, f64)], sqrt_alpha: f64, rate: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(r, v)| *r > 0.0 && *v > 0.0)
        .map(|(r, v)| (r.ln(), v.ln() + rate * sqrt_alpha * r))
        .collect();
    least_squares(&pts).map(|(slope, _)| slope)
}

/// Ordinary least squares fit y = a x + b, returning (a, b).
pub fn least_squares(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let a = sxy / sxx;
    Some((a, my - a * mx))
}
