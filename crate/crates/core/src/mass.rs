//! The mass μ_x(x) of (Δ+α)^k in dimension n = 2k+1 on the torus.

use crate::error::{domain, Error, Result};
use crate::euclid::{c_nk, kernel_alpha, ProblemParams};
use crate::torus::{torus_distance, LatticeSum, TorusGeometry};
use rayon::prelude::*;
use serde::Serialize;

fn check_odd(params: &ProblemParams) -> Result<()> {
    if params.n != 2 * params.k + 1 {
        return domain(format!("the mass is defined for n = 2k+1, got n={}, k={}", params.n, params.k));
    }
    Ok(())
}

/// lim_{r→0} (G_α(r) − c_{n,k} r^{−1}) by Richardson extrapolation over
/// r = 2^{−j}/√α, j = 4..10.
pub fn euclid_remainder_at_zero(params: ProblemParams) -> Result<f64> {
    check_odd(&params)?;
    let c = c_nk(params.n, params.k)?;
    let sa = params.sqrt_alpha();
    let mut row: Vec<f64> = (4..=10)
        .map(|j| {
            let r = 2f64.powi(-j) / sa;
            Ok(kernel_alpha(params, r)? - c / r)
        })
        .collect::<Result<_>>()?;
    // f(h) = R + a₁h + a₂h² + …; each pass removes one power of h.
    for p in 1..=4 {
        let f = 2f64.powi(p);
        row = row.windows(2).map(|w| (f * w[1] - w[0]) / (f - 1.0)).collect();
    }
    Ok(*row.last().unwrap())
}

/// μ_x(x) = R_α(0) + Σ_{m≠0} G_α(|Lm|).
pub fn torus_mass(params: ProblemParams, geometry: TorusGeometry, x: &[f64], tol: f64) -> Result<f64> {
    check_odd(&params)?;
    let lattice = LatticeSum::new(params, geometry, tol, 0)?;
    let (_, v) = torus_distance(&geometry, x, x);
    Ok(euclid_remainder_at_zero(params)? + lattice.sum_without_principal(&v)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassReport {
    pub alphas: Vec<f64>,
    pub mu: Vec<f64>,
    /// −μ/√α.
    pub scaled: Vec<f64>,
    pub bracket: (f64, f64),
    /// Bracket width over the α ≥ α_i tail of the sorted list, for each i.
    pub tail_widths: Vec<f64>,
    pub all_negative: bool,
    pub widths_shrink: bool,
}

/// μ over a list of α with the fitted bracket [C1, C2] of −μ/√α.
pub fn mass_sweep(params: ProblemParams, geometry: TorusGeometry, alphas: &[f64], tol: f64) -> Result<MassReport> {
    check_odd(&params)?;
    if alphas.is_empty() {
        return domain("mass sweep needs at least one alpha");
    }
    let mut sorted = alphas.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let x = vec![0.0; geometry.n as usize];
    let mu: Vec<f64> = sorted
        .par_iter()
        .map(|&a| torus_mass(params.with_alpha(a)?, geometry, &x, tol))
        .collect::<Result<_>>()?;
    let scaled: Vec<f64> = mu.iter().zip(&sorted).map(|(m, a)| -m / a.sqrt()).collect();
    let bracket = |s: &[f64]| (s.iter().copied().fold(f64::INFINITY, f64::min), s.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let tail_widths: Vec<f64> = (0..scaled.len()).map(|i| { let (lo, hi) = bracket(&scaled[i..]); hi - lo }).collect();
    let all_negative = mu.iter().all(|m| *m < 0.0);
    if !all_negative {
        let (a, m) = sorted.iter().zip(&mu).find(|(_, m)| **m >= 0.0).unwrap();
        return Err(Error::Verification(format!("−μ must be positive above the stabilization threshold; μ = {m} at α = {a}")));
    }
    Ok(MassReport {
        bracket: bracket(&scaled),
        widths_shrink: tail_widths.windows(2).all(|w| w[1] <= w[0]),
        alphas: sorted,
        mu,
        scaled,
        tail_widths,
        all_negative,
    })
}
