//! Pointwise verifications of the torus Green's function: symmetry,
//! positivity, derivatives and the fitted two-regime envelopes.

use super::geometry::{torus_distance, TorusGeometry};
use super::lattice::{check_point, LatticeSum};
use crate::error::{domain, Error, Result};
use crate::euclid::kernel::eta_unchecked;
use crate::euclid::{c_nk, ProblemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub type PointPair = (Vec<f64>, Vec<f64>);

/// Uniform random pairs on the torus from a fixed seed.
pub fn random_pairs(geometry: &TorusGeometry, count: usize, seed: u64) -> Vec<PointPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = geometry.n as usize;
    let l = geometry.length;
    (0..count)
        .map(|_| {
            let x = (0..n).map(|_| rng.gen::<f64>() * l).collect();
            let y = (0..n).map(|_| rng.gen::<f64>() * l).collect();
            (x, y)
        })
        .collect()
}

/// Random pairs with torus distance drawn uniformly from [d_min, d_max].
pub fn random_pairs_at_distance(
    geometry: &TorusGeometry,
    count: usize,
    d_min: f64,
    d_max: f64,
    seed: u64,
) -> Result<Vec<PointPair>> {
    if !(0.0 < d_min && d_min <= d_max && d_max <= geometry.injectivity_radius()) {
        return domain(format!("distance window [{d_min}, {d_max}] must lie in (0, L/2]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = geometry.n as usize;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * geometry.length).collect();
        let mut dir: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let len = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(0.1..=1.0).contains(&len) {
            continue;
        }
        let d = d_min + (d_max - d_min) * rng.gen::<f64>();
        for c in dir.iter_mut() {
            *c *= d / len;
        }
        let y = x.iter().zip(&dir).map(|(a, b)| geometry.wrap(a + b)).collect();
        out.push((x, y));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub pairs: usize,
    pub min_value: f64,
    pub max_asymmetry: f64,
    /// Pairs whose value underflowed to zero.
    pub underflow_pairs: Vec<usize>,
    pub pass: bool,
    pub counterexample: Option<(Vec<f64>, Vec<f64>, f64)>,
}

/// G > 0 and |G(x,y) − G(y,x)| ≤ 2·tol at every pair.
pub fn symmetry_positivity_scan(
    params: ProblemParams,
    geometry: TorusGeometry,
    pairs: &[PointPair],
    tol: f64,
) -> Result<ScanReport> {
    let lattice = LatticeSum::new(params, geometry, tol, 0)?;
    let mut report = ScanReport {
        pairs: pairs.len(),
        min_value: f64::INFINITY,
        max_asymmetry: 0.0,
        underflow_pairs: Vec::new(),
        pass: true,
        counterexample: None,
    };
    for (i, (x, y)) in pairs.iter().enumerate() {
        let a = lattice.value(x, y)?.value;
        let b = lattice.value(y, x)?.value;
        report.min_value = report.min_value.min(a).min(b);
        let asym = (a - b).abs();
        report.max_asymmetry = report.max_asymmetry.max(asym);
        let underflow = a == 0.0 && b == 0.0;
        if underflow {
            report.underflow_pairs.push(i);
        }
        let bad = (!underflow && (a <= 0.0 || b <= 0.0)) || asym > 2.0 * tol || a < 0.0 || b < 0.0;
        if bad && report.counterexample.is_none() {
            report.pass = false;
            report.counterexample = Some((x.clone(), y.clone(), a));
        }
    }
    Ok(report)
}

/// Rate-(1−ε) three-regime shape d^{−p}, d^{−p}e^{−(1−ε)√α d}, e^{−(1−ε)√α i_g/2}.
pub fn three_regime_bound(alpha: f64, d: f64, power: f64, epsilon: f64, injectivity_radius: f64) -> f64 {
    let s = alpha.sqrt();
    if d >= injectivity_radius / 2.0 {
        (-(1.0 - epsilon) * s * injectivity_radius / 2.0).exp()
    } else if s * d <= 1.0 {
        d.powf(-power)
    } else {
        d.powf(-power) * (-(1.0 - epsilon) * s * d).exp()
    }
}

/// Signed l-th derivative of G(x, ·) along the unit vector from x to y, at y.
pub fn green_derivative(lattice: &LatticeSum, x: &[f64], y: &[f64], l: usize) -> Result<f64> {
    let k = lattice.params.k as usize;
    if l < 1 || l + 1 > 2 * k {
        return Err(Error::Unsupported(format!("derivative order must satisfy 1 ≤ l ≤ 2k−1 = {}", 2 * k - 1)));
    }
    if lattice.profile().max_order() < l {
        return domain(format!("lattice sum was built for derivatives up to {}", lattice.profile().max_order()));
    }
    check_point(&lattice.geometry, x)?;
    check_point(&lattice.geometry, y)?;
    let (d, v) = torus_distance(&lattice.geometry, x, y);
    if d == 0.0 {
        return domain("derivative evaluated on the diagonal x = y");
    }
    let e: Vec<f64> = v.iter().map(|c| c / d).collect();
    let jet = lattice.directional_jet(&v, &e, l)?;
    Ok(jet.derivatives()[l])
}

/// ∇_y G(x, y).
pub fn green_gradient(lattice: &LatticeSum, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check_point(&lattice.geometry, x)?;
    check_point(&lattice.geometry, y)?;
    let (_, v) = torus_distance(&lattice.geometry, x, y);
    lattice.gradient_displacement(&v)
}

/// Five-point central difference of G(x, ·) along each axis with step h.
pub fn finite_difference_gradient(lattice: &LatticeSum, x: &[f64], y: &[f64], h: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(y.len());
    for i in 0..y.len() {
        let at = |t: f64| -> Result<f64> {
            let mut z = y.to_vec();
            z[i] += t;
            Ok(lattice.value(x, &z)?.value)
        };
        out.push((8.0 * (at(h)? - at(-h)?) - (at(2.0 * h)? - at(-2.0 * h)?)) / (12.0 * h));
    }
    Ok(out)
}

/// |∇_y (d^{n−2k} G)| · d / η(√α d) on the near regime.
pub fn near_product_ratio(lattice: &LatticeSum, x: &[f64], y: &[f64]) -> Result<f64> {
    let p = &lattice.params;
    let (d, v) = torus_distance(&lattice.geometry, x, y);
    let t = p.sqrt_alpha() * d;
    if d == 0.0 || t > 1.0 {
        return domain(format!("near regime needs 0 < √α d ≤ 1, got {t}"));
    }
    let pw = (p.n - 2 * p.k) as f64;
    let g = lattice.sum_displacement(&v)?.value;
    let grad = lattice.gradient_displacement(&v)?;
    let du: Vec<f64> = v.iter().zip(&grad).map(|(vi, gi)| pw * d.powf(pw - 2.0) * vi * g + d.powf(pw) * gi).collect();
    let mag = du.iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok(mag * d / eta_unchecked(t, p.n, p.k))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeFit {
    /// (α, fitted constant) for each α.
    pub constants: Vec<(f64, f64)>,
    /// max/min of the fitted constants.
    pub spread: f64,
    pub stable: bool,
}

pub(crate) fn fit(constants: Vec<(f64, f64)>, factor: f64) -> EnvelopeFit {
    let max = constants.iter().fold(0.0f64, |a, c| a.max(c.1));
    let min = constants.iter().fold(f64::INFINITY, |a, c| a.min(c.1));
    let spread = if min > 0.0 { max / min } else { f64::INFINITY };
    EnvelopeFit { constants, spread, stable: spread <= factor }
}

/// sup G / three-regime bound at the given distances along axis 0, per α.
pub fn envelope_conformance(
    params: ProblemParams,
    geometry: TorusGeometry,
    alphas: &[f64],
    distances: &[f64],
    epsilon: f64,
    tol: f64,
) -> Result<EnvelopeFit> {
    let mut constants = Vec::new();
    let ig = geometry.injectivity_radius();
    for &alpha in alphas {
        let p = params.with_alpha(alpha)?;
        let lattice = LatticeSum::new(p, geometry, tol, 0)?;
        let mut c: f64 = 0.0;
        for &d in distances {
            let mut v = vec![0.0; geometry.n as usize];
            v[0] = d;
            let g = lattice.sum_displacement(&v)?.value;
            let shape = three_regime_bound(alpha, d, (p.n - 2 * p.k) as f64, epsilon, ig);
            c = c.max(g.abs() / shape);
        }
        constants.push((alpha, c));
    }
    Ok(fit(constants, 2.0))
}

/// sup over √α d ∈ [t_min, 1] of |G d^{n−2k}/c_{n,k} − 1| / η(√α d), per α.
pub fn near_diagonal_fit(
    params: ProblemParams,
    geometry: TorusGeometry,
    alphas: &[f64],
    t_grid: &[f64],
    tol: f64,
) -> Result<EnvelopeFit> {
    let c = c_nk(params.n, params.k)?;
    let mut constants = Vec::new();
    for &alpha in alphas {
        let p = params.with_alpha(alpha)?;
        let lattice = LatticeSum::new(p, geometry, tol, 0)?;
        let mut sup: f64 = 0.0;
        for &t in t_grid {
            let d = t / p.sqrt_alpha();
            if d >= geometry.injectivity_radius() {
                continue;
            }
            let mut v = vec![0.0; geometry.n as usize];
            v[0] = d;
            let g = lattice.sum_displacement(&v)?.value;
            let ratio = (g * d.powi((p.n - 2 * p.k) as i32) / c - 1.0).abs() / eta_unchecked(t, p.n, p.k);
            sup = sup.max(ratio);
        }
        constants.push((alpha, sup));
    }
    Ok(fit(constants, 2.0))
}

/// sup |∂_r^l G| / three-regime bound with power n − 2k + l, per α.
pub fn derivative_envelope_fit(
    params: ProblemParams,
    geometry: TorusGeometry,
    l: usize,
    alphas: &[f64],
    distances: &[f64],
    epsilon: f64,
    tol: f64,
) -> Result<EnvelopeFit> {
    let ig = geometry.injectivity_radius();
    let mut constants = Vec::new();
    for &alpha in alphas {
        let p = params.with_alpha(alpha)?;
        let lattice = LatticeSum::new(p, geometry, tol, l)?;
        let x = vec![0.0; geometry.n as usize];
        let mut c: f64 = 0.0;
        for &d in distances {
            let mut y = x.clone();
            y[0] = d;
            let g = green_derivative(&lattice, &x, &y, l)?;
            let shape = three_regime_bound(alpha, d, (p.n - 2 * p.k) as f64 + l as f64, epsilon, ig);
            c = c.max(g.abs() / shape);
        }
        constants.push((alpha, c));
    }
    Ok(fit(constants, 2.0))
}
