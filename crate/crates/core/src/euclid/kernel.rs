//! Euclidean fundamental solutions of (Δ+α)^k and their near/far behaviour.

use super::bessel::{bessel_k_scaled_seq, half_integer_fill, BesselOrder, MAX_TWICE_NU};
use super::gamma::{factorial, gamma_half_integer};
use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Beyond this value of √α·r kernels are reported as exactly zero.
pub const UNDERFLOW_ARG: f64 = 700.0;

/// The triple (n, k, α) with n > 2k, k ≥ 1, α > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub n: u32,
    pub k: u32,
    pub alpha: f64,
}

impl ProblemParams {
    pub fn new(n: u32, k: u32, alpha: f64) -> Result<Self> {
        if k < 1 {
            return domain(format!("k must be at least 1, got {k}"));
        }
        if n <= 2 * k {
            return domain(format!("n > 2k is required, got n={n}, k={k}"));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return domain(format!("alpha must be positive and finite, got {alpha}"));
        }
        Ok(ProblemParams { n, k, alpha })
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::new(self.n, self.k, alpha)
    }

    /// 2ν = n − 2k.
    pub fn twice_nu(&self) -> u32 {
        self.n - 2 * self.k
    }

    pub fn sqrt_alpha(&self) -> f64 {
        self.alpha.sqrt()
    }
}

fn check_nk(n: u32, k: u32) -> Result<()> {
    if k < 1 || n <= 2 * k {
        return domain(format!("n > 2k ≥ 2 is required, got n={n}, k={k}"));
    }
    Ok(())
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("radius must be positive, got {r}"));
    }
    Ok(())
}

/// c_{n,k} = Γ((n−2k)/2) / (4^k π^{n/2} (k−1)!), the coefficient of r^{2k−n}.
pub fn c_nk(n: u32, k: u32) -> Result<f64> {
    check_nk(n, k)?;
    Ok(gamma_half_integer(n - 2 * k)
        / (4f64.powi(k as i32) * PI.powf(n as f64 / 2.0) * factorial(k - 1)))
}

/// D_{n,k} = 1 / (2^{(n+2k−2)/2} π^{n/2} (k−1)!), so that G₁ = D r^{−ν} K_ν(r).
pub fn d_nk(n: u32, k: u32) -> Result<f64> {
    check_nk(n, k)?;
    Ok(1.0
        / (2f64.powf((n + 2 * k - 2) as f64 / 2.0) * PI.powf(n as f64 / 2.0) * factorial(k - 1)))
}

/// Remainder scale η(t), defined for 0 < t ≤ 1 only.
pub fn eta(t: f64, n: u32, k: u32) -> Result<f64> {
    check_nk(n, k)?;
    if !(t > 0.0 && t <= 1.0) {
        return domain(format!("eta is defined on (0, 1], got t={t}"));
    }
    Ok(eta_unchecked(t, n, k))
}

pub(crate) fn eta_unchecked(t: f64, n: u32, k: u32) -> f64 {
    match n - 2 * k {
        1 => t,
        2 => t * t * (1.0 + t.ln().abs()),
        _ => t * t,
    }
}

/// A finite sum Σ c · s^a · K_b(s) with a, b stored doubled.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselCombo {
    terms: Vec<ComboTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ComboTerm {
    coef: f64,
    twice_a: i32,
    twice_b: u32,
}

impl BesselCombo {
    /// The single term s^a K_b(s).
    pub fn monomial(twice_a: i32, twice_b: u32) -> Self {
        BesselCombo { terms: vec![ComboTerm { coef: 1.0, twice_a, twice_b }] }
    }

    /// Exact derivative in s, using d/ds[s^a K_b] = (a−b) s^{a−1} K_b − s^a K_{|b−1|}.
    ///
    /// This form keeps every term of the same sign for the kernel profile
    /// s^{−ν}K_ν, so no cancellation occurs at small s.
    pub fn derivative(&self) -> Self {
        let mut out: Vec<ComboTerm> = Vec::new();
        let mut push = |t: ComboTerm| {
            if t.coef == 0.0 {
                return;
            }
            if let Some(e) =
                out.iter_mut().find(|e| e.twice_a == t.twice_a && e.twice_b == t.twice_b)
            {
                e.coef += t.coef;
            } else {
                out.push(t);
            }
        };
        for t in &self.terms {
            let amb = (t.twice_a - t.twice_b as i32) as f64 / 2.0;
            push(ComboTerm { coef: t.coef * amb, twice_a: t.twice_a - 2, twice_b: t.twice_b });
            let lower = (t.twice_b as i32 - 2).unsigned_abs();
            push(ComboTerm { coef: -t.coef, twice_a: t.twice_a, twice_b: lower });
        }
        out.retain(|t| t.coef != 0.0);
        BesselCombo { terms: out }
    }

    fn max_twice_b(&self) -> u32 {
        self.terms.iter().map(|t| t.twice_b).max().unwrap_or(0)
    }

    /// Value at s, multiplied by eˢ.
    pub fn eval_scaled(&self, s: f64) -> Result<f64> {
        check_r(s)?;
        let top = self.max_twice_b();
        BesselOrder::new(top)?;
        let mut even = [0.0; MAX_TWICE_NU as usize / 2 + 1];
        let mut odd = [0.0; MAX_TWICE_NU as usize / 2 + 1];
        if self.terms.iter().any(|t| t.twice_b % 2 == 0) {
            let seq = bessel_k_scaled_seq(0, (top / 2 + 1) as usize, s)?;
            even[..seq.len()].copy_from_slice(&seq);
        }
        if self.terms.iter().any(|t| t.twice_b % 2 == 1) {
            half_integer_fill(&mut odd[..((top + 1) / 2) as usize], s);
        }
        let root = s.sqrt();
        let mut sum = 0.0;
        for t in &self.terms {
            let kb = if t.twice_b % 2 == 0 {
                even[(t.twice_b / 2) as usize]
            } else {
                odd[(t.twice_b / 2) as usize]
            };
            let pw = if t.twice_a % 2 == 0 {
                s.powi(t.twice_a / 2)
            } else {
                s.powi((t.twice_a - 1) / 2) * root
            };
            sum += t.coef * pw * kb;
        }
        Ok(sum)
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if s > UNDERFLOW_ARG {
            check_r(s)?;
            return Ok(0.0);
        }
        Ok(self.eval_scaled(s)? * (-s).exp())
    }
}

/// Precomputed radial profile of G_α^{(k)} and its r-derivatives.
#[derive(Debug, Clone)]
pub struct KernelProfile {
    pub params: ProblemParams,
    prefactor: f64,
    sqrt_alpha: f64,
    derivs: Vec<BesselCombo>,
}

impl KernelProfile {
    /// Profile with derivatives up to order `max_order` available.
    pub fn new(params: ProblemParams, max_order: usize) -> Result<Self> {
        let p = ProblemParams::new(params.n, params.k, params.alpha)?;
        let twice_nu = p.twice_nu();
        let d = d_nk(p.n, p.k)?;
        let prefactor = p.alpha.powf(twice_nu as f64 / 2.0) * d;
        let mut derivs = vec![BesselCombo::monomial(-(twice_nu as i32), twice_nu)];
        for l in 1..=max_order {
            let next = derivs[l - 1].derivative();
            derivs.push(next);
        }
        BesselOrder::new(derivs.iter().map(|c| c.max_twice_b()).max().unwrap_or(0))?;
        Ok(KernelProfile { params: p, prefactor, sqrt_alpha: p.alpha.sqrt(), derivs })
    }

    pub fn max_order(&self) -> usize {
        self.derivs.len() - 1
    }

    /// d^l/dr^l G_α(r).
    pub fn derivative(&self, r: f64, l: usize) -> Result<f64> {
        check_r(r)?;
        let combo = self.derivs.get(l).ok_or_else(|| {
            Error::Unsupported(format!("derivative order {l} exceeds {}", self.max_order()))
        })?;
        let s = self.sqrt_alpha * r;
        if s > UNDERFLOW_ARG {
            return Ok(0.0);
        }
        Ok(self.prefactor * self.sqrt_alpha.powi(l as i32) * combo.eval(s)?)
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        self.derivative(r, 0)
    }

    /// All derivatives 0..=order at r, sharing the Bessel evaluations.
    pub fn jet(&self, r: f64, order: usize) -> Result<Vec<f64>> {
        (0..=order).map(|l| self.derivative(r, l)).collect()
    }
}

/// (2π)^{−n/2} r^{−(n−2)/2} K_{(n−2)/2}(r), the fundamental solution of Δ+1.
pub fn kernel_k1(n: u32, r: f64) -> Result<f64> {
    if n < 3 {
        return domain(format!("kernel_k1 requires n ≥ 3, got {n}"));
    }
    check_r(r)?;
    if r > UNDERFLOW_ARG {
        return Ok(0.0);
    }
    let combo = BesselCombo::monomial(-((n - 2) as i32), n - 2);
    Ok((2.0 * PI).powf(-(n as f64) / 2.0) * combo.eval(r)?)
}

/// G_1^{(k)}(r) = D_{n,k} r^{−ν} K_ν(r), ν = (n−2k)/2.
pub fn kernel_closed_form(n: u32, k: u32, r: f64) -> Result<f64> {
    check_nk(n, k)?;
    check_r(r)?;
    let twice_nu = n - 2 * k;
    let combo = BesselCombo::monomial(-(twice_nu as i32), twice_nu);
    Ok(d_nk(n, k)? * combo.eval(r)?)
}

/// G_α^{(k)}(r) = α^{(n−2k)/2} G_1^{(k)}(√α r).
pub fn kernel_alpha(params: ProblemParams, r: f64) -> Result<f64> {
    check_r(r)?;
    let p = ProblemParams::new(params.n, params.k, params.alpha)?;
    Ok(p.alpha.powf(p.twice_nu() as f64 / 2.0) * kernel_closed_form(p.n, p.k, p.sqrt_alpha() * r)?)
}

/// Same as [`kernel_alpha`] but also reports whether the underflow policy fired.
pub fn kernel_alpha_flagged(params: ProblemParams, r: f64) -> Result<(f64, bool)> {
    let v = kernel_alpha(params, r)?;
    Ok((v, params.alpha.sqrt() * r > UNDERFLOW_ARG))
}

/// d^l/dr^l G_α(r) for 0 ≤ l ≤ 2k.
pub fn kernel_radial_derivative(params: ProblemParams, r: f64, l: i32) -> Result<f64> {
    if l < 0 {
        return domain(format!("derivative order must be nonnegative, got {l}"));
    }
    if l as u32 > 2 * params.k {
        return Err(Error::Unsupported(format!(
            "derivative order {l} exceeds 2k = {}",
            2 * params.k
        )));
    }
    KernelProfile::new(params, l as usize)?.derivative(r, l as usize)
}

/// Constant-free two-regime bound shape for G_α.
pub fn envelope_bound(params: ProblemParams, r: f64) -> Result<f64> {
    check_r(r)?;
    let p = ProblemParams::new(params.n, params.k, params.alpha)?;
    let (n, k) = (p.n as f64, p.k as f64);
    let s = p.sqrt_alpha() * r;
    if s <= 1.0 {
        Ok(r.powf(2.0 * k - n))
    } else {
        Ok(p.alpha.powf(k * (n - 3.0) / 4.0) * r.powf(((k - 2.0) * n + k) / 2.0) * (-s).exp())
    }
}

fn check_near(params: &ProblemParams, r: f64) -> Result<f64> {
    check_r(r)?;
    let t = params.sqrt_alpha() * r;
    if t > 1.0 {
        return domain(format!("out of the near regime: √α·r = {t} > 1"));
    }
    Ok(t)
}

/// |G_α(r)/(c_{n,k} r^{2k−n}) − 1| / η(√α r) on the near regime √α r ≤ 1.
pub fn remainder_ratio(params: ProblemParams, r: f64) -> Result<f64> {
    let p = ProblemParams::new(params.n, params.k, params.alpha)?;
    let t = check_near(&p, r)?;
    let twice_nu = p.twice_nu();
    let normalized = d_nk(p.n, p.k)? / c_nk(p.n, p.k)?
        * BesselCombo::monomial(twice_nu as i32, twice_nu).eval(t)?;
    Ok((normalized - 1.0).abs() / eta_unchecked(t, p.n, p.k))
}

/// |d^l/dr^l (r^{n−2k} G_α(r) / c_{n,k})| · r^l / η(√α r) for 1 ≤ l ≤ 2k−1.
pub fn differentiated_remainder_ratio(params: ProblemParams, r: f64, l: u32) -> Result<f64> {
    let p = ProblemParams::new(params.n, params.k, params.alpha)?;
    if l < 1 || l > 2 * p.k - 1 {
        return Err(Error::Unsupported(format!(
            "differentiated remainder needs 1 ≤ l ≤ 2k−1 = {}, got {l}",
            2 * p.k - 1
        )));
    }
    let t = check_near(&p, r)?;
    let twice_nu = p.twice_nu();
    let mut combo = BesselCombo::monomial(twice_nu as i32, twice_nu);
    for _ in 0..l {
        combo = combo.derivative();
    }
    let d = d_nk(p.n, p.k)? / c_nk(p.n, p.k)?;
    Ok((d * combo.eval(t)?).abs() * t.powi(l as i32) / eta_unchecked(t, p.n, p.k))
}
