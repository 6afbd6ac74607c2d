//! Modified Bessel functions of the second kind K_ν for ν ∈ ½ℕ.
//!
//! Integer orders: power series for r ≤ 2, Steed's continued fraction
//! beyond, then upward recurrence from (K₀, K₁). Half-integer orders use
//! the terminating closed form. Everything is computed in the scaled form
//! eʳK_ν(r), so large arguments never underflow internally.

use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest supported value of 2ν.
pub const MAX_TWICE_NU: u32 = 60;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_CUTOFF: f64 = 2.0;

/// Order ν held as the integer 2ν so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BesselOrder {
    twice_nu: u32,
}

impl BesselOrder {
    pub fn new(twice_nu: u32) -> Result<Self> {
        if twice_nu > MAX_TWICE_NU {
            return Err(Error::Unsupported(format!(
                "Bessel order {}/2 exceeds the supported maximum {}/2",
                twice_nu, MAX_TWICE_NU
            )));
        }
        Ok(BesselOrder { twice_nu })
    }

    /// Order ν = m.
    pub fn integer(m: u32) -> Result<Self> {
        Self::new(2 * m)
    }

    /// Order ν = m + 1/2.
    pub fn half(m: u32) -> Result<Self> {
        Self::new(2 * m + 1)
    }

    pub fn twice(self) -> u32 {
        self.twice_nu
    }

    pub fn nu(self) -> f64 {
        self.twice_nu as f64 / 2.0
    }

    pub fn is_half_integer(self) -> bool {
        self.twice_nu % 2 == 1
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("Bessel K requires r > 0, got {r}"));
    }
    Ok(())
}

/// K_ν(r).
pub fn bessel_k(order: BesselOrder, r: f64) -> Result<f64> {
    Ok(bessel_k_scaled(order, r)? * (-r).exp())
}

/// eʳ K_ν(r).
pub fn bessel_k_scaled(order: BesselOrder, r: f64) -> Result<f64> {
    check_radius(r)?;
    if order.is_half_integer() {
        return Ok(half_integer_scaled(order.twice_nu / 2, r));
    }
    let seq = integer_sequence_scaled(order.twice_nu / 2, r);
    Ok(seq[(order.twice_nu / 2) as usize])
}

/// Scaled values eʳK_{ν₀+j}(r) for j = 0..count, where ν₀ = twice_start/2.
pub fn bessel_k_scaled_seq(twice_start: u32, count: usize, r: f64) -> Result<Vec<f64>> {
    check_radius(r)?;
    let twice_end = twice_start + 2 * count.saturating_sub(1) as u32;
    BesselOrder::new(twice_end)?;
    if count == 0 {
        return Ok(Vec::new());
    }
    if twice_start % 2 == 1 {
        let m0 = twice_start / 2;
        let mut out = Vec::with_capacity(count);
        let mut km = half_integer_scaled(m0, r);
        out.push(km);
        if count > 1 {
            let mut k = half_integer_scaled(m0 + 1, r);
            out.push(k);
            for j in 2..count {
                let nu = m0 as f64 + (j - 1) as f64 + 0.5;
                let next = km + 2.0 * nu / r * k;
                km = k;
                k = next;
                out.push(k);
            }
        }
        Ok(out)
    } else {
        let m0 = (twice_start / 2) as usize;
        let seq = integer_sequence_scaled((m0 + count - 1) as u32, r);
        Ok(seq[m0..m0 + count].to_vec())
    }
}

/// eʳK_{j+1/2}(r) for j = 0..out.len(), by upward recurrence.
pub(crate) fn half_integer_fill(out: &mut [f64], r: f64) {
    if out.is_empty() {
        return;
    }
    out[0] = (PI / (2.0 * r)).sqrt();
    if out.len() > 1 {
        out[1] = out[0] * (1.0 + 1.0 / r);
    }
    for j in 2..out.len() {
        out[j] = out[j - 2] + (2.0 * j as f64 - 1.0) / r * out[j - 1];
    }
}

/// eʳK_{m+1/2}(r) = √(π/2r) Σ_{j≤m} (m+j)!/(j!(m−j)!) (2r)^{−j}.
fn half_integer_scaled(m: u32, r: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 0..m {
        // a_{j+1}/a_j = (m+j+1)(m−j)/(j+1) · 1/(2r)
        term *= ((m + j + 1) as f64) * ((m - j) as f64) / ((j + 1) as f64) / (2.0 * r);
        sum += term;
    }
    (PI / (2.0 * r)).sqrt() * sum
}

/// eʳK_j(r) for j = 0..=top.
fn integer_sequence_scaled(top: u32, r: f64) -> Vec<f64> {
    let (k0, k1) = if r <= SERIES_CUTOFF {
        let (k0, k1) = k01_series(r);
        let e = r.exp();
        (k0 * e, k1 * e)
    } else {
        k01_steed_scaled(r)
    };
    let mut out = vec![k0];
    if top >= 1 {
        out.push(k1);
    }
    for j in 1..top as usize {
        let next = out[j - 1] + 2.0 * j as f64 / r * out[j];
        out.push(next);
    }
    out
}

/// Power series for K₀ and K₁ (unscaled).
fn k01_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let l = (0.5 * x).ln() + EULER_GAMMA;
    // u_j = y^j/(j!)², t_j = y^j/(j!(j+1)!)
    let mut u = 1.0;
    let mut t = 1.0;
    let mut h = 0.0; // H_j
    let mut s0 = -l;
    let mut s1 = l - 0.5; // H_0 + H_1 = 1
    for j in 1..80 {
        let jf = j as f64;
        u *= y / (jf * jf);
        t *= y / (jf * (jf + 1.0));
        h += 1.0 / jf;
        let d0 = u * (h - l);
        let d1 = t * (l - 0.5 * (2.0 * h + 1.0 / (jf + 1.0)));
        s0 += d0;
        s1 += d1;
        if d0.abs() < 1e-17 * s0.abs() && d1.abs() < 1e-17 * s1.abs() {
            break;
        }
    }
    (s0, 1.0 / x + 0.5 * x * s1)
}

/// Steed's method (continued fraction CF2 with Temme's normalisation) at μ = 0,
/// returning (eˣK₀(x), eˣK₁(x)). Converges rapidly for x ≥ 2.
fn k01_steed_scaled(x: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}
