//! Polynomial smoothstep cutoff χ: 1 on [0, τ0/2], 0 on [τ0, ∞).

use crate::error::{domain, Result};
use crate::euclid::gamma::binomial;
use crate::torus::TorusGeometry;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub tau0: f64,
    /// Class C^q at both junctions.
    pub smoothness: u32,
}

// S(t) = t^{q+1} Σ_{j ≤ q} C(q+j, j)(1−t)^j in the monomial basis.
fn smoothstep_coeffs(q: u32) -> Vec<f64> {
    let deg = 2 * q as usize + 1;
    let mut out = vec![0.0; deg + 1];
    for j in 0..=q {
        let c = binomial(q + j, j);
        // (1−t)^j = Σ_i C(j,i)(−1)^i t^i
        for i in 0..=j {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            out[(q + 1 + i) as usize] += c * binomial(j, i) * sign;
        }
    }
    out
}

impl CutoffSpec {
    pub fn new(tau0: f64, smoothness: u32) -> Result<Self> {
        if !(tau0 > 0.0) || !tau0.is_finite() {
            return domain(format!("tau0 must be positive, got {tau0}"));
        }
        Ok(CutoffSpec { tau0, smoothness })
    }

    /// τ0 = 0.9·i_g/(n+2) with class C^{2k+2}.
    pub fn auto(geometry: &TorusGeometry, k: u32) -> Result<Self> {
        Self::new(0.9 * geometry.injectivity_radius() / (geometry.n as f64 + 2.0), 2 * k + 2)
    }

    /// τ0 < i_g/(n+2) and at least 2k vanishing derivatives.
    pub fn validate(&self, geometry: &TorusGeometry, k: u32) -> Result<()> {
        let bound = geometry.injectivity_radius() / (geometry.n as f64 + 2.0);
        if self.tau0 >= bound {
            return Err(crate::Error::Precondition(format!(
                "tau0 < i_g/(n+2) = {bound} is required, got {}",
                self.tau0
            )));
        }
        if self.smoothness < 2 * k {
            return Err(crate::Error::Precondition(format!(
                "cutoff of class C^{} cannot carry (Δ+α)^{k}",
                self.smoothness
            )));
        }
        Ok(())
    }

    pub fn value(&self, r: f64) -> f64 {
        self.derivatives(r, 0)[0]
    }

    /// χ^{(j)}(r) for j = 0..=order, exact on each polynomial piece.
    pub fn derivatives(&self, r: f64, order: usize) -> Vec<f64> {
        let mut out = vec![0.0; order + 1];
        let a = self.tau0 / 2.0;
        let w = self.tau0 / 2.0;
        if r <= a {
            out[0] = 1.0;
            return out;
        }
        if r >= self.tau0 {
            return out;
        }
        let t = (r - a) / w;
        let mut c = smoothstep_coeffs(self.smoothness);
        for (j, slot) in out.iter_mut().enumerate() {
            let v = c.iter().rev().fold(0.0, |acc, x| acc * t + x);
            let piece = if j == 0 { 1.0 - v } else { -v };
            *slot = piece / w.powi(j as i32);
            c = c.iter().enumerate().skip(1).map(|(i, x)| x * i as f64).collect();
            if c.is_empty() {
                c.push(0.0);
            }
        }
        out
    }
}
