//! Fourier transforms of radial functions: f̂(ξ) = ∫_0^∞ f(r) r^{n−1} S_n(|ξ| r) dr.

use crate::euclid::gamma::{factorial, gamma_half_integer};
use crate::giraud::sphere_area;
use crate::quad::gauss_legendre;
use std::f64::consts::PI;

/// S_n(z) = ∫_{S^{n−1}} e^{i z θ₁} dσ(θ).
pub fn sphere_wave(n: u32, z: f64) -> f64 {
    let z = z.abs();
    if z < 2.0 {
        return series(n, z);
    }
    match n {
        1 => 2.0 * z.cos(),
        3 => 4.0 * PI * z.sin() / z,
        5 => 8.0 * PI * PI * (z.sin() - z * z.cos()) / z.powi(3),
        7 => {
            let j2 = (3.0 / z.powi(3) - 1.0 / z) * z.sin() - 3.0 * z.cos() / (z * z);
            16.0 * PI.powi(3) * j2 / (z * z)
        }
        _ => quadrature(n, z),
    }
}

// ω_{n−1} Σ_j (−1)^j Γ(n/2) (z/2)^{2j} / (j! Γ(n/2+j)).
fn series(n: u32, z: f64) -> f64 {
    let g0 = gamma_half_integer(n);
    let mut sum = 0.0;
    let q = (z / 2.0) * (z / 2.0);
    let mut pw = 1.0;
    for j in 0..40u32 {
        let term = pw * g0 / (factorial(j) * gamma_half_integer(n + 2 * j));
        sum += if j % 2 == 0 { term } else { -term };
        if term < 1e-18 * sum.abs() {
            break;
        }
        pw *= q;
    }
    sphere_area(n - 1) * sum
}

// ω_{n−2} ∫_0^π cos(z cos θ) sin^{n−2}θ dθ.
fn quadrature(n: u32, z: f64) -> f64 {
    let m = 64 + (2.0 * z).ceil() as usize;
    let (x, w) = gauss_legendre(m);
    let s: f64 = x
        .iter()
        .zip(&w)
        .map(|(t, wt)| {
            let th = PI / 2.0 * (t + 1.0);
            wt * (z * th.cos()).cos() * th.sin().powi(n as i32 - 2)
        })
        .sum();
    sphere_area(n - 2) * s * PI / 2.0
}

/// A radial profile tabulated on composite Gauss–Legendre nodes over
/// [0, outer], ready for repeated transforms.
#[derive(Debug, Clone)]
pub struct RadialTable {
    pub n: u32,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RadialTable {
    /// Panels geometric towards 0 below `inner`, each no wider than `panel`.
    pub fn new(
        n: u32,
        f: impl Fn(f64) -> f64,
        inner: f64,
        outer: f64,
        panel: f64,
    ) -> Self {
        let (gx, gw) = gauss_legendre(16);
        let mut breaks = vec![0.0];
        let mut b = inner.min(outer) * 2f64.powi(-30);
        while b < inner.min(outer) {
            breaks.push(b);
            b *= 2.0;
        }
        let start = inner.min(outer);
        let count = ((outer - start) / panel).ceil().max(1.0) as usize;
        for i in 0..=count {
            breaks.push(start + (outer - start) * i as f64 / count as f64);
        }
        breaks.dedup();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            for (x, wt) in gx.iter().zip(&gw) {
                let r = a + half * (x + 1.0);
                nodes.push(r);
                weights.push(half * wt * r.powi(n as i32 - 1) * f(r));
            }
        }
        RadialTable { n, nodes, weights }
    }

    /// ∫ f(r) r^{n−1} S_n(ξ r) dr.
    pub fn transform(&self, xi: f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(r, w)| w * sphere_wave(self.n, xi * r)).sum()
    }

    /// ∫_{R^n} f(|y|) dy.
    pub fn integral(&self) -> f64 {
        self.transform(0.0)
    }
}
