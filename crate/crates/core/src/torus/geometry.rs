//! The flat torus T^n_L = R^n / (L Z)^n.

use crate::error::{domain, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGeometry {
    pub n: u32,
    pub length: f64,
}

impl TorusGeometry {
    pub fn new(n: u32, length: f64) -> Result<Self> {
        if n < 1 {
            return domain("torus dimension must be positive");
        }
        if !(length > 0.0) || !length.is_finite() {
            return domain(format!("period length must be positive, got {length}"));
        }
        Ok(TorusGeometry { n, length })
    }

    /// i_g = L/2.
    pub fn injectivity_radius(&self) -> f64 {
        self.length / 2.0
    }

    /// Largest possible distance, √n·L/2.
    pub fn diameter(&self) -> f64 {
        (self.n as f64).sqrt() * self.length / 2.0
    }

    /// Reduce a coordinate into [0, L).
    pub fn wrap(&self, x: f64) -> f64 {
        let r = x.rem_euclid(self.length);
        if r >= self.length {
            0.0
        } else {
            r
        }
    }

    /// Representative of a displacement in [−L/2, L/2).
    pub fn reduce(&self, delta: f64) -> f64 {
        let l = self.length;
        let mut v = delta.rem_euclid(l);
        if v >= l / 2.0 {
            v -= l;
        }
        v
    }
}

/// Shortest displacement v from x to y and its length.
pub fn torus_distance(geometry: &TorusGeometry, x: &[f64], y: &[f64]) -> (f64, Vec<f64>) {
    let v: Vec<f64> = x.iter().zip(y).map(|(a, b)| geometry.reduce(b - a)).collect();
    let d = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    (d, v)
}
