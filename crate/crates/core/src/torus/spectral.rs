//! Trigonometric polynomials and the exact per-mode solve of (Δ+α)^k u = φ.

use super::field::TorusField;
use super::geometry::TorusGeometry;
use crate::error::{domain, Result};
use crate::euclid::ProblemParams;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// φ(y) = Re Σ a_m e^{2πi m·y/L}.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrigPoly {
    pub terms: Vec<(Vec<i64>, Complex64)>,
}

impl TrigPoly {
    pub fn constant(c: f64, n: u32) -> Self {
        TrigPoly { terms: vec![(vec![0; n as usize], Complex64::new(c, 0.0))] }
    }

    /// Π_i cos(2π q_i y_i / L), expanded into exponentials.
    pub fn cos_product(q: &[i64]) -> Self {
        let mut terms = vec![(Vec::new(), Complex64::new(1.0, 0.0))];
        for &qi in q {
            let mut next = Vec::new();
            for (mode, c) in &terms {
                if qi == 0 {
                    let mut m = mode.clone();
                    m.push(0);
                    next.push((m, *c));
                } else {
                    for s in [qi, -qi] {
                        let mut m = mode.clone();
                        m.push(s);
                        next.push((m, c * 0.5));
                    }
                }
            }
            terms = next;
        }
        TrigPoly { terms }
    }

    pub fn single_mode(mode: Vec<i64>, coeff: Complex64) -> Self {
        TrigPoly { terms: vec![(mode, coeff)] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| *c == Complex64::new(0.0, 0.0))
    }

    pub fn check(&self, n: u32) -> Result<()> {
        for (m, _) in &self.terms {
            if m.len() != n as usize {
                return domain(format!("mode {m:?} does not have {n} components"));
            }
        }
        Ok(())
    }

    /// Complex value Σ a_m e^{2πi m·y/L}.
    pub fn eval_complex(&self, geometry: &TorusGeometry, y: &[f64]) -> Complex64 {
        let c = 2.0 * PI / geometry.length;
        self.terms
            .iter()
            .map(|(m, a)| {
                let phase: f64 = m.iter().zip(y).map(|(q, t)| c * *q as f64 * t).sum();
                a * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    pub fn eval(&self, geometry: &TorusGeometry, y: &[f64]) -> f64 {
        self.eval_complex(geometry, y).re
    }

    /// Mode-wise multiplier.
    pub fn map_coeffs(&self, mut f: impl FnMut(&[i64]) -> f64) -> TrigPoly {
        TrigPoly { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * f(m))).collect() }
    }
}

/// Symbol ((2π|m|/L)² + α)^k of (Δ+α)^k.
pub fn symbol(params: &ProblemParams, geometry: &TorusGeometry, mode: &[i64]) -> f64 {
    let c = 2.0 * PI / geometry.length;
    let xi2: f64 = mode.iter().map(|q| (c * *q as f64).powi(2)).sum();
    (xi2 + params.alpha).powi(params.k as i32)
}

/// Coefficients of u with (Δ+α)^k u = φ.
pub fn solve_coeffs(params: &ProblemParams, geometry: &TorusGeometry, phi: &TrigPoly) -> Result<TrigPoly> {
    phi.check(geometry.n)?;
    Ok(phi.map_coeffs(|m| 1.0 / symbol(params, geometry, m)))
}

/// u sampled on an m^n grid.
pub fn spectral_solve(
    params: ProblemParams,
    geometry: TorusGeometry,
    phi: &TrigPoly,
    m: usize,
) -> Result<TorusField> {
    if params.n != geometry.n {
        return domain("kernel and torus dimensions differ");
    }
    let u = solve_coeffs(&params, &geometry, phi)?;
    TorusField::sample(geometry, m, |y| u.eval(&geometry, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_mode() {
        let p = ProblemParams::new(3, 1, 4.0).unwrap();
        let g = TorusGeometry::new(3, 1.0).unwrap();
        let u = spectral_solve(p, g, &TrigPoly::constant(1.0, 3), 4).unwrap();
        assert!(u.values.iter().all(|v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn single_cosine() {
        let p = ProblemParams::new(3, 1, 1.0).unwrap();
        let g = TorusGeometry::new(3, 1.0).unwrap();
        let phi = TrigPoly::cos_product(&[1, 0, 0]);
        let u = spectral_solve(p, g, &phi, 8).unwrap();
        for i in 0..u.len() {
            let y = u.point(i);
            let expect = (2.0 * PI * y[0]).cos() / (4.0 * PI * PI + 1.0);
            assert!((u.values[i] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn doubling_matches_square() {
        let g = TorusGeometry::new(5, 1.3).unwrap();
        let p1 = ProblemParams::new(5, 1, 7.0).unwrap();
        let p2 = ProblemParams::new(5, 2, 7.0).unwrap();
        let phi = TrigPoly::cos_product(&[1, 2, 0, 0, 3]);
        let once = solve_coeffs(&p1, &g, &solve_coeffs(&p1, &g, &phi).unwrap()).unwrap();
        let direct = solve_coeffs(&p2, &g, &phi).unwrap();
        for ((_, a), (_, b)) in once.terms.iter().zip(&direct.terms) {
            assert!((a - b).norm() <= 1e-15 * b.norm());
        }
    }

    #[test]
    fn cos_product_expands() {
        let g = TorusGeometry::new(3, 1.0).unwrap();
        let phi = TrigPoly::cos_product(&[1, 2, 0]);
        let y = [0.1, 0.37, 0.8];
        let expect = (2.0 * PI * 0.1).cos() * (4.0 * PI * 0.37).cos();
        assert!((phi.eval(&g, &y) - expect).abs() < 1e-14);
        assert_eq!(phi.terms.len(), 4);
    }
}
