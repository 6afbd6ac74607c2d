//! ∫_T G(x, y) φ(y) dy against the spectral solution u(x) of (Δ+α)^k u = φ.

use super::field::{check_grid, unflatten};
use super::geometry::{torus_distance, TorusGeometry};
use super::lattice::LatticeSum;
use super::radial_fourier::sphere_wave;
use super::spectral::{solve_coeffs, TrigPoly};
use crate::error::{domain, Error, Result};
use crate::euclid::{KernelProfile, ProblemParams};
use crate::parametrix::CutoffSpec;
use crate::quad::{integrate, QuadOptions};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepresentationReport {
    /// ∫ G(x, ·) φ.
    pub integral: f64,
    /// Trapezoidal part ∫ (G − H) φ.
    pub grid_part: f64,
    /// Radial part ∫ H φ around x.
    pub singular_part: f64,
    pub u_x: f64,
    pub defect: f64,
    /// Radial quadrature error plus the lattice truncation bound.
    pub error_estimate: f64,
}

/// The smooth part G − χG sampled once around a fixed grid point x.
pub struct RepresentationContext {
    pub params: ProblemParams,
    pub geometry: TorusGeometry,
    pub cutoff: CutoffSpec,
    pub m: usize,
    pub x: Vec<f64>,
    smooth: Vec<f64>,
    lattice_tail: f64,
    profile: KernelProfile,
}

impl RepresentationContext {
    pub fn new(
        params: ProblemParams,
        geometry: TorusGeometry,
        cutoff: CutoffSpec,
        m: usize,
        x_index: &[usize],
        lattice_tol: f64,
    ) -> Result<Self> {
        let total = check_grid(&geometry, m)?;
        if x_index.len() != geometry.n as usize || x_index.iter().any(|j| *j >= m) {
            return domain(format!("base point {x_index:?} is not a grid index for m = {m}"));
        }
        if cutoff.tau0 >= geometry.injectivity_radius() {
            return domain("cutoff radius must stay inside the injectivity radius");
        }
        let h = geometry.length / m as f64;
        let x: Vec<f64> = x_index.iter().map(|j| *j as f64 * h).collect();
        let lattice = LatticeSum::new(params, geometry, lattice_tol, 0)?;
        let n = geometry.n as usize;
        let smooth: Result<Vec<f64>> = (0..total)
            .into_par_iter()
            .map(|i| {
                let y: Vec<f64> = unflatten(i, n, m).iter().map(|j| *j as f64 * h).collect();
                let (d, v) = torus_distance(&geometry, &x, &y);
                let mut s = lattice.sum_without_principal(&v)?;
                if d > 0.0 {
                    s += (1.0 - cutoff.value(d)) * lattice.profile().value(d)?;
                }
                Ok(s)
            })
            .collect();
        Ok(RepresentationContext {
            params,
            geometry,
            cutoff,
            m,
            x,
            smooth: smooth?,
            lattice_tail: lattice.tail_bound(0)?,
            profile: lattice.profile().clone(),
        })
    }

    pub fn check(&self, phi: &TrigPoly) -> Result<RepresentationReport> {
        phi.check(self.geometry.n)?;
        let n = self.geometry.n as usize;
        let h = self.geometry.length / self.m as f64;
        let cell = h.powi(n as i32);
        let grid_part: f64 = self
            .smooth
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let y: Vec<f64> = unflatten(i, n, self.m).iter().map(|j| *j as f64 * h).collect();
                s * phi.eval(&self.geometry, &y)
            })
            .sum::<f64>()
            * cell;

        // Angular average of each mode around x, then a radial integral against χG.
        let c = 2.0 * std::f64::consts::PI / self.geometry.length;
        let modes: Vec<(f64, f64)> = phi
            .terms
            .iter()
            .map(|(mode, a)| {
                let xi = mode.iter().map(|q| (c * *q as f64).powi(2)).sum::<f64>().sqrt();
                let phase: f64 = mode.iter().zip(&self.x).map(|(q, t)| c * *q as f64 * t).sum();
                (xi, (a * num_complex::Complex64::from_polar(1.0, phase)).re)
            })
            .collect();
        let nn = self.geometry.n;
        let tau0 = self.cutoff.tau0;
        let integrand = |r: f64| -> f64 {
            if r <= 0.0 {
                return 0.0;
            }
            let g = self.profile.value(r).unwrap_or(f64::NAN);
            let mean: f64 = modes.iter().map(|(xi, w)| w * sphere_wave(nn, xi * r)).sum();
            self.cutoff.value(r) * g * r.powi(nn as i32 - 1) * mean
        };
        let knee = (1.0 / self.params.sqrt_alpha()).min(tau0 / 2.0);
        let mut pts = vec![0.0];
        let mut b = knee;
        while b > knee * 1e-6 {
            pts.push(b);
            b /= 4.0;
        }
        pts.extend([tau0 / 2.0, tau0]);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        let q = integrate(integrand, &pts, QuadOptions::tight(1e-15, 1e-12));
        if !q.converged || !q.value.is_finite() {
            return Err(Error::Convergence {
                msg: "singular radial quadrature".into(),
                best: q.value,
                err: q.error,
            });
        }
        let u = solve_coeffs(&self.params, &self.geometry, phi)?;
        let u_x = u.eval(&self.geometry, &self.x);
        let integral = grid_part + q.value;
        let weight: f64 = phi.terms.iter().map(|(_, a)| a.norm()).sum();
        Ok(RepresentationReport {
            integral,
            grid_part,
            singular_part: q.value,
            u_x,
            defect: (integral - u_x).abs(),
            error_estimate: q.error + self.lattice_tail * weight * self.geometry.length.powi(n as i32),
        })
    }
}

/// One-shot representation check at grid point `x_index`.
pub fn representation_check(
    params: ProblemParams,
    geometry: TorusGeometry,
    phi: &TrigPoly,
    x_index: &[usize],
    m: usize,
    cutoff: CutoffSpec,
    lattice_tol: f64,
) -> Result<RepresentationReport> {
    RepresentationContext::new(params, geometry, cutoff, m, x_index, lattice_tol)?.check(phi)
}
