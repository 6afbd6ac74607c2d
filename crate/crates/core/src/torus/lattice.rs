//! Periodization of the Euclidean kernel over the lattice L·Z^n.

use super::geometry::{torus_distance, TorusGeometry};
use crate::euclid::gamma::{binomial, factorial};
use crate::euclid::{KernelProfile, ProblemParams, UNDERFLOW_ARG};
use crate::giraud::sphere_area;
use crate::error::{domain, Error, Result};
use crate::jet::Jet;
use serde::Serialize;

/// Refuse image sets larger than this.
pub const MAX_IMAGES: usize = 20_000_000;

const NEGLIGIBLE: f64 = 1e-30;

/// Lattice-sum value with its certified truncation bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeValue {
    pub value: f64,
    pub tail_bound: f64,
    /// Contribution of the image nearest to the pole.
    pub principal: f64,
    /// True when the other images together are below 1e−30 of the principal one.
    pub underflow: bool,
}

/// Fixed image set {Lm : |Lm| ≤ R} with the kernel profile needed to sum it.
#[derive(Debug, Clone)]
pub struct LatticeSum {
    pub params: ProblemParams,
    pub geometry: TorusGeometry,
    pub tol: f64,
    pub radius: f64,
    profile: KernelProfile,
    images: Vec<Vec<f64>>,
    tail_start: f64,
}

// ∫_a^∞ e^{−s(t−a)} (t+h)^{n−1} dt.
fn shell_integral(n: u32, a: f64, h: f64, s: f64) -> f64 {
    let m = n - 1;
    (0..=m)
        .map(|j| binomial(m, j) * (a + h).powi((m - j) as i32) * factorial(j) / s.powi(j as i32 + 1))
        .sum()
}

impl LatticeSum {
    /// Image set whose omitted part is certified below `tol` for derivatives up to `max_order`.
    pub fn new(params: ProblemParams, geometry: TorusGeometry, tol: f64, max_order: usize) -> Result<Self> {
        if params.n != geometry.n {
            return domain(format!("kernel dimension {} differs from torus dimension {}", params.n, geometry.n));
        }
        if !(tol > 0.0) {
            return domain(format!("tolerance must be positive, got {tol}"));
        }
        let profile = KernelProfile::new(params, max_order)?;
        let h = geometry.diameter();
        let sa = params.sqrt_alpha();
        let tail = |a: f64| -> Result<f64> {
            let mut worst: f64 = 0.0;
            for l in 0..=max_order {
                worst = worst.max(profile.derivative(a, l)?.abs());
            }
            Ok(geometry.length.powi(-(params.n as i32)) * sphere_area(params.n - 1) * worst * shell_integral(params.n, a, h, sa))
        };
        // Kernels decay at least like e^{−√α t}; start past the near regime.
        let mut hi = h.max(1.0 / sa);
        let cap = (MAX_IMAGES as f64).powf(1.0 / params.n as f64) * geometry.length;
        while tail(hi)? > tol {
            hi *= 1.5;
            if hi > cap || sa * hi > UNDERFLOW_ARG {
                return Err(Error::Budget(format!(
                    "lattice tail above {tol:e} needs image radius beyond {:.3e}; alpha = {} is too small",
                    hi, params.alpha
                )));
            }
        }
        let mut lo = hi / 1.5;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if mid > 0.0 && tail(mid)? <= tol {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let a = hi;
        let radius = a + 3.0 * h;
        let images = enumerate_images(&geometry, radius)?;
        Ok(LatticeSum { params, geometry, tol, radius, profile, images, tail_start: a })
    }

    pub fn image_count(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Vec<f64>] {
        &self.images
    }

    /// Certified bound on the omitted images for derivative order `l`.
    pub fn tail_bound(&self, l: usize) -> Result<f64> {
        let p = &self.params;
        let g = self.profile.derivative(self.tail_start, l)?.abs();
        Ok(self.geometry.length.powi(-(p.n as i32))
            * sphere_area(p.n - 1)
            * g
            * shell_integral(p.n, self.tail_start, self.geometry.diameter(), p.sqrt_alpha()))
    }

    pub fn profile(&self) -> &KernelProfile {
        &self.profile
    }

    /// Σ_m G(|v + Lm|) for a reduced displacement v.
    pub fn sum_displacement(&self, v: &[f64]) -> Result<LatticeValue> {
        let nearest = self
            .images
            .iter()
            .map(|img| dist(v, img))
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, r)| if r < acc.1 { (i, r) } else { acc });
        if nearest.1 == 0.0 {
            return domain("lattice sum evaluated on the diagonal x = y");
        }
        let principal = self.profile.value(nearest.1)?;
        let mut others = 0.0;
        for (i, img) in self.images.iter().enumerate() {
            if i != nearest.0 {
                others += self.profile.value(dist(v, img))?;
            }
        }
        let total = principal + others;
        Ok(LatticeValue {
            value: total,
            tail_bound: self.tail_bound(0)?,
            principal,
            underflow: others <= NEGLIGIBLE * principal.abs(),
        })
    }

    pub fn value(&self, x: &[f64], y: &[f64]) -> Result<LatticeValue> {
        check_point(&self.geometry, x)?;
        check_point(&self.geometry, y)?;
        let (_, v) = torus_distance(&self.geometry, x, y);
        self.sum_displacement(&v)
    }

    /// Σ over images excluding m = 0, at displacement v (may be zero).
    pub fn sum_without_principal(&self, v: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for img in &self.images {
            if img.iter().all(|c| *c == 0.0) {
                continue;
            }
            total += self.profile.value(dist(v, img))?;
        }
        Ok(total)
    }

    /// ∇_y G(x, y) at reduced displacement v = y − x.
    pub fn gradient_displacement(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut grad = vec![0.0; v.len()];
        for img in &self.images {
            let r = dist(v, img);
            if r == 0.0 {
                return domain("gradient evaluated on the diagonal x = y");
            }
            let g1 = self.profile.derivative(r, 1)?;
            for (i, gi) in grad.iter_mut().enumerate() {
                *gi += g1 * (v[i] + img[i]) / r;
            }
        }
        Ok(grad)
    }

    /// Jet in t of G(x, x + v + (t − 0)·e) for a unit direction e.
    pub fn directional_jet(&self, v: &[f64], e: &[f64], order: usize) -> Result<Jet> {
        let mut out = Jet::constant(0.0, order);
        for img in &self.images {
            let w: Vec<f64> = v.iter().zip(img).map(|(a, b)| a + b).collect();
            let r0 = norm(&w);
            if r0 == 0.0 {
                return domain("derivative evaluated on the diagonal x = y");
            }
            let we: f64 = w.iter().zip(e).map(|(a, b)| a * b).sum();
            let mut r2 = Jet::constant(r0 * r0, order);
            if order >= 1 {
                r2.0[1] = 2.0 * we;
            }
            if order >= 2 {
                r2.0[2] = e.iter().map(|c| c * c).sum();
            }
            let r = r2.sqrt();
            let g = self.profile.jet(r0, order)?;
            out = &out + &Jet::compose(&g, &r);
        }
        Ok(out)
    }
}

fn dist(v: &[f64], img: &[f64]) -> f64 {
    v.iter().zip(img).map(|(a, b)| (a + b) * (a + b)).sum::<f64>().sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub(crate) fn check_point(geometry: &TorusGeometry, x: &[f64]) -> Result<()> {
    if x.len() != geometry.n as usize {
        return domain(format!("point has {} coordinates, torus dimension is {}", x.len(), geometry.n));
    }
    if x.iter().any(|c| !c.is_finite()) {
        return domain("point coordinates must be finite");
    }
    Ok(())
}

fn enumerate_images(geometry: &TorusGeometry, radius: f64) -> Result<Vec<Vec<f64>>> {
    let n = geometry.n as usize;
    let l = geometry.length;
    let reach = (radius / l).floor() as i64;
    let side = (2 * reach + 1) as f64;
    if side.powi(n as i32) > 4.0 * MAX_IMAGES as f64 {
        return Err(Error::Budget(format!("image box of side {side} in dimension {n}")));
    }
    let mut out = Vec::new();
    let mut m = vec![-reach; n];
    loop {
        let r2: f64 = m.iter().map(|c| (*c as f64 * l).powi(2)).sum();
        if r2 <= radius * radius {
            out.push(m.iter().map(|c| *c as f64 * l).collect());
            if out.len() > MAX_IMAGES {
                return Err(Error::Budget(format!("more than {MAX_IMAGES} lattice images")));
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            m[i] += 1;
            if m[i] <= reach {
                break;
            }
            m[i] = -reach;
            i += 1;
        }
    }
}

/// One-shot lattice sum G(x, y) with the tail certified below `tol`.
pub fn green_lattice_sum(
    params: ProblemParams,
    geometry: TorusGeometry,
    x: &[f64],
    y: &[f64],
    tol: f64,
) -> Result<LatticeValue> {
    LatticeSum::new(params, geometry, tol, 0)?.value(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn yukawa(alpha: f64) -> ProblemParams {
        ProblemParams::new(3, 1, alpha).unwrap()
    }

    fn unit() -> TorusGeometry {
        TorusGeometry::new(3, 1.0).unwrap()
    }

    #[test]
    fn two_nearest_images_dominate() {
        let v = green_lattice_sum(yukawa(100.0), unit(), &[0.0; 3], &[0.5, 0.0, 0.0], 1e-10).unwrap();
        let lead = 2.0 * (-5.0f64).exp() / (2.0 * PI);
        assert!((v.value / lead - 1.0).abs() < 5e-3);
        // direct sum over |m| ≤ 4
        assert!((v.value - 0.0021528642328906764).abs() < 1e-10);
        assert!(v.tail_bound <= 1e-10);
    }

    #[test]
    fn frozen_direct_sums() {
        let s = LatticeSum::new(yukawa(500.0), unit(), 1e-12, 0).unwrap();
        let v = s.sum_displacement(&[0.1, 0.2, -0.3]).unwrap().value;
        assert!((v - 4.9457391019646564e-05).abs() < 1e-13);
        let s = LatticeSum::new(yukawa(2000.0), unit(), 1e-12, 0).unwrap();
        let v = s.sum_displacement(&[0.25, 0.25, 0.25]).unwrap().value;
        assert!((v / 7.14846894646953e-10 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn large_alpha_reduces_to_principal_image() {
        let p = yukawa(1e4);
        let v = green_lattice_sum(p, unit(), &[0.0; 3], &[0.1, 0.0, 0.0], 1e-10).unwrap();
        let euclid = crate::euclid::kernel_alpha(p, 0.1).unwrap();
        assert!(((v.value - euclid) / euclid).abs() < 1e-30);
        assert_eq!(v.principal, euclid);
        assert!(v.underflow);
    }

    #[test]
    fn tail_bound_is_honest() {
        // compare a loose sum against a much tighter one
        let p = yukawa(30.0);
        let loose = LatticeSum::new(p, unit(), 1e-6, 0).unwrap();
        let tight = LatticeSum::new(p, unit(), 1e-14, 0).unwrap();
        assert!(tight.image_count() > loose.image_count());
        let v = [0.3, -0.1, 0.45];
        let a = loose.sum_displacement(&v).unwrap();
        let b = tight.sum_displacement(&v).unwrap();
        assert!((a.value - b.value).abs() <= a.tail_bound + b.tail_bound);
    }

    #[test]
    fn errors() {
        let p = yukawa(100.0);
        assert!(green_lattice_sum(p, unit(), &[0.2; 3], &[0.2; 3], 1e-10).is_err());
        assert!(green_lattice_sum(p, unit(), &[0.2; 3], &[1.2, 0.2, 0.2], 1e-10).is_err());
        assert!(matches!(LatticeSum::new(yukawa(1e-6), unit(), 1e-10, 0), Err(Error::Budget(_))));
        assert!(LatticeSum::new(p, TorusGeometry::new(5, 1.0).unwrap(), 1e-10, 0).is_err());
    }

    #[test]
    fn symmetric_in_arguments() {
        let s = LatticeSum::new(yukawa(500.0), unit(), 1e-10, 0).unwrap();
        let x = [0.13, 0.77, 0.4];
        let y = [0.91, 0.05, 0.62];
        let a = s.value(&x, &y).unwrap().value;
        let b = s.value(&y, &x).unwrap().value;
        assert!((a - b).abs() <= 1e-15 * a);
    }

    #[test]
    fn five_dimensional_biharmonic() {
        let p = ProblemParams::new(5, 2, 50.0).unwrap();
        let g = TorusGeometry::new(5, 1.0).unwrap();
        let s = LatticeSum::new(p, g, 1e-10, 0).unwrap();
        let v = s.sum_displacement(&[0.2, 0.0, 0.1, 0.0, 0.0]).unwrap();
        assert!(v.value > v.principal && v.principal > 0.0);
    }
}
