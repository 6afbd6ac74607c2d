//! The cutoff parametrix H = χ·G_α and its exact error l = (Δ+α)^k H.

use super::cutoff::CutoffSpec;
use crate::error::{Error, Result};
use crate::euclid::{KernelProfile, ProblemParams};
use crate::jet::Jet;
use crate::torus::TorusGeometry;

/// Deepest power of Δ+α the symbolic radial pipeline applies.
pub const MAX_K: u32 = 3;

#[derive(Debug, Clone)]
pub struct HProfile {
    pub params: ProblemParams,
    pub cutoff: CutoffSpec,
    kernel: KernelProfile,
}

/// H(r) = χ(r)·G_α(r), after checking 1/√α < τ0/2 and the cutoff constraints.
pub fn build_h(params: ProblemParams, geometry: &TorusGeometry, cutoff: CutoffSpec) -> Result<HProfile> {
    if params.n != geometry.n {
        return Err(Error::Domain("kernel and torus dimensions differ".into()));
    }
    if params.k > MAX_K {
        return Err(Error::Unsupported(format!("radial pipeline supports k ≤ {MAX_K}, got {}", params.k)));
    }
    cutoff.validate(geometry, params.k)?;
    let inv = 1.0 / params.sqrt_alpha();
    if inv >= cutoff.tau0 / 2.0 {
        return Err(Error::Precondition(format!(
            "1/√α < τ0/2 is required: 1/√α = {inv:.4}, τ0/2 = {:.4}",
            cutoff.tau0 / 2.0
        )));
    }
    let kernel = KernelProfile::new(params, 2 * params.k as usize)?;
    Ok(HProfile { params, cutoff, kernel })
}

impl HProfile {
    pub fn kernel(&self) -> &KernelProfile {
        &self.kernel
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        if r >= self.cutoff.tau0 {
            return Ok(0.0);
        }
        Ok(self.cutoff.value(r) * self.kernel.value(r)?)
    }

    /// l(r), identically zero off the annulus [τ0/2, τ0].
    pub fn error_value(&self, r: f64) -> Result<f64> {
        let tau0 = self.cutoff.tau0;
        if r <= tau0 / 2.0 || r >= tau0 {
            return Ok(0.0);
        }
        let order = 2 * self.params.k as usize;
        let g = Jet::from_derivatives(&self.kernel.jet(r, order)?);
        let chi = Jet::from_derivatives(&self.cutoff.derivatives(r, order));
        let mut f = &chi * &g;
        let n1 = self.params.n as f64 - 1.0;
        for _ in 0..self.params.k {
            f = self.shifted_laplacian(&f, r, n1);
        }
        Ok(f.value())
    }

    // −f″ − (n−1)f′/r + αf on jets, losing two orders.
    fn shifted_laplacian(&self, f: &Jet, r: f64, n1: f64) -> Jet {
        let ord = f.order() - 2;
        let d1 = f.deriv();
        let d2 = d1.deriv().truncate(ord);
        let inv_r = Jet::variable(r, ord).recip();
        let radial = (&d1.truncate(ord) * &inv_r).scale(n1);
        let mass = f.truncate(ord).scale(self.params.alpha);
        &(&mass - &d2) - &radial
    }

    /// sup |l| ≤ C·α^{k(n+1)/4}(τ0/2)^{((k−2)n+k+4)/2}e^{−√α τ0/2} without C.
    pub fn error_envelope_shape(&self) -> f64 {
        let (n, k) = (self.params.n as f64, self.params.k as f64);
        let half = self.cutoff.tau0 / 2.0;
        self.params.alpha.powf(k * (n + 1.0) / 4.0)
            * half.powf(((k - 2.0) * n + k + 4.0) / 2.0)
            * (-self.params.sqrt_alpha() * half).exp()
    }
}
