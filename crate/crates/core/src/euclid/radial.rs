//! Radial profiles with singularity and decay metadata.

use super::kernel::{kernel_alpha, ProblemParams};
use crate::giraud::EnvelopeSpec;
use std::fmt;
use std::sync::Arc;

pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A radial function r ↦ f(r) on r > 0 together with what quadrature
/// needs to know about it.
#[derive(Clone)]
pub struct RadialKernel {
    evaluator: Profile,
    /// f(r) ~ C r^s as r → 0+.
    pub sing_exp: f64,
    pub envelope: Option<EnvelopeSpec>,
    /// Set when the profile is the Euclidean Green kernel of (Δ+α)^k on R^n.
    pub polyharmonic: Option<(u32, u32)>,
    /// Radii where the profile or a derivative jumps.
    pub breaks: Vec<f64>,
    /// f vanishes for r > support.
    pub support: Option<f64>,
    /// Length scale of the far decay, used to place quadrature tails.
    pub decay_length: f64,
}

impl fmt::Debug for RadialKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialKernel")
            .field("sing_exp", &self.sing_exp)
            .field("polyharmonic", &self.polyharmonic)
            .field("breaks", &self.breaks)
            .field("support", &self.support)
            .field("decay_length", &self.decay_length)
            .finish()
    }
}

impl RadialKernel {
    pub fn new(evaluator: impl Fn(f64) -> f64 + Send + Sync + 'static, sing_exp: f64) -> Self {
        RadialKernel {
            evaluator: Arc::new(evaluator),
            sing_exp,
            envelope: None,
            polyharmonic: None,
            breaks: Vec::new(),
            support: None,
            decay_length: 1.0,
        }
    }

    /// G_α^{(k)} on R^n, tagged as a polyharmonic Green kernel.
    pub fn green(params: ProblemParams) -> Self {
        let mut k = Self::untagged_green(params);
        k.polyharmonic = Some((params.n, params.k));
        k
    }

    /// G_α^{(k)} without the polyharmonic tag, for use as a generic profile.
    pub fn untagged_green(params: ProblemParams) -> Self {
        let p = params;
        let mut k = RadialKernel::new(move |r| kernel_alpha(p, r).unwrap_or(f64::NAN),
            2.0 * p.k as f64 - p.n as f64);
        k.envelope = Some(EnvelopeSpec::green(p.n, p.k));
        k.decay_length = 1.0 / p.alpha.sqrt();
        k
    }

    /// Indicator of the closed ball of the given radius.
    pub fn ball_indicator(radius: f64) -> Self {
        let mut k = RadialKernel::new(move |r| if r <= radius { 1.0 } else { 0.0 }, 0.0);
        k.breaks = vec![radius];
        k.support = Some(radius);
        k.decay_length = radius;
        k
    }

    pub fn with_envelope(mut self, e: EnvelopeSpec) -> Self {
        self.envelope = Some(e);
        self
    }

    pub fn with_support(mut self, radius: f64) -> Self {
        self.support = Some(radius);
        self
    }

    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }

    pub fn with_decay_length(mut self, len: f64) -> Self {
        self.decay_length = len;
        self
    }

    pub fn eval(&self, r: f64) -> f64 {
        if let Some(s) = self.support {
            if r > s {
                return 0.0;
            }
        }
        (self.evaluator)(r)
    }
}
