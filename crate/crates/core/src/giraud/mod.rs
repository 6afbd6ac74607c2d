//! Giraud-type convolution estimates: exact exponent calculus for
//! two-regime envelopes, a radial convolution engine and a certifier that
//! fits constants against sampled kernels.

pub mod convolve;
pub mod envelope;

pub use convolve::{radial_convolve, sphere_area, ConvolutionValue};
pub use envelope::{
    compatibility_check, compose_alpha, compose_euclid, compose_psi, compose_psi_with,
    iterate_error_envelopes, iteration_depth, printed_iterate_exponents, psi, q, CompatReport,
    EnvelopeSpec, NearRegime, PsiEnvelope, Q,
};
pub mod certify;
pub use certify::{certify_bound, far_slope, least_squares, CertifyOptions, CertifyReport};
