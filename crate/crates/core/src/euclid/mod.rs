//! Euclidean kernels: special functions, the closed-form fundamental
//! solutions of (Δ+α)^k, their derivatives and near/far estimates.

pub mod bessel;
pub mod gamma;
pub mod kernel;

pub use bessel::{bessel_k, bessel_k_scaled, BesselOrder};
pub use gamma::gamma_fn;
pub use kernel::{
    c_nk, d_nk, differentiated_remainder_ratio, envelope_bound, eta, kernel_alpha,
    kernel_alpha_flagged, kernel_closed_form, kernel_k1, kernel_radial_derivative,
    remainder_ratio, BesselCombo, KernelProfile, ProblemParams, UNDERFLOW_ARG,
};
pub mod radial;
pub use radial::RadialKernel;
