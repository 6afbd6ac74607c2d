//! The parametrix construction on the flat torus.

pub mod cutoff;
pub mod pipeline;
pub mod profile;

pub use cutoff::CutoffSpec;
pub use pipeline::{
    assemble_and_compare, composed_exponents, correction_layers, error_field, gamma_iterate,
    grid_sample_pairs, run_parametrix, solve_remainder, u_envelope_constant, ComparisonReport,
    ComparisonRow, Diagnostics, ErrorSpectrum, ParametrixConfig, ParametrixState,
};
pub use profile::{build_h, HProfile};
