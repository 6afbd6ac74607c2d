//! The flat torus T^n_L: exact Green's function by lattice summation, the
//! spectral solver and pointwise verifications.

pub mod field;
pub mod geometry;
pub mod lattice;
pub mod radial_fourier;
pub mod representation;
pub mod spectral;
pub mod verify;

pub use field::{Spectrum, TorusField};
pub use geometry::{torus_distance, TorusGeometry};
pub use lattice::{green_lattice_sum, LatticeSum, LatticeValue};
pub use representation::{representation_check, RepresentationContext, RepresentationReport};
pub use spectral::{spectral_solve, symbol, TrigPoly};
pub use verify::{
    derivative_envelope_fit, envelope_conformance, finite_difference_gradient, green_derivative,
    green_gradient, near_diagonal_fit, near_product_ratio, random_pairs, random_pairs_at_distance,
    symmetry_positivity_scan, three_regime_bound, EnvelopeFit, PointPair, ScanReport,
};
