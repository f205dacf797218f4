//! Periodic grids, spectral differentiation, polar operators and lattice norms.

pub mod field;
pub mod grid;
pub mod interp;
pub mod ops;
pub mod quadrature;
pub mod region;

pub use field::{ComplexField, ScalarField, Spectrum};
pub use grid::Grid;
pub use interp::PointEvaluator;
pub use ops::{
    angular_gradient_sq, aniso_laplacian, euler, gradient, laplacian, radial_derivative,
    radial_second_derivative, slashed_laplacian, spectral_derivative, Jet, LatticeJets,
};
pub use quadrature::{gauss_legendre, SplitQuadrature};
pub use region::{integrate, norm, NormKind, Region};
