//! The commuting family {∂₁, ∂₂, ∂₃, S} and the operators built from it.

pub mod lattice;
pub mod ops;
pub mod word;

pub use lattice::{
    combine_spectra, commuted_source, commuted_source_spectrum, populate_lattice, populate_system, scaling_rows, shifted_power_coeffs, AnalyticSource,
    CommutedLattice, Derivation, LatticeLevel, Source,
};
pub use ops::{
    apply_s, commutator_residual, energy_weight, f_apply, gamma_density, gamma_energy, gamma_energy_of_spectra,
    l_apply, main_formula_residual, second_time_derivative, FForms, OperatorCoefficients, TimeJet,
};
pub use word::{monomials, Letter, Monomial, MultiIndex, NormalForm};
