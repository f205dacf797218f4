//! Numerical checks of the Böchner identities and the inequalities built on them.

pub mod bochner;
pub mod inequalities;
pub mod report;
pub mod suite;
pub mod weights;

pub use bochner::{
    bochner_integrated, bochner_terms, check_support, first_order_integrated, integrate_jets, weighted_bochner_ratio,
    weighted_bochner_terms, BochnerTerms, WeightedTerms,
};
pub use inequalities::{
    exterior_energy_check, interior_elliptic_check, sobolev_embedding_check, ExteriorSample, Measurement,
};
pub use report::IdentityReport;
pub use weights::WeightSpec;
pub use suite::{calibrate, measure_lemma_check, verify_identities, InequalityEnsembles, MeasureCheck, SuiteOutput};
