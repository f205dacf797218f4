//! Cutoff χ, its dyadic rescalings, P_k projections, angular cutoffs and S_{k,l} measures.

pub mod angular;
pub mod chi;
pub mod dyadic;
pub mod measure;

pub use angular::{angular_argument, angular_cutoff, DyadicIndex};
pub use chi::{branch_jet, chi, chi_d1, chi_d2, chi_jet, chi_smoothness_sup, chi_smoothness_sup_on, Branch};
pub use dyadic::{chi_band, chi_ge, chi_range, chi_scaled, chi_scaled_jet, p_le_project, pk_project};
pub use measure::{
    measure_lemma_sweep, skl_measure_mc, skl_measure_quad, theta_set, PhaseSetSpec, Sign, SweepConfig,
    SweepReport, SweepRow,
};
