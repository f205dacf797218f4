//! Diagnostics, fits, bootstrap monitors, verdicts and run directories.

pub mod bootstrap;
pub mod config;
pub mod constants;
pub mod diagnostics;
pub mod fit;
pub mod report;
pub mod run;
pub mod verdict;

pub use bootstrap::{bootstrap_monitor, functional, japanese, BootstrapMode, BootstrapReport, DriftPair};
pub use config::{Config, Normalize, SEED_ENV};
pub use constants::{CalibratedConstants, ConstantCheck};
pub use diagnostics::{
    cone_bin_edges, cone_binned_sup, diagnostics_row, fourier_sup, gradient_magnitude, linf_gamma_norm, linf_xi_norm,
    ComponentDiagnostics, DiagnosticsRow, DiagnosticsSettings,
};
pub use fit::{decay_fit, last_octave, linear_regression, FitResult};
pub use report::{diagnostics_csv, loglog_svg, read_run_dir, summarize, write_run_dir, Table};
pub use run::{execute_run, prepare, simulate, Manifest, Prepared, RunOutput};
pub use verdict::{CheckResult, Verdict, CHECK_IDS};
