//! Spectral time integration of □^{(i)}φ_i = N_i.

pub mod data;
pub mod exactness;
pub mod halfwave;
pub mod linear;
pub mod norms;
pub mod speeds;
pub mod stepper;
pub mod system;
pub mod trajectory;

pub use data::{gaussian_bump, seeded_packet, PacketSpec};
pub use exactness::{linear_exactness, LinearExactness};
pub use halfwave::{half_wave_profile, profile_distance, profile_spectrum, u_profile};
pub use linear::{exact_linear_step, linear_energy, Propagator};
pub use norms::{commuted_nonlinearity, nonlinearity_gradient_norms, nonlinearity_l1_l2_norms};
pub use speeds::{SpeedTriple, DEFAULT_CONE_EXPONENT};
pub use stepper::{integrate, max_gradient, Stepper, SystemState};
pub use system::{generic_cubic, no_self_interaction_coupling, Factor, Flags, Slot, SystemSpec, Term, Trilinear, Validation};
pub use trajectory::{scattering_drift, ProfileSnapshot, Trajectory};
