//! Pull-in voltage, stability, sweeps, boundary decay, extremal probes and
//! the regime classifier.

mod bounds;
mod decay;
mod extremal;
mod pullin;
pub mod regime;
mod stability;
mod sweep;

pub use bounds::{green_decay_constant, lambda_hash, lambda_upper_bound, lambda_upper_bound_discrete, mu_star};
pub use decay::{decay_window, fit_boundary_decay, DecayFit, MIN_SAMPLES, SKIPPED_LAYERS, WINDOW_MAX};
pub use extremal::{extremal_probe, ExtremalEntry, ExtremalProbe, BOUNDED_RATIO};
pub use pullin::{find_pullin, PullInResult, DEFAULT_REL_TOL};
pub use regime::{classify, Extremal, Regime, RegimeReport};
pub use stability::{linearized_weight, stability, StabilityReport};
pub use sweep::{lambda_star_diagnostic, sup_distance, sweep_lambda, SweepRecord, NORMALIZED_GAP_FLOOR};
