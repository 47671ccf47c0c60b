//! Traveling fronts for bistable reaction-diffusion equations with
//! saturating (mean-curvature type) diffusion.
//!
//! A monotone profile `v(z)` of
//!
//! ```text
//! eps * (P(v'))' - c v' + f(v) = 0
//! ```
//!
//! is traded for the scalar first-order problem
//!
//! ```text
//! y'(v) = c R(y / eps) - f(v),   0 <= y < eps * M0,
//! ```
//!
//! where `y = eps * Q(v')`, `Q(t) = ∫₀ᵗ s P'(s) ds` is bounded by `M0` and
//! `R` is its inverse. Critical speeds, steady states with a jump,
//! nonmonotone glued waves and vanishing-diffusion experiments are all built
//! on shooting this reduced equation.
//!
//! ```
//! use satfront::{BistableReaction, SaturatingFlux, critical_speed_bistable, Regime};
//!
//! let f = BistableReaction::cubic(0.4).unwrap();
//! let flux = SaturatingFlux::mean_curvature();
//! let r = critical_speed_bistable(&f, &flux, 0.005, 1e-7, &Default::default()).unwrap();
//! assert_eq!(r.regime, Regime::DiscontinuousSteadyState);
//! ```

pub mod config;
pub mod diffusion;
pub mod error;
pub mod integrator;
pub mod limits;
pub mod numeric;
pub mod profiles;
pub mod reaction;
pub mod reduced;
pub mod shooting;

pub use config::{FluxSpec, ReactionSpec};
pub use diffusion::SaturatingFlux;
pub use error::{Error, Result};
pub use limits::{
    critical_front_convergence, distributional_pairing, fixed_speed_convergence, pairing_convergence,
    speed_sweep, Bump, ConvergenceReport, FrontFamily, Metric, TestFunction,
};
pub use profiles::{
    bistable_front, build_discontinuous_steady, glue_nonmonotone, inviscid_front, jump_endpoints,
    monostable_front, reconstruct_front, FrontCurve, GlueStart, ProfileKind, ProfileOptions, WaveProfile,
};
pub use reaction::{BistableReaction, Reaction, ReflectedReaction};
pub use reduced::{shoot, Direction, ReducedField, ReducedTrajectory, ShootOptions, TerminalEvent};
pub use shooting::{
    classify_bistable, critical_speed_bistable, critical_speed_monostable, estimate_speed_bracket,
    Classification, MonostableMode, Regime, SpeedKind, SpeedResult,
};
