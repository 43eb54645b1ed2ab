//! Explicit monotone solvers for the forced porous medium equation, its
//! anisotropic variant and the 1D Anderson-type equation.

mod anderson;
mod contraction;
mod engine;
mod forcing;
mod noise;
mod pme;
mod trajectory;

pub use anderson::{solve_anderson, AndersonProblem, AndersonRun};
pub use contraction::{l1_contraction_check, ContractionReport};
pub use engine::SnapshotStride;
pub use forcing::{Forcing, Spike, SpikeTrain};
pub use noise::{mollify_noise, noise_grid, sample_white_noise};
pub use pme::{solve_aniso, solve_pme, AnisoProblem, PmeProblem};
pub use trajectory::{trapezoid_weights, SchemeInfo, SchemeKind, Trajectory};

/// Default CFL safety factor.
pub const DEFAULT_CFL: f64 = 0.4;

/// Default blow-up cap for initial data of amplitude `max|u0|`.
pub fn default_blowup_cap(u0_max: f64) -> f64 {
    1e6 * (1.0 + u0_max)
}

pub(crate) fn check_common(t_end: f64, cfl: f64, eps: f64, max_dt: Option<f64>) -> crate::Result<()> {
    use crate::error::invalid;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return invalid(format!("t_end must be positive, got {t_end}"));
    }
    if !(cfl > 0.0 && cfl < 1.0) {
        return invalid(format!("cfl_safety must lie in (0,1), got {cfl}"));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return invalid(format!("viscosity must be >= 0, got {eps}"));
    }
    if let Some(d) = max_dt {
        if !(d > 0.0) {
            return invalid(format!("max_dt must be positive, got {d}"));
        }
    }
    Ok(())
}
