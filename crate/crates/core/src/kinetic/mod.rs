//! Kinetic formulation: `χ(u, v)`, velocity averages, the scheme's
//! dissipation measure and the energy audits built on it.

mod audit;
mod dissipation;
mod residual;
mod vgrid;

pub use audit::{
    anderson_energy_audit, anderson_tau, entropy_audit, implied_constant, negative_sobolev_surrogate,
    power_gradient_integral, AuditOptions, AuditReport, AuditRow,
};
pub use dissipation::{
    dissipation_from_run, dissipation_from_run_axes, power_moment, singular_moment, DissipationCell,
    DissipationMeasure,
};
pub use residual::{kinetic_residual, ResidualReport, BASKET_SIZE};
pub use vgrid::{chi, chi_edge_difference, chi_value, velocity_average, KineticField, VGrid};
