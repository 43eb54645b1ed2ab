//! Fractional-regularity estimators, symbol analysis, micro-local
//! truncation and the closed-form exponent algebra.

pub mod besov;
pub mod exponents;
pub mod fit;
pub mod microlocal;
pub mod nondegeneracy;
pub mod seminorm;
pub mod symbol;

pub use besov::{besov_profile, besov_profile_auto, time_integrated_profile, BesovProfile};
pub use exponents::{
    aniso_exponents, aniso_lambda, averaging_exponents, conjugate, parabolic_integrability, exponent_table,
    AveragingExponents, ExponentInputs, ExponentRow,
};
pub use fit::{critical_exponent_estimate, ExponentFit, FitWindow};
pub use microlocal::{
    kinetic_space_time, microlocal_decompose, time_window, truncation_multiplier, Cutoff, MicrolocalDecomposition,
    SpaceTimeSlices,
};
pub use nondegeneracy::{
    dv_symbol_bound, fit_power_law, nondegeneracy_fit, nondegeneracy_measure, omega_set, omega_slice,
    NondegeneracyFit, NondegeneracyRow, PowerLawFit, ScanOptions, VInterval,
};
pub use seminorm::{nikolskii_seminorm, nikolskii_time_integral, slobodeckij_seminorm, NikolskiiValue};
pub use symbol::{symbol_dv, symbol_eval, SymbolDescriptor};
