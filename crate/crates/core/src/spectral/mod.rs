//! Periodic grid fields and Fourier multiplier application.

pub mod ensemble;
pub mod grid;
pub mod ops;

pub use ensemble::{band_limited_field, gaussian_bump, identity_fields, power_field, standard_ensemble, EnsembleConfig};
pub use grid::{GridField, GridSpec};
pub use ops::{
    apply_multiplier, beurling_identity_error, estimate_lp_ratio, l2_operator_norm, lp_norm, p_star,
    plane_wave, weak_l1_ratio, BoundKind, BoundReport, LabeledField, SymbolGrid,
};
