//! Numerical verification of derivative formulas, optimization lemmas and multiplier
//! theorem hypotheses.

pub mod cases;
pub mod hormander;
pub mod mixed;
pub mod relativistic;
pub mod report;
pub mod symbol;

pub use cases::{
    case_derivative, directional_power, dyadic_rectangle_check, dyadic_rectangle_integral, lagrange1_brute,
    lagrange1_max, lagrange2_brute, lagrange2_max, marcinkiewicz_weighted_sup, rising_even,
    weighted_case_derivative, weighted_sup_reference, DerivativeCase,
};
pub use hormander::{
    critical_order, fit_power_exponent, gbound_hbound_check, hbound_constant, hormander_shell_check,
    mikhlin_pointwise_check, shell_value, ShellOptions,
};
pub use mixed::{distinct_index_sets, mixed_factor_check, weighted_sup_on_sphere, MixedFactorParams, PROBE_RADII};
pub use relativistic::{l_estimate_sups, relativistic_l_estimates, SWEEP_RANGE};
pub use report::CheckReport;
pub use symbol::CheckSymbol;
