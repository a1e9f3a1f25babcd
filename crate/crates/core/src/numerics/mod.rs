//! Oracle layer: special functions, sphere quadrature, orthant maximization and
//! finite differences.

pub mod diff;
pub mod gamma;
pub mod optimize;
pub mod quadrature;

pub use diff::{
    axis_aware_steps, default_steps, finite_difference_partial, finite_difference_partial_steps,
    MultiIndexSpec,
};
pub use gamma::{gamma_ratio, log_gamma};
pub use optimize::{maximize_on_sphere_orthant, orthant_point, OrthantMax};
pub use quadrature::{
    gauss_legendre, sphere_area, sphere_quadrature, AlignedRule, KernelRule, QuadratureRule,
};
