//! Multiplier symbols: families, angular modulators, radial profiles and evaluation.

pub mod closed;
pub mod descriptor;
pub mod eval;
pub mod modulator;
pub mod profile;

pub use closed::{
    beurling_symbol, normalization_constant, relativistic_exponent, riesz_power_symbol,
    second_moment_matrices,
};
pub use descriptor::{Family, PhiDoc, SymbolDescriptor};
pub use eval::{RatioSums, RuleKind, SymbolEvaluator};
pub use modulator::{clamp_unit, AngularModulator};
pub use profile::{Density, DensitySpec, ProfileSpec, ProfileValue, RadialProfile};
