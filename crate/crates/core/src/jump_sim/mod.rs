//! Compound Poisson paths, the martingale transform along them, and projection of the
//! terminal values onto the grid.

pub mod experiments;
pub mod model;
pub mod paths;
pub mod projection;
pub mod transform;

pub use experiments::{
    char_function_check, probe_indices, projection_check, run_projection, subordination_check, ProjectionRun,
    SimulationConfig, BIAS_LIMIT,
};
pub use model::{semigroup_field, Atom, JumpModel};
pub use paths::{empirical_char_function, simulate_path, simulate_paths, PathRecord};
pub use projection::{
    mean_and_stderr, nearest_cell, pairwise_sum, project_conditional, single_frequency_coefficient,
    ProjectionEstimate,
};
pub use transform::{transform_terminal_value, TransformPlan, TransformValue, MIN_SUBSTEPS, MODE_CUTOFF};
