use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::model::JumpModel;
use super::paths::{empirical_char_function, simulate_paths, PathRecord};
use super::projection::{project_conditional, single_frequency_coefficient, ProjectionEstimate};
use super::transform::{TransformPlan, TransformValue};
use crate::checks::CheckReport;
use crate::error::{Error, Result};
use crate::spectral::{GridField, GridSpec};
use crate::symbols::PhiDoc;

/// Largest admissible `e^{Tρ(ξ)}` at the probe frequency.
pub const BIAS_LIMIT: f64 = 1e-3;

/// Everything a simulation run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub model: JumpModel,
    pub shape: Vec<usize>,
    pub box_len: Vec<f64>,
    pub t_final: f64,
    pub paths: usize,
    pub seed: u64,
    pub substeps: usize,
    pub min_per_bin: usize,
    /// Integer lattice index of the driving frequency; `f = cos(ξ·x)`.
    pub probe: Vec<i64>,
    pub phi: PhiDoc,
}

impl SimulationConfig {
    /// Two atom pairs commensurate with a 64² grid on `[0, 2π)²`, second-harmonic
    /// modulator, probe `ξ = (1, 1)`.
    pub fn standard() -> Self {
        let h = 2.0 * PI / 64.0;
        SimulationConfig {
            model: JumpModel::from_pairs(2, &[(vec![8.0 * h, 0.0], 1.0), (vec![4.0 * h, 4.0 * h], 0.5)])
                .expect("valid model"),
            shape: vec![64, 64],
            box_len: vec![2.0 * PI, 2.0 * PI],
            t_final: 8.0,
            paths: 100_000,
            seed: 0x5eed_0009,
            substeps: 16,
            min_per_bin: 8,
            probe: vec![1, 1],
            phi: PhiDoc::SecondHarmonic { sign: -1 },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: SimulationConfig = serde_json::from_str(text)?;
        c.model.validate()?;
        Ok(c)
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(&self.shape, &self.box_len)
    }

    pub fn probe_frequency(&self) -> Result<Vec<f64>> {
        if self.probe.len() != self.box_len.len() {
            return Err(Error::ShapeMismatch("probe index and box have different dimensions".into()));
        }
        Ok(self.probe.iter().zip(&self.box_len).map(|(&k, &l)| 2.0 * PI * k as f64 / l).collect())
    }

    /// `cos(ξ·x)` at the probe frequency.
    pub fn driving_field(&self) -> Result<GridField> {
        let xi = self.probe_frequency()?;
        Ok(GridField::from_fn(self.grid()?, |x| {
            Complex64::new(x.iter().zip(&xi).map(|(a, b)| a * b).sum::<f64>().cos(), 0.0)
        }))
    }

    pub fn plan(&self) -> Result<TransformPlan> {
        TransformPlan::new(&self.driving_field()?, &self.model, &self.phi.clone().into_modulator(self.model.n))
    }

    pub fn simulate(&self) -> Result<Vec<PathRecord>> {
        simulate_paths(&self.model, &self.grid()?, self.t_final, self.paths, self.seed)
    }

    fn config_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// Ten small lattice indices in dimension `n`.
pub fn probe_indices(n: usize) -> Vec<Vec<i64>> {
    if n == 1 {
        return (1..=10).map(|k| vec![k]).collect();
    }
    [[1, 0], [0, 1], [1, 1], [2, -1], [3, 0], [0, 3], [2, 2], [-1, 3], [4, 1], [1, 5]]
        .iter()
        .map(|k| k.to_vec())
        .collect()
}

/// Result of a projection run.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionRun {
    pub estimate: ProjectionEstimate,
    pub coefficient: Complex64,
    pub std_err: f64,
    pub expected: Complex64,
    pub z_score: f64,
    pub bias_factor: f64,
    /// Coefficient with twice the compensator substeps.
    pub refined_coefficient: Complex64,
    pub mean_jumps: f64,
    #[serde(skip)]
    pub values: Vec<TransformValue>,
}

pub fn run_projection(config: &SimulationConfig) -> Result<ProjectionRun> {
    let plan = config.plan()?;
    let xi = config.probe_frequency()?;
    let paths = config.simulate()?;
    let values = plan.transform_all(&paths, config.t_final, config.substeps)?;
    let fine = plan.transform_all(&paths, config.t_final, 2 * config.substeps)?;
    let terminal: Vec<Complex64> = values.iter().map(|v| v.value).collect();
    let refined: Vec<Complex64> = fine.iter().map(|v| v.value).collect();
    let estimate = project_conditional(&paths, &terminal, &config.grid()?, config.min_per_bin)?;
    let (coefficient, std_err) = single_frequency_coefficient(&paths, &terminal, &xi)?;
    let (refined_coefficient, _) = single_frequency_coefficient(&paths, &refined, &xi)?;
    let phi = config.phi.clone().into_modulator(config.model.n);
    // f = cos(ξ·x) has amplitude 1/2 at ξ.
    let expected = config.model.limiting_symbol(&xi, &phi)? * 0.5;
    let bias_factor = (config.t_final * config.model.exponent(&xi)?).exp();
    let mean_jumps = paths.iter().map(|p| p.jumps() as f64).sum::<f64>() / paths.len() as f64;
    Ok(ProjectionRun {
        estimate,
        z_score: (coefficient - expected).norm() / std_err,
        coefficient,
        std_err,
        expected,
        bias_factor,
        refined_coefficient,
        mean_jumps,
        values,
    })
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Fourier coefficient of the conditional expectation at the probe frequency against
/// `m_ν(ξ)f̂(ξ)`, in standard errors.
pub fn projection_check(config: &SimulationConfig) -> Result<CheckReport> {
    let run = run_projection(config)?;
    let substep_change = (run.refined_coefficient - run.coefficient).norm();
    Ok(CheckReport::new("projection", run.z_score, Some(3.0), 0.0)
        .param("config", config.config_value())
        .meta("coefficient", pair(run.coefficient))
        .meta("expected", pair(run.expected))
        .meta("std_err", run.std_err)
        .meta("bias_factor", run.bias_factor)
        .meta("substep_change", substep_change)
        .meta("mean_jumps", run.mean_jumps)
        .meta("usable_fraction", run.estimate.usable_fraction())
        .require("bias_controlled", run.bias_factor <= BIAS_LIMIT)
        .require("substeps_converged", substep_change < run.std_err))
}

/// Counts paths on which the transform's jump quadratic variation exceeds the base one.
pub fn subordination_check(config: &SimulationConfig) -> Result<CheckReport> {
    let plan = config.plan()?;
    let paths = config.simulate()?;
    let values = plan.transform_all(&paths, config.t_final, config.substeps)?;
    let violations = values.iter().filter(|v| v.qv_transform > v.qv_base).count();
    let worst = values.iter().map(|v| v.qv_transform - v.qv_base).fold(f64::NEG_INFINITY, f64::max);
    Ok(CheckReport::new("subordination", violations as f64, Some(0.0), 0.0)
        .param("config", config.config_value())
        .meta("paths", values.len())
        .meta("max_qv_excess", worst))
}

/// Empirical characteristic function of `X_T − X_0` against `e^{Tρ(ξ)}` at the ten
/// [`probe_indices`], in standard errors.
pub fn char_function_check(config: &SimulationConfig) -> Result<CheckReport> {
    let paths = config.simulate()?;
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for k in probe_indices(config.model.n) {
        let xi: Vec<f64> = k.iter().zip(&config.box_len).map(|(&k, &l)| 2.0 * PI * k as f64 / l).collect();
        let (ecf, se) = empirical_char_function(&paths, &xi);
        let exact = (config.t_final * config.model.exponent(&xi)?).exp();
        let z = (ecf - exact).norm() / se;
        worst = worst.max(z);
        rows.push(serde_json::json!({"k": k, "ecf": pair(ecf), "exact": exact, "std_err": se, "z": z}));
    }
    Ok(CheckReport::new("char-function", worst, Some(4.0), 0.0)
        .param("config", config.config_value())
        .meta("frequencies", rows))
}
