use num_complex::Complex64;
use serde::Serialize;

use super::model::{dot, JumpModel};
use super::paths::PathRecord;
use crate::error::{Error, Result};
use crate::spectral::GridField;
use crate::symbols::AngularModulator;

/// Fourier modes below this fraction of the largest are dropped from the interpolant.
pub const MODE_CUTOFF: f64 = 1e-14;

/// Minimum compensator substeps between consecutive jumps.
pub const MIN_SUBSTEPS: usize = 16;

#[derive(Debug, Clone)]
struct Mode {
    xi: Vec<f64>,
    coef: Complex64,
    rho: f64,
    /// `e^{iξ·z_j} − 1` for each atom.
    jump: Vec<Complex64>,
    /// `Σ_j λ_j (e^{iξ·z_j} − 1) φ_j`.
    drift: Complex64,
}

/// Spectral data needed to evaluate `V_f(y, τ) = P_τ f(y)` anywhere and to run the
/// martingale transform with a fixed modulator.
#[derive(Debug, Clone)]
pub struct TransformPlan {
    model: JumpModel,
    weights: Vec<Complex64>,
    modes: Vec<Mode>,
}

/// Outcome of the transform along one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformValue {
    /// `φ⋆V_f(Z_T)`.
    pub value: Complex64,
    pub jump_sum: Complex64,
    pub compensator: Complex64,
    /// `Σ |ΔV|²` over jumps.
    pub qv_base: f64,
    /// `Σ |ΔV|² |φ|²` over jumps.
    pub qv_transform: f64,
    /// `V_f(x_0, T)`.
    pub start: Complex64,
    /// `f(x_T)`.
    pub end: Complex64,
}

impl TransformPlan {
    pub fn new(f: &GridField, model: &JumpModel, phi: &AngularModulator) -> Result<Self> {
        model.validate()?;
        let spec = f.spec();
        if spec.dim() != model.n {
            return Err(Error::ShapeMismatch(format!("grid dimension {} vs model dimension {}", spec.dim(), model.n)));
        }
        let weights = model.atom_weights(phi)?;
        let coeffs = f.forward();
        let scale = 1.0 / spec.len() as f64;
        let largest = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let mut modes = Vec::new();
        for (flat, c) in coeffs.iter().enumerate() {
            if c.norm() <= MODE_CUTOFF * largest || largest == 0.0 {
                continue;
            }
            let xi = spec.frequency(flat);
            let jump: Vec<Complex64> =
                model.atoms.iter().map(|a| Complex64::from_polar(1.0, dot(&xi, &a.z)) - 1.0).collect();
            let drift = model.atoms.iter().zip(&jump).zip(&weights).map(|((a, d), w)| a.rate * d * w).sum();
            modes.push(Mode { rho: model.exponent(&xi)?, xi, coef: c * scale, jump, drift });
        }
        Ok(TransformPlan { model: model.clone(), weights, modes })
    }

    pub fn model(&self) -> &JumpModel {
        &self.model
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    /// Trigonometric interpolant of `P_τ f` at `y`.
    pub fn value_at(&self, y: &[f64], tau: f64) -> Complex64 {
        self.modes.iter().map(|m| m.coef * Complex64::from_polar((tau * m.rho).exp(), dot(&m.xi, y))).sum()
    }

    /// Runs the transform along `path` with horizon `t_final`.
    pub fn transform(&self, path: &PathRecord, t_final: f64, substeps: usize) -> Result<TransformValue> {
        if substeps < MIN_SUBSTEPS {
            return Err(Error::InvalidArgument(format!("need at least {MIN_SUBSTEPS} substeps, got {substeps}")));
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut y = path.x0.clone();
        let mut local = vec![zero; self.modes.len()];
        let (mut jump_sum, mut compensator) = (zero, zero);
        let (mut qv_base, mut qv_transform) = (0.0, 0.0);
        let mut prev = 0.0;
        let ends = path.times.iter().copied().zip(path.atoms.iter().map(|&j| Some(j))).chain([(t_final, None)]);
        for (s, atom) in ends {
            for (l, m) in local.iter_mut().zip(&self.modes) {
                *l = m.coef * Complex64::from_polar(1.0, dot(&m.xi, &y));
            }
            let h = (s - prev) / substeps as f64;
            if h > 0.0 {
                let g = |u: f64| -> Complex64 {
                    local.iter().zip(&self.modes).map(|(l, m)| l * m.drift * ((t_final - u) * m.rho).exp()).sum()
                };
                let mut acc = (g(prev) + g(s)) * 0.5;
                for i in 1..substeps {
                    acc += g(prev + i as f64 * h);
                }
                compensator += acc * h;
            }
            if let Some(j) = atom {
                let dv: Complex64 = local
                    .iter()
                    .zip(&self.modes)
                    .map(|(l, m)| l * m.jump[j] * ((t_final - s) * m.rho).exp())
                    .sum();
                let w = self.weights[j];
                let q = dv.norm_sqr();
                jump_sum += dv * w;
                qv_base += q;
                qv_transform += q * w.norm_sqr();
                for (yi, zi) in y.iter_mut().zip(&self.model.atoms[j].z) {
                    *yi += zi;
                }
            }
            prev = s;
        }
        let value = jump_sum - compensator;
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::NonFinite("martingale transform along a path".into()));
        }
        Ok(TransformValue {
            value,
            jump_sum,
            compensator,
            qv_base,
            qv_transform,
            start: self.value_at(&path.x0, t_final),
            end: self.value_at(&y, 0.0),
        })
    }

    pub fn transform_all(&self, paths: &[PathRecord], t_final: f64, substeps: usize) -> Result<Vec<TransformValue>> {
        paths.iter().map(|p| self.transform(p, t_final, substeps)).collect()
    }
}

/// `φ⋆V_f(Z_T)` for one path.
pub fn transform_terminal_value(
    path: &PathRecord,
    f: &GridField,
    phi: &AngularModulator,
    model: &JumpModel,
    t_final: f64,
    substeps: usize,
) -> Result<Complex64> {
    Ok(TransformPlan::new(f, model, phi)?.transform(path, t_final, substeps)?.value)
}
