use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::grid::{GridField, GridSpec};
use super::ops::LabeledField;
use crate::error::{Error, Result};

/// Widths of the isotropic bumps, as fractions of the shortest box side.
pub const BUMP_WIDTHS: [f64; 5] = [1.0 / 64.0, 1.0 / 48.0, 1.0 / 32.0, 1.0 / 24.0, 1.0 / 16.0];

/// Composition of the standard probing ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub seed: u64,
    /// Number of random band-limited fields.
    pub random_fields: usize,
    /// Largest integer frequency per axis in the random fields.
    pub band_limit: usize,
    /// Adds `|z|^{-n/p}` power fields for this `p`.
    pub extremal_p: Option<f64>,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig { seed: 0x5eed_1e77, random_fields: 32, band_limit: 6, extremal_p: None }
    }
}

fn centre(spec: &GridSpec) -> Vec<f64> {
    spec.box_len().iter().map(|l| l / 2.0).collect()
}

/// `exp(-Σ (x_i - c_i)²/(2σ_i²))`.
pub fn gaussian_bump(spec: &GridSpec, centre: &[f64], widths: &[f64]) -> GridField {
    GridField::from_fn(spec.clone(), |x| {
        let q: f64 = x.iter().zip(centre).zip(widths).map(|((a, c), s)| ((a - c) / s).powi(2)).sum();
        Complex64::new((-0.5 * q).exp(), 0.0)
    })
}

/// Real part of a random trigonometric polynomial with Gaussian coefficients on
/// integer frequencies `|k_i| <= band`.
pub fn band_limited_field(spec: &GridSpec, band: usize, rng: &mut ChaCha8Rng) -> Result<GridField> {
    if band == 0 || 2 * band >= *spec.shape().iter().min().expect("non-empty shape") {
        return Err(Error::InvalidArgument(format!("band limit {band} does not fit the grid")));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); spec.len()];
    for (flat, slot) in coeffs.iter_mut().enumerate() {
        let idx = spec.unravel(flat);
        let inside =
            idx.iter().zip(spec.shape()).all(|(&i, &s)| GridSpec::wrapped(i, s).unsigned_abs() as usize <= band);
        if inside {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *slot = Complex64::new(re, im);
        }
    }
    let f = GridField::from_coefficients(spec.clone(), coeffs)?;
    let data = f.into_data().into_iter().map(|z| Complex64::new(z.re, 0.0)).collect();
    GridField::new(spec.clone(), data)
}

/// `|x - c|^{-n/p}` on `h <= |x - c| <= R` (h one cell, R a quarter box), times
/// `e^{iwθ}` in the plane when `winding` is nonzero.
pub fn power_field(spec: &GridSpec, p: f64, winding: i32) -> GridField {
    let n = spec.dim() as f64;
    let c = centre(spec);
    let h = (0..spec.dim()).map(|a| spec.spacing(a)).fold(0.0, f64::max);
    let big = spec.box_len().iter().cloned().fold(f64::INFINITY, f64::min) / 4.0;
    GridField::from_fn(spec.clone(), |x| {
        let d: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a - b).collect();
        let rho = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rho < h || rho > big {
            return Complex64::new(0.0, 0.0);
        }
        let amp = rho.powf(-n / p);
        if winding != 0 && d.len() >= 2 {
            Complex64::from_polar(amp, winding as f64 * d[1].atan2(d[0]))
        } else {
            Complex64::new(amp, 0.0)
        }
    })
}

/// Fixed mix: isotropic bumps at 5 widths, 3 anisotropic bumps, seeded random
/// band-limited fields and optional power fields.
pub fn standard_ensemble(spec: &GridSpec, config: &EnsembleConfig) -> Result<Vec<LabeledField>> {
    let c = centre(spec);
    let side = spec.box_len().iter().cloned().fold(f64::INFINITY, f64::min);
    let mut out = Vec::new();
    for w in BUMP_WIDTHS {
        let widths = vec![w * side; spec.dim()];
        out.push(LabeledField { label: format!("bump:{w:.5}"), field: gaussian_bump(spec, &c, &widths) });
    }
    for (i, aspect) in [2.0, 4.0, 8.0].into_iter().enumerate() {
        let widths: Vec<f64> =
            (0..spec.dim()).map(|a| side / 32.0 * if a == i % spec.dim() { aspect } else { 1.0 }).collect();
        out.push(LabeledField { label: format!("aniso:{aspect}"), field: gaussian_bump(spec, &c, &widths) });
    }
    for i in 0..config.random_fields {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(i as u64);
        out.push(LabeledField {
            label: format!("band:{}:{i}", config.seed),
            field: band_limited_field(spec, config.band_limit, &mut rng)?,
        });
    }
    if let Some(p) = config.extremal_p {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!("power field exponent needs p > 1, got {p}")));
        }
        for w in [0, 2, -2] {
            if w != 0 && spec.dim() < 2 {
                continue;
            }
            out.push(LabeledField { label: format!("power:{p}:{w}"), field: power_field(spec, p, w) });
        }
    }
    Ok(out)
}

/// Three fields used by the identity checks: a round bump, an elongated bump and one
/// random band-limited field.
pub fn identity_fields(spec: &GridSpec, seed: u64) -> Result<Vec<LabeledField>> {
    let c = centre(spec);
    let side = spec.box_len().iter().cloned().fold(f64::INFINITY, f64::min);
    let round = vec![side / 16.0; spec.dim()];
    let long: Vec<f64> = (0..spec.dim()).map(|a| side / 32.0 * if a == 0 { 4.0 } else { 1.0 }).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(vec![
        LabeledField { label: "bump:round".into(), field: gaussian_bump(spec, &c, &round) },
        LabeledField { label: "bump:long".into(), field: gaussian_bump(spec, &c, &long) },
        LabeledField { label: format!("band:{seed}"), field: band_limited_field(spec, 6, &mut rng)? },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ensemble_is_deterministic() {
        let spec = GridSpec::cube(2, 32, 8.0).unwrap();
        let cfg = EnsembleConfig { random_fields: 3, extremal_p: Some(3.0), ..Default::default() };
        let a = standard_ensemble(&spec, &cfg).unwrap();
        let b = standard_ensemble(&spec, &cfg).unwrap();
        assert_eq!(a.len(), 5 + 3 + 3 + 3);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.label, y.label);
            assert_eq!(x.field, y.field);
        }
        assert_ne!(a[8].field, a[9].field);
    }

    #[test]
    fn band_limited_fields_are_real_and_band_limited() {
        let spec = GridSpec::cube(2, 16, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = band_limited_field(&spec, 3, &mut rng).unwrap();
        assert!(f.data().iter().all(|z| z.im == 0.0));
        let coeffs = f.forward();
        for (flat, z) in coeffs.iter().enumerate() {
            let idx = spec.unravel(flat);
            if idx.iter().any(|&i| GridSpec::wrapped(i, 16).abs() > 3) {
                assert!(z.norm() < 1e-10);
            }
        }
        assert!(band_limited_field(&spec, 8, &mut rng).is_err());
    }
}
