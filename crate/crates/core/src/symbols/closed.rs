//! Closed-form symbols and constants.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::modulator::AngularModulator;
use crate::error::{Error, Result};
use crate::numerics::log_gamma;

/// `A_{n,r} = 2π^{(n-1)/2} Γ((1+r)/2) / Γ((n+r)/2)`, so that
/// `∫_{S^{n-1}} |ξ·θ|^r dσ(θ) = A_{n,r} |ξ|^r`.
pub fn normalization_constant(n: usize, r: f64) -> Result<f64> {
    if !(2..=4).contains(&n) {
        return Err(Error::UnsupportedDimension(n, "2, 3, 4"));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("normalization constant needs r > 0, got {r}")));
    }
    let nf = n as f64;
    let log = std::f64::consts::LN_2 + 0.5 * (nf - 1.0) * PI.ln() + log_gamma(0.5 * (1.0 + r))?
        - log_gamma(0.5 * (nf + r))?;
    Ok(log.exp())
}

/// `(|ξ|² + M^{2/α})^{α/2} - M`, evaluated without cancellation for small `|ξ|`.
pub fn relativistic_exponent(xi: &[f64], alpha: f64, mass: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Domain(format!("relativistic exponent needs 0 < alpha < 2, got {alpha}")));
    }
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::Domain(format!("relativistic exponent needs M > 0, got {mass}")));
    }
    let q: f64 = xi.iter().map(|v| v * v).sum();
    let scale = mass.powf(2.0 / alpha);
    // M((1 + q/M^{2/α})^{α/2} - 1)
    Ok(mass * (0.5 * alpha * (q / scale).ln_1p()).exp_m1())
}

fn nonzero(xi: &[f64]) -> Result<f64> {
    let q: f64 = xi.iter().map(|v| v * v).sum();
    if q > 0.0 && q.is_finite() {
        Ok(q)
    } else {
        Err(Error::Domain(format!("symbol undefined at xi={xi:?}")))
    }
}

/// `(ξ_1 - iξ_2)/(ξ_1 + iξ_2) = ξ̄/ξ`.
pub fn beurling_symbol(xi: &[f64]) -> Result<Complex64> {
    if xi.len() != 2 {
        return Err(Error::UnsupportedDimension(xi.len(), "2 (Beurling)"));
    }
    let q = nonzero(xi)?;
    let zc = Complex64::new(xi[0], -xi[1]);
    Ok(zc * zc / q)
}

/// `ξ_1^{2k} / |ξ|^{2k}`.
pub fn riesz_power_symbol(xi: &[f64], k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("Riesz power needs k >= 1".into()));
    }
    let q = nonzero(xi)?;
    Ok((xi[0] * xi[0] / q).powi(k as i32))
}

/// Second-moment matrices of a discrete measure on the sphere:
/// `A = Σ μ_k ψ(θ_k) θ_k θ_k^T` (row-major, complex) and `B = Σ μ_k θ_k θ_k^T`.
pub fn second_moment_matrices(
    atoms: &[Vec<f64>],
    masses: &[f64],
    psi: &AngularModulator,
) -> Result<(Vec<Complex64>, Vec<f64>)> {
    if atoms.is_empty() || atoms.len() != masses.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} atoms with {} masses",
            atoms.len(),
            masses.len()
        )));
    }
    let n = atoms[0].len();
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    let mut b = vec![0.0; n * n];
    for (theta, &mu) in atoms.iter().zip(masses) {
        if theta.len() != n {
            return Err(Error::ShapeMismatch("atoms of mixed dimension".into()));
        }
        let norm: f64 = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("atom {theta:?} is not a unit vector")));
        }
        if !(mu > 0.0) {
            return Err(Error::Domain(format!("atom mass must be positive, got {mu}")));
        }
        let w = psi.eval_direction(theta);
        for i in 0..n {
            for j in 0..n {
                let t = mu * theta[i] * theta[j];
                a[i * n + j] += w * t;
                b[i * n + j] += t;
            }
        }
    }
    Ok((a, b))
}
