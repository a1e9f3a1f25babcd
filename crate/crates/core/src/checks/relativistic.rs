use super::report::CheckReport;
use crate::error::{Error, Result};
use crate::symbols::{DensitySpec, RadialProfile};

/// Sweep range for `x`.
pub const SWEEP_RANGE: (f64, f64) = (1e-4, 1e4);

/// `(sup |L(x)|/min{x^α, x²}, sup |L'(x)|/min{x^{α-1}, x})` over `samples` log-spaced `x`.
pub fn l_estimate_sups(profile: &RadialProfile, alpha: f64, samples: usize) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::InvalidArgument("sweep needs at least two points".into()));
    }
    let (lo, hi) = (SWEEP_RANGE.0.ln(), SWEEP_RANGE.1.ln());
    let (mut s1, mut s2) = (0.0f64, 0.0f64);
    for i in 0..samples {
        let x = (lo + (hi - lo) * i as f64 / (samples - 1) as f64).exp();
        let v = profile.eval_full(x);
        let r1 = v.value.abs() / x.powf(alpha).min(x * x);
        let r2 = v.derivative.abs() / x.powf(alpha - 1.0).min(x);
        if !r1.is_finite() || !r2.is_finite() {
            return Err(Error::NonFinite(format!("profile estimate at x={x}")));
        }
        s1 = s1.max(r1);
        s2 = s2.max(r2);
    }
    Ok((s1, s2))
}

/// Checks the small/large-`x` bounds on `L` and `L'` for a tempered density in dimension `n`.
///
/// Also validates the density preconditions by sampling: `φ(r) = r^{1+α}v(r)` bounded
/// and non-increasing on `[1, ∞)`, and `φ(r) e^r r^{-(n+α-1)/2}` bounded. The sweep is
/// repeated at twice the resolution; both sups must move by less than 5%.
pub fn relativistic_l_estimates(density: &DensitySpec, n: usize, samples: usize) -> Result<CheckReport> {
    density.validate()?;
    let alpha = density
        .alpha()
        .ok_or_else(|| Error::InvalidArgument("relativistic estimates need a non-zero density".into()))?;
    let p = (n as f64 + alpha - 1.0) / 2.0;
    let mut monotone = true;
    let mut phi_sup = 0.0f64;
    let mut envelope = 0.0f64;
    let mut prev = f64::INFINITY;
    for i in 0..=800 {
        let r = 200f64.powf(i as f64 / 800.0);
        let phi = density.envelope_factor(r);
        monotone &= phi <= prev * (1.0 + 1e-12);
        prev = phi;
        phi_sup = phi_sup.max(phi);
        envelope = envelope.max((phi.ln() + r - p * r.ln()).exp());
    }
    let profile = RadialProfile::from_spec(density.clone())?;
    let (a1, a2) = l_estimate_sups(&profile, alpha, samples)?;
    let (b1, b2) = l_estimate_sups(&profile, alpha, 2 * samples - 1)?;
    let change = ((b1 - a1).abs() / b1).max((b2 - a2).abs() / b2);
    Ok(CheckReport::new("relativistic-l-estimates", b1.max(b2), None, 0.05)
        .param("density", serde_json::to_value(density).expect("density serializes"))
        .param("alpha", alpha)
        .param("n", n)
        .param("samples", samples)
        .meta("sup_value_ratio", b1)
        .meta("sup_derivative_ratio", b2)
        .meta("coarse_value_ratio", a1)
        .meta("coarse_derivative_ratio", a2)
        .meta("refinement_change", change)
        .meta("envelope_constant", envelope)
        .meta("phi_sup", phi_sup)
        .require("phi_non_increasing", monotone)
        .require("envelope_bounded", envelope.is_finite() && phi_sup.is_finite())
        .require("refinement_stable", change < 0.05))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tempered_density_passes() {
        let d = DensitySpec::relativistic_like(1.0, 2);
        let rep = relativistic_l_estimates(&d, 2, 33).unwrap();
        assert!(rep.pass, "{}", rep.to_json());
    }

    #[test]
    fn literal_envelope_is_not_monotone() {
        let d = DensitySpec::EnvelopeMin { alpha: 1.0, p: 2.0 };
        let rep = relativistic_l_estimates(&d, 2, 9).unwrap();
        assert_eq!(rep.meta["phi_non_increasing"], serde_json::Value::Bool(false));
    }
}
