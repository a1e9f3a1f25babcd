use num_complex::Complex64;

use super::closed::{beurling_symbol, riesz_power_symbol};
use super::descriptor::{Family, SymbolDescriptor};
use crate::error::{Error, Result};
use crate::numerics::{sphere_quadrature, AlignedRule, KernelRule, QuadratureRule};

/// Which sphere rule to integrate over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    /// Rebuilt around each ξ (default; required accuracy for non-even exponents).
    Aligned,
    /// The fixed product rule of `sphere_quadrature`.
    Fixed,
}

#[derive(Debug, Clone)]
enum Rule {
    None,
    Fixed(QuadratureRule),
    Aligned(AlignedRule),
}

/// Numerator and denominator of a ratio symbol at one frequency.
#[derive(Debug, Clone, Copy)]
pub struct RatioSums {
    pub numerator: Complex64,
    pub denominator: f64,
    /// `Σ w_j |K(ξ·θ_j)|`, the scale against which a vanishing denominator is judged.
    pub magnitude: f64,
}

/// A descriptor bound to a quadrature rule.
#[derive(Debug, Clone)]
pub struct SymbolEvaluator {
    desc: SymbolDescriptor,
    rule: Rule,
    level: u32,
}

impl SymbolEvaluator {
    pub fn new(desc: &SymbolDescriptor, level: u32) -> Result<Self> {
        Self::with_rule(desc, level, RuleKind::Aligned)
    }

    /// Tabulated modulators always use the fixed rule they were tabulated on.
    pub fn with_rule(desc: &SymbolDescriptor, level: u32, kind: RuleKind) -> Result<Self> {
        desc.validate()?;
        let (rule, level) = if !desc.family.uses_quadrature() {
            (Rule::None, level)
        } else if let crate::symbols::AngularModulator::Tabulated { level: tl, .. } = desc.phi {
            (Rule::Fixed(sphere_quadrature(desc.n, tl)?), tl)
        } else {
            match kind {
                RuleKind::Aligned => (Rule::Aligned(AlignedRule::new(desc.n, level)?), level),
                RuleKind::Fixed => (Rule::Fixed(sphere_quadrature(desc.n, level)?), level),
            }
        };
        Ok(SymbolEvaluator { desc: desc.clone(), rule, level })
    }

    pub fn descriptor(&self) -> &SymbolDescriptor {
        &self.desc
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn rule(&self) -> Option<&dyn KernelRule> {
        match &self.rule {
            Rule::None => None,
            Rule::Fixed(r) => Some(r),
            Rule::Aligned(r) => Some(r),
        }
    }

    /// Relative error estimate of the underlying rule (0 for closed forms).
    pub fn est_error(&self) -> f64 {
        self.rule().map_or(0.0, |r| r.est_error())
    }

    /// m(ξ); `dc` at ξ = 0.
    pub fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        if xi.len() != self.desc.n {
            return Err(Error::ShapeMismatch(format!(
                "frequency has {} components, symbol n={}",
                xi.len(),
                self.desc.n
            )));
        }
        if xi.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("frequency {xi:?}")));
        }
        let q: f64 = xi.iter().map(|v| v * v).sum();
        if q == 0.0 {
            return Ok(self.desc.dc);
        }
        match &self.desc.family {
            Family::Beurling => beurling_symbol(xi),
            Family::RieszPower { k } => Ok(Complex64::new(riesz_power_symbol(xi, *k)?, 0.0)),
            Family::Constant { c } => Ok(*c),
            _ => {
                let sums = self.sums(xi)?;
                let floor = match self.desc.family {
                    Family::Stable { .. } | Family::Mixed { .. } => 1e-300,
                    _ => 1e-12 * sums.magnitude,
                };
                if !(sums.denominator.abs() > floor) {
                    return Err(Error::VanishingDenominator {
                        xi: xi.to_vec(),
                        detail: format!("denominator {:e}", sums.denominator),
                    });
                }
                let m = sums.numerator / sums.denominator;
                if m.re.is_finite() && m.im.is_finite() {
                    Ok(m)
                } else {
                    Err(Error::NonFinite(format!("symbol value at {xi:?}")))
                }
            }
        }
    }

    /// Quadrature sums `Σ w K φ` and `Σ w K` (plus Gaussian parts). For the stable
    /// family the kernel is `|ξ·θ|^r` including the `|ξ|^r` factor.
    pub fn sums(&self, xi: &[f64]) -> Result<RatioSums> {
        let rule = self
            .rule()
            .ok_or_else(|| Error::InvalidArgument(format!("{} symbol has no quadrature form", self.desc.family.name())))?;
        let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::Domain("quadrature sums need xi != 0".into()));
        }
        let axis: Vec<f64> = xi.iter().map(|v| v / norm).collect();
        let phi = &self.desc.phi;
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        let mut mag = 0.0;
        let mut failure = None;
        let kernel: Box<dyn Fn(f64) -> f64 + '_> = match &self.desc.family {
            Family::Stable { r } => {
                let r = *r;
                Box::new(move |t: f64| t.abs().powf(r))
            }
            Family::Mixed { r, s, c_r, c_s } => {
                let (r, s, c_r, c_s) = (*r, *s, *c_r, *c_s);
                Box::new(move |t: f64| {
                    let x = (norm * t).abs();
                    c_r * x.powf(r) + c_s * x.powf(s)
                })
            }
            Family::GeneralL { profile } | Family::LevyGauss { profile, .. } => {
                Box::new(move |t: f64| profile.value(norm * t))
            }
            _ => unreachable!("closed-form families have no rule"),
        };
        let tabulated = rule.fixed_key().is_some() && phi.is_tabulated();
        rule.for_each_node(&axis, &mut |j, theta, w, t| {
            let k = kernel(t);
            let p = if tabulated {
                match phi.eval(theta, Some(j)) {
                    Ok(p) => p,
                    Err(e) => {
                        failure.get_or_insert(e);
                        return;
                    }
                }
            } else {
                phi.eval_direction(theta)
            };
            num += p * (w * k);
            den += w * k;
            mag += w * k.abs();
        });
        if let Some(e) = failure {
            return Err(e);
        }
        if let Family::Stable { r } = self.desc.family {
            let scale = norm.powf(r);
            num *= scale;
            den *= scale;
            mag *= scale;
        }
        if let Family::LevyGauss { a, b, .. } = &self.desc.family {
            // Same sign as the jump part: both contributions are <= 0 for PSD B.
            let n = self.desc.n;
            let mut qa = Complex64::new(0.0, 0.0);
            let mut qb = 0.0;
            for i in 0..n {
                for j in 0..n {
                    qa += a[i * n + j] * (xi[i] * xi[j]);
                    qb += b[i * n + j] * xi[i] * xi[j];
                }
            }
            num -= qa;
            den -= qb;
            mag += qb.abs();
        }
        Ok(RatioSums { numerator: num, denominator: den, magnitude: mag })
    }
}
