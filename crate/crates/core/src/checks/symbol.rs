use num_complex::Complex64;

use super::cases::{case_derivative, directional_power};
use crate::error::{Error, Result};
use crate::numerics::{axis_aware_steps, finite_difference_partial_steps, MultiIndexSpec};
use crate::symbols::{Family, SymbolDescriptor, SymbolEvaluator};

/// A symbol that the condition checks can evaluate and differentiate.
#[derive(Debug, Clone)]
pub enum CheckSymbol {
    /// `|ξ_1|^r / |ξ|^r`.
    DirectionalPower { n: usize, r: f64 },
    /// `(1 + a|ξ_1|^t) / (b + c|ξ|^t)`.
    MixedFactor { n: usize, a: f64, b: f64, c: f64, t: f64 },
    Evaluated(Box<SymbolEvaluator>),
    Product(Box<CheckSymbol>, Box<CheckSymbol>),
}

fn is_even_integer(x: f64) -> bool {
    x.fract() == 0.0 && (x as i64) % 2 == 0
}

impl CheckSymbol {
    pub fn from_descriptor(desc: &SymbolDescriptor, level: u32) -> Result<Self> {
        Ok(CheckSymbol::Evaluated(Box::new(SymbolEvaluator::new(desc, level)?)))
    }

    pub fn product(a: CheckSymbol, b: CheckSymbol) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::ShapeMismatch("product of symbols of different dimension".into()));
        }
        Ok(CheckSymbol::Product(Box::new(a), Box::new(b)))
    }

    pub fn dim(&self) -> usize {
        match self {
            CheckSymbol::DirectionalPower { n, .. } | CheckSymbol::MixedFactor { n, .. } => *n,
            CheckSymbol::Evaluated(e) => e.descriptor().n,
            CheckSymbol::Product(a, _) => a.dim(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            CheckSymbol::DirectionalPower { .. } => "directional-power".into(),
            CheckSymbol::MixedFactor { .. } => "mixed-factor".into(),
            CheckSymbol::Evaluated(e) => e.descriptor().family.name().into(),
            CheckSymbol::Product(a, b) => format!("{}*{}", a.name(), b.name()),
        }
    }

    /// `m(tξ) = m(ξ)` for `t > 0`.
    pub fn is_homogeneous(&self) -> bool {
        match self {
            CheckSymbol::DirectionalPower { .. } => true,
            CheckSymbol::MixedFactor { a, c, .. } => *a == 0.0 && *c == 0.0,
            CheckSymbol::Evaluated(e) => e.descriptor().family.is_homogeneous(),
            CheckSymbol::Product(a, b) => a.is_homogeneous() && b.is_homogeneous(),
        }
    }

    /// Zero derivatives of every order.
    pub fn is_constant(&self) -> bool {
        match self {
            CheckSymbol::MixedFactor { a, c, .. } => *a == 0.0 && *c == 0.0,
            CheckSymbol::Evaluated(e) => matches!(e.descriptor().family, Family::Constant { .. }),
            _ => false,
        }
    }

    /// Coordinates across which the symbol is not smooth.
    fn singular_axes(&self) -> Vec<usize> {
        let singular = match self {
            CheckSymbol::DirectionalPower { r, .. } => !is_even_integer(*r),
            CheckSymbol::MixedFactor { t, a, .. } => *a != 0.0 && !is_even_integer(*t),
            CheckSymbol::Evaluated(_) => false,
            CheckSymbol::Product(a, b) => !a.singular_axes().is_empty() || !b.singular_axes().is_empty(),
        };
        if singular {
            vec![0]
        } else {
            Vec::new()
        }
    }

    pub fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        if xi.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!("point of dimension {} for n={}", xi.len(), self.dim())));
        }
        match self {
            CheckSymbol::DirectionalPower { r, .. } => {
                let q: f64 = xi.iter().map(|v| v * v).sum();
                if q == 0.0 {
                    return Err(Error::Domain("directional power undefined at 0".into()));
                }
                let abs: Vec<f64> = xi.iter().map(|v| v.abs()).collect();
                Ok(Complex64::new(directional_power(&abs, *r), 0.0))
            }
            CheckSymbol::MixedFactor { a, b, c, t, .. } => {
                let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
                Ok(Complex64::new((1.0 + a * xi[0].abs().powf(*t)) / (b + c * norm.powf(*t)), 0.0))
            }
            CheckSymbol::Evaluated(e) => e.eval(xi),
            CheckSymbol::Product(a, b) => Ok(a.eval(xi)? * b.eval(xi)?),
        }
    }

    /// `|∂^β m(ξ)|`, from the closed form where one exists, otherwise by finite differences
    /// of the real and imaginary parts.
    pub fn partial(&self, xi: &[f64], beta: &MultiIndexSpec) -> Result<f64> {
        if beta.order() == 0 {
            return Ok(self.eval(xi)?.norm());
        }
        if self.is_constant() {
            return Ok(0.0);
        }
        if let CheckSymbol::DirectionalPower { r, .. } = self {
            if !beta.has_repeats() && xi.iter().all(|&v| v > 0.0) {
                return Ok(case_derivative(xi, *r, beta)?.abs());
            }
        }
        let steps = axis_aware_steps(xi, beta, &self.singular_axes());
        let mut failure = None;
        let mut part = |pick: fn(Complex64) -> f64| {
            finite_difference_partial_steps(
                |x| match self.eval(x) {
                    Ok(z) => pick(z),
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                },
                xi,
                beta,
                &steps,
            )
        };
        let re = part(|z| z.re);
        let im = if self.is_real() { Ok(0.0) } else { part(|z| z.im) };
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(re?.hypot(im?))
    }

    fn is_real(&self) -> bool {
        match self {
            CheckSymbol::DirectionalPower { .. } | CheckSymbol::MixedFactor { .. } => true,
            CheckSymbol::Evaluated(e) => match &e.descriptor().family {
                Family::RieszPower { .. } => true,
                Family::Constant { c } => c.im == 0.0,
                Family::Beurling => false,
                _ => matches!(e.descriptor().phi, crate::symbols::AngularModulator::Constant(c) if c.im == 0.0),
            },
            CheckSymbol::Product(a, b) => a.is_real() && b.is_real(),
        }
    }
}
