use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{sphere_quadrature, QuadratureRule};

/// Slack allowed above 1 when validating `‖φ‖_∞ ≤ 1` (rounding in user data).
const BOUND_SLACK: f64 = 1e-12;

pub type ModulatorFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// Angular factor φ on S^{n-1}, bounded by 1 in modulus.
#[derive(Clone)]
pub enum AngularModulator {
    Constant(Complex64),
    /// `e^{sign·2i·arg θ}`, planar only. `sign = -1` turns the stable symbol into a
    /// multiple of the Beurling symbol `ξ̄/ξ`.
    SecondHarmonic { sign: i8 },
    /// `coef · Π θ_i^{powers_i}`; bounded by `|coef|` on the sphere.
    Monomial { coef: Complex64, powers: Vec<u32> },
    /// Values on the nodes of `sphere_quadrature(n, level)`.
    Tabulated { n: usize, level: u32, values: Vec<Complex64> },
    /// Arbitrary closure; checked on a sampling rule at construction.
    Custom(ModulatorFn),
}

impl fmt::Debug for AngularModulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::SecondHarmonic { sign } => write!(f, "SecondHarmonic({sign:+})"),
            Self::Monomial { coef, powers } => write!(f, "Monomial({coef}, {powers:?})"),
            Self::Tabulated { n, level, values } => {
                write!(f, "Tabulated(n={n}, level={level}, {} values)", values.len())
            }
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl AngularModulator {
    pub const BEURLING_SIGN: i8 = -1;

    pub fn one() -> Self {
        Self::Constant(Complex64::new(1.0, 0.0))
    }

    /// Second harmonic with the sign that reproduces `ξ̄/ξ`.
    pub fn beurling_harmonic() -> Self {
        Self::SecondHarmonic { sign: Self::BEURLING_SIGN }
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self::Custom(Arc::new(f))
    }

    /// Tabulates `f` on the fixed rule of `(n, level)`.
    pub fn tabulate<F>(n: usize, level: u32, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let rule = sphere_quadrature(n, level)?;
        let values = rule.nodes().map(f).collect();
        let m = Self::Tabulated { n, level, values };
        m.validate(n)?;
        Ok(m)
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self, Self::Tabulated { .. })
    }

    /// Checks dimension compatibility and `|φ| ≤ 1` on a sampling rule.
    pub fn validate(&self, n: usize) -> Result<()> {
        let check = |v: f64| {
            if v.is_finite() && v <= 1.0 + BOUND_SLACK {
                Ok(())
            } else {
                Err(Error::ModulatorBound(v))
            }
        };
        match self {
            Self::Constant(c) => check(c.norm()),
            Self::SecondHarmonic { sign } => {
                if n != 2 {
                    return Err(Error::UnsupportedDimension(n, "2 (second harmonic)"));
                }
                if *sign != 1 && *sign != -1 {
                    return Err(Error::InvalidArgument(format!("harmonic sign must be +1 or -1, got {sign}")));
                }
                Ok(())
            }
            Self::Monomial { coef, powers } => {
                if powers.len() != n {
                    return Err(Error::ShapeMismatch(format!(
                        "monomial has {} powers for n={n}",
                        powers.len()
                    )));
                }
                check(coef.norm())
            }
            Self::Tabulated { n: tn, level, values } => {
                if *tn != n {
                    return Err(Error::ShapeMismatch(format!("table built for n={tn}, symbol has n={n}")));
                }
                let expected = sphere_quadrature(n, *level)?.len();
                if values.len() != expected {
                    return Err(Error::ShapeMismatch(format!(
                        "table has {} values, rule (n={n}, level={level}) has {expected} nodes",
                        values.len()
                    )));
                }
                let worst = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
                check(worst)
            }
            Self::Custom(f) => {
                let rule = sampling_rule(n)?;
                let mut worst = 0.0f64;
                for x in rule.nodes() {
                    let v = f(x).norm();
                    if !v.is_finite() {
                        return Err(Error::ModulatorBound(v));
                    }
                    worst = worst.max(v);
                }
                check(worst)
            }
        }
    }

    /// φ(θ); `node` is the index into the fixed rule for tabulated modulators.
    pub fn eval(&self, theta: &[f64], node: Option<usize>) -> Result<Complex64> {
        match self {
            Self::Tabulated { values, .. } => match node {
                Some(j) if j < values.len() => Ok(values[j]),
                _ => Err(Error::InvalidArgument(
                    "tabulated modulator evaluated off its quadrature nodes".into(),
                )),
            },
            _ => Ok(self.eval_direction(theta)),
        }
    }

    /// φ at an arbitrary unit vector. Tabulated modulators use their nearest node.
    pub fn eval_direction(&self, theta: &[f64]) -> Complex64 {
        match self {
            Self::Constant(c) => *c,
            Self::SecondHarmonic { sign } => {
                let z = Complex64::new(theta[0], *sign as f64 * theta[1]);
                let z2 = z * z;
                z2 / z2.norm()
            }
            Self::Monomial { coef, powers } => {
                let p: f64 = theta.iter().zip(powers).map(|(t, &k)| t.powi(k as i32)).product();
                coef * p
            }
            Self::Tabulated { n, level, values } => {
                let rule = sphere_quadrature(*n, *level).expect("validated at construction");
                let mut best = (f64::NEG_INFINITY, 0);
                for (j, x) in rule.nodes().enumerate() {
                    let dot: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum();
                    if dot > best.0 {
                        best = (dot, j);
                    }
                }
                values[best.1]
            }
            Self::Custom(f) => f(theta),
        }
    }
}

fn sampling_rule(n: usize) -> Result<QuadratureRule> {
    sphere_quadrature(n, if n == 2 { 10 } else { 16 })
}

/// Projects onto the closed unit disc; values already inside are returned unchanged.
pub fn clamp_unit(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r > 1.0 {
        z / r
    } else {
        z
    }
}
