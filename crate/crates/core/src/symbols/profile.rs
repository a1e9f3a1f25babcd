//! Radial profiles `L(x) = ∫_0^∞ (cos(rx) - 1) v(r) dr` of symmetric Lévy measures.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::gauss_legendre;

/// Radial Lévy densities with a closed-form description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DensitySpec {
    Zero,
    /// `c · r^{-1-α}` (one-dimensional α-stable).
    Power { alpha: f64, c: f64 },
    /// `r^{-1-α} φ(r)` with `φ = 1` on `(0, 1)` and `min{1, e^{1-r} r^p}` beyond:
    /// stable-like near 0, bounded, non-increasing, and below `e·e^{-r} r^p` for `r ≥ 1`.
    Tempered { alpha: f64, p: f64 },
    /// `r^{-1-α} min{1, e^{-r} r^p}` taken literally.
    EnvelopeMin { alpha: f64, p: f64 },
}

impl DensitySpec {
    /// The relativistic-like default for dimension `n`: tempered with `p = (n+α-1)/2`.
    pub fn relativistic_like(alpha: f64, n: usize) -> Self {
        DensitySpec::Tempered { alpha, p: (n as f64 + alpha - 1.0) / 2.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DensitySpec::Zero => Ok(()),
            DensitySpec::Power { alpha, c } => {
                if !(alpha > 0.0 && alpha < 2.0) || !(c >= 0.0) {
                    return Err(Error::Domain(format!(
                        "power density needs 0 < alpha < 2 and c >= 0, got alpha={alpha}, c={c}"
                    )));
                }
                Ok(())
            }
            DensitySpec::Tempered { alpha, p } | DensitySpec::EnvelopeMin { alpha, p } => {
                if !(alpha > 0.0 && alpha < 2.0) || !(p >= 0.0) || !p.is_finite() {
                    return Err(Error::Domain(format!(
                        "tempered density needs 0 < alpha < 2 and p >= 0, got alpha={alpha}, p={p}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// The bounded factor `φ(r) = r^{1+α} v(r)` where that makes sense.
    pub fn envelope_factor(&self, r: f64) -> f64 {
        match *self {
            DensitySpec::Zero => 0.0,
            DensitySpec::Power { c, .. } => c,
            DensitySpec::Tempered { p, .. } => {
                if r < 1.0 {
                    1.0
                } else {
                    ((1.0 - r) + p * r.ln()).exp().min(1.0)
                }
            }
            DensitySpec::EnvelopeMin { p, .. } => (-r + p * r.ln()).exp().min(1.0),
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            DensitySpec::Zero => None,
            DensitySpec::Power { alpha, .. }
            | DensitySpec::Tempered { alpha, .. }
            | DensitySpec::EnvelopeMin { alpha, .. } => Some(alpha),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self.alpha() {
            None => 0.0,
            Some(alpha) => r.powf(-1.0 - alpha) * self.envelope_factor(r),
        }
    }

    /// Points where `v` has a kink; panels are split there.
    fn breakpoints(&self) -> Vec<f64> {
        // Roots of g(r) = shift - r + p ln r, the log of the capped exponential factor.
        let roots = |shift: f64, p: f64| -> Vec<f64> {
            let g = |r: f64| shift - r + p * r.ln();
            let bisect = |mut lo: f64, mut hi: f64| {
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if (g(mid) > 0.0) == (g(lo) > 0.0) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            };
            let mut out = Vec::new();
            // g is concave with its maximum at r = p.
            if p > 0.0 && g(p) > 0.0 {
                let far = 4.0 * (p + shift.abs() + 1.0) + 10.0 * p * (p + 1.0).ln();
                if g(1e-12) < 0.0 {
                    out.push(bisect(1e-12, p));
                }
                out.push(bisect(p, far));
            }
            out
        };
        match *self {
            DensitySpec::Tempered { p, .. } => {
                let mut pts = vec![1.0];
                pts.extend(roots(1.0, p).into_iter().filter(|r| *r > 1.0 + 1e-9));
                pts
            }
            DensitySpec::EnvelopeMin { p, .. } => roots(0.0, p),
            _ => Vec::new(),
        }
    }

    /// `∫_c^∞ v(r) dr`.
    fn tail_mass(&self, c: f64) -> f64 {
        match *self {
            DensitySpec::Zero => 0.0,
            DensitySpec::Power { alpha, c: k } => k * c.powf(-alpha) / alpha,
            _ => {
                // Exponentially decaying: unit panels until the integrand is negligible.
                let (x, w) = gauss_legendre(12);
                let mut acc = 0.0;
                let mut a = c;
                for _ in 0..200 {
                    let mut panel = 0.0;
                    for (xi, wi) in x.iter().zip(&w) {
                        panel += 0.5 * wi * self.eval(a + 0.5 * (xi + 1.0));
                    }
                    acc += panel;
                    a += 1.0;
                    if panel <= 1e-18 * acc.max(f64::MIN_POSITIVE) {
                        break;
                    }
                }
                acc
            }
        }
    }
}

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A density given either in closed form or as a closure.
#[derive(Clone)]
pub enum Density {
    Spec(DensitySpec),
    Custom(DensityFn),
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Spec(s) => write!(f, "{s:?}"),
            Density::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Density {
    /// `v^(k)(r)` for `k < count`: exact for power densities, central differences up to
    /// second order otherwise (higher orders are taken as 0).
    fn derivatives(&self, r: f64, count: usize) -> Vec<f64> {
        let mut out = vec![0.0; count];
        if let Density::Spec(DensitySpec::Power { alpha, c }) = self {
            let mut coef = *c;
            for (k, slot) in out.iter_mut().enumerate() {
                *slot = coef * r.powf(-1.0 - alpha - k as f64);
                coef *= -1.0 - alpha - k as f64;
            }
            return out;
        }
        let v = |t: f64| self.eval(t);
        out[0] = v(r);
        if count > 1 {
            let h = 1e-3 * r;
            out[1] = (v(r + h) - v(r - h)) / (2.0 * h);
        }
        if count > 2 {
            let h = 1e-2 * r;
            out[2] = (v(r + h) - 2.0 * out[0] + v(r - h)) / (h * h);
        }
        out
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Density::Spec(s) => s.eval(r),
            Density::Custom(f) => f(r),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Density::Spec(s) => s.breakpoints(),
            Density::Custom(_) => Vec::new(),
        }
    }

    fn tail_mass(&self, c: f64) -> f64 {
        match self {
            Density::Spec(s) => s.tail_mass(c),
            Density::Custom(f) => {
                // Geometric panels out to 1e8·c; integrability was validated beforehand.
                let (x, w) = gauss_legendre(12);
                let mut acc = 0.0;
                let mut a = c;
                while a < 1e8 * c {
                    let b = 1.5 * a;
                    for (xi, wi) in x.iter().zip(&w) {
                        acc += 0.5 * (b - a) * wi * f(a + 0.5 * (b - a) * (xi + 1.0));
                    }
                    a = b;
                }
                acc
            }
        }
    }
}

/// Smallest panel endpoint used near the origin, relative to `1/max(1, |x|)`.
const FIRST_PANEL: f64 = 1e-6;
const GEOMETRIC_RATIO: f64 = 1.5;
/// Integration extends to at least this many half-periods when `|x|` is small.
const MIN_TAIL_PHASE: f64 = 20.0 * PI;

/// Numeric `L` and `L'` from a density.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    density: Density,
    cutoff: f64,
    breakpoints: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// `L` with its derivative and an error estimate for the truncated tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValue {
    pub value: f64,
    pub derivative: f64,
    pub tail_bound: f64,
}

impl DensityProfile {
    fn new(density: Density, cutoff: f64, substeps: usize) -> Result<Self> {
        if !(cutoff > 0.0) || !cutoff.is_finite() {
            return Err(Error::InvalidArgument(format!("cutoff must be positive, got {cutoff}")));
        }
        if substeps < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 nodes per panel, got {substeps}")));
        }
        let (nodes, weights) = gauss_legendre(substeps);
        let breakpoints = density.breakpoints();
        let profile = DensityProfile { density, cutoff, breakpoints, nodes, weights };
        profile.validate_integrability()?;
        Ok(profile)
    }

    /// `∫ min{r², 1} v(r) dr < ∞`, judged from local power-law exponents at both ends
    /// and a few sign checks.
    fn validate_integrability(&self) -> Result<()> {
        let v = |r: f64| self.density.eval(r);
        for r in [1e-9, 1e-3, 0.5, 1.0, 2.0, 10.0, self.cutoff] {
            let value = v(r);
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::Domain(format!("density must be finite and >= 0, v({r}) = {value}")));
            }
        }
        let small = local_exponent(&v, 1e-9);
        if small.map_or(false, |g| g >= 3.0) {
            return Err(Error::Domain(format!(
                "non-integrable density: r^2 v(r) behaves like r^{:.3} at 0",
                2.0 - small.unwrap()
            )));
        }
        let large = local_exponent(&v, 1e6 * self.cutoff.max(1.0));
        if large.map_or(false, |g| g <= 1.0) {
            return Err(Error::Domain(format!(
                "non-integrable density: v(r) decays like r^-{:.3} at infinity",
                large.unwrap()
            )));
        }
        Ok(())
    }

    fn eval(&self, x: f64) -> ProfileValue {
        let ax = x.abs();
        if ax == 0.0 {
            return ProfileValue { value: 0.0, derivative: 0.0, tail_bound: 0.0 };
        }
        let sgn = x.signum();
        let v = |r: f64| self.density.eval(r);
        let first = FIRST_PANEL / ax.max(1.0);
        let end = self.cutoff.max(MIN_TAIL_PHASE / ax);
        let max_width = PI / ax;

        let mut value = 0.0;
        let mut deriv = 0.0;
        let mut a = first;
        while a < end {
            let mut b = (a * GEOMETRIC_RATIO).min(a + max_width).min(end);
            if let Some(k) = self.breakpoints.iter().find(|&&k| k > a && k < b) {
                b = *k;
            }
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (t, w) in self.nodes.iter().zip(&self.weights) {
                let r = mid + half * t;
                let vr = v(r);
                let (s, _) = (r * ax).sin_cos();
                // cos(rx) - 1 = -2 sin²(rx/2) avoids cancellation for small rx.
                let h = (0.5 * r * ax).sin();
                value += half * w * (-2.0 * h * h) * vr;
                deriv -= half * w * r * s * vr;
            }
            a = b;
        }

        // Near 0, v behaves like r^{-γ}: cos(rx) - 1 ≈ -(rx)²/2.
        let gamma = local_exponent(&v, first).unwrap_or(0.0).min(2.999);
        let moment = v(first) * first.powi(3) / (3.0 - gamma);
        value -= 0.5 * ax * ax * moment;
        deriv -= ax * moment;

        // Tail: the constant part exactly, the oscillatory parts by repeated integration
        // by parts (an asymptotic series in 1/(c|x|), c|x| >= 20π here or v negligible).
        let c = end;
        let dv = self.density.derivatives(c, TAIL_TERMS);
        // g = r v, g^(k) = r v^(k) + k v^(k-1).
        let dg: Vec<f64> = (0..TAIL_TERMS)
            .map(|k| c * dv[k] + if k > 0 { k as f64 * dv[k - 1] } else { 0.0 })
            .collect();
        let (sc, cc) = (c * ax).sin_cos();
        let (ic, err_c) = oscillatory_tail(&dv, sc, cc, ax, false);
        let (is, err_s) = oscillatory_tail(&dg, sc, cc, ax, true);
        value += ic - self.density.tail_mass(c);
        deriv -= is;
        let tail_bound = err_c + err_s;

        ProfileValue { value, derivative: sgn * deriv, tail_bound }
    }
}

/// `-d ln v / d ln r` at `r`, if `v(r) > 0`.
fn local_exponent(v: &dyn Fn(f64) -> f64, r: f64) -> Option<f64> {
    let a = v(r);
    let b = v(0.5 * r);
    if a > 0.0 && b > 0.0 {
        Some((b / a).ln() / std::f64::consts::LN_2)
    } else {
        None
    }
}

const TAIL_TERMS: usize = 8;

/// `∫_c^∞ f(r) cos(rx) dr` (or `sin` when `sine`) from derivatives `f^(k)(c)`:
/// `I_c = Σ_j (-1/x²)^j (-f^(2j) s/x - f^(2j+1) co/x²)` and
/// `I_s = Σ_j (-1/x²)^j (f^(2j) co/x - f^(2j+1) s/x²)`.
/// Stops once terms grow; returns the sum and the size of the last term kept.
fn oscillatory_tail(d: &[f64], s: f64, co: f64, x: f64, sine: bool) -> (f64, f64) {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut factor = 1.0;
    for j in 0..d.len() / 2 {
        let (a, b) = (d[2 * j], d[2 * j + 1]);
        let term = if sine {
            factor * (a * co / x - b * s / (x * x))
        } else {
            factor * (-a * s / x - b * co / (x * x))
        };
        let size = (a.abs() / x + b.abs() / (x * x)) * factor.abs();
        if size > last {
            break;
        }
        sum += term;
        last = size;
        factor *= -1.0 / (x * x);
    }
    (sum, if last.is_finite() { last } else { 0.0 })
}

/// Cubic Hermite table of (L, L') on log-spaced |x|.
#[derive(Debug, Clone)]
struct ProfileTable {
    log_min: f64,
    log_step: f64,
    xs: Vec<f64>,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl ProfileTable {
    fn build(profile: &DensityProfile, x_min: f64, x_max: f64, per_decade: usize) -> Self {
        let log_min = x_min.ln();
        let count = ((x_max / x_min).log10() * per_decade as f64).ceil() as usize + 1;
        let log_step = (x_max.ln() - log_min) / (count - 1) as f64;
        let mut xs = Vec::with_capacity(count);
        let mut values = Vec::with_capacity(count);
        let mut derivs = Vec::with_capacity(count);
        for i in 0..count {
            let x = (log_min + log_step * i as f64).exp();
            let pv = profile.eval(x);
            xs.push(x);
            values.push(pv.value);
            derivs.push(pv.derivative);
        }
        ProfileTable { log_min, log_step, xs, values, derivs }
    }

    fn lookup(&self, ax: f64) -> Option<(f64, f64)> {
        if ax < self.xs[0] {
            return Some(self.below(ax));
        }
        let pos = (ax.ln() - self.log_min) / self.log_step;
        if !(pos >= 0.0) || pos > (self.xs.len() - 1) as f64 {
            return None;
        }
        let i = (pos.floor() as usize).min(self.xs.len() - 2);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = ((ax - x0) / h).clamp(0.0, 1.0);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.derivs[i] * h, self.derivs[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * d1;
        let deriv = ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * d0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * d1)
            / h;
        Some((value, deriv))
    }

    /// Power law through the first entry with its local log-slope.
    fn below(&self, ax: f64) -> (f64, f64) {
        let (x0, y0, d0) = (self.xs[0], self.values[0], self.derivs[0]);
        if ax == 0.0 || y0 == 0.0 {
            return (0.0, 0.0);
        }
        let slope = x0 * d0 / y0;
        let value = y0 * (ax / x0).powf(slope);
        (value, slope * value / ax)
    }
}

/// Serializable description of a [`RadialProfile`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileSpec {
    Power {
        coef: f64,
        exponent: f64,
    },
    Density {
        density: DensitySpec,
        #[serde(default = "default_cutoff")]
        cutoff: f64,
        #[serde(default = "default_substeps")]
        substeps: usize,
    },
}

fn default_cutoff() -> f64 {
    DEFAULT_CUTOFF
}

fn default_substeps() -> usize {
    DEFAULT_SUBSTEPS
}

impl ProfileSpec {
    /// Builds the profile; density profiles get the default interpolation table.
    pub fn build(&self) -> Result<RadialProfile> {
        match self {
            ProfileSpec::Power { coef, exponent } => RadialProfile::power(*coef, *exponent),
            ProfileSpec::Density { density, cutoff, substeps } => Ok(RadialProfile::from_density(
                Density::Spec(density.clone()),
                *cutoff,
                *substeps,
            )?
            .with_default_table()),
        }
    }
}

#[derive(Debug, Clone)]
enum ProfileKind {
    /// `coef · |x|^exponent`.
    Power { coef: f64, exponent: f64 },
    Numeric(Box<DensityProfile>),
}

/// Even radial profile `L` with derivative.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    kind: ProfileKind,
    table: Option<Arc<ProfileTable>>,
    spec: Option<ProfileSpec>,
}

/// Table range and density used by [`RadialProfile::tabulated`] defaults.
pub const TABLE_RANGE: (f64, f64) = (1e-8, 1e3);
pub const TABLE_PER_DECADE: usize = 128;
pub const DEFAULT_CUTOFF: f64 = 50.0;
pub const DEFAULT_SUBSTEPS: usize = 12;

impl RadialProfile {
    /// `L(x) = coef · |x|^exponent`.
    pub fn power(coef: f64, exponent: f64) -> Result<Self> {
        if !(exponent > 0.0) || !coef.is_finite() {
            return Err(Error::Domain(format!("power profile needs exponent > 0, got {exponent}")));
        }
        Ok(RadialProfile {
            kind: ProfileKind::Power { coef, exponent },
            table: None,
            spec: Some(ProfileSpec::Power { coef, exponent }),
        })
    }

    /// Quadrature-backed profile of `density`: `substeps` Gauss–Legendre nodes per panel,
    /// geometric panels toward 0, oscillation-resolving panels up to `cutoff`.
    pub fn from_density(density: Density, cutoff: f64, substeps: usize) -> Result<Self> {
        if let Density::Spec(s) = &density {
            s.validate()?;
        }
        let spec = match &density {
            Density::Spec(s) => Some(ProfileSpec::Density { density: s.clone(), cutoff, substeps }),
            Density::Custom(_) => None,
        };
        let profile = DensityProfile::new(density, cutoff, substeps)?;
        Ok(RadialProfile { kind: ProfileKind::Numeric(Box::new(profile)), table: None, spec })
    }

    pub fn from_spec(spec: DensitySpec) -> Result<Self> {
        Self::from_density(Density::Spec(spec), DEFAULT_CUTOFF, DEFAULT_SUBSTEPS)
    }

    /// Adds an interpolation table over `|x| ∈ [x_min, x_max]`. Below `x_min` the table is
    /// extended by a power law; above `x_max` evaluation falls back to direct quadrature.
    pub fn tabulated(mut self, x_min: f64, x_max: f64, per_decade: usize) -> Self {
        if let ProfileKind::Numeric(p) = &self.kind {
            self.table = Some(Arc::new(ProfileTable::build(p, x_min, x_max, per_decade)));
        }
        self
    }

    pub fn with_default_table(self) -> Self {
        self.tabulated(TABLE_RANGE.0, TABLE_RANGE.1, TABLE_PER_DECADE)
    }

    /// Serializable description; `None` for closure densities.
    pub fn spec(&self) -> Option<&ProfileSpec> {
        self.spec.as_ref()
    }

    /// `Some((coef, exponent))` for closed-form power profiles.
    pub fn power_params(&self) -> Option<(f64, f64)> {
        match self.kind {
            ProfileKind::Power { coef, exponent } => Some((coef, exponent)),
            ProfileKind::Numeric(_) => None,
        }
    }

    /// Direct evaluation, bypassing any table.
    pub fn eval_full(&self, x: f64) -> ProfileValue {
        match &self.kind {
            ProfileKind::Power { coef, exponent } => {
                let ax = x.abs();
                let value = coef * ax.powf(*exponent);
                let derivative = if ax == 0.0 {
                    0.0
                } else {
                    x.signum() * coef * exponent * ax.powf(exponent - 1.0)
                };
                ProfileValue { value, derivative, tail_bound: 0.0 }
            }
            ProfileKind::Numeric(p) => p.eval(x),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        if let Some(t) = &self.table {
            if let Some((v, _)) = t.lookup(x.abs()) {
                return v;
            }
        }
        self.eval_full(x).value
    }

    pub fn derivative(&self, x: f64) -> f64 {
        if let Some(t) = &self.table {
            if let Some((_, d)) = t.lookup(x.abs()) {
                return x.signum() * d;
            }
        }
        self.eval_full(x).derivative
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_density_gives_zero_profile() {
        let p = RadialProfile::from_spec(DensitySpec::Zero).unwrap();
        for x in [0.0, 0.3, -2.0, 40.0] {
            assert_eq!(p.value(x), 0.0);
            assert_eq!(p.derivative(x), 0.0);
        }
    }

    #[test]
    fn cauchy_density_is_linear() {
        // ∫_0^∞ (1 - cos u) u^{-2} du = π/2.
        let p = RadialProfile::from_spec(DensitySpec::Power { alpha: 1.0, c: 1.0 }).unwrap();
        for x in [0.5, 1.0, 3.0] {
            let got = p.eval_full(x);
            assert!((got.value + 0.5 * PI * x).abs() < 1e-7 * x, "x={x}: {:?}", got);
            assert!((got.derivative + 0.5 * PI).abs() < 1e-6, "x={x}: {:?}", got);
        }
    }

    #[test]
    fn stable_profile_scales() {
        let alpha = 0.5;
        let p = RadialProfile::from_spec(DensitySpec::Power { alpha, c: 1.0 }).unwrap();
        let base = p.eval_full(1.0).value;
        // ∫(1 - cos u) u^{-3/2} du = √(2π).
        assert!((base + (2.0 * PI).sqrt()).abs() < 1e-7, "{base}");
        for x in [0.1, 7.0] {
            let got = p.eval_full(x).value;
            assert!((got - base * x.powf(alpha)).abs() < 1e-7 * got.abs());
        }
    }

    #[test]
    fn tempered_profile_is_even_and_nonpositive() {
        let p = RadialProfile::from_spec(DensitySpec::relativistic_like(1.0, 2)).unwrap();
        assert_eq!(p.value(0.0), 0.0);
        for x in [1e-3, 0.2, 1.0, 13.0, 400.0] {
            let a = p.value(x);
            let b = p.value(-x);
            assert!(a <= 0.0);
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }
    }

    #[test]
    fn table_matches_direct_evaluation() {
        let p = RadialProfile::from_spec(DensitySpec::relativistic_like(1.5, 3)).unwrap();
        let t = p.clone().with_default_table();
        for x in [3e-7, 2e-3, 0.0173, 0.9, 5.5, 321.0] {
            let d = p.eval_full(x);
            let v = t.value(x);
            assert!((v - d.value).abs() <= 1e-8 * d.value.abs(), "x={x}: {v} vs {}", d.value);
            let dv = t.derivative(x);
            assert!((dv - d.derivative).abs() <= 1e-6 * d.derivative.abs().max(1e-3), "x={x}");
        }
    }

    #[test]
    fn power_law_below_table() {
        let p = RadialProfile::from_spec(DensitySpec::relativistic_like(1.5, 2)).unwrap();
        let t = p.clone().with_default_table();
        let x = 1e-10;
        let d = p.eval_full(x);
        assert!((t.value(x) - d.value).abs() <= 1e-3 * d.value.abs(), "{} vs {}", t.value(x), d.value);
        assert_eq!(t.value(0.0), 0.0);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let p = RadialProfile::from_spec(DensitySpec::relativistic_like(0.5, 2)).unwrap();
        for x in [0.05, 1.3, 20.0] {
            let h = 1e-4 * x;
            let fd = (p.eval_full(x + h).value - p.eval_full(x - h).value) / (2.0 * h);
            let d = p.eval_full(x).derivative;
            assert!((fd - d).abs() < 1e-6 * d.abs().max(1e-6), "x={x}: {fd} vs {d}");
        }
    }

    #[test]
    fn kinks_are_located() {
        let t = DensitySpec::Tempered { alpha: 1.0, p: 2.0 }.breakpoints();
        assert_eq!(t.len(), 2);
        assert!((((1.0 - t[1]) + 2.0 * t[1].ln()).abs()) < 1e-12);
        assert_eq!(DensitySpec::Tempered { alpha: 1.0, p: 0.5 }.breakpoints(), vec![1.0]);
        let e = DensitySpec::EnvelopeMin { alpha: 1.0, p: 4.0 }.breakpoints();
        assert_eq!(e.len(), 2);
        for r in e {
            assert!((-r + 4.0 * r.ln()).abs() < 1e-12);
        }
        assert!(DensitySpec::EnvelopeMin { alpha: 1.0, p: 2.0 }.breakpoints().is_empty());
    }

    #[test]
    fn rejects_non_integrable() {
        let heavy = Density::Custom(Arc::new(|r: f64| r.powf(-3.5)));
        assert!(RadialProfile::from_density(heavy, 50.0, 8).is_err());
        let flat = Density::Custom(Arc::new(|_r: f64| 1.0));
        assert!(RadialProfile::from_density(flat, 50.0, 8).is_err());
        assert!(RadialProfile::from_spec(DensitySpec::Power { alpha: 2.5, c: 1.0 }).is_err());
    }
}
