use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{GridField, GridSpec};
use crate::error::{Error, Result};
use crate::numerics::gamma_ratio;
use crate::symbols::{AngularModulator, Family, SymbolDescriptor, SymbolEvaluator};

/// Symbol values at every lattice frequency of a grid, in storage order.
#[derive(Debug, Clone)]
pub struct SymbolGrid {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl SymbolGrid {
    pub fn new(eval: &SymbolEvaluator, spec: &GridSpec) -> Result<Self> {
        let n = eval.descriptor().n;
        if n != spec.dim() {
            return Err(Error::ShapeMismatch(format!("symbol n={n} on a {}-d grid", spec.dim())));
        }
        let values = spec.frequencies().map(|xi| eval.eval(&xi)).collect::<Result<Vec<_>>>()?;
        Ok(SymbolGrid { spec: spec.clone(), values })
    }

    /// Wraps precomputed values (storage order).
    pub fn from_values(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::ShapeMismatch("symbol grid size does not match spec".into()));
        }
        Ok(SymbolGrid { spec, values })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn apply(&self, f: &GridField) -> Result<GridField> {
        if f.spec() != &self.spec {
            return Err(Error::ShapeMismatch("field and symbol grid differ".into()));
        }
        let mut coeffs = f.forward();
        for (c, m) in coeffs.iter_mut().zip(&self.values) {
            *c *= m;
        }
        GridField::from_coefficients(self.spec.clone(), coeffs)
    }

    /// Largest `|m|` over the lattice and its flat position.
    pub fn argmax(&self) -> (f64, usize) {
        self.values.iter().enumerate().fold((0.0, 0), |best, (i, z)| {
            let a = z.norm();
            if a > best.0 {
                (a, i)
            } else {
                best
            }
        })
    }
}

pub fn apply_multiplier(f: &GridField, eval: &SymbolEvaluator) -> Result<GridField> {
    SymbolGrid::new(eval, f.spec())?.apply(f)
}

/// `(Σ|f_i|^p·cellvol)^{1/p}`, or `max|f_i|` for infinite `p`.
pub fn lp_norm(f: &GridField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("L^p norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.data().iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    // Scale by the max modulus so large p does not overflow.
    let top = f.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = f.data().iter().map(|z| (z.norm() / top).powf(p)).sum();
    Ok(top * (s * f.spec().cell_volume()).powf(1.0 / p))
}

/// Exact L² → L² norm of the discrete operator: `max |m|` over the lattice.
///
/// The value at ξ = 0 is the descriptor's `dc`, which counts because constants
/// are valid inputs on the periodic box.
pub fn l2_operator_norm(eval: &SymbolEvaluator, spec: &GridSpec) -> Result<f64> {
    Ok(SymbolGrid::new(eval, spec)?.argmax().0)
}

/// Unit-amplitude plane wave at the lattice frequency stored at `flat`.
pub fn plane_wave(spec: &GridSpec, flat: usize) -> GridField {
    let xi = spec.frequency(flat);
    GridField::from_fn(spec.clone(), |x| {
        let phase: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
        Complex64::from_polar(1.0, phase)
    })
}

/// `max{p, p/(p-1)}`.
pub fn p_star(p: f64) -> f64 {
    p.max(p / (p - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `p* - 1`.
    Conjecture,
    /// `(p* - 1)^{6n} Γ((r+n)/2)/Γ((r+1)/2)`, constant set to 1.
    ThmMain,
    /// `max{r^{n0}, 1}(p* - 1)`, `n0 = ⌊n/2⌋ + 1`, constant set to 1.
    ThmSecond,
    /// `k^{1-2/p*} p*`, constant set to 1.
    DpvRiesz,
    /// `2(p* - 1)` for the Beurling transform.
    TwoBound,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Conjecture => "conjecture",
            BoundKind::ThmMain => "thm-main",
            BoundKind::ThmSecond => "thm-second",
            BoundKind::DpvRiesz => "dpv-riesz",
            BoundKind::TwoBound => "two-bound",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [Self::Conjecture, Self::ThmMain, Self::ThmSecond, Self::DpvRiesz, Self::TwoBound]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown bound kind \"{s}\"")))
    }

    /// Whether the factor hides an unquantified dimensional constant.
    pub fn modulo_cn(self) -> bool {
        matches!(self, BoundKind::ThmMain | BoundKind::ThmSecond | BoundKind::DpvRiesz)
    }

    pub fn factor(self, p: f64, desc: &SymbolDescriptor) -> Result<f64> {
        let ps = p_star(p);
        let n = desc.n;
        let r = || match desc.family {
            Family::Stable { r } | Family::Mixed { r, .. } => Ok(r),
            _ => Err(Error::InvalidArgument(format!(
                "{} bound needs a stable or mixed symbol, got {}",
                self.name(),
                desc.family.name()
            ))),
        };
        Ok(match self {
            BoundKind::Conjecture => ps - 1.0,
            BoundKind::ThmMain => (ps - 1.0).powi(6 * n as i32) * gamma_ratio(r()?, n)?,
            BoundKind::ThmSecond => r()?.powi((n / 2 + 1) as i32).max(1.0) * (ps - 1.0),
            BoundKind::DpvRiesz => match desc.family {
                Family::RieszPower { k } => (k as f64).powf(1.0 - 2.0 / ps) * ps,
                _ => return Err(Error::InvalidArgument("dpv-riesz bound needs a Riesz-power symbol".into())),
            },
            BoundKind::TwoBound => 2.0 * (ps - 1.0),
        })
    }
}

/// Outcome of probing `‖T_m f‖_p / ‖f‖_p` over an ensemble.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub p: f64,
    pub p_star: f64,
    pub r: Option<f64>,
    pub n: usize,
    pub family: String,
    pub observed_ratio: f64,
    /// Label of the field attaining `observed_ratio`.
    pub argmax_field: Option<String>,
    pub bound_factor: f64,
    pub bound_kind: BoundKind,
    pub modulo_cn: bool,
    pub pass: bool,
    pub fields_used: usize,
    pub fields_skipped: usize,
    pub level: u32,
    pub seed: Option<u64>,
}

/// A probing field with a label for reports.
#[derive(Debug, Clone)]
pub struct LabeledField {
    pub label: String,
    pub field: GridField,
}

pub fn estimate_lp_ratio(
    eval: &SymbolEvaluator,
    p: f64,
    ensemble: &[LabeledField],
    kind: BoundKind,
) -> Result<BoundReport> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("ratio probing needs 1 < p < inf, got {p}")));
    }
    if ensemble.is_empty() {
        return Err(Error::InvalidArgument("empty probing ensemble".into()));
    }
    let desc = eval.descriptor();
    let bound_factor = kind.factor(p, desc)?;
    let mut grid: Option<SymbolGrid> = None;
    let mut best = 0.0;
    let mut argmax = None;
    let mut used = 0;
    for item in ensemble {
        let f = &item.field;
        let denom = lp_norm(f, p)?;
        if denom < 1e-12 {
            continue;
        }
        if grid.as_ref().map_or(true, |g| g.spec() != f.spec()) {
            grid = Some(SymbolGrid::new(eval, f.spec())?);
        }
        let tf = grid.as_ref().expect("built above").apply(f)?;
        let ratio = lp_norm(&tf, p)? / denom;
        used += 1;
        if ratio > best {
            best = ratio;
            argmax = Some(item.label.clone());
        }
    }
    let r = match desc.family {
        Family::Stable { r } | Family::Mixed { r, .. } => Some(r),
        _ => None,
    };
    Ok(BoundReport {
        p,
        p_star: p_star(p),
        r,
        n: desc.n,
        family: desc.family.name().to_string(),
        observed_ratio: best,
        argmax_field: argmax,
        bound_factor,
        bound_kind: kind,
        modulo_cn: kind.modulo_cn(),
        pass: best <= bound_factor,
        fields_used: used,
        fields_skipped: ensemble.len() - used,
        level: eval.level(),
        seed: None,
    })
}

/// `max_λ λ·|{|T f| > λ}| / ‖f‖₁` over `levels` geometric λ in `[1e-3, 1e3]·‖Tf‖_∞`.
pub fn weak_l1_ratio(eval: &SymbolEvaluator, f: &GridField, levels: usize) -> Result<f64> {
    if levels == 0 {
        return Err(Error::InvalidArgument("weak-type sweep needs at least one level".into()));
    }
    let l1 = lp_norm(f, 1.0)?;
    if !(l1 > 0.0) {
        return Err(Error::InvalidArgument("weak-type ratio of a zero field".into()));
    }
    let tf = apply_multiplier(f, eval)?;
    let top = lp_norm(&tf, f64::INFINITY)?;
    if top == 0.0 {
        return Ok(0.0);
    }
    let mut mods: Vec<f64> = tf.data().iter().map(|z| z.norm()).collect();
    mods.sort_by(f64::total_cmp);
    let cell = f.spec().cell_volume();
    let mut best: f64 = 0.0;
    for i in 0..levels {
        let e = if levels == 1 { -3.0 } else { -3.0 + 6.0 * i as f64 / (levels - 1) as f64 };
        let lambda = top * 10f64.powf(e);
        let above = mods.len() - mods.partition_point(|&v| v <= lambda);
        best = best.max(lambda * above as f64 * cell / l1);
    }
    Ok(best)
}

/// `‖T_{m_r} f − (r/(r+2)) B f‖₂ / ‖f‖₂` with `m_r` the second-harmonic stable symbol.
pub fn beurling_identity_error(r: f64, f: &GridField, level: u32) -> Result<f64> {
    if f.spec().dim() != 2 {
        return Err(Error::UnsupportedDimension(f.spec().dim(), "2 (Beurling identity)"));
    }
    let norm = lp_norm(f, 2.0)?;
    if norm == 0.0 {
        return Ok(0.0);
    }
    let stable = SymbolDescriptor::stable(2, r, AngularModulator::beurling_harmonic())?;
    let lhs = apply_multiplier(f, &SymbolEvaluator::new(&stable, level)?)?;
    let rhs = apply_multiplier(f, &SymbolEvaluator::new(&SymbolDescriptor::beurling(), level)?)?;
    let diff = lhs.combine(Complex64::new(1.0, 0.0), &rhs, Complex64::new(-r / (r + 2.0), 0.0))?;
    Ok(lp_norm(&diff, 2.0)? / norm)
}
