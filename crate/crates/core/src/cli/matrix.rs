use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CliError, CliResult};
use crate::checks::{
    critical_order, distinct_index_sets, hormander_shell_check, lagrange1_brute, lagrange1_max, lagrange2_brute,
    lagrange2_max, marcinkiewicz_weighted_sup, mikhlin_pointwise_check, mixed_factor_check, relativistic_l_estimates,
    CheckReport, CheckSymbol, MixedFactorParams, ShellOptions,
};
use crate::error::Result;
use crate::jump_sim::{projection_check, subordination_check, SimulationConfig};
use crate::numerics::MultiIndexSpec;
use crate::spectral::{
    beurling_identity_error, estimate_lp_ratio, identity_fields, standard_ensemble, weak_l1_ratio, BoundKind,
    EnsembleConfig, GridSpec,
};
use crate::symbols::{DensitySpec, Family, SymbolDescriptor, SymbolEvaluator};

pub const CHECK_NAMES: [&str; 11] = [
    "marcinkiewicz",
    "hormander",
    "lagrange",
    "mikhlin",
    "mixed",
    "relativistic",
    "beurling-identity",
    "lp-ratio",
    "weak-l1",
    "subordination",
    "projection",
];

pub const DEFAULT_SEED: u64 = 0x5eed_1e77;

/// Quadrature level used when none is given.
pub fn default_level(n: usize) -> u32 {
    match n {
        2 => 12,
        3 => 48,
        _ => 32,
    }
}

/// Options shared by all check matrices; unset fields take per-check defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckOptions {
    #[serde(skip)]
    pub symbol: Option<SymbolDescriptor>,
    pub symbol_json: Option<serde_json::Value>,
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub level: Option<u32>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub grid: Option<usize>,
    pub paths: Option<usize>,
    pub bound: Option<String>,
}

impl CheckOptions {
    /// Parses the serialized form; `symbol_json` is resolved into a descriptor.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut opts: CheckOptions = serde_json::from_str(text)?;
        if let Some(v) = &opts.symbol_json {
            opts.symbol = Some(SymbolDescriptor::from_json(&v.to_string())?);
        }
        Ok(opts)
    }

    pub fn with_symbol(mut self, desc: SymbolDescriptor) -> Result<Self> {
        self.symbol_json = Some(desc.to_json_value()?);
        self.symbol = Some(desc);
        Ok(self)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    fn symbol_or(&self, default: impl FnOnce() -> Result<SymbolDescriptor>) -> Result<SymbolDescriptor> {
        match &self.symbol {
            Some(d) => Ok(d.clone()),
            None => default(),
        }
    }

    fn level_for(&self, n: usize) -> u32 {
        self.level.unwrap_or_else(|| default_level(n))
    }
}

/// Runs the named matrix. Unknown names are usage errors.
pub fn run_check(name: &str, opts: &CheckOptions) -> CliResult<Vec<CheckReport>> {
    let reports = match name {
        "marcinkiewicz" => marcinkiewicz(opts),
        "hormander" => hormander(opts),
        "lagrange" => lagrange(opts),
        "mikhlin" => mikhlin(opts),
        "mixed" => mixed(opts),
        "relativistic" => relativistic(opts),
        "beurling-identity" => beurling_identity(opts),
        "lp-ratio" => lp_ratio(opts),
        "weak-l1" => weak_l1(opts),
        "subordination" => subordination(opts),
        "projection" => projection(opts),
        other => {
            return Err(CliError::usage(format!("unknown check \"{other}\"; expected one of {}", CHECK_NAMES.join(", "))))
        }
    };
    Ok(reports?)
}

fn one_or<T: Copy>(v: Option<T>, defaults: &[T]) -> Vec<T> {
    v.map_or_else(|| defaults.to_vec(), |x| vec![x])
}

fn marcinkiewicz(opts: &CheckOptions) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for n in one_or(opts.n, &[2, 3]) {
        let level = opts.level.unwrap_or(if n == 2 { 32 } else { 16 });
        for r in one_or(opts.r, &[0.5, 2.0, 7.0]) {
            for set in distinct_index_sets(n) {
                out.push(marcinkiewicz_weighted_sup(n, r, &set, level)?);
            }
        }
    }
    Ok(out)
}

fn beurling_or_stable(opts: &CheckOptions) -> Result<SymbolDescriptor> {
    opts.symbol_or(|| match opts.r {
        Some(r) => SymbolDescriptor::stable(2, r, crate::symbols::AngularModulator::beurling_harmonic()),
        None => Ok(SymbolDescriptor::beurling()),
    })
}

fn hormander(opts: &CheckOptions) -> Result<Vec<CheckReport>> {
    let desc = beurling_or_stable(opts)?;
    let m = CheckSymbol::from_descriptor(&desc, opts.level_for(desc.n))?;
    let radii = [0.5, 1.0, 4.0];
    MultiIndexSpec::all_up_to(desc.n, critical_order(desc.n))
        .iter()
        .map(|b| hormander_shell_check(&m, b, &radii, ShellOptions::for_dim(desc.n)))
        .collect()
}

fn relative_gap(closed: f64, brute: f64) -> f64 {
    (closed - brute).abs() / closed.abs().max(f64::MIN_POSITIVE)
}

fn lagrange(opts: &CheckOptions) -> Result<Vec<CheckReport>> {
    let draws = opts.samples.unwrap_or(20);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed());
    let mut out = Vec::new();
    let push1 = |a: f64, b: f64, c: f64, d: f64, out: &mut Vec<CheckReport>| -> Result<()> {
        let closed = lagrange1_max(a, b, c, d)?;
        let brute = lagrange1_brute(a, b, c, d, opts.level.unwrap_or(32))?;
        out.push(
            CheckReport::new("lagrange1", relative_gap(closed, brute), Some(1e-6), 0.0)
                .param("a", a)
                .param("b", b)
                .param("c", c)
                .param("d", d)
                .meta("closed_form", closed)
                .meta("brute_force", brute),
        );
        Ok(())
    };
    push1(1.0, 1.0, 1.0, 1.0, &mut out)?;
    let exact = lagrange1_max(1.0, 1.0, 1.0, 1.0)?;
    out.push(CheckReport::new("lagrange1-exact", (exact - 0.5).abs(), Some(0.0), 0.0).meta("value", exact));
    for _ in 0..draws {
        let v: Vec<f64> = (0..4).map(|_| rng.gen_range(0.25..4.0)).collect();
        push1(v[0], v[1], v[2], v[3], &mut out)?;
    }
    for i in 0..draws {
        let n = 2 + i % 3;
        let k = rng.gen_range(2..=n);
        let r = 10f64.powf(rng.gen_range(-1.0..1.5));
        let closed = lagrange2_max(n, k, r)?;
        let brute = lagrange2_brute(n, k, r, opts.level.unwrap_or(if n == 2 { 64 } else { 48 }))?;
        out.push(
            CheckReport::new("lagrange2", relative_gap(closed, brute), Some(1e-6), 0.0)
                .param("n", n)
                .param("k", k)
                .param("r", r)
                .meta("closed_form", closed)
                .meta("brute_force", brute),
        );
    }
    for rep in &mut out {
        rep.params.insert("seed".into(), opts.seed().into());
    }
    Ok(out)
}

fn mikhlin(opts: &CheckOptions) -> Result<Vec<CheckReport>> {
    let desc = beurling_or_stable(opts)?;
    let m = CheckSymbol::from_descriptor(&desc, opts.level_for(desc.n))?;
    Ok(vec![mikhlin_pointwise_check(&m, desc.n.min(4), opts.samples.unwrap_or(200), opts.seed())?])
}

fn mixed(opts: &CheckOptions) -> Result<Vec<CheckReport>> {
    let n = opts.n.unwrap_or(2);
    let params = MixedFactorParams { a: 1.0, b: 1.0, c: 1.0, t: 2.0, r: opts.r.unwrap_or(1.0) };
    Ok(vec![mixed_factor_check(params, n, opts.level.unwrap_or(12), opts.samples.unwrap_or(1000), opts.seed())?])
}

fn relativistic(opts: &CheckOptions) -> Result<Vec<CheckReport>> {
    let n = opts.n.unwrap_or(2);
    one_or(opts.alpha, &[0.5, 1.0, 1.5])
        .into_iter()
        .map(|a| relativistic_l_estimates(&DensitySpec::relativistic_like(a, n), n, opts.samples.unwrap_or(65)))
        .collect()
}

fn beurling_identity(opts: &CheckOptions) -> Result<Vec<CheckReport>> {
    let count = opts.grid.unwrap_or(64);
    let spec = GridSpec::cube(2, count, 2.0 * std::f64::consts::PI)?;
    let fields = identity_fields(&spec, opts.seed())?;
    let level = opts.level_for(2);
    let mut out = Vec::new();
    for r in one_or(opts.r, &[0.5, 1.0, 2.0, 8.0, 40.0]) {
        for f in &fields {
            let e = beurling_identity_error(r, &f.field, level)?;
            out.push(
                CheckReport::new("beurling-identity", e, Some(1e-3), 0.0)
                    .param("r", r)
                    .param("field", f.label.clone())
                    .param("grid", count)
                    .param("level", level)
                    .param("seed", opts.seed()),
            );
        }
    }
    Ok(out)
}

fn default_bound(desc: &SymbolDescriptor) -> BoundKind {
    match desc.family {
        Family::Beurling => BoundKind::TwoBound,
        Family::RieszPower { .. } => BoundKind::DpvRiesz,
        Family::Stable { .. } | Family::Mixed { .. } => BoundKind::ThmSecond,
        _ => BoundKind::Conjecture,
    }
}

fn lp_ratio(opts: &CheckOptions) -> Result<Vec<CheckReport>> {
    let desc = opts.symbol_or(|| Ok(SymbolDescriptor::beurling()))?;
    let kind = match &opts.bound {
        Some(s) => BoundKind::parse(s)?,
        None => default_bound(&desc),
    };
    let eval = SymbolEvaluator::new(&desc, opts.level_for(desc.n))?;
    let spec = GridSpec::cube(desc.n, opts.grid.unwrap_or(if desc.n == 2 { 128 } else { 32 }), 1.0)?;
    let mut out = Vec::new();
    for p in one_or(opts.p, &[1.5, 3.0, 6.0]) {
        let config = EnsembleConfig { seed: opts.seed(), extremal_p: Some(p), ..Default::default() };
        let ensemble = standard_ensemble(&spec, &config)?;
        let mut rep = estimate_lp_ratio(&eval, p, &ensemble, kind)?;
        rep.seed = Some(config.seed);
        let reference = if rep.modulo_cn { None } else { Some(rep.bound_factor) };
        out.push(
            CheckReport::new("lp-ratio", rep.observed_ratio, reference, 0.0)
                .param("p", p)
                .param("bound_kind", kind.name())
                .param("grid", spec.shape()[0])
                .param("seed", config.seed)
                .param("ensemble", serde_json::to_value(&config).expect("config serializes"))
                .meta("bound", serde_json::to_value(&rep).expect("report serializes")),
        );
    }
    Ok(out)
}

fn weak_l1(opts: &CheckOptions) -> Result<Vec<CheckReport>> {
    let desc = opts.symbol_or(|| Ok(SymbolDescriptor::beurling()))?;
    let eval = SymbolEvaluator::new(&desc, opts.level_for(desc.n))?;
    let spec = GridSpec::cube(desc.n, opts.grid.unwrap_or(if desc.n == 2 { 128 } else { 32 }), 1.0)?;
    let config = EnsembleConfig { seed: opts.seed(), random_fields: 0, ..Default::default() };
    let levels = opts.samples.unwrap_or(61);
    let mut best = (0.0f64, String::new());
    for f in standard_ensemble(&spec, &config)? {
        let v = weak_l1_ratio(&eval, &f.field, levels)?;
        if v > best.0 {
            best = (v, f.label);
        }
    }
    Ok(vec![CheckReport::new("weak-l1", best.0, None, 0.0)
        .param("grid", spec.shape()[0])
        .param("levels", levels)
        .meta("argmax_field", best.1)])
}

fn sim_config(opts: &CheckOptions, default_paths: usize) -> SimulationConfig {
    let base = SimulationConfig::standard();
    SimulationConfig { paths: opts.paths.unwrap_or(default_paths), seed: opts.seed.unwrap_or(base.seed), ..base }
}

fn subordination(opts: &CheckOptions) -> Result<Vec<CheckReport>> {
    Ok(vec![subordination_check(&sim_config(opts, 10_000))?])
}

fn projection(opts: &CheckOptions) -> Result<Vec<CheckReport>> {
    Ok(vec![projection_check(&sim_config(opts, 100_000))?])
}
