use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};

use super::matrix::{default_level, run_check, CheckOptions, CHECK_NAMES};
use super::{
    ApplyArgs, CheckArgs, CliError, CliResult, ReportArgs, SimulateArgs, SymbolArgs, EXIT_CHECK_FAILED, EXIT_EVAL,
    EXIT_OK,
};
use crate::checks::CheckReport;
use crate::error::Error;
use crate::jump_sim::{char_function_check, run_projection, SimulationConfig};
use crate::spectral::{apply_multiplier, lp_norm, GridField};
use crate::symbols::{SymbolDescriptor, SymbolEvaluator};

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::usage(format!("{}: {e}", path.display()))
}

fn load_descriptor(arg: &str) -> CliResult<SymbolDescriptor> {
    SymbolDescriptor::from_path_or_inline(arg).map_err(|e| CliError::usage(e.to_string()))
}

fn parse_point(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| CliError::usage(format!("{what} \"{text}\": {e}"))))
        .collect()
}

fn emit(out: &mut dyn Write, value: &Value, path: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    if let Some(p) = path {
        std::fs::write(p, format!("{text}\n")).map_err(|e| io_err(p, e))?;
    }
    writeln!(out, "{text}").map_err(|e| CliError::usage(e.to_string()))
}

fn fmt_row(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

pub(super) fn symbol(args: &SymbolArgs, out: &mut dyn Write) -> CliResult<i32> {
    let desc = load_descriptor(&args.symbol)?;
    let mut points = Vec::new();
    for x in &args.xi {
        points.push(parse_point(x, "frequency")?);
    }
    if let Some(path) = &args.xi_file {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            points.push(parse_point(line, "frequency")?);
        }
    }
    if points.is_empty() {
        return Err(CliError::usage("no frequencies given (use --xi or --xi-file)"));
    }
    if let Some(bad) = points.iter().find(|p| p.len() != desc.n) {
        return Err(CliError::usage(format!("frequency {bad:?} does not have {} coordinates", desc.n)));
    }
    let level = args.level.unwrap_or_else(|| default_level(desc.n));
    let eval = SymbolEvaluator::new(&desc, level)?;
    let config = json!({"command": "symbol", "symbol": desc.to_json_value()?, "level": level});
    let mut text = format!("# config: {config}\n");
    for p in &points {
        let v = eval
            .eval(p)
            .map_err(|e| CliError { code: EXIT_EVAL, message: format!("evaluation failed at xi={p:?}: {e}") })?;
        let mut row = p.clone();
        row.extend([v.re, v.im]);
        text.push_str(&fmt_row(&row));
        text.push('\n');
    }
    out.write_all(text.as_bytes()).map_err(|e| CliError::usage(e.to_string()))?;
    Ok(EXIT_OK)
}

fn norms(f: &GridField, p: Option<f64>) -> crate::error::Result<Value> {
    let mut v = json!({"l2": lp_norm(f, 2.0)?, "linf": lp_norm(f, f64::INFINITY)?});
    if let Some(p) = p {
        v["lp"] = json!(lp_norm(f, p)?);
    }
    Ok(v)
}

pub(super) fn apply(args: &ApplyArgs, out: &mut dyn Write) -> CliResult<i32> {
    let desc = load_descriptor(&args.symbol)?;
    let file = File::open(&args.input).map_err(|e| io_err(&args.input, e))?;
    let f = GridField::read_gf01(BufReader::new(file)).map_err(|e| match e {
        Error::Io(io) => io_err(&args.input, io),
        other => CliError::from(other),
    })?;
    if f.spec().dim() != desc.n {
        return Err(CliError::usage(format!("field has dimension {} but the symbol has n={}", f.spec().dim(), desc.n)));
    }
    if let Some(p) = args.p {
        if !(p >= 1.0) {
            return Err(CliError::usage(format!("--p must be at least 1, got {p}")));
        }
    }
    let level = args.level.unwrap_or_else(|| default_level(desc.n));
    let eval = SymbolEvaluator::new(&desc, level)?;
    let g = apply_multiplier(&f, &eval)?;
    if let Some(path) = &args.output {
        let file = File::create(path).map_err(|e| io_err(path, e))?;
        let mut w = BufWriter::new(file);
        g.write_gf01(&mut w)?;
        w.flush().map_err(|e| io_err(path, e))?;
    }
    let input = norms(&f, args.p)?;
    let output = norms(&g, args.p)?;
    let ratio = |k: &str| {
        let a = input[k].as_f64().unwrap_or(0.0);
        let b = output[k].as_f64().unwrap_or(0.0);
        if a > 0.0 {
            json!(b / a)
        } else {
            Value::Null
        }
    };
    let mut ratios = json!({"l2": ratio("l2")});
    if args.p.is_some() {
        ratios["lp"] = ratio("lp");
    }
    let config = json!({
        "command": "apply",
        "symbol": desc.to_json_value()?,
        "level": level,
        "in": args.input.display().to_string(),
        "out": args.output.as_ref().map(|p| p.display().to_string()),
        "p": args.p,
        "shape": f.spec().shape(),
        "box": f.spec().box_len(),
    });
    emit(out, &json!({"config": config, "input": input, "output": output, "ratio": ratios}), args.json.as_deref())?;
    Ok(EXIT_OK)
}

fn first_failure(reports: &[CheckReport]) -> Option<&CheckReport> {
    reports.iter().find(|r| !r.pass)
}

fn finish(reports: &[CheckReport], err: &mut dyn Write) -> i32 {
    match first_failure(reports) {
        Some(r) => {
            let _ = writeln!(
                err,
                "check failed: {} (measured {}, reference {:?}, tol {}) params {}",
                r.check,
                r.measured,
                r.reference,
                r.tol,
                Value::Object(r.params.clone())
            );
            EXIT_CHECK_FAILED
        }
        None => EXIT_OK,
    }
}

pub(super) fn check(args: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    if !CHECK_NAMES.contains(&args.name.as_str()) {
        return Err(CliError::usage(format!(
            "unknown check \"{}\"; expected one of {}",
            args.name,
            CHECK_NAMES.join(", ")
        )));
    }
    let f = &args.opts;
    let mut opts = CheckOptions {
        p: f.p,
        r: f.r,
        n: f.n,
        alpha: f.alpha,
        level: f.level,
        seed: f.seed,
        samples: f.samples,
        grid: f.grid,
        paths: f.paths,
        bound: f.bound.clone(),
        ..Default::default()
    };
    if let Some(s) = &f.symbol {
        opts = opts.with_symbol(load_descriptor(s)?)?;
    }
    let reports = run_check(&args.name, &opts)?;
    let pass = first_failure(&reports).is_none();
    let doc = json!({
        "command": "check",
        "check": args.name,
        "config": serde_json::to_value(&opts).expect("options serialize"),
        "reports": reports,
        "pass": pass,
    });
    emit(out, &doc, f.json.as_deref())?;
    Ok(finish(&reports, err))
}

fn load_config(arg: &str) -> CliResult<SimulationConfig> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| io_err(Path::new(arg), e))?
    };
    SimulationConfig::from_json(&text).map_err(|e| CliError::usage(format!("simulation config: {e}")))
}

fn pair(z: num_complex::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub(super) fn simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let mut config = match &args.config {
        Some(c) => load_config(c)?,
        None => SimulationConfig::standard(),
    };
    if let Some(p) = args.paths {
        config.paths = p;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    let run = run_projection(&config)?;
    if let Some(path) = &args.output {
        let file = File::create(path).map_err(|e| io_err(path, e))?;
        let mut w = BufWriter::new(file);
        run.estimate.field().write_gf01(&mut w)?;
        w.flush().map_err(|e| io_err(path, e))?;
    }
    let projection = crate::jump_sim::projection_check(&config)?;
    let ecf = char_function_check(&config)?;
    let violations = run.values.iter().filter(|v| v.qv_transform > v.qv_base).count();
    let subordination = CheckReport::new("subordination", violations as f64, Some(0.0), 0.0).meta("paths", config.paths);
    let reports = vec![projection, ecf, subordination];
    let est = &run.estimate;
    let doc = json!({
        "command": "simulate",
        "config": config,
        "projection": {
            "coefficient": pair(run.coefficient),
            "expected": pair(run.expected),
            "std_err": run.std_err,
            "z_score": run.z_score,
            "bias_factor": run.bias_factor,
            "mean_jumps": run.mean_jumps,
        },
        "bins": {
            "shape": est.spec.shape(),
            "min_per_bin": est.min_per_bin,
            "mean": est.mean.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
            "std_err": est.std_err.iter().map(|s| if s.is_finite() { json!(s) } else { Value::Null }).collect::<Vec<_>>(),
            "counts": est.counts,
            "usable": est.usable,
        },
        "reports": reports,
        "pass": first_failure(&reports).is_none(),
    });
    emit(out, &doc, args.json.as_deref())?;
    Ok(finish(&reports, err))
}

/// Reduced sizes so the full bundle runs in about a minute.
fn report_options(name: &str, seed: Option<u64>) -> CheckOptions {
    let base = CheckOptions { seed, ..Default::default() };
    match name {
        "marcinkiewicz" => CheckOptions { n: Some(2), ..base },
        "lagrange" => CheckOptions { samples: Some(5), ..base },
        "mikhlin" => CheckOptions { samples: Some(50), ..base },
        "mixed" => CheckOptions { samples: Some(200), ..base },
        "beurling-identity" => CheckOptions { r: Some(2.0), ..base },
        "lp-ratio" => CheckOptions { grid: Some(64), ..base },
        "weak-l1" => CheckOptions { grid: Some(64), ..base },
        "subordination" => CheckOptions { paths: Some(2000), ..base },
        "projection" => CheckOptions { paths: Some(20_000), ..base },
        _ => base,
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub(super) fn report(args: &ReportArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let mut sections = Vec::new();
    let mut all = Vec::new();
    let mut table = String::from("group,check,measured,reference,tol,pass,params\n");
    for name in CHECK_NAMES {
        let opts = report_options(name, args.seed);
        let reports = run_check(name, &opts)?;
        for r in &reports {
            table.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                name,
                r.check,
                r.measured,
                r.reference.map_or(String::new(), |v| v.to_string()),
                r.tol,
                r.pass,
                csv_field(&Value::Object(r.params.clone()).to_string())
            ));
        }
        sections.push(json!({
            "group": name,
            "config": serde_json::to_value(&opts).expect("options serialize"),
            "reports": reports,
            "pass": first_failure(&reports).is_none(),
        }));
        all.extend(reports);
    }
    if let Some(path) = &args.csv {
        std::fs::write(path, &table).map_err(|e| io_err(path, e))?;
    }
    let doc = json!({"command": "report", "seed": args.seed, "groups": sections, "pass": first_failure(&all).is_none()});
    emit(out, &doc, args.json.as_deref())?;
    Ok(finish(&all, err))
}
