use std::path::PathBuf;

use num_complex::Complex64;

use levymult::cli::{run, EXIT_CHECK_FAILED, EXIT_EVAL, EXIT_GF01, EXIT_OK, EXIT_USAGE};
use levymult::spectral::{gaussian_bump, GridField, GridSpec};
use levymult::symbols::{AngularModulator, SymbolDescriptor};

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn levymult(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("levymult").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("levymult-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn constant_json() -> String {
    SymbolDescriptor::constant(2, Complex64::new(1.0, 0.0)).unwrap().to_json().unwrap()
}

#[test]
fn constant_symbol_prints_its_value() {
    let o = levymult(&["symbol", "--symbol", &constant_json(), "--xi", "1,0"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
    let rows: Vec<&str> = o.out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, vec!["1,0,1,0"]);
    assert!(o.out.starts_with("# config: "));
}

#[test]
fn beurling_scaled_symbol_matches_closed_form() {
    let desc = SymbolDescriptor::stable(2, 2.0, AngularModulator::beurling_harmonic()).unwrap().to_json().unwrap();
    let o = levymult(&["symbol", "--symbol", &desc, "--xi", "1,0", "--xi", "0,-3"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
    for row in o.out.lines().filter(|l| !l.starts_with('#')) {
        let v: Vec<f64> = row.split(',').map(|t| t.parse().unwrap()).collect();
        assert!((v[2].hypot(v[3]) - 0.5).abs() < 1e-12, "{row}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(levymult(&["symbol", "--symbol", "/no/such/file.json", "--xi", "1,0"]).code, EXIT_USAGE);
    assert_eq!(levymult(&["symbol", "--symbol", &constant_json(), "--xi", "1,zero"]).code, EXIT_USAGE);
    assert_eq!(levymult(&["symbol", "--symbol", &constant_json(), "--xi", "1,0,0"]).code, EXIT_USAGE);
    assert_eq!(levymult(&["check", "no-such-check"]).code, EXIT_USAGE);
    assert_eq!(levymult(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(levymult(&["--help"]).code, EXIT_OK);
}

#[test]
fn evaluation_errors_exit_3() {
    let o = levymult(&["symbol", "--symbol", &constant_json(), "--xi", "NaN,0"]);
    assert_eq!(o.code, EXIT_EVAL);
    assert!(o.err.contains("evaluation failed"), "{}", o.err);
}

#[test]
fn apply_round_trips_through_gf01() {
    let spec = GridSpec::cube(2, 32, 4.0).unwrap();
    let f = gaussian_bump(&spec, &[2.0, 2.0], &[0.3, 0.3]);
    let input = scratch("bump.gf01");
    let output = scratch("bump-out.gf01");
    f.write_gf01(std::fs::File::create(&input).unwrap()).unwrap();
    let o = levymult(&[
        "apply",
        "--symbol",
        &constant_json(),
        "--in",
        input.to_str().unwrap(),
        "--out",
        output.to_str().unwrap(),
        "--p",
        "3",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
    let summary: serde_json::Value = serde_json::from_str(&o.out).unwrap();
    assert!(summary["input"]["lp"].is_number());
    let g = GridField::read_gf01(std::fs::File::open(&output).unwrap()).unwrap();
    assert_eq!(g.spec(), f.spec());
    // Identity symbol: output equals input up to FFT rounding.
    let worst = f.data().iter().zip(g.data()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(worst <= 1e-13, "{worst}");
}

#[test]
fn malformed_grid_exits_4_with_offset() {
    let input = scratch("truncated.gf01");
    let mut bytes = b"GF01 n=2 shape=4,4 box=1,1\n".to_vec();
    bytes.extend_from_slice(&[0u8; 40]);
    std::fs::write(&input, &bytes).unwrap();
    let o = levymult(&["apply", "--symbol", &constant_json(), "--in", input.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_GF01);
    assert!(o.err.contains("at byte"), "{}", o.err);
}

#[test]
fn lagrange_check_passes() {
    let o = levymult(&["check", "lagrange"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
    let doc: serde_json::Value = serde_json::from_str(&o.out).unwrap();
    assert_eq!(doc["pass"], serde_json::Value::Bool(true));
    assert!(doc["config"].is_object());
}

#[test]
fn beurling_identity_check_passes() {
    let o = levymult(&["check", "beurling-identity", "--r", "2", "--level", "12", "--grid", "32"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
}

#[test]
fn failing_check_exits_5() {
    // |m| = 5 everywhere, so every Lp ratio is 5 and exceeds 2(p*-1) = 2 at p = 2.
    let five = SymbolDescriptor::constant(2, Complex64::new(5.0, 0.0)).unwrap().to_json().unwrap();
    let o = levymult(&["check", "lp-ratio", "--symbol", &five, "--p", "2", "--grid", "16", "--bound", "two-bound"]);
    assert_eq!(o.code, EXIT_CHECK_FAILED, "{}{}", o.out, o.err);
    assert!(o.err.contains("check failed"), "{}", o.err);
}
