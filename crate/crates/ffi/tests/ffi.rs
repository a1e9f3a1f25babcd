use std::ffi::{CStr, CString};
use std::ptr;

use num_complex::Complex64;

use levymult::symbols::SymbolDescriptor;
use levymult_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(lm_last_error_message()) }.to_string_lossy().into_owned()
}

fn beurling_json() -> CString {
    cstr(&SymbolDescriptor::beurling().to_json().unwrap())
}

#[test]
fn symbol_round_trip() {
    let json = beurling_json();
    let mut sym = ptr::null_mut();
    unsafe {
        assert_eq!(lm_symbol_from_json(json.as_ptr(), 0, &mut sym), LmStatus::Ok);
        let mut n = 0usize;
        assert_eq!(lm_symbol_dim(sym, &mut n), LmStatus::Ok);
        assert_eq!(n, 2);
        let (mut re, mut im) = (0.0, 0.0);
        let xi = [3.0, 4.0];
        assert_eq!(lm_symbol_eval(sym, xi.as_ptr(), 2, &mut re, &mut im), LmStatus::Ok);
        // (ξ̄/ξ) at 3+4i.
        let expected = Complex64::new(3.0, -4.0) / Complex64::new(3.0, 4.0);
        assert!((Complex64::new(re, im) - expected).norm() < 1e-14, "{re} {im}");
        assert_eq!(lm_symbol_eval(sym, xi.as_ptr(), 3, &mut re, &mut im), LmStatus::InvalidArgument);
        assert!(!last_error().is_empty());
        lm_symbol_free(sym);
    }
}

#[test]
fn null_and_parse_errors() {
    let mut sym = ptr::null_mut();
    unsafe {
        assert_eq!(lm_symbol_from_json(ptr::null(), 0, &mut sym), LmStatus::NullPointer);
        let bad = cstr("{\"family\": ");
        assert_eq!(lm_symbol_from_json(bad.as_ptr(), 0, &mut sym), LmStatus::ParseError);
        assert!(sym.is_null());
        let json = beurling_json();
        assert_eq!(lm_symbol_from_json(json.as_ptr(), 0, ptr::null_mut()), LmStatus::NullPointer);
        lm_symbol_free(ptr::null_mut());
        let name = CStr::from_ptr(lm_status_name(LmStatus::CheckFailed as i32));
        assert_eq!(name.to_str().unwrap(), "check failed");
    }
}

#[test]
fn field_apply_and_gf01() {
    let shape = [8usize, 8];
    let box_len = [1.0, 1.0];
    let re: Vec<f64> = (0..64).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
    let json = cstr(&SymbolDescriptor::constant(2, Complex64::new(0.0, 2.0)).unwrap().to_json().unwrap());
    let path = std::env::temp_dir().join(format!("levymult-ffi-{}.gf01", std::process::id()));
    let cpath = cstr(path.to_str().unwrap());
    unsafe {
        let (mut f, mut sym, mut g, mut h) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(lm_field_new(2, shape.as_ptr(), box_len.as_ptr(), re.as_ptr(), ptr::null(), &mut f), LmStatus::Ok);
        assert_eq!(lm_symbol_from_json(json.as_ptr(), 12, &mut sym), LmStatus::Ok);
        assert_eq!(lm_apply(sym, f, &mut g), LmStatus::Ok);
        let (mut nf, mut ng) = (0.0, 0.0);
        assert_eq!(lm_field_lp_norm(f, 2.0, &mut nf), LmStatus::Ok);
        assert_eq!(lm_field_lp_norm(g, 2.0, &mut ng), LmStatus::Ok);
        assert!((ng - 2.0 * nf).abs() < 1e-12 * nf);

        assert_eq!(lm_field_write_gf01(g, cpath.as_ptr()), LmStatus::Ok);
        assert_eq!(lm_field_read_gf01(cpath.as_ptr(), &mut h), LmStatus::Ok);
        let mut len = 0usize;
        assert_eq!(lm_field_len(h, &mut len), LmStatus::Ok);
        let (mut hr, mut hi) = (vec![0.0; len], vec![0.0; len]);
        assert_eq!(lm_field_copy_data(h, hr.as_mut_ptr(), hi.as_mut_ptr(), len), LmStatus::Ok);
        for (i, &x) in re.iter().enumerate() {
            assert!(hr[i].abs() < 1e-12 && (hi[i] - 2.0 * x).abs() < 1e-12);
        }
        assert_eq!(lm_field_copy_data(h, hr.as_mut_ptr(), hi.as_mut_ptr(), len - 1), LmStatus::InvalidArgument);

        let missing = cstr("/no/such/dir/x.gf01");
        let mut k = ptr::null_mut();
        assert_eq!(lm_field_read_gf01(missing.as_ptr(), &mut k), LmStatus::IoError);

        for p in [f, g, h] {
            lm_field_free(p);
        }
        lm_symbol_free(sym);
    }
    let _ = std::fs::remove_file(path);
}

#[test]
fn jump_model_symbols() {
    let model = cstr(r#"{"n":1,"atoms":[{"z":[0.5],"rate":2.0},{"z":[-0.5],"rate":2.0}]}"#);
    let phi = cstr(r#"{"kind":"constant","c":[0.5,0.0]}"#);
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(lm_jump_model_from_json(model.as_ptr(), &mut m), LmStatus::Ok, "{}", last_error());
        let xi = [1.3];
        let mut rho = 0.0;
        assert_eq!(lm_jump_model_exponent(m, xi.as_ptr(), 1, &mut rho), LmStatus::Ok);
        assert!((rho - 4.0 * ((0.65f64).cos() - 1.0)).abs() < 1e-14);
        let (mut re, mut im) = (0.0, 0.0);
        let status = lm_jump_model_symbol(m, phi.as_ptr(), xi.as_ptr(), 1, f64::INFINITY, &mut re, &mut im);
        assert_eq!(status, LmStatus::Ok, "{}", last_error());
        assert!((re - 0.5).abs() < 1e-14 && im.abs() < 1e-14);
        assert_eq!(lm_jump_model_symbol(m, phi.as_ptr(), xi.as_ptr(), 1, 1.0, &mut re, &mut im), LmStatus::Ok);
        assert!((re - 0.5 * (1.0 - (2.0 * rho).exp())).abs() < 1e-14);
        lm_jump_model_free(m);
    }
}

#[test]
fn checks_report_json() {
    let name = cstr("lagrange");
    let mut report = ptr::null_mut();
    unsafe {
        assert_eq!(lm_check_run(name.as_ptr(), ptr::null(), &mut report), LmStatus::Ok, "{}", last_error());
        let doc: serde_json::Value = serde_json::from_str(CStr::from_ptr(report).to_str().unwrap()).unwrap();
        assert!(doc.as_array().unwrap().iter().all(|r| r["pass"] == serde_json::Value::Bool(true)));
        lm_string_free(report);

        let five = SymbolDescriptor::constant(2, Complex64::new(5.0, 0.0)).unwrap().to_json().unwrap();
        let opts = cstr(&format!(r#"{{"symbol_json": {five}, "p": 2.0, "grid": 16, "bound": "two-bound"}}"#));
        let name = cstr("lp-ratio");
        let mut report = ptr::null_mut();
        assert_eq!(lm_check_run(name.as_ptr(), opts.as_ptr(), &mut report), LmStatus::CheckFailed);
        assert!(!report.is_null());
        lm_string_free(report);

        let unknown = cstr("no-such-check");
        let mut report = ptr::null_mut();
        assert_eq!(lm_check_run(unknown.as_ptr(), ptr::null(), &mut report), LmStatus::InvalidArgument);
        let bad_opts = cstr(r#"{"colour": 1}"#);
        assert_eq!(lm_check_run(name.as_ptr(), bad_opts.as_ptr(), &mut report), LmStatus::ParseError);
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/levymult.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["lm_symbol_from_json", "lm_apply", "lm_check_run", "lm_last_error_message", "LM_STATUS_CHECK_FAILED"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let source = std::env::temp_dir().join(format!("levymult-header-{}.c", std::process::id()));
    std::fs::write(
        &source,
        "#include \"levymult.h\"\n\
         int probe(void) {\n\
           LmSymbol *s = 0; double re, im, xi[2] = {1.0, 0.0};\n\
           if (lm_symbol_from_json(\"{}\", 0, &s) != LM_STATUS_OK) return 1;\n\
           lm_symbol_eval(s, xi, 2, &re, &im);\n\
           lm_symbol_free(s);\n\
           return 0;\n\
         }\n",
    )
    .unwrap();
    let compiler = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = match std::process::Command::new(&compiler)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&source)
        .status()
    {
        Ok(s) => s,
        Err(_) => {
            eprintln!("no C compiler available; header syntax not checked");
            return;
        }
    };
    let _ = std::fs::remove_file(&source);
    assert!(status.success());
}
