//! C ABI over `levymult`.
//!
//! Every fallible function returns an [`LmStatus`] code and writes results through out
//! pointers. On failure the message is kept per thread and read with
//! [`lm_last_error_message`]. Handles are opaque; each `*_new`/`*_from_*` has a matching
//! `*_free`. Strings returned by the library are freed with [`lm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use levymult::cli::{run_check, CheckOptions, EXIT_EVAL, EXIT_GF01};
use levymult::error::Error;
use levymult::jump_sim::JumpModel;
use levymult::spectral::{apply_multiplier, lp_norm, GridField, GridSpec};
use levymult::symbols::{PhiDoc, SymbolDescriptor, SymbolEvaluator};

/// Status codes returned by every fallible entry point.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    EvaluationError = 4,
    IoError = 5,
    CheckFailed = 6,
    Panic = 7,
}

/// A symbol evaluator bound to a quadrature level.
pub struct LmSymbol {
    eval: SymbolEvaluator,
}

/// A complex sample field on a periodic grid.
pub struct LmField {
    field: GridField,
}

/// A symmetric compound Poisson jump model.
pub struct LmJumpModel {
    model: JumpModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

struct Failure(LmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Json(_) | Error::Descriptor(_) | Error::Gf01 { .. } => LmStatus::ParseError,
            Error::Io(_) => LmStatus::IoError,
            Error::InvalidArgument(_) | Error::ShapeMismatch(_) | Error::UnsupportedDimension(..) => {
                LmStatus::InvalidArgument
            }
            Error::Domain(_) | Error::NonFinite(_) | Error::VanishingDenominator { .. } | Error::ModulatorBound(_) => {
                LmStatus::EvaluationError
            }
        };
        Failure(status, e.to_string())
    }
}

type FfiResult = Result<(), Failure>;

fn guard(body: impl FnOnce() -> FfiResult) -> LmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            LmStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LmStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(LmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(LmStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> FfiResult {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failed call on this thread; empty after a success. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn lm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn lm_status_name(status: i32) -> *const c_char {
    let name: &'static [u8] = match status {
        0 => b"ok\0",
        1 => b"null pointer\0",
        2 => b"invalid argument\0",
        3 => b"parse error\0",
        4 => b"evaluation error\0",
        5 => b"i/o error\0",
        6 => b"check failed\0",
        7 => b"panic\0",
        _ => b"unknown status\0",
    };
    name.as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn lm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds an evaluator from a descriptor JSON document. `level == 0` picks the default for
/// the descriptor's dimension.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lm_symbol_from_json(json: *const c_char, level: u32, out: *mut *mut LmSymbol) -> LmStatus {
    guard(|| {
        let desc = SymbolDescriptor::from_json(text(json, "json")?)?;
        let level = if level == 0 { levymult::cli::default_level(desc.n) } else { level };
        let eval = SymbolEvaluator::new(&desc, level)?;
        put(out, boxed(LmSymbol { eval }), "out")
    })
}

/// # Safety
/// `symbol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lm_symbol_free(symbol: *mut LmSymbol) {
    if !symbol.is_null() {
        drop(Box::from_raw(symbol));
    }
}

/// # Safety
/// `symbol` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_symbol_dim(symbol: *const LmSymbol, out: *mut usize) -> LmStatus {
    guard(|| put(out, handle(symbol, "symbol")?.eval.descriptor().n, "out"))
}

/// Evaluates `m(xi)` for one frequency of `n` coordinates.
///
/// # Safety
/// `xi` must hold `n` doubles; `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_symbol_eval(
    symbol: *const LmSymbol,
    xi: *const f64,
    n: usize,
    re: *mut f64,
    im: *mut f64,
) -> LmStatus {
    guard(|| {
        let m = handle(symbol, "symbol")?.eval.eval(slice(xi, n, "xi")?)?;
        put(re, m.re, "re")?;
        put(im, m.im, "im")
    })
}

/// Creates a field from split real/imaginary samples in row-major order. `im` may be null
/// for real data.
///
/// # Safety
/// `shape` and `box_len` hold `n` entries; `re` (and `im` if given) hold the product of
/// `shape`; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_field_new(
    n: usize,
    shape: *const usize,
    box_len: *const f64,
    re: *const f64,
    im: *const f64,
    out: *mut *mut LmField,
) -> LmStatus {
    guard(|| {
        let spec = GridSpec::new(slice(shape, n, "shape")?, slice(box_len, n, "box_len")?)?;
        let len = spec.len();
        let re = slice(re, len, "re")?;
        let data: Vec<Complex64> = if im.is_null() {
            re.iter().map(|&x| Complex64::new(x, 0.0)).collect()
        } else {
            re.iter().zip(slice(im, len, "im")?).map(|(&a, &b)| Complex64::new(a, b)).collect()
        };
        put(out, boxed(LmField { field: GridField::new(spec, data)? }), "out")
    })
}

/// # Safety
/// `path` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_field_read_gf01(path: *const c_char, out: *mut *mut LmField) -> LmStatus {
    guard(|| {
        let file = std::fs::File::open(text(path, "path")?).map_err(Error::from)?;
        let field = GridField::read_gf01(std::io::BufReader::new(file))?;
        put(out, boxed(LmField { field }), "out")
    })
}

/// # Safety
/// `field` live; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn lm_field_write_gf01(field: *const LmField, path: *const c_char) -> LmStatus {
    guard(|| {
        let field = &handle(field, "field")?.field;
        let file = std::fs::File::create(text(path, "path")?).map_err(Error::from)?;
        field.write_gf01(std::io::BufWriter::new(file))?;
        Ok(())
    })
}

/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lm_field_free(field: *mut LmField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of samples.
///
/// # Safety
/// `field` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_field_len(field: *const LmField, out: *mut usize) -> LmStatus {
    guard(|| put(out, handle(field, "field")?.field.spec().len(), "out"))
}

/// Copies the samples into caller buffers of `len` doubles each; `len` must equal the
/// sample count.
///
/// # Safety
/// `re` and `im` hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lm_field_copy_data(field: *const LmField, re: *mut f64, im: *mut f64, len: usize) -> LmStatus {
    guard(|| {
        let data = handle(field, "field")?.field.data();
        if len != data.len() {
            return Err(Failure(LmStatus::InvalidArgument, format!("buffer holds {len}, field has {}", data.len())));
        }
        if re.is_null() || im.is_null() {
            return Err(null("output buffer"));
        }
        for (i, z) in data.iter().enumerate() {
            re.add(i).write(z.re);
            im.add(i).write(z.im);
        }
        Ok(())
    })
}

/// `‖f‖_p` with the grid's cell volume; `p = INFINITY` gives the max modulus.
///
/// # Safety
/// `field` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_field_lp_norm(field: *const LmField, p: f64, out: *mut f64) -> LmStatus {
    guard(|| put(out, lp_norm(&handle(field, "field")?.field, p)?, "out"))
}

/// Applies the multiplier; the result is a new field handle.
///
/// # Safety
/// `symbol` and `field` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_apply(symbol: *const LmSymbol, field: *const LmField, out: *mut *mut LmField) -> LmStatus {
    guard(|| {
        let g = apply_multiplier(&handle(field, "field")?.field, &handle(symbol, "symbol")?.eval)?;
        put(out, boxed(LmField { field: g }), "out")
    })
}

/// # Safety
/// `json` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_jump_model_from_json(json: *const c_char, out: *mut *mut LmJumpModel) -> LmStatus {
    guard(|| {
        let model = JumpModel::from_json(text(json, "json")?)?;
        put(out, boxed(LmJumpModel { model }), "out")
    })
}

/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lm_jump_model_free(model: *mut LmJumpModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Lévy exponent `ρ(ξ) = Σ λ_j (cos(ξ·z_j) − 1)`.
///
/// # Safety
/// `xi` holds `n` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_jump_model_exponent(model: *const LmJumpModel, xi: *const f64, n: usize, out: *mut f64) -> LmStatus {
    guard(|| put(out, handle(model, "model")?.model.exponent(slice(xi, n, "xi")?)?, "out"))
}

/// Multiplier of the martingale transform with modulator `phi_json`: the infinite-horizon
/// limit when `t_final` is infinite, the finite-horizon symbol otherwise.
///
/// # Safety
/// `phi_json` NUL-terminated; `xi` holds `n` doubles; `re`, `im` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_jump_model_symbol(
    model: *const LmJumpModel,
    phi_json: *const c_char,
    xi: *const f64,
    n: usize,
    t_final: f64,
    re: *mut f64,
    im: *mut f64,
) -> LmStatus {
    guard(|| {
        let model = &handle(model, "model")?.model;
        let doc: PhiDoc = serde_json::from_str(text(phi_json, "phi_json")?).map_err(Error::from)?;
        let phi = doc.into_modulator(model.n);
        let xi = slice(xi, n, "xi")?;
        let m = if t_final.is_infinite() && t_final > 0.0 {
            model.limiting_symbol(xi, &phi)?
        } else {
            model.finite_horizon_symbol(xi, &phi, t_final)?
        };
        put(re, m.re, "re")?;
        put(im, m.im, "im")
    })
}

/// Runs a named check matrix. `options_json` may be null for defaults. The report array is
/// written to `report_json` even when a check fails, in which case the status is
/// `CheckFailed`.
///
/// # Safety
/// `name` NUL-terminated; `options_json` null or NUL-terminated; `report_json` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_check_run(
    name: *const c_char,
    options_json: *const c_char,
    report_json: *mut *mut c_char,
) -> LmStatus {
    guard(|| {
        if report_json.is_null() {
            return Err(null("report_json"));
        }
        let name = text(name, "name")?;
        let opts = if options_json.is_null() {
            CheckOptions::default()
        } else {
            CheckOptions::from_json(text(options_json, "options_json")?)?
        };
        let reports = run_check(name, &opts).map_err(|e| {
            let status = match e.code {
                EXIT_EVAL => LmStatus::EvaluationError,
                EXIT_GF01 => LmStatus::ParseError,
                _ => LmStatus::InvalidArgument,
            };
            Failure(status, e.message)
        })?;
        let doc = serde_json::to_string(&reports).map_err(Error::from)?;
        report_json.write(CString::new(doc).expect("json has no nul").into_raw());
        match reports.iter().find(|r| !r.pass) {
            Some(r) => Err(Failure(LmStatus::CheckFailed, format!("check failed: {}", r.check))),
            None => Ok(()),
        }
    })
}
