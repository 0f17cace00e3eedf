//! C ABI for `bloch-scope`.
//!
//! Symbols and weights are opaque heap handles created by `*_parse` and
//! released by the matching `*_free`. Every fallible call returns a
//! [`BsStatus`]; on failure `bs_last_error_message` describes the error for
//! the calling thread. Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bloch_scope::disk::DiskPoint;
use bloch_scope::estimators::{self, ScanSettings, Verdict};
use bloch_scope::norm::{SearchSettings, Searcher};
use bloch_scope::symbol::{parse_symbol, AnalyticMap};
use bloch_scope::weights::Weight;
use bloch_scope::Error;
use num_complex::Complex64;

/// Status codes. Values 1 to 5 match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BsStatus {
    Ok = 0,
    Io = 1,
    InvalidInput = 2,
    NotSelfMap = 3,
    UnsupportedWeight = 4,
    NumericFailure = 5,
    NullPointer = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BsVerdict {
    Compact = 0,
    NonCompact = 1,
    Inconclusive = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BsComplex {
    pub re: f64,
    pub im: f64,
}

/// Engine settings. Obtain defaults from `bs_options_default`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BsOptions {
    pub depth: u32,
    pub eps_boundary: f64,
    pub angles: u32,
    pub k_max: u32,
    pub j_max: u32,
    pub compact_tol: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BsNorm {
    pub value_at_zero: f64,
    pub seminorm: f64,
    pub total: f64,
    pub witness: BsComplex,
    pub converged: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BsEssentialBounds {
    pub l: f64,
    pub l_seminorm: f64,
    pub lower: f64,
    pub upper: f64,
    pub phi_norm: f64,
    pub verdict: BsVerdict,
    pub scan_converged: bool,
}

/// Parsed analytic map.
pub struct BsSymbol(AnalyticMap);

/// Parsed weight.
pub struct BsWeight(Weight);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> BsStatus {
    match err.exit_code() {
        1 => BsStatus::Io,
        3 => BsStatus::NotSelfMap,
        4 => BsStatus::UnsupportedWeight,
        5 => BsStatus::NumericFailure,
        _ => BsStatus::InvalidInput,
    }
}

struct Failure(BsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(BsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any error or panic for `bs_last_error_message`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            BsStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            BsStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(text: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if text.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|_| Failure(BsStatus::InvalidInput, format!("{what} is not valid UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn options(opts: *const BsOptions) -> Result<(SearchSettings, ScanSettings), Failure> {
    let o = opts
        .as_ref()
        .copied()
        .unwrap_or_else(|| bs_options_default());
    let search = SearchSettings {
        depth: o.depth as usize,
        eps_boundary: o.eps_boundary,
        ..SearchSettings::default()
    };
    let scan = ScanSettings {
        angles: o.angles as usize,
        k_max: o.k_max,
        j_max: o.j_max as usize,
        compact_tol: o.compact_tol,
        ..ScanSettings::default()
    };
    search.validate()?;
    scan.validate()?;
    Ok((search, scan))
}

fn complex(c: Complex64) -> BsComplex {
    BsComplex { re: c.re, im: c.im }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failed call on this thread; empty after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn bs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn bs_options_default() -> BsOptions {
    let search = SearchSettings::default();
    let scan = ScanSettings::default();
    BsOptions {
        depth: search.depth as u32,
        eps_boundary: search.eps_boundary,
        angles: scan.angles as u32,
        k_max: scan.k_max,
        j_max: scan.j_max as u32,
        compact_tol: scan.compact_tol,
    }
}

/// Parses a symbol expression into a new handle stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_symbol_parse(text: *const c_char, out: *mut *mut BsSymbol) -> BsStatus {
    guard(|| {
        let map = parse_symbol(read_str(text, "text")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        write(out, Box::into_raw(Box::new(BsSymbol(map))), "out")
    })
}

/// Releases a symbol handle. Null is ignored.
///
/// # Safety
/// `symbol` must come from `bs_symbol_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bs_symbol_free(symbol: *mut BsSymbol) {
    if !symbol.is_null() {
        drop(Box::from_raw(symbol));
    }
}

/// Canonical text of a symbol; release it with `bs_string_free`. Returns
/// null if `symbol` is null.
///
/// # Safety
/// `symbol` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bs_symbol_to_string(symbol: *const BsSymbol) -> *mut c_char {
    match symbol.as_ref() {
        Some(s) => CString::new(s.0.to_string()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from `bs_symbol_to_string` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Evaluates the symbol and its derivative at `z`, which must lie in the
/// open unit disk. Either output may be null.
///
/// # Safety
/// `symbol` must be a live handle; outputs must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn bs_symbol_eval(
    symbol: *const BsSymbol,
    z: BsComplex,
    value: *mut BsComplex,
    derivative: *mut BsComplex,
) -> BsStatus {
    guard(|| {
        let s = deref(symbol, "symbol")?;
        let p = DiskPoint::new(z.re, z.im)?;
        let (v, d) = s.0.jet(p.to_complex());
        if !value.is_null() {
            value.write(complex(v));
        }
        if !derivative.is_null() {
            derivative.write(complex(d));
        }
        Ok(())
    })
}

/// Parses a weight specification (`valpha:<a>`, `log`, `custom:<path>`).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_weight_parse(text: *const c_char, out: *mut *mut BsWeight) -> BsStatus {
    guard(|| {
        let w = Weight::parse(read_str(text, "text")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        write(out, Box::into_raw(Box::new(BsWeight(w))), "out")
    })
}

/// Releases a weight handle. Null is ignored.
///
/// # Safety
/// `weight` must come from `bs_weight_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bs_weight_free(weight: *mut BsWeight) {
    if !weight.is_null() {
        drop(Box::from_raw(weight));
    }
}

/// # Safety
/// `weight` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_weight_at(
    weight: *const BsWeight,
    z: BsComplex,
    out: *mut f64,
) -> BsStatus {
    guard(|| {
        let w = deref(weight, "weight")?;
        let p = DiskPoint::new(z.re, z.im)?;
        write(out, w.0.at(p), "out")
    })
}

/// `|f(0)| + sup μ|f'|`. `opts` may be null for defaults.
///
/// # Safety
/// Handles must be live; `opts` valid or null; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bs_bloch_norm(
    symbol: *const BsSymbol,
    weight: *const BsWeight,
    opts: *const BsOptions,
    out: *mut BsNorm,
) -> BsStatus {
    guard(|| {
        let (s, w) = (deref(symbol, "symbol")?, deref(weight, "weight")?);
        let (search, _) = options(opts)?;
        let norm = Searcher::new(&search)?.bloch_norm(&s.0, &w.0)?;
        write(
            out,
            BsNorm {
                value_at_zero: norm.value_at_zero,
                seminorm: norm.seminorm.value,
                total: norm.total,
                witness: complex(norm.seminorm.witness.to_complex()),
                converged: norm.seminorm.is_converged,
            },
            "out",
        )
    })
}

/// Boundary scan and essential-norm bounds for `C_φ: B^α → B^μ`.
///
/// # Safety
/// Handles must be live; `opts` valid or null; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bs_essential_bounds(
    symbol: *const BsSymbol,
    alpha: f64,
    weight: *const BsWeight,
    opts: *const BsOptions,
    out: *mut BsEssentialBounds,
) -> BsStatus {
    guard(|| {
        let (s, w) = (deref(symbol, "symbol")?, deref(weight, "weight")?);
        let (search, scan_settings) = options(opts)?;
        let searcher = Searcher::new(&search)?;
        let scan = estimators::sigma_scan(&s.0, alpha, &w.0, &searcher, &scan_settings)?;
        let phi_norm = searcher.bloch_norm(&s.0, &w.0)?;
        let b = estimators::essential_bounds(&scan, alpha, &phi_norm, scan_settings.compact_tol);
        write(
            out,
            BsEssentialBounds {
                l: b.l,
                l_seminorm: b.l_seminorm,
                lower: b.lower,
                upper: b.upper,
                phi_norm: b.phi_norm,
                verdict: match b.verdict {
                    Verdict::Compact => BsVerdict::Compact,
                    Verdict::NonCompact => BsVerdict::NonCompact,
                    Verdict::Inconclusive => BsVerdict::Inconclusive,
                },
                scan_converged: b.scan_converged,
            },
            "out",
        )
    })
}

/// Power-criterion estimate; requires a standard weight.
///
/// # Safety
/// Handles must be live; `opts` valid or null; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bs_zhao_estimate(
    symbol: *const BsSymbol,
    alpha: f64,
    weight: *const BsWeight,
    opts: *const BsOptions,
    out: *mut f64,
) -> BsStatus {
    guard(|| {
        let (s, w) = (deref(symbol, "symbol")?, deref(weight, "weight")?);
        let (search, scan_settings) = options(opts)?;
        let searcher = Searcher::new(&search)?;
        let z = estimators::zhao_estimate(&s.0, alpha, &w.0, scan_settings.j_max, &searcher)?;
        write(out, z.estimate, "out")
    })
}
