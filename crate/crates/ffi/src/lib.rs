//! C ABI over the qcsp toolkit.
//!
//! Languages and sentences cross the boundary as opaque handles owned by the
//! caller and released with the matching `_free` function. Every entry point
//! returns a [`QcspStatus`]; on failure [`qcsp_last_error`] describes the
//! problem. Strings returned through out-parameters are released with
//! [`qcsp_string_free`]. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use qcsp::algebra::{switchability_witness, WitnessConfig, WitnessVerdict};
use qcsp::budget::Budgets;
use qcsp::format::{parse_language, parse_sentence};
use qcsp::model::{switch_count, ConstraintLanguage, QuantifiedSentence};
use qcsp::solvers::{
    classify, oracle_qcsp, reduce_pgp_to_csp, solve_pi2, solve_power_csp, ClassifyOptions, ReductionOptions,
};
use qcsp::Error;

/// Outcome of a call; anything but `Ok` leaves a message for [`qcsp_last_error`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcspStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidSentence = 4,
    Model = 5,
    DomainMismatch = 6,
    InvalidArgument = 7,
    MissingWitness = 8,
    Budget = 9,
    Io = 10,
    Panic = 11,
}

/// Decision procedure used by [`qcsp_solve`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcspMethod {
    /// Game-tree search over the original prefix.
    Oracle = 0,
    /// Conjunction of CSP instances, one per ω index set.
    PgpCsp = 1,
    /// Single ∀*∃* sentence, then universal removal and CSP search.
    Pi2 = 2,
    /// Single ∀*∃* sentence, then CSP over the power language.
    PowerCsp = 3,
}

pub struct QcspLanguage {
    inner: Arc<ConstraintLanguage>,
}

pub struct QcspSentence {
    inner: QuantifiedSentence,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

fn status_of(e: &Error) -> QcspStatus {
    match e {
        Error::Parse(_) => QcspStatus::Parse,
        Error::Budget(_) => QcspStatus::Budget,
        Error::InvalidSentence(_) => QcspStatus::InvalidSentence,
        Error::Model(_) => QcspStatus::Model,
        Error::DomainMismatch(_) => QcspStatus::DomainMismatch,
        Error::InvalidArgument(_) => QcspStatus::InvalidArgument,
        Error::MissingWitness { .. } => QcspStatus::MissingWitness,
        Error::Io(_) => QcspStatus::Io,
    }
}

struct Failure(QcspStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

impl From<qcsp::error::ParseError> for Failure {
    fn from(e: qcsp::error::ParseError) -> Self {
        Failure(QcspStatus::Parse, e.to_string())
    }
}

/// Runs `body`, converting errors and panics into a status and the thread's last error.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QcspStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QcspStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {what}"));
            QcspStatus::Panic
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes either null or a pointer obtained from this library.
    unsafe { p.as_ref() }.ok_or_else(|| Failure(QcspStatus::NullPointer, format!("{what} is null")))
}

fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(QcspStatus::NullPointer, format!("{what} is null")));
    }
    // SAFETY: non-null and, per the contract, nul-terminated.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|e| Failure(QcspStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: the caller passes either null or a valid, writable location.
    unsafe { p.as_mut() }.ok_or_else(|| Failure(QcspStatus::NullPointer, format!("{what} is null")))
}

fn give_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let slot = out_ptr(out, "output string")?;
    let c = CString::new(s).map_err(|e| Failure(QcspStatus::InvalidArgument, e.to_string()))?;
    *slot = c.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread, or null after a success.
///
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn qcsp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Nul-terminated version string with static lifetime.
#[no_mangle]
pub extern "C" fn qcsp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a language in the text format.
///
/// # Safety
/// `source` must be a nul-terminated string and `out` a writable location.
#[no_mangle]
pub unsafe extern "C" fn qcsp_language_parse(source: *const c_char, out: *mut *mut QcspLanguage) -> QcspStatus {
    guard(|| {
        let slot = out_ptr(out, "out")?;
        let lang = parse_language(text(source, "source")?)?;
        *slot = Box::into_raw(Box::new(QcspLanguage { inner: Arc::new(lang) }));
        Ok(())
    })
}

/// # Safety
/// `lang` must be null or a handle from [`qcsp_language_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcsp_language_free(lang: *mut QcspLanguage) {
    if !lang.is_null() {
        drop(Box::from_raw(lang));
    }
}

/// Parses a sentence in the text format over `lang`. The sentence keeps its own reference to the language.
///
/// # Safety
/// `lang` must be a live handle, `source` nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qcsp_sentence_parse(
    lang: *const QcspLanguage,
    source: *const c_char,
    out: *mut *mut QcspSentence,
) -> QcspStatus {
    guard(|| {
        let slot = out_ptr(out, "out")?;
        let lang = non_null(lang, "language")?;
        let s = parse_sentence(text(source, "source")?, lang.inner.clone())?;
        *slot = Box::into_raw(Box::new(QcspSentence { inner: s }));
        Ok(())
    })
}

/// # Safety
/// `sentence` must be null or a handle from [`qcsp_sentence_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcsp_sentence_free(sentence: *mut QcspSentence) {
    if !sentence.is_null() {
        drop(Box::from_raw(sentence));
    }
}

/// Decides `sentence` with `method`, writing the truth value to `out_truth`.
///
/// The reduction methods compute a switchability witness for bound `r`
/// (polymorphism arity up to 3, powers up to 4) unless `override_witness` is
/// set, in which case `out_conditional` reports that the answer is conditional.
/// `out_conditional` may be null.
///
/// # Safety
/// `sentence` must be a live handle; `out_truth` writable; `out_conditional` null or writable.
#[no_mangle]
pub unsafe extern "C" fn qcsp_solve(
    sentence: *const QcspSentence,
    method: QcspMethod,
    r: usize,
    override_witness: bool,
    out_truth: *mut bool,
    out_conditional: *mut bool,
) -> QcspStatus {
    guard(|| {
        let truth = out_ptr(out_truth, "out_truth")?;
        let s = &non_null(sentence, "sentence")?.inner;
        let budgets = Budgets::from_env().map_err(|e| Failure(QcspStatus::InvalidArgument, e))?;
        let (value, conditional) = match method {
            QcspMethod::Oracle => (oracle_qcsp(s, &budgets)?.truth, false),
            _ => {
                let witness = if override_witness {
                    None
                } else {
                    let config = WitnessConfig { r, ..WitnessConfig::default() };
                    Some(switchability_witness(s.language(), config, &budgets)?)
                };
                let options = ReductionOptions {
                    r,
                    witness: witness.as_ref(),
                    override_witness,
                    exec: Default::default(),
                };
                let conditional = options.gate(s)?;
                let value = match method {
                    QcspMethod::PgpCsp => reduce_pgp_to_csp(s, options, &budgets)?.combined,
                    QcspMethod::Pi2 => solve_pi2(s, options, &budgets)?.truth,
                    _ => solve_power_csp(s, options, &budgets)?.truth,
                };
                (value, conditional)
            }
        };
        *truth = value;
        if let Some(c) = out_conditional.as_mut() {
            *c = conditional;
        }
        Ok(())
    })
}

/// Switchability witness for `lang` as a JSON document with keys `r`, `powers` and `verdict`.
///
/// # Safety
/// `lang` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qcsp_witness_json(
    lang: *const QcspLanguage,
    r: usize,
    max_arity: usize,
    max_power: usize,
    out: *mut *mut c_char,
) -> QcspStatus {
    guard(|| {
        let lang = non_null(lang, "language")?;
        let budgets = Budgets::from_env().map_err(|e| Failure(QcspStatus::InvalidArgument, e))?;
        let config = WitnessConfig { r, max_arity, max_power };
        let w = switchability_witness(&lang.inner, config, &budgets)?;
        give_string(out, serde_json::to_string(&w).expect("witness serializes"))
    })
}

/// Complexity classification of `lang` as a JSON document with `verdict` and `caveat`.
///
/// # Safety
/// `lang` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qcsp_classify_json(
    lang: *const QcspLanguage,
    r: usize,
    wnu_arity: usize,
    override_witness: bool,
    out: *mut *mut c_char,
) -> QcspStatus {
    guard(|| {
        let lang = non_null(lang, "language")?;
        let budgets = Budgets::from_env().map_err(|e| Failure(QcspStatus::InvalidArgument, e))?;
        let witness = if override_witness {
            None
        } else {
            let w = switchability_witness(&lang.inner, WitnessConfig { r, ..WitnessConfig::default() }, &budgets)?;
            (w.verdict == WitnessVerdict::Witnessed).then_some(w)
        };
        let options = ClassifyOptions {
            r,
            wnu_arity,
            witness: witness.as_ref(),
            override_witness,
        };
        let report = classify(&lang.inner, options, &budgets)?;
        give_string(out, serde_json::to_string(&report).expect("report serializes"))
    })
}

/// Number of positions `i >= 1` with `values[i] != values[i - 1]`.
///
/// # Safety
/// `values` must point to `len` readable elements (or be null with `len == 0`).
#[no_mangle]
pub unsafe extern "C" fn qcsp_switch_count(values: *const u32, len: usize) -> usize {
    if values.is_null() || len == 0 {
        return 0;
    }
    switch_count(std::slice::from_raw_parts(values, len))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcsp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
