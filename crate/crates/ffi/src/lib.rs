//! C interface to `relic`.
//!
//! Every fallible call returns a [`RelicStatus`]; on failure the message is kept per thread
//! and read with [`relic_last_error`]. Parsed inputs live behind opaque handles that the
//! caller frees with the matching `_free` function. Strings returned through `out`
//! pointers are owned by the caller and released with [`relic_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use relic::algebra::{parse_algebra, ClassTag, OrderedAlgebra};
use relic::correctness::{denote, parse_triple, partially_correct_rel, totally_correct_rel, ProgramEnv};
use relic::game::{verify_game_lemmas, LemmaOptions};
use relic::law::{check_validity, eval_term, parse_formula, parse_term, CheckMode, Domain, Verdict};
use relic::syntax::{parse_env, Env};
use relic::RelicError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelicStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    Invalid = 4,
    UnknownName = 5,
    BudgetExceeded = 6,
    SpaceMismatch = 7,
    Consistency = 8,
    Panic = 9,
}

/// A state space with named relations, parsed from `space ...` and `name = {...}` lines.
pub struct RelicEnv {
    env: Env,
    programs: ProgramEnv,
}

/// A finite ordered algebra.
pub struct RelicAlgebra(OrderedAlgebra);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &RelicError) -> RelicStatus {
    match e {
        RelicError::Syntax(_) => RelicStatus::Syntax,
        RelicError::UnknownName(_) => RelicStatus::UnknownName,
        RelicError::BudgetExceeded { .. } => RelicStatus::BudgetExceeded,
        RelicError::SpaceMismatch(_) | RelicError::MissingFail => RelicStatus::SpaceMismatch,
        RelicError::Consistency(_) => RelicStatus::Consistency,
        RelicError::Invalid(_) | RelicError::OutOfContract(_) => RelicStatus::Invalid,
    }
}

struct Failure(RelicStatus, String);

impl From<RelicError> for Failure {
    fn from(e: RelicError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Run `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RelicStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RelicStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RelicStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(RelicStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(RelicStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(RelicStatus::NullArgument, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(RelicStatus::NullArgument, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// The message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn relic_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` is null or a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn relic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `source` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn relic_env_parse(source: *const c_char, out: *mut *mut RelicEnv) -> RelicStatus {
    guard(|| {
        let env = parse_env(text(source, "source")?)?;
        let programs = ProgramEnv::from_env(&env)?;
        put(out, Box::into_raw(Box::new(RelicEnv { env, programs })), "out")
    })
}

/// # Safety
/// `env` is null or a handle from [`relic_env_parse`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn relic_env_free(env: *mut RelicEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// Evaluate a term over the relations of `env`. `*out` receives the relation literal,
/// or null when the term is undefined.
///
/// # Safety
/// `env` is a live handle, `term` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn relic_env_eval(env: *const RelicEnv, term: *const c_char, out: *mut *mut c_char) -> RelicStatus {
    guard(|| {
        let env = handle(env, "env")?;
        let t = parse_term(text(term, "term")?)?;
        let value = eval_term(&t, &env.env.space, &env.env.bindings)?;
        put(out, value.map_or(ptr::null_mut(), |r| owned(r.to_string())), "out")
    })
}

/// Decide a triple such as `{1} a;b {1,2}`, totally correct when `total` is set and
/// partially correct otherwise.
///
/// # Safety
/// `env` is a live handle, `triple` a NUL-terminated string, `holds` writable.
#[no_mangle]
pub unsafe extern "C" fn relic_hoare_check(env: *const RelicEnv, triple: *const c_char, total: bool, holds: *mut bool) -> RelicStatus {
    guard(|| {
        let env = handle(env, "env")?;
        let t = parse_triple(text(triple, "triple")?, &env.programs)?;
        let rho = denote(&t.prog, &env.programs)?;
        let h = if total {
            totally_correct_rel(&t.pre, &rho, &t.post, false)?
        } else {
            partially_correct_rel(&t.pre, &rho, &t.post, false)?
        };
        put(holds, h, "holds")
    })
}

/// # Safety
/// `source` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn relic_algebra_parse(source: *const c_char, out: *mut *mut RelicAlgebra) -> RelicStatus {
    guard(|| {
        let alg = parse_algebra(text(source, "source")?)?;
        put(out, Box::into_raw(Box::new(RelicAlgebra(alg))), "out")
    })
}

/// # Safety
/// `alg` is null or a handle from [`relic_algebra_parse`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn relic_algebra_free(alg: *mut RelicAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Class membership, by snake_case class name such as `ordered_semigroup`.
///
/// # Safety
/// `alg` is a live handle, `class_name` a NUL-terminated string, `member` writable.
#[no_mangle]
pub unsafe extern "C" fn relic_algebra_check_class(alg: *const RelicAlgebra, class_name: *const c_char, member: *mut bool) -> RelicStatus {
    guard(|| {
        let alg = handle(alg, "alg")?;
        let tag: ClassTag = text(class_name, "class_name")?.parse()?;
        put(member, alg.0.check_class(tag).is_member(), "member")
    })
}

/// Check a law exhaustively over one carrier size. `domain` is `REL`, `LTREL`, `TOTAL`
/// or `LTREL0`. When the law fails and `counterexample` is not null, it receives the
/// rendered counterexample.
///
/// # Safety
/// `formula` and `domain` are NUL-terminated strings, `valid` is writable, and
/// `counterexample` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn relic_law_check(
    formula: *const c_char,
    domain: *const c_char,
    size: usize,
    budget: u64,
    valid: *mut bool,
    counterexample: *mut *mut c_char,
) -> RelicStatus {
    guard(|| {
        let f = parse_formula(text(formula, "formula")?)?;
        let d: Domain = text(domain, "domain")?.parse()?;
        let v = check_validity(&f, d, &[size], CheckMode::Exhaustive, budget)?;
        if !counterexample.is_null() {
            *counterexample = match &v {
                Verdict::Valid { .. } => ptr::null_mut(),
                Verdict::Counterexample(c) => owned(c.render()),
            };
        }
        put(valid, v.is_valid(), "valid")
    })
}

/// Check the `∀` script and the grid strategy on `A_n` with default sampling.
/// `holds` is false when a check fails or the budget ran out.
///
/// # Safety
/// `holds` is writable.
#[no_mangle]
pub unsafe extern "C" fn relic_game_verify(n: usize, budget: u64, seed: u64, holds: *mut bool) -> RelicStatus {
    guard(|| {
        let opts = LemmaOptions {
            budget,
            seed,
            ..LemmaOptions::default()
        };
        put(holds, verify_game_lemmas(n, &opts)?.holds(), "holds")
    })
}
