//! C ABI over `lpt_core`.
//!
//! Handles are opaque and owned by the caller: every `*_new`/`*_parse`/
//! `*_load` result must be released with the matching `*_free`. Strings
//! returned through `char **` out-parameters are owned by the caller and
//! released with [`lpt_string_free`]. On a non-`Ok` status the message is
//! available from [`lpt_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lpt_core::corpus::Corpus;
use lpt_core::derivation::{replay, Resolver, Script, Session, SessionError};
use lpt_core::engine::{solve, SolveLimits};
use lpt_core::kernel::{parse_program, parse_query, program_to_string, term_to_string, Program};
use lpt_core::rules::Step;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LptStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    UnknownEntry = 4,
    RuleError = 5,
    EngineError = 6,
    BranchConflict = 7,
    NothingToDo = 8,
    Panic = 9,
}

/// A parsed program.
pub struct LptProgram {
    inner: Program,
}

/// A derivation session over a base program.
pub struct LptSession {
    inner: Session,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(LptStatus, String);

type FfiResult<T> = Result<T, Fail>;

/// Runs `f`, recording errors and turning panics into `Panic`.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> LptStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LptStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LptStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Fail(LptStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Fail(LptStatus::InvalidUtf8, e.to_string()))
}

/// # Safety
/// `out` is null or valid for one pointer write.
unsafe fn write_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    if out.is_null() {
        return Err(Fail(LptStatus::NullArgument, "null output pointer".into()));
    }
    let c = CString::new(s).map_err(|e| Fail(LptStatus::InvalidUtf8, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

fn null_arg(what: &str) -> Fail {
    Fail(LptStatus::NullArgument, format!("null {what}"))
}

fn session_fail(e: SessionError) -> Fail {
    let status = match e {
        SessionError::BranchConflict => LptStatus::BranchConflict,
        SessionError::Engine(_) => LptStatus::EngineError,
        _ => LptStatus::RuleError,
    };
    Fail(status, e.to_string())
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn lpt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lpt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses program text.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lpt_program_parse(text: *const c_char, out: *mut *mut LptProgram) -> LptStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("output pointer"));
        }
        let t = read_str(text)?;
        let p = parse_program(t).map_err(|e| Fail(LptStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(LptProgram { inner: p }));
        Ok(())
    })
}

/// Loads a program from the embedded corpus by name.
///
/// # Safety
/// `name` is a NUL-terminated string; `out` is valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lpt_program_load(name: *const c_char, out: *mut *mut LptProgram) -> LptStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("output pointer"));
        }
        let n = read_str(name)?;
        let p = Corpus::builtin().program(n).map_err(|e| Fail(LptStatus::UnknownEntry, e.to_string()))?;
        *out = Box::into_raw(Box::new(LptProgram { inner: p }));
        Ok(())
    })
}

/// Canonical program text.
///
/// # Safety
/// `p` is a live program handle; `out` is valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lpt_program_to_string(p: *const LptProgram, out: *mut *mut c_char) -> LptStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null_arg("program"))?;
        write_string(out, program_to_string(&p.inner))
    })
}

/// Number of clauses, or 0 for null.
///
/// # Safety
/// `p` is null or a live program handle.
#[no_mangle]
pub unsafe extern "C" fn lpt_program_clause_count(p: *const LptProgram) -> usize {
    p.as_ref().map_or(0, |p| p.inner.len())
}

/// # Safety
/// `p` is null or a program handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lpt_program_free(p: *mut LptProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Solves `query`; writes a JSON document
/// `{"answers": [{"X": "..."}], "steps": n, "exhausted": b}`.
/// `max_answers == 0` means no limit.
///
/// # Safety
/// `p` is a live program handle; `query` a NUL-terminated string; `out`
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lpt_solve(
    p: *const LptProgram,
    query: *const c_char,
    max_answers: usize,
    out: *mut *mut c_char,
) -> LptStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null_arg("program"))?;
        let q = parse_query(read_str(query)?).map_err(|e| Fail(LptStatus::ParseError, e.to_string()))?;
        let limits = if max_answers == 0 { SolveLimits::default() } else { SolveLimits::default().with_max_answers(max_answers) };
        let r = solve(&p.inner, &q, limits).map_err(|e| Fail(LptStatus::EngineError, e.to_string()))?;
        let answers: Vec<serde_json::Map<String, serde_json::Value>> = r
            .answers
            .iter()
            .map(|a| a.iter().map(|(v, t)| (v.to_string(), serde_json::Value::String(term_to_string(t)))).collect())
            .collect();
        let doc = serde_json::json!({ "answers": answers, "steps": r.steps, "exhausted": r.exhausted });
        write_string(out, doc.to_string())
    })
}

/// Starts a session over a copy of `base`, with the corpus lemmas.
///
/// # Safety
/// `base` is a live program handle; `out` is valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lpt_session_new(base: *const LptProgram, out: *mut *mut LptSession) -> LptStatus {
    guard(|| {
        let b = base.as_ref().ok_or_else(|| null_arg("program"))?;
        if out.is_null() {
            return Err(null_arg("output pointer"));
        }
        let s = Session::new("ffi", b.inner.clone(), Resolver::lemmas(&Corpus::builtin()));
        *out = Box::into_raw(Box::new(LptSession { inner: s }));
        Ok(())
    })
}

/// Applies one step given as JSON (the script step format).
///
/// # Safety
/// `s` is a live session handle; `step_json` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lpt_session_apply(s: *mut LptSession, step_json: *const c_char, verify_now: bool) -> LptStatus {
    guard(|| {
        let s = s.as_mut().ok_or_else(|| null_arg("session"))?;
        let step: Step = serde_json::from_str(read_str(step_json)?).map_err(|e| Fail(LptStatus::ParseError, e.to_string()))?;
        s.inner.apply(&step, verify_now).map(|_| ()).map_err(session_fail)
    })
}

/// Moves the cursor back one step; `NothingToDo` at the start.
///
/// # Safety
/// `s` is a live session handle.
#[no_mangle]
pub unsafe extern "C" fn lpt_session_undo(s: *mut LptSession) -> LptStatus {
    guard(|| {
        let s = s.as_mut().ok_or_else(|| null_arg("session"))?;
        if s.inner.undo() {
            Ok(())
        } else {
            Err(Fail(LptStatus::NothingToDo, "already at the first snapshot".into()))
        }
    })
}

/// Moves the cursor forward one step; `NothingToDo` at the end.
///
/// # Safety
/// `s` is a live session handle.
#[no_mangle]
pub unsafe extern "C" fn lpt_session_redo(s: *mut LptSession) -> LptStatus {
    guard(|| {
        let s = s.as_mut().ok_or_else(|| null_arg("session"))?;
        if s.inner.redo() {
            Ok(())
        } else {
            Err(Fail(LptStatus::NothingToDo, "already at the last snapshot".into()))
        }
    })
}

/// Program text at the cursor.
///
/// # Safety
/// `s` is a live session handle; `out` is valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lpt_session_program(s: *const LptSession, out: *mut *mut c_char) -> LptStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null_arg("session"))?;
        write_string(out, program_to_string(s.inner.program()))
    })
}

/// Ranked goal-introduction candidates for `clause`, as a JSON array.
///
/// # Safety
/// `s` is a live session handle; `clause` a NUL-terminated string; `out`
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lpt_session_candidates(s: *const LptSession, clause: *const c_char, out: *mut *mut c_char) -> LptStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null_arg("session"))?;
        let cs = s.inner.candidates(read_str(clause)?, None, SolveLimits::default()).map_err(session_fail)?;
        write_string(out, serde_json::to_string(&cs).expect("candidates serialize"))
    })
}

/// Applied steps up to the cursor as script JSON.
///
/// # Safety
/// `s` is a live session handle; `base` a NUL-terminated string naming the
/// base program; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lpt_session_export(s: *const LptSession, base: *const c_char, out: *mut *mut c_char) -> LptStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null_arg("session"))?;
        let script = s.inner.export_script(&s.inner.id, read_str(base)?, None);
        write_string(out, script.to_json())
    })
}

/// # Safety
/// `s` is null or a session handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lpt_session_free(s: *mut LptSession) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Replays a corpus script (by name) or script JSON against the embedded
/// corpus. Writes `{"final": text, "matches_expected": bool|null}`.
///
/// # Safety
/// `script` is a NUL-terminated string; `out` is valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lpt_replay(script: *const c_char, out: *mut *mut c_char) -> LptStatus {
    guard(|| {
        let arg = read_str(script)?;
        let corpus = Corpus::builtin();
        let sc = match corpus.script(arg) {
            Ok(s) => s,
            Err(_) if arg.trim_start().starts_with('{') => {
                Script::from_json(arg).map_err(|e| Fail(LptStatus::ParseError, e.to_string()))?
            }
            Err(e) => return Err(Fail(LptStatus::UnknownEntry, e.to_string())),
        };
        let (_, r) = replay(&sc, &corpus, false).map_err(|e| Fail(LptStatus::RuleError, e.to_string()))?;
        let doc = serde_json::json!({ "final": program_to_string(&r.final_program), "matches_expected": r.matches_expected });
        write_string(out, doc.to_string())
    })
}
