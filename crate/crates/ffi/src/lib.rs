//! C interface to the proppr engine.
//!
//! Handles are opaque pointers created by `*_new`/`*_answer` functions and
//! released by the matching `*_free`. Every fallible call returns a
//! [`PropprStatus`]; on failure, [`proppr_last_error`] describes the most
//! recent error on the calling thread. Strings passed in must be
//! NUL-terminated UTF-8; strings handed out stay owned by their handle.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use proppr::grounder::GroundingParams;
use proppr::logic::parse_query;
use proppr::{
    extract_answers, ground_full, pagerank_nibble_prove, power_iterate, Error, KnowledgeBase,
    ParameterVector, WeightFn,
};

/// Result of a C API call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropprStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Rule or query syntax error.
    Syntax = 3,
    /// Inconsistent predicate arity, or a predicate with both rules and facts.
    Program = 4,
    /// Malformed facts or parameter file.
    Format = 5,
    /// A query uses a predicate with no rules or facts.
    UnknownPredicate = 6,
    /// Grounding failed: bad edge weight, restart bound, node budget.
    Grounding = 7,
    /// Out-of-range parameter.
    InvalidParams = 8,
    /// An index was out of range.
    OutOfRange = 9,
    /// Internal failure (a caught panic).
    Internal = 10,
}

impl From<&Error> for PropprStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Syntax { .. } => PropprStatus::Syntax,
            Error::Arity { .. } | Error::RuleFactOverlap(_) | Error::NonGroundFeature { .. } => {
                PropprStatus::Program
            }
            Error::Facts { .. } | Error::Format { .. } | Error::File { .. } | Error::Io(_) => {
                PropprStatus::Format
            }
            Error::UnknownPredicate(_) => PropprStatus::UnknownPredicate,
            Error::BadEdgeWeight(_) | Error::RestartBelowBound { .. } | Error::NodeBudget(_) => {
                PropprStatus::Grounding
            }
            Error::InvalidParams(_) | Error::Divergence { .. } | Error::NoUsableExamples => {
                PropprStatus::InvalidParams
            }
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: PropprStatus, message: &str) -> PropprStatus {
    set_last_error(message);
    status
}

fn fail_with(e: &Error) -> PropprStatus {
    fail(e.into(), &format!("{}: {e}", e.kind()))
}

/// Runs `body`, turning panics into [`PropprStatus::Internal`].
fn guard(body: impl FnOnce() -> PropprStatus) -> PropprStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(PropprStatus::Internal, "internal error"),
    }
}

/// Borrows a C string argument. An optional argument may be null.
unsafe fn arg<'a>(s: *const c_char, optional: bool) -> Result<Option<&'a str>, PropprStatus> {
    if s.is_null() {
        return if optional {
            Ok(None)
        } else {
            Err(fail(PropprStatus::NullArgument, "null string argument"))
        };
    }
    CStr::from_ptr(s)
        .to_str()
        .map(Some)
        .map_err(|_| fail(PropprStatus::InvalidUtf8, "string argument is not UTF-8"))
}

/// Message for the last failed call on this thread; empty if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn proppr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// A loaded program, database, and parameters.
pub struct PropprEngine {
    kb: KnowledgeBase,
    weights: ParameterVector,
    params: GroundingParams,
    weight_fn: WeightFn,
    exact: bool,
}

/// Ranked answers of one query.
pub struct PropprAnswers {
    answers: Vec<(CString, f64)>,
}

/// Loads a program from rule text and tab-separated fact text (`facts` may
/// be null). On success stores a new engine in `*out`.
///
/// # Safety
/// `rules` and `facts` must be null or NUL-terminated; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn proppr_engine_new(
    rules: *const c_char,
    facts: *const c_char,
    out: *mut *mut PropprEngine,
) -> PropprStatus {
    guard(|| {
        if out.is_null() {
            return fail(PropprStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let (rules, facts) = match (arg(rules, false), arg(facts, true)) {
            (Ok(r), Ok(f)) => (r.unwrap(), f.unwrap_or("")),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match KnowledgeBase::from_sources(rules, facts) {
            Ok(kb) => {
                *out = Box::into_raw(Box::new(PropprEngine {
                    kb,
                    weights: ParameterVector::new(),
                    params: GroundingParams::default(),
                    weight_fn: WeightFn::Linear,
                    exact: false,
                }));
                PropprStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Releases an engine. Null is ignored.
///
/// # Safety
/// `engine` must be null or a pointer from [`proppr_engine_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn proppr_engine_free(engine: *mut PropprEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Replaces the feature weights with `feature<TAB>weight` lines. Features
/// not listed weigh 1.
///
/// # Safety
/// `engine` must be a live engine; `tsv` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn proppr_engine_set_weights(
    engine: *mut PropprEngine,
    tsv: *const c_char,
) -> PropprStatus {
    guard(|| {
        let Some(engine) = engine.as_mut() else {
            return fail(PropprStatus::NullArgument, "null engine");
        };
        let tsv = match arg(tsv, false) {
            Ok(t) => t.unwrap(),
            Err(s) => return s,
        };
        match ParameterVector::from_tsv(tsv) {
            Ok(w) => {
                engine.weights = w;
                PropprStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Sets grounding parameters. `exp_weights` selects `exp` edge weighting
/// instead of linear; `exact` answers by full grounding and power iteration.
///
/// # Safety
/// `engine` must be a live engine.
#[no_mangle]
pub unsafe extern "C" fn proppr_engine_configure(
    engine: *mut PropprEngine,
    alpha: f64,
    alpha_prime: f64,
    epsilon: f64,
    max_t: u32,
    exp_weights: bool,
    exact: bool,
) -> PropprStatus {
    guard(|| {
        let Some(engine) = engine.as_mut() else {
            return fail(PropprStatus::NullArgument, "null engine");
        };
        let params = GroundingParams {
            alpha,
            alpha_prime,
            epsilon,
            max_t: max_t as usize,
            ..engine.params
        };
        if let Err(e) = params.validate() {
            return fail_with(&e);
        }
        engine.params = params;
        engine.weight_fn = if exp_weights { WeightFn::Exp } else { WeightFn::Linear };
        engine.exact = exact;
        PropprStatus::Ok
    })
}

/// Answers `query` (e.g. `"about(a,Z)"`). On success stores the ranked
/// answers in `*out`; a query without solutions gives an empty list.
///
/// # Safety
/// `engine` must be a live engine; `query` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn proppr_engine_answer(
    engine: *const PropprEngine,
    query: *const c_char,
    out: *mut *mut PropprAnswers,
) -> PropprStatus {
    guard(|| {
        if out.is_null() {
            return fail(PropprStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(engine) = engine.as_ref() else {
            return fail(PropprStatus::NullArgument, "null engine");
        };
        let query = match arg(query, false) {
            Ok(q) => q.unwrap(),
            Err(s) => return s,
        };
        let answers = parse_query(query).and_then(|q| {
            let (w, f, params) = (&engine.weights, engine.weight_fn, &engine.params);
            if engine.exact {
                let g = ground_full(&q, &engine.kb, params)?;
                let v = power_iterate(&g, w, f, params.alpha_prime, params.max_t, 1e-10)?;
                Ok(extract_answers(&g, v.as_slice()))
            } else {
                let o = pagerank_nibble_prove(&q, &engine.kb, params, w, f)?;
                Ok(extract_answers(&o.graph, &o.estimate))
            }
        });
        match answers {
            Ok(list) => {
                let answers = list
                    .answers
                    .into_iter()
                    .map(|a| (CString::new(a.answer).unwrap_or_default(), a.probability))
                    .collect();
                *out = Box::into_raw(Box::new(PropprAnswers { answers }));
                PropprStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Number of answers; 0 for null.
///
/// # Safety
/// `answers` must be null or a live answer list.
#[no_mangle]
pub unsafe extern "C" fn proppr_answers_len(answers: *const PropprAnswers) -> usize {
    answers.as_ref().map_or(0, |a| a.answers.len())
}

/// The answer at `rank` (0 = most probable). `*text` points into the answer
/// list and lives until [`proppr_answers_free`].
///
/// # Safety
/// `answers` must be a live answer list; `text` and `probability` valid.
#[no_mangle]
pub unsafe extern "C" fn proppr_answers_get(
    answers: *const PropprAnswers,
    rank: usize,
    text: *mut *const c_char,
    probability: *mut f64,
) -> PropprStatus {
    guard(|| {
        let Some(answers) = answers.as_ref() else {
            return fail(PropprStatus::NullArgument, "null answer list");
        };
        if text.is_null() || probability.is_null() {
            return fail(PropprStatus::NullArgument, "null output pointer");
        }
        match answers.answers.get(rank) {
            Some((s, p)) => {
                *text = s.as_ptr();
                *probability = *p;
                PropprStatus::Ok
            }
            None => fail(
                PropprStatus::OutOfRange,
                &format!("rank {rank} out of range ({} answers)", answers.answers.len()),
            ),
        }
    })
}

/// Releases an answer list. Null is ignored.
///
/// # Safety
/// `answers` must be null or a list from [`proppr_engine_answer`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn proppr_answers_free(answers: *mut PropprAnswers) {
    if !answers.is_null() {
        drop(Box::from_raw(answers));
    }
}
