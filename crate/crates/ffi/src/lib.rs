//! C interface to `symmus`.
//!
//! Specifications and symmetry groups are opaque handles. Algorithms take
//! their options as a JSON object and write a JSON run report into a
//! caller-owned `char*` that must be released with
//! [`symmus_string_free`]. On failure the message is available from
//! [`symmus_last_error`] until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde::Deserialize;
use symmus::cli::{run, Algorithm, Common, GroupSource, MarcoOptions, MusAlgo, Status};
use symmus::formula::{half_reify, parse_spec, Spec};
use symmus::marco::ShrinkBackend;
use symmus::ocus::{OcusConfig, DEFAULT_ENUM_CAP, DEFAULT_LEX_ENUM_CAP};
use symmus::shrink::Order;
use symmus::symmetry::{detect_with_budget, parse_symmetries, write_symmetries, SymGroup, DEFAULT_NODE_BUDGET};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmusStatus {
    Ok = 0,
    Error = 1,
    Sat = 2,
    Budget = 3,
    InvalidArgument = 4,
    Panic = 5,
}

/// A parsed specification.
pub struct SymmusSpec {
    spec: Spec,
}

/// A symmetry group over the constraints of one specification.
pub struct SymmusGroup {
    group: SymGroup,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn guard<T>(fallback: T, f: impl FnOnce() -> T) -> T {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic");
        fallback
    })
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, String> {
    if p.is_null() {
        return Err(format!("{what} is null"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| format!("{what} is not UTF-8"))
}

/// Message of the last failure on this thread; empty when none. Owned by
/// the library.
#[no_mangle]
pub extern "C" fn symmus_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a specification; returns null on failure.
///
/// # Safety
/// `text` must be null or a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn symmus_spec_parse(text: *const c_char) -> *mut SymmusSpec {
    guard(ptr::null_mut(), || {
        let parsed = c_str(text, "text").and_then(|t| parse_spec(t).map_err(|e| e.to_string()));
        match parsed {
            Ok(spec) => Box::into_raw(Box::new(SymmusSpec { spec })),
            Err(e) => {
                set_error(e);
                ptr::null_mut()
            }
        }
    })
}

/// # Safety
/// `spec` must be null or a handle from [`symmus_spec_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn symmus_spec_free(spec: *mut SymmusSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Number of constraints, or 0 for a null handle.
///
/// # Safety
/// `spec` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn symmus_spec_num_constraints(spec: *const SymmusSpec) -> usize {
    spec.as_ref().map_or(0, |s| s.spec.len())
}

/// Detects constraint symmetries; `node_budget` 0 selects the default.
///
/// # Safety
/// `spec` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn symmus_detect(spec: *const SymmusSpec, node_budget: u64) -> *mut SymmusGroup {
    guard(ptr::null_mut(), || {
        let Some(s) = spec.as_ref() else {
            set_error("spec is null");
            return ptr::null_mut();
        };
        let budget = if node_budget == 0 { DEFAULT_NODE_BUDGET } else { node_budget };
        let group = detect_with_budget(&half_reify(&s.spec), budget);
        Box::into_raw(Box::new(SymmusGroup { group }))
    })
}

/// Reads a group in symmetry-file format; returns null on failure.
///
/// # Safety
/// `spec` must be a live handle and `text` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn symmus_group_parse(spec: *const SymmusSpec, text: *const c_char) -> *mut SymmusGroup {
    guard(ptr::null_mut(), || {
        let Some(s) = spec.as_ref() else {
            set_error("spec is null");
            return ptr::null_mut();
        };
        match c_str(text, "text").and_then(|t| parse_symmetries(t, &s.spec).map_err(|e| e.to_string())) {
            Ok(group) => Box::into_raw(Box::new(SymmusGroup { group })),
            Err(e) => {
                set_error(e);
                ptr::null_mut()
            }
        }
    })
}

/// Writes a group in symmetry-file format. Free with
/// [`symmus_string_free`].
///
/// # Safety
/// Both handles must be live and belong together.
#[no_mangle]
pub unsafe extern "C" fn symmus_group_write(group: *const SymmusGroup, spec: *const SymmusSpec) -> *mut c_char {
    guard(ptr::null_mut(), || match (group.as_ref(), spec.as_ref()) {
        (Some(g), Some(s)) if g.group.num_constraints == s.spec.len() => {
            CString::new(write_symmetries(&g.group, &s.spec)).map_or(ptr::null_mut(), CString::into_raw)
        }
        _ => {
            set_error("null or mismatched handles");
            ptr::null_mut()
        }
    })
}

/// Number of generators, or 0 for a null handle.
///
/// # Safety
/// `group` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn symmus_group_num_generators(group: *const SymmusGroup) -> usize {
    group.as_ref().map_or(0, |g| g.group.generators.len())
}

/// # Safety
/// `group` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn symmus_group_free(group: *mut SymmusGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn symmus_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Options {
    seed: u64,
    conflict_budget: Option<u64>,
    time_limit: Option<f64>,
    node_budget: Option<u64>,
    negative_assumptions: Option<bool>,
    lex_order: Option<Vec<String>>,
    // mus
    algo: Option<String>,
    order: Option<String>,
    // ocus
    lex: bool,
    dynamic: bool,
    mcs_cap: Option<usize>,
    weights: Option<Vec<u64>>,
    // marco
    unroll: bool,
    max_muses: Option<usize>,
    shrink: Option<String>,
}

enum Kind {
    Mus,
    Ocus,
    Marco,
}

fn algorithm(kind: Kind, o: &Options) -> Result<Algorithm, String> {
    Ok(match kind {
        Kind::Mus => {
            let algo = match o.algo.as_deref().unwrap_or("shrink") {
                "shrink" => MusAlgo::Shrink,
                "symm" => MusAlgo::Symm,
                "symm-recompute" => MusAlgo::SymmRecompute,
                a => return Err(format!("unknown algo {a:?}")),
            };
            let order = match o.order.as_deref().unwrap_or("descending") {
                "descending" => Order::Descending,
                "ascending" => Order::Ascending,
                "random" => Order::Random(o.seed),
                x => return Err(format!("unknown order {x:?}")),
            };
            Algorithm::Mus { algo, order }
        }
        Kind::Ocus => Algorithm::Ocus(OcusConfig {
            use_lex: o.lex,
            dynamic: o.dynamic,
            mcs_cap: o
                .mcs_cap
                .unwrap_or(if o.lex { DEFAULT_LEX_ENUM_CAP } else { DEFAULT_ENUM_CAP }),
            weights: o.weights.clone(),
            ..Default::default()
        }),
        Kind::Marco => Algorithm::Marco(MarcoOptions {
            lex: o.lex,
            unroll: o.unroll,
            max_muses: o.max_muses,
            shrink: match o.shrink.as_deref().unwrap_or("plain") {
                "plain" => ShrinkBackend::Plain,
                "symm" => ShrinkBackend::Symm,
                x => return Err(format!("unknown shrink backend {x:?}")),
            },
            ..Default::default()
        }),
    })
}

unsafe fn solve(
    kind: Kind,
    spec: *const SymmusSpec,
    group: *const SymmusGroup,
    options: *const c_char,
    out_json: *mut *mut c_char,
) -> SymmusStatus {
    guard(SymmusStatus::Panic, || {
        if out_json.is_null() {
            set_error("out_json is null");
            return SymmusStatus::InvalidArgument;
        }
        *out_json = ptr::null_mut();
        let Some(s) = spec.as_ref() else {
            set_error("spec is null");
            return SymmusStatus::InvalidArgument;
        };
        let opts: Options = if options.is_null() {
            Options::default()
        } else {
            match c_str(options, "options").and_then(|t| serde_json::from_str(t).map_err(|e| e.to_string())) {
                Ok(o) => o,
                Err(e) => {
                    set_error(format!("options: {e}"));
                    return SymmusStatus::InvalidArgument;
                }
            }
        };
        let alg = match algorithm(kind, &opts) {
            Ok(a) => a,
            Err(e) => {
                set_error(e);
                return SymmusStatus::InvalidArgument;
            }
        };
        let source = match group.as_ref() {
            Some(g) if g.group.num_constraints != s.spec.len() => {
                set_error("group does not match the specification");
                return SymmusStatus::InvalidArgument;
            }
            Some(g) => GroupSource::Given(g.group.clone()),
            None => GroupSource::Detect,
        };
        let common = Common {
            seed: opts.seed,
            conflict_budget: opts.conflict_budget,
            time_limit: opts.time_limit,
            node_budget: opts.node_budget.unwrap_or(DEFAULT_NODE_BUDGET),
            negative_assumptions: opts.negative_assumptions.unwrap_or(true),
            lex_order: opts.lex_order.clone(),
        };
        let report = run(Vec::new(), "spec", &s.spec, &alg, &source, &common, |_| {});
        if let Some(e) = &report.error {
            set_error(e.clone());
        }
        *out_json = CString::new(report.to_json()).map_or(ptr::null_mut(), CString::into_raw);
        match report.status {
            Status::Ok => SymmusStatus::Ok,
            Status::Error => SymmusStatus::Error,
            Status::Sat => SymmusStatus::Sat,
            Status::Budget => SymmusStatus::Budget,
        }
    })
}

/// Extracts one MUS. Options: `algo` ("shrink", "symm", "symm-recompute"),
/// `order` ("descending", "ascending", "random") and the common keys
/// `seed`, `conflict_budget`, `time_limit`, `node_budget`,
/// `negative_assumptions`, `lex_order`. A null `group` means detect.
///
/// # Safety
/// `spec` must be live, `group` null or live, `options` null or a
/// NUL-terminated string, `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn symmus_mus(
    spec: *const SymmusSpec,
    group: *const SymmusGroup,
    options: *const c_char,
    out_json: *mut *mut c_char,
) -> SymmusStatus {
    solve(Kind::Mus, spec, group, options, out_json)
}

/// Minimum-cost unsatisfiable subset. Options: `lex`, `dynamic`,
/// `mcs_cap`, `weights` (one per constraint) and the common keys.
///
/// # Safety
/// As for [`symmus_mus`].
#[no_mangle]
pub unsafe extern "C" fn symmus_ocus(
    spec: *const SymmusSpec,
    group: *const SymmusGroup,
    options: *const c_char,
    out_json: *mut *mut c_char,
) -> SymmusStatus {
    solve(Kind::Ocus, spec, group, options, out_json)
}

/// MUS enumeration. Options: `lex`, `unroll`, `max_muses`, `shrink`
/// ("plain", "symm") and the common keys.
///
/// # Safety
/// As for [`symmus_mus`].
#[no_mangle]
pub unsafe extern "C" fn symmus_marco(
    spec: *const SymmusSpec,
    group: *const SymmusGroup,
    options: *const c_char,
    out_json: *mut *mut c_char,
) -> SymmusStatus {
    solve(Kind::Marco, spec, group, options, out_json)
}
