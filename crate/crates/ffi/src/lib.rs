//! C ABI for the tsld engine.
//!
//! Programs and trees are opaque handles created by `tsld_program_parse` and
//! `tsld_tree_build` and released with the matching `_free`. Every fallible call
//! returns a [`TsldStatus`]; on failure `tsld_last_error` describes the cause
//! for the calling thread. Strings returned through out-parameters are owned
//! by the caller and must be released with `tsld_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tsld_core::engine::{
    build_tree, classify, diagnose_program, diagnose_query, format_answer, solve, to_dot, tree_to_json,
    TreeClassification, TreeConfig, Verdict,
};
use tsld_core::semantics::{is_ill_typed_program, Bounds, TypeVerdict};
use tsld_core::syntax::{parse_program, parse_query, ParseError, Program, Query};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsldStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    SyntaxError = 3,
    InvalidArgument = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsldClassification {
    Successful = 0,
    FinitelyErroneous = 1,
    FinitelyFailed = 2,
    DepthBounded = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsldVerdict {
    NoTypeError = 0,
    TypeErrorInProgram = 1,
    TypeErrorInQuery = 2,
    UnknownDepthBounded = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsldTypeVerdict {
    WellTyped = 0,
    IllTyped = 1,
    Unknown = 2,
}

/// A parsed program.
pub struct TsldProgram {
    program: Program,
}

/// A built resolution tree.
pub struct TsldTree {
    tree: tsld_core::engine::TsldTree,
}

impl From<TreeClassification> for TsldClassification {
    fn from(c: TreeClassification) -> Self {
        match c {
            TreeClassification::Successful => TsldClassification::Successful,
            TreeClassification::FinitelyErroneous => TsldClassification::FinitelyErroneous,
            TreeClassification::FinitelyFailed => TsldClassification::FinitelyFailed,
            TreeClassification::DepthBounded => TsldClassification::DepthBounded,
        }
    }
}

impl From<Verdict> for TsldVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::NoTypeError => TsldVerdict::NoTypeError,
            Verdict::TypeErrorInProgram => TsldVerdict::TypeErrorInProgram,
            Verdict::TypeErrorInQuery => TsldVerdict::TypeErrorInQuery,
            Verdict::UnknownDepthBounded => TsldVerdict::UnknownDepthBounded,
        }
    }
}

impl From<TypeVerdict> for TsldTypeVerdict {
    fn from(v: TypeVerdict) -> Self {
        match v {
            TypeVerdict::WellTyped => TsldTypeVerdict::WellTyped,
            TypeVerdict::IllTyped => TsldTypeVerdict::IllTyped,
            TypeVerdict::Unknown => TsldTypeVerdict::Unknown,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(TsldStatus, String);

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure(TsldStatus::SyntaxError, format!("{}:{}: {}", e.line, e.column, e.message))
    }
}

/// Runs `body`, translating failures and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> TsldStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => TsldStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal error".into());
            set_last_error(msg);
            TsldStatus::Internal
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(TsldStatus::NullArgument, format!("{name} is null")))
}

unsafe fn text<'a>(s: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure(TsldStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure(TsldStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    require_out(out, name)?;
    out.write(value);
    Ok(())
}

fn require_out<T>(out: *mut T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(TsldStatus::NullArgument, format!("{name} is null")));
    }
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String, name: &str) -> Result<(), Failure> {
    require_out(out, name)?;
    let c = CString::new(s).map_err(|_| Failure(TsldStatus::Internal, "output contains a NUL byte".into()))?;
    write_out(out, c.into_raw(), name)
}

fn config(depth_bound: usize) -> Result<TreeConfig, Failure> {
    if depth_bound == 0 {
        return Err(Failure(TsldStatus::InvalidArgument, "depth bound must be at least 1".into()));
    }
    Ok(TreeConfig::with_depth(depth_bound))
}

fn query(src: &str) -> Result<Query, Failure> {
    let src = src.trim();
    if src.is_empty() {
        return Ok(Query::new(Vec::new()));
    }
    let src = if src.ends_with('.') { src.to_string() } else { format!("{src}.") };
    Ok(parse_query(&src)?)
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn tsld_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn tsld_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses program text into a new handle stored in `*out`.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tsld_program_parse(src: *const c_char, out: *mut *mut TsldProgram) -> TsldStatus {
    guard(|| {
        require_out(out, "out")?;
        let program = parse_program(text(src, "src")?)?;
        write_out(out, Box::into_raw(Box::new(TsldProgram { program })), "out")
    })
}

/// Releases a program. Null is ignored.
///
/// # Safety
/// `program` must come from `tsld_program_parse` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tsld_program_free(program: *mut TsldProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Number of clauses, or 0 for null.
///
/// # Safety
/// `program` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsld_program_clause_count(program: *const TsldProgram) -> usize {
    program.as_ref().map_or(0, |p| p.program.clauses.len())
}

/// Builds the resolution tree of `query` with the given depth bound. The
/// trailing full stop of the query is optional and an empty query is the
/// empty goal.
///
/// # Safety
/// `program` must be a live handle, `query` NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tsld_tree_build(
    program: *const TsldProgram,
    query_src: *const c_char,
    depth_bound: usize,
    out: *mut *mut TsldTree,
) -> TsldStatus {
    guard(|| {
        require_out(out, "out")?;
        let p = borrow(program, "program")?;
        let q = query(text(query_src, "query")?)?;
        let tree = build_tree(&p.program, &q, &config(depth_bound)?);
        write_out(out, Box::into_raw(Box::new(TsldTree { tree })), "out")
    })
}

/// Releases a tree. Null is ignored.
///
/// # Safety
/// `tree` must come from `tsld_tree_build` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tsld_tree_free(tree: *mut TsldTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Number of nodes, or 0 for null.
///
/// # Safety
/// `tree` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsld_tree_node_count(tree: *const TsldTree) -> usize {
    tree.as_ref().map_or(0, |t| t.tree.len())
}

/// # Safety
/// `tree` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tsld_tree_classification(tree: *const TsldTree, out: *mut TsldClassification) -> TsldStatus {
    guard(|| write_out(out, classify(&borrow(tree, "tree")?.tree).into(), "out"))
}

/// The tree as a JSON document.
///
/// # Safety
/// `tree` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tsld_tree_to_json(tree: *const TsldTree, out: *mut *mut c_char) -> TsldStatus {
    guard(|| write_string(out, tree_to_json(&borrow(tree, "tree")?.tree), "out"))
}

/// The tree in Graphviz DOT syntax.
///
/// # Safety
/// `tree` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tsld_tree_to_dot(tree: *const TsldTree, out: *mut *mut c_char) -> TsldStatus {
    guard(|| write_string(out, to_dot(&borrow(tree, "tree")?.tree), "out"))
}

/// Up to `max_answers` answers, one per line in the form `X = 1, Y = a`
/// (`true` for the empty substitution). `*classification` receives the
/// classification of the whole tree.
///
/// # Safety
/// `program` must be a live handle, `query` NUL-terminated and the out
/// pointers valid.
#[no_mangle]
pub unsafe extern "C" fn tsld_solve(
    program: *const TsldProgram,
    query_src: *const c_char,
    depth_bound: usize,
    max_answers: usize,
    answers: *mut *mut c_char,
    classification: *mut TsldClassification,
) -> TsldStatus {
    guard(|| {
        let p = borrow(program, "program")?;
        let q = query(text(query_src, "query")?)?;
        let result = solve(&p.program, &q, &config(depth_bound)?, max_answers);
        let lines: Vec<String> = result.answers.iter().map(format_answer).collect();
        write_out(classification, result.classification.into(), "classification")?;
        write_string(answers, lines.join("\n"), "answers")
    })
}

/// Diagnoses the program through its generic query. `*diagnosis_json`, if
/// not null, receives the diagnosis with blamed clauses and evidence.
///
/// # Safety
/// `program` must be a live handle, `verdict` valid and `diagnosis_json`
/// null or valid.
#[no_mangle]
pub unsafe extern "C" fn tsld_diagnose_program(
    program: *const TsldProgram,
    depth_bound: usize,
    verdict: *mut TsldVerdict,
    diagnosis_json: *mut *mut c_char,
) -> TsldStatus {
    guard(|| {
        let p = borrow(program, "program")?;
        let d = diagnose_program(&p.program, &config(depth_bound)?);
        write_out(verdict, d.verdict.into(), "verdict")?;
        if !diagnosis_json.is_null() {
            write_string(diagnosis_json, serde_json::to_string(&d).expect("diagnosis serializes"), "diagnosis_json")?;
        }
        Ok(())
    })
}

/// Diagnoses a query against the program.
///
/// # Safety
/// As for `tsld_diagnose_program`, and `query` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tsld_diagnose_query(
    program: *const TsldProgram,
    query_src: *const c_char,
    depth_bound: usize,
    verdict: *mut TsldVerdict,
    diagnosis_json: *mut *mut c_char,
) -> TsldStatus {
    guard(|| {
        let p = borrow(program, "program")?;
        let q = query(text(query_src, "query")?)?;
        let d = diagnose_query(&p.program, &q, &config(depth_bound)?);
        write_out(verdict, d.verdict.into(), "verdict")?;
        if !diagnosis_json.is_null() {
            write_string(diagnosis_json, serde_json::to_string(&d).expect("diagnosis serializes"), "diagnosis_json")?;
        }
        Ok(())
    })
}

/// Declarative check of the program over values with integers in
/// `-value_bound..=value_bound`.
///
/// # Safety
/// `program` must be a live handle and `verdict` valid.
#[no_mangle]
pub unsafe extern "C" fn tsld_check_program(
    program: *const TsldProgram,
    value_bound: i64,
    verdict: *mut TsldTypeVerdict,
) -> TsldStatus {
    guard(|| {
        let p = borrow(program, "program")?;
        if value_bound < 0 {
            return Err(Failure(TsldStatus::InvalidArgument, "value bound must be non-negative".into()));
        }
        let bounds = Bounds { value_bound, ..Bounds::default() };
        write_out(verdict, is_ill_typed_program(&p.program, &bounds).verdict.into(), "verdict")
    })
}
