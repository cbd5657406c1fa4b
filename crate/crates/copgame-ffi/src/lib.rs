//! C ABI for the pursuit-game library: opaque graph handles, integer error
//! codes, and JSON/JSONL strings as the data interchange format.
//!
//! Conventions:
//! - Constructors return NULL on failure; fallible operations return an
//!   error code (0 success, 2 invalid input, 3 resource limit, 4 strategy
//!   fault) and write results through out-pointers.
//! - `copgame_last_error` returns a thread-local message describing the most
//!   recent failure on the calling thread.
//! - Strings returned through out-pointers are owned by the caller and must
//!   be released with `copgame_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};

use copgame::engine::{play_match, GameParams, Side};
use copgame::error::Error;
use copgame::graph::Graph;
use copgame::solver::decide_copwin;
use copgame::strategies::parse_strategy;

pub const COPGAME_OK: c_int = 0;
pub const COPGAME_ERR_INVALID_INPUT: c_int = 2;
pub const COPGAME_ERR_RESOURCE_LIMIT: c_int = 3;
pub const COPGAME_ERR_STRATEGY_FAULT: c_int = 4;

/// Opaque graph handle.
pub struct CopgameGraph {
    inner: Graph,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn code_of(err: &Error) -> c_int {
    err.exit_code()
}

fn fail(err: Error) -> c_int {
    set_error(&err.to_string());
    code_of(&err)
}

/// # Safety
/// `ptr` must be a valid NUL-terminated string or NULL.
unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, c_int> {
    if ptr.is_null() {
        set_error(&format!("{what} pointer is NULL"));
        return Err(COPGAME_ERR_INVALID_INPUT);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        COPGAME_ERR_INVALID_INPUT
    })
}

unsafe fn read_graph<'a>(ptr: *const CopgameGraph) -> Result<&'a Graph, c_int> {
    if ptr.is_null() {
        set_error("graph handle is NULL");
        return Err(COPGAME_ERR_INVALID_INPUT);
    }
    Ok(&(*ptr).inner)
}

/// Message describing the most recent failure on this thread. Valid until
/// the next failing call on the same thread; never NULL.
#[no_mangle]
pub extern "C" fn copgame_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a graph from its JSON representation. Returns NULL on failure.
///
/// # Safety
/// `json` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn copgame_graph_from_json(json: *const c_char) -> *mut CopgameGraph {
    let Ok(text) = read_str(json, "json") else {
        return std::ptr::null_mut();
    };
    match copgame::io::graph_from_json(text) {
        Ok(inner) => Box::into_raw(Box::new(CopgameGraph { inner })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Generates a graph from a family descriptor such as "grid:8x8" or
/// "theta_nm:n=2,m=5". Returns NULL on failure.
///
/// # Safety
/// `descriptor` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn copgame_graph_generate(descriptor: *const c_char) -> *mut CopgameGraph {
    let Ok(text) = read_str(descriptor, "descriptor") else {
        return std::ptr::null_mut();
    };
    match copgame::constructions::generate(text) {
        Ok(inner) => Box::into_raw(Box::new(CopgameGraph { inner })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Releases a graph handle. NULL is a no-op.
///
/// # Safety
/// `g` must be a pointer previously returned by a constructor, or NULL.
#[no_mangle]
pub unsafe extern "C" fn copgame_graph_free(g: *mut CopgameGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices; 0 for a NULL handle.
///
/// # Safety
/// `g` must be a valid graph handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn copgame_graph_vertex_count(g: *const CopgameGraph) -> usize {
    match read_graph(g) {
        Ok(graph) => graph.vertex_count(),
        Err(_) => 0,
    }
}

/// Serializes the graph to JSON through `out`.
///
/// # Safety
/// `g` must be a valid graph handle; `out` a valid pointer. The returned
/// string must be released with `copgame_string_free`.
#[no_mangle]
pub unsafe extern "C" fn copgame_graph_to_json(
    g: *const CopgameGraph,
    out: *mut *mut c_char,
) -> c_int {
    if out.is_null() {
        set_error("output pointer is NULL");
        return COPGAME_ERR_INVALID_INPUT;
    }
    let graph = match read_graph(g) {
        Ok(graph) => graph,
        Err(code) => return code,
    };
    let text = copgame::io::graph_to_json(graph);
    *out = CString::new(text).unwrap().into_raw();
    COPGAME_OK
}

/// Releases a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must be a string previously returned through an out-pointer, or NULL.
#[no_mangle]
pub unsafe extern "C" fn copgame_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn make_params(
    n: usize,
    sigma: u16,
    rho: u16,
    psi: u16,
    v: usize,
    big_r: u16,
) -> GameParams {
    GameParams {
        n,
        sigma,
        rho,
        psi,
        v,
        big_r,
    }
}

/// Decides exactly whether `n` cops with speed `sigma`, reach `rho` win
/// against a robber with speed `psi` around protected vertex `v` with
/// horizon radius `big_r`. Writes 1 (cop win) or 0 through `out_copwin`.
///
/// # Safety
/// `g` must be a valid graph handle and `out_copwin` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn copgame_decide_copwin(
    g: *const CopgameGraph,
    n: usize,
    sigma: u16,
    rho: u16,
    psi: u16,
    v: usize,
    big_r: u16,
    out_copwin: *mut c_int,
) -> c_int {
    if out_copwin.is_null() {
        set_error("output pointer is NULL");
        return COPGAME_ERR_INVALID_INPUT;
    }
    let graph = match read_graph(g) {
        Ok(graph) => graph,
        Err(code) => return code,
    };
    let params = make_params(n, sigma, rho, psi, v, big_r);
    let dm = graph.distance_matrix();
    match decide_copwin(graph, &dm, &params) {
        Ok(outcome) => {
            *out_copwin = outcome.copwin as c_int;
            COPGAME_OK
        }
        Err(e) => fail(e),
    }
}

/// Plays `cops_spec` against `robber_spec` (strategy spec strings, e.g.
/// "greedy", "optimal", "grid_robber") for `horizon` stages and writes the
/// JSONL trace through `out_trace`.
///
/// # Safety
/// `g` must be a valid graph handle, the spec strings valid NUL-terminated
/// strings, and `out_trace` a valid pointer. The returned string must be
/// released with `copgame_string_free`.
#[no_mangle]
pub unsafe extern "C" fn copgame_play_match(
    g: *const CopgameGraph,
    n: usize,
    sigma: u16,
    rho: u16,
    psi: u16,
    v: usize,
    big_r: u16,
    cops_spec: *const c_char,
    robber_spec: *const c_char,
    horizon: usize,
    seed: u64,
    out_trace: *mut *mut c_char,
) -> c_int {
    if out_trace.is_null() {
        set_error("output pointer is NULL");
        return COPGAME_ERR_INVALID_INPUT;
    }
    let graph = match read_graph(g) {
        Ok(graph) => graph,
        Err(code) => return code,
    };
    let cops_text = match read_str(cops_spec, "cops spec") {
        Ok(t) => t,
        Err(code) => return code,
    };
    let robber_text = match read_str(robber_spec, "robber spec") {
        Ok(t) => t,
        Err(code) => return code,
    };
    let params = make_params(n, sigma, rho, psi, v, big_r);
    let dm = graph.distance_matrix();
    let run = || -> Result<String, Error> {
        params.validate(graph)?;
        let mut cops = parse_strategy(cops_text, Side::Cops, graph, &dm, &params, seed)?;
        let mut robber =
            parse_strategy(robber_text, Side::Robber, graph, &dm, &params, seed.wrapping_add(1))?;
        let trace = play_match(graph, &dm, &params, cops.as_mut(), robber.as_mut(), horizon)?;
        Ok(trace.to_jsonl())
    };
    match run() {
        Ok(text) => {
            *out_trace = CString::new(text).unwrap().into_raw();
            COPGAME_OK
        }
        Err(e) => fail(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn graph_lifecycle_and_copwin() {
        unsafe {
            let g = copgame_graph_generate(cstr("cycle:6").as_ptr());
            assert!(!g.is_null());
            assert_eq!(copgame_graph_vertex_count(g), 6);

            let mut copwin: c_int = -1;
            let code = copgame_decide_copwin(g, 1, 1, 0, 1, 0, 3, &mut copwin);
            assert_eq!(code, COPGAME_OK);
            assert_eq!(copwin, 0);
            let code = copgame_decide_copwin(g, 2, 1, 0, 1, 0, 3, &mut copwin);
            assert_eq!(code, COPGAME_OK);
            assert_eq!(copwin, 1);

            let mut json: *mut c_char = std::ptr::null_mut();
            assert_eq!(copgame_graph_to_json(g, &mut json), COPGAME_OK);
            let text = CStr::from_ptr(json).to_str().unwrap().to_string();
            let g2 = copgame_graph_from_json(cstr(&text).as_ptr());
            assert!(!g2.is_null());
            assert_eq!(copgame_graph_vertex_count(g2), 6);
            copgame_string_free(json);
            copgame_graph_free(g2);
            copgame_graph_free(g);
        }
    }

    #[test]
    fn error_codes_and_messages() {
        unsafe {
            let g = copgame_graph_generate(cstr("nonsense:1").as_ptr());
            assert!(g.is_null());
            let msg = CStr::from_ptr(copgame_last_error()).to_str().unwrap();
            assert!(!msg.is_empty());

            let g = copgame_graph_generate(cstr("path:5").as_ptr());
            let mut copwin: c_int = -1;
            // Vertex outside the graph → invalid input.
            let code = copgame_decide_copwin(g, 1, 1, 0, 1, 99, 4, &mut copwin);
            assert_eq!(code, COPGAME_ERR_INVALID_INPUT);
            copgame_graph_free(g);
            copgame_graph_free(std::ptr::null_mut()); // no-op
            copgame_string_free(std::ptr::null_mut()); // no-op
        }
    }

    #[test]
    fn match_roundtrip() {
        unsafe {
            let g = copgame_graph_generate(cstr("path:9").as_ptr());
            let mut trace: *mut c_char = std::ptr::null_mut();
            let code = copgame_play_match(
                g,
                1,
                1,
                0,
                1,
                4,
                8,
                cstr("greedy").as_ptr(),
                cstr("stationary").as_ptr(),
                50,
                7,
                &mut trace,
            );
            assert_eq!(code, COPGAME_OK);
            let text = CStr::from_ptr(trace).to_str().unwrap();
            assert!(text.contains("CAPTURED"));
            copgame_string_free(trace);

            // Unknown strategy spec → invalid input.
            let code = copgame_play_match(
                g,
                1,
                1,
                0,
                1,
                4,
                8,
                cstr("bogus").as_ptr(),
                cstr("stationary").as_ptr(),
                50,
                7,
                &mut trace,
            );
            assert_eq!(code, COPGAME_ERR_INVALID_INPUT);
            copgame_graph_free(g);
        }
    }
}
