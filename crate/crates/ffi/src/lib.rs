//! C ABI over the trustprop core.
//!
//! Every fallible call returns a [`TpStatus`]; on failure the message is
//! available from [`tp_last_error`] on the same thread. Graphs are opaque
//! handles created by `tp_graph_*` and released with [`tp_graph_free`].
//! Array arguments may be null only when their length is zero.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use trustprop::classifier::TrainingSet;
use trustprop::graph::{load_edge_list, Graph, Label, LabelMap};
use trustprop::propagate::{weighted_lbp, weighted_random_walk, Engine, PropagationConfig};
use trustprop::scores::{EdgeScores, FinalScores, NodeScores};
use trustprop::Error;

/// Result codes. `TP_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    LengthMismatch = 4,
    Io = 5,
    Parse = 6,
    NonFinite = 7,
    SingleClass = 8,
    Panic = 99,
}

/// Label encoding for arrays passed across the ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TpLabel {
    Sybil = 0,
    Benign = 1,
    Unknown = -1,
}

/// Walk flag: re-apply seed scores after every step.
pub const TP_PIN_SEEDS: u32 = 1;
/// Walk flag: divide the output by weighted degree.
pub const TP_DEGREE_NORMALIZE: u32 = 2;

/// Opaque undirected graph.
pub struct TpGraph {
    inner: Graph,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> TpStatus {
    match err {
        Error::Stage { source, .. } => status_of(source),
        Error::Parse { .. } | Error::EmptyInput(_) => TpStatus::Parse,
        Error::Io { .. } => TpStatus::Io,
        Error::InvalidArgument(_) | Error::UnlabeledNode(_) => TpStatus::InvalidArgument,
        Error::NodeOutOfRange { .. } | Error::OutOfRange { .. } => TpStatus::OutOfRange,
        Error::SingleClass => TpStatus::SingleClass,
        Error::NonFinite(_) => TpStatus::NonFinite,
        Error::LengthMismatch { .. } => TpStatus::LengthMismatch,
    }
}

struct Fail(TpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(TpStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any error or panic in the thread's last-error slot.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            TpStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TpStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

unsafe fn graph<'a>(g: *const TpGraph) -> Result<&'a Graph, Fail> {
    g.as_ref().map(|g| &g.inner).ok_or_else(|| null("graph"))
}

fn install(out: *mut *mut TpGraph, g: Graph) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: checked non-null; the caller provides writable storage.
    unsafe { *out = Box::into_raw(Box::new(TpGraph { inner: g })) };
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next `tp_*` call on the same thread.
#[no_mangle]
pub extern "C" fn tp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a graph from `edge_count` pairs `(src[i], dst[i])`. Self-loops and
/// duplicates are dropped.
///
/// # Safety
/// `src` and `dst` must point to `edge_count` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tp_graph_from_edges(
    node_count: usize,
    src: *const u32,
    dst: *const u32,
    edge_count: usize,
    out: *mut *mut TpGraph,
) -> TpStatus {
    guard(|| {
        let src = slice(src, edge_count, "src")?;
        let dst = slice(dst, edge_count, "dst")?;
        let edges = src.iter().copied().zip(dst.iter().copied());
        let (g, _) = Graph::from_edges(node_count, edges)?;
        install(out, g)
    })
}

/// Loads a whitespace-separated undirected edge list.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tp_graph_load(path: *const c_char, out: *mut *mut TpGraph) -> TpStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Fail(TpStatus::InvalidArgument, "path is not UTF-8".into()))?;
        let (g, _) = load_edge_list(Path::new(path))?;
        install(out, g)
    })
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `g` must come from `tp_graph_from_edges` or `tp_graph_load` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tp_graph_free(g: *mut TpGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Node count, or 0 for a null graph.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn tp_graph_node_count(g: *const TpGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.node_count())
}

/// Undirected edge count, or 0 for a null graph.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn tp_graph_edge_count(g: *const TpGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.edge_count())
}

/// Endpoints `u < v` of edge `edge`. Edge ids follow lexicographic `(u, v)`
/// order and index the edge-score arrays.
///
/// # Safety
/// `g` must be a live graph handle; `u` and `v` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tp_graph_edge(g: *const TpGraph, edge: usize, u: *mut u32, v: *mut u32) -> TpStatus {
    guard(|| {
        let g = graph(g)?;
        if u.is_null() || v.is_null() {
            return Err(null("output"));
        }
        let (a, b) = g.edges().nth(edge).ok_or_else(|| {
            Fail(
                TpStatus::OutOfRange,
                format!("edge {edge} out of range (edge_count = {})", g.edge_count()),
            )
        })?;
        *u = a;
        *v = b;
        Ok(())
    })
}

struct PropagateArgs {
    node_scores: *const f64,
    edge_scores: *const f64,
    iterations: usize,
    benign: *const u32,
    n_benign: usize,
    sybil: *const u32,
    n_sybil: usize,
    flags: u32,
    out: *mut f64,
}

unsafe fn propagate(g: *const TpGraph, engine: Engine, a: PropagateArgs) -> Result<(), Fail> {
    let g = graph(g)?;
    let n = g.node_count();
    let node = NodeScores::new(slice(a.node_scores, n, "node_scores")?.to_vec())?;
    let edge = EdgeScores::new(slice(a.edge_scores, g.edge_count(), "edge_scores")?.to_vec())?;
    let seeds = TrainingSet::new(
        slice(a.benign, a.n_benign, "benign_seeds")?.to_vec(),
        slice(a.sybil, a.n_sybil, "sybil_seeds")?.to_vec(),
    )?;
    if n > 0 && a.out.is_null() {
        return Err(null("out"));
    }
    if a.flags & !(TP_PIN_SEEDS | TP_DEGREE_NORMALIZE) != 0 {
        return Err(Fail(TpStatus::InvalidArgument, format!("unknown flags {:#x}", a.flags)));
    }
    let mut cfg = PropagationConfig::new(engine).with_seeds(seeds);
    cfg.iterations = (a.iterations > 0).then_some(a.iterations);
    cfg.pin_seeds = a.flags & TP_PIN_SEEDS != 0;
    cfg.degree_normalize = a.flags & TP_DEGREE_NORMALIZE != 0;
    let f: FinalScores = match engine {
        Engine::RandomWalk => weighted_random_walk(g, &node, &edge, &cfg)?,
        Engine::Lbp => weighted_lbp(g, &node, &edge, &cfg)?,
    };
    if n > 0 {
        ptr::copy_nonoverlapping(f.as_slice().as_ptr(), a.out, n);
    }
    Ok(())
}

/// Weighted random walk. `iterations` 0 selects `ceil(log2 n)`; `flags` is a
/// combination of `TP_PIN_SEEDS` and `TP_DEGREE_NORMALIZE`. Writes one score
/// per node to `out`.
///
/// # Safety
/// `node_scores` and `out` hold `node_count` values, `edge_scores` holds
/// `edge_count` values, and the seed arrays hold their stated lengths.
#[no_mangle]
pub unsafe extern "C" fn tp_propagate_rw(
    g: *const TpGraph,
    node_scores: *const f64,
    edge_scores: *const f64,
    iterations: usize,
    benign_seeds: *const u32,
    n_benign: usize,
    sybil_seeds: *const u32,
    n_sybil: usize,
    flags: u32,
    out: *mut f64,
) -> TpStatus {
    guard(|| {
        propagate(
            g,
            Engine::RandomWalk,
            PropagateArgs {
                node_scores,
                edge_scores,
                iterations,
                benign: benign_seeds,
                n_benign,
                sybil: sybil_seeds,
                n_sybil,
                flags,
                out,
            },
        )
    })
}

/// Loopy belief propagation. `iterations` 0 selects 8. Writes the benign
/// marginal per node to `out`.
///
/// # Safety
/// As for [`tp_propagate_rw`].
#[no_mangle]
pub unsafe extern "C" fn tp_propagate_lbp(
    g: *const TpGraph,
    node_scores: *const f64,
    edge_scores: *const f64,
    iterations: usize,
    benign_seeds: *const u32,
    n_benign: usize,
    sybil_seeds: *const u32,
    n_sybil: usize,
    out: *mut f64,
) -> TpStatus {
    guard(|| {
        propagate(
            g,
            Engine::Lbp,
            PropagateArgs {
                node_scores,
                edge_scores,
                iterations,
                benign: benign_seeds,
                n_benign,
                sybil: sybil_seeds,
                n_sybil,
                flags: 0,
                out,
            },
        )
    })
}

/// AUC of `scores` against `labels` (`TpLabel` values); unknown labels are skipped.
///
/// # Safety
/// `scores` and `labels` hold `n` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tp_auc(scores: *const f64, labels: *const i32, n: usize, out: *mut f64) -> TpStatus {
    guard(|| {
        let scores = slice(scores, n, "scores")?;
        let raw = slice(labels, n, "labels")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let labels = raw
            .iter()
            .enumerate()
            .map(|(i, &l)| match l {
                1 => Ok(Label::Benign),
                0 => Ok(Label::Sybil),
                -1 => Ok(Label::Unknown),
                _ => Err(Fail(TpStatus::InvalidArgument, format!("label {l} at index {i}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        *out = trustprop::metrics::auc(scores, &LabelMap::from_vec(labels))?;
        Ok(())
    })
}
