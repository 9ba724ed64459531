use std::ffi::{CStr, CString};
use std::ptr;

use trustprop_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(tp_last_error()) }
        .to_string_lossy()
        .into_owned()
}

/// Path graph 0-1-2-3.
fn path4() -> *mut TpGraph {
    let src = [0u32, 1, 2];
    let dst = [1u32, 2, 3];
    let mut g = ptr::null_mut();
    let st = unsafe { tp_graph_from_edges(4, src.as_ptr(), dst.as_ptr(), 3, &mut g) };
    assert_eq!(st, TpStatus::Ok);
    g
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(tp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn graph_handle_round_trip() {
    let g = path4();
    unsafe {
        assert_eq!(tp_graph_node_count(g), 4);
        assert_eq!(tp_graph_edge_count(g), 3);
        let (mut u, mut v) = (0, 0);
        assert_eq!(tp_graph_edge(g, 2, &mut u, &mut v), TpStatus::Ok);
        assert_eq!((u, v), (2, 3));
        assert_eq!(tp_graph_edge(g, 3, &mut u, &mut v), TpStatus::OutOfRange);
        assert!(last_error().contains("out of range"));
        tp_graph_free(g);
        tp_graph_free(ptr::null_mut());
        assert_eq!(tp_graph_node_count(ptr::null()), 0);
    }
}

#[test]
fn load_reports_io_errors() {
    let mut g = ptr::null_mut();
    let missing = CString::new("/nonexistent/edges.tsv").unwrap();
    assert_eq!(unsafe { tp_graph_load(missing.as_ptr(), &mut g) }, TpStatus::Io);
    assert!(g.is_null());
    assert!(last_error().contains("/nonexistent/edges.tsv"));

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("e.tsv");
    std::fs::write(&p, "0 1\n1 2\n").unwrap();
    let c = CString::new(p.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { tp_graph_load(c.as_ptr(), &mut g) }, TpStatus::Ok);
    assert_eq!(unsafe { tp_graph_edge_count(g) }, 2);
    assert_eq!(last_error(), "");
    unsafe { tp_graph_free(g) };
}

#[test]
fn null_arguments_are_rejected() {
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { tp_graph_from_edges(3, ptr::null(), ptr::null(), 2, &mut g) },
        TpStatus::NullPointer
    );
    assert_eq!(
        unsafe { tp_graph_from_edges(3, ptr::null(), ptr::null(), 0, ptr::null_mut()) },
        TpStatus::NullPointer
    );
    let mut out = [0.0; 4];
    let st = unsafe {
        tp_propagate_lbp(
            ptr::null(),
            ptr::null(),
            ptr::null(),
            0,
            ptr::null(),
            0,
            ptr::null(),
            0,
            out.as_mut_ptr(),
        )
    };
    assert_eq!(st, TpStatus::NullPointer);
}

#[test]
fn walk_matches_core_engine() {
    let g = path4();
    let node = [0.5, 0.6, 0.4, 0.3];
    let edge = [0.9, 0.5, 0.2];
    let benign = [0u32];
    let mut out = [0.0; 4];
    let st = unsafe {
        tp_propagate_rw(
            g,
            node.as_ptr(),
            edge.as_ptr(),
            3,
            benign.as_ptr(),
            1,
            ptr::null(),
            0,
            TP_DEGREE_NORMALIZE,
            out.as_mut_ptr(),
        )
    };
    assert_eq!(st, TpStatus::Ok);

    use trustprop::classifier::TrainingSet;
    use trustprop::graph::Graph;
    use trustprop::propagate::{weighted_random_walk, Engine, PropagationConfig};
    use trustprop::scores::{EdgeScores, NodeScores};
    let (cg, _) = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
    let mut cfg = PropagationConfig::new(Engine::RandomWalk)
        .with_iterations(3)
        .with_seeds(TrainingSet::new(vec![0], vec![]).unwrap());
    cfg.degree_normalize = true;
    let want = weighted_random_walk(
        &cg,
        &NodeScores::new(node.to_vec()).unwrap(),
        &EdgeScores::new(edge.to_vec()).unwrap(),
        &cfg,
    )
    .unwrap();
    assert_eq!(out.as_slice(), want.as_slice());

    let st = unsafe {
        tp_propagate_rw(
            g,
            node.as_ptr(),
            edge.as_ptr(),
            3,
            ptr::null(),
            0,
            ptr::null(),
            0,
            8,
            out.as_mut_ptr(),
        )
    };
    assert_eq!(st, TpStatus::InvalidArgument);
    unsafe { tp_graph_free(g) };
}

#[test]
fn lbp_validates_scores() {
    let g = path4();
    let node = [0.9, 0.5, 0.5, 0.5];
    let mut edge = [0.9, 0.9, 0.9];
    let mut out = [0.0; 4];
    let st = unsafe {
        tp_propagate_lbp(
            g,
            node.as_ptr(),
            edge.as_ptr(),
            0,
            ptr::null(),
            0,
            ptr::null(),
            0,
            out.as_mut_ptr(),
        )
    };
    assert_eq!(st, TpStatus::Ok);
    assert!(out[1] > 0.5 && out[3] < out[1]);
    edge[1] = 1.5;
    let st = unsafe {
        tp_propagate_lbp(
            g,
            node.as_ptr(),
            edge.as_ptr(),
            0,
            ptr::null(),
            0,
            ptr::null(),
            0,
            out.as_mut_ptr(),
        )
    };
    assert_eq!(st, TpStatus::OutOfRange);
    unsafe { tp_graph_free(g) };
}

#[test]
fn auc_with_label_codes() {
    let scores = [0.1, 0.2, 0.2, 0.9, 0.5];
    let labels = [
        TpLabel::Sybil as i32,
        TpLabel::Sybil as i32,
        TpLabel::Benign as i32,
        TpLabel::Benign as i32,
        TpLabel::Unknown as i32,
    ];
    let mut a = 0.0;
    assert_eq!(
        unsafe { tp_auc(scores.as_ptr(), labels.as_ptr(), 5, &mut a) },
        TpStatus::Ok
    );
    assert_eq!(a, 0.875);
    let bad = [0, 1, 2, 1, 0];
    assert_eq!(
        unsafe { tp_auc(scores.as_ptr(), bad.as_ptr(), 5, &mut a) },
        TpStatus::InvalidArgument
    );
    let one_class = [1, 1, 1, 1, 1];
    assert_eq!(
        unsafe { tp_auc(scores.as_ptr(), one_class.as_ptr(), 5, &mut a) },
        TpStatus::SingleClass
    );
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/trustprop.h")).unwrap();
    for name in [
        "tp_version",
        "tp_last_error",
        "tp_graph_from_edges",
        "tp_graph_load",
        "tp_graph_free",
        "tp_graph_node_count",
        "tp_graph_edge_count",
        "tp_graph_edge",
        "tp_propagate_rw",
        "tp_propagate_lbp",
        "tp_auc",
        "TP_STATUS_OK",
        "TP_LABEL_UNKNOWN",
        "TP_DEGREE_NORMALIZE",
        "typedef struct TpGraph TpGraph",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
