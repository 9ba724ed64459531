//! End-to-end detection on an edge-list dataset.
//!
//! Artifacts written under the output directory:
//!
//! | file                     | contents                                   |
//! |--------------------------|--------------------------------------------|
//! | `graph.tsv`              | undirected (mutualized) edge list          |
//! | `features.tsv`           | per-node features                          |
//! | `train.tsv`              | sampled training seeds, label format       |
//! | `model.txt`              | trained local model                        |
//! | `node_scores.tsv`        | local node scores                          |
//! | `edge_scores.tsv`        | local edge scores                          |
//! | `<method>.scores.tsv`    | final scores per method                    |
//! | `<method>.ranking.tsv`   | ranked evaluation nodes                    |
//! | `<method>.metrics.tsv`   | metric rows                                |
//! | `summary.tsv`            | `method auc` for every method              |

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;

use crate::classifier::{
    edge_scores_default, edge_scores_similarity, select_threshold, train, Hyperparameters, LocalModel,
    SimilarityMetric, SimilarityRescale, TrainingSet,
};
use crate::error::{Error, Result, StageExt};
use crate::features::{extract_features, FeatureVector};
use crate::graph::{
    load_directed_edge_list, load_edge_list, mutualize, sybil_census, DirectedGraph, Graph, Label, LabelMap, SybilClass,
};
use crate::io;
use crate::metrics::{decompose_top_k, top_k_sybil_fraction, RankingReport};
use crate::propagate::{
    cia, integro, integro_edge_weights, perfect_victim_probabilities, sybilbelief, sybilrank, weighted_lbp,
    weighted_random_walk, Engine, PropagationConfig, CIA_DEFAULT_RESTART,
};
use crate::scores::{EdgeScores, NodeScores};
use crate::seed;

pub const STAGE_LOAD: &str = "load";
pub const STAGE_MUTUALIZE: &str = "mutualize";
pub const STAGE_FEATURES: &str = "features";
pub const STAGE_SAMPLE: &str = "sample";
pub const STAGE_TRAIN: &str = "train";
pub const STAGE_PREDICT: &str = "predict";
pub const STAGE_EDGE_SCORES: &str = "edge-scores";
pub const STAGE_THRESHOLD: &str = "threshold";
pub const STAGE_PROPAGATE: &str = "propagate";
pub const STAGE_METRICS: &str = "metrics";

/// A ranking method run by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    SfLbp,
    SfRw,
    SybilRank,
    Cia,
    SybilBelief,
    IntegroPerfect,
    Local,
    RandomGuess,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::SfLbp,
        Method::SfRw,
        Method::SybilRank,
        Method::Cia,
        Method::SybilBelief,
        Method::IntegroPerfect,
        Method::Local,
        Method::RandomGuess,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::SfLbp => "sf-lbp",
            Method::SfRw => "sf-rw",
            Method::SybilRank => "sr",
            Method::Cia => "cia",
            Method::SybilBelief => "sb",
            Method::IntegroPerfect => "int-pf",
            Method::Local => "local",
            Method::RandomGuess => "rg",
        }
    }

    /// Whether scores are benign probabilities, so thresholded accuracy is meaningful.
    pub fn is_probabilistic(self) -> bool {
        matches!(self, Method::SfLbp | Method::SybilBelief | Method::Local)
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method `{s}`")))
    }
}

/// Source of local edge scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeScoreSource {
    Constant(f64),
    Similarity(SimilarityMetric, SimilarityRescale),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub edges: PathBuf,
    /// Treat the edge list as directed and mutualize it.
    pub directed: bool,
    pub labels: PathBuf,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub train_benign: usize,
    pub train_sybil: usize,
    pub hyper: Hyperparameters,
    pub folds: usize,
    pub edge_scores: EdgeScoreSource,
    pub lbp_iterations: Option<usize>,
    pub rw_iterations: Option<usize>,
    pub pin_seeds: bool,
    /// Divide SF-RW output by weighted degree before ranking.
    pub degree_normalize: bool,
    pub restart: f64,
    pub homophily: f64,
    pub beta: f64,
    pub top_k: Vec<usize>,
    pub methods: Vec<Method>,
}

impl PipelineConfig {
    pub fn new(edges: impl Into<PathBuf>, labels: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            edges: edges.into(),
            directed: false,
            labels: labels.into(),
            out_dir: out_dir.into(),
            seed: 0,
            train_benign: 50,
            train_sybil: 50,
            hyper: Hyperparameters::default(),
            folds: 5,
            edge_scores: EdgeScoreSource::Constant(0.9),
            lbp_iterations: None,
            rw_iterations: None,
            pin_seeds: false,
            degree_normalize: true,
            restart: CIA_DEFAULT_RESTART,
            homophily: 0.9,
            beta: 1.0,
            top_k: vec![100, 200, 400],
            methods: Method::ALL.to_vec(),
        }
    }

    fn propagation(&self, engine: Engine, seeds: TrainingSet) -> PropagationConfig {
        let mut pc = PropagationConfig::new(engine).with_seeds(seeds);
        pc.iterations = match engine {
            Engine::Lbp => self.lbp_iterations,
            Engine::RandomWalk => self.rw_iterations,
        };
        pc.pin_seeds = self.pin_seeds;
        pc.degree_normalize = self.degree_normalize;
        pc
    }
}

/// Everything the pipeline computed.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub graph: Graph,
    pub labels: LabelMap,
    pub training: TrainingSet,
    pub model: LocalModel,
    pub node_scores: NodeScores,
    pub edge_scores: EdgeScores,
    pub threshold: f64,
    /// One report per method, in configuration order.
    pub reports: Vec<(Method, RankingReport)>,
}

impl PipelineOutput {
    pub fn report(&self, method: Method) -> Option<&RankingReport> {
        self.reports.iter().find(|(m, _)| *m == method).map(|(_, r)| r)
    }
}

fn feature_rows(features: &[FeatureVector]) -> Vec<[f64; 3]> {
    features.iter().map(|f| f.to_array()).collect()
}

fn local_scores(rows: &[[f64; 3]], set: &TrainingSet, hyper: &Hyperparameters) -> Result<(LocalModel, NodeScores)> {
    let model = train(rows, set, hyper).stage(STAGE_TRAIN)?;
    let scores = model.predict_scores(rows).stage(STAGE_PREDICT)?;
    Ok((model, scores))
}

/// Out-of-fold SF-LBP scores for the training seeds: each fold is scored by a
/// model trained, and a propagation seeded, on the remaining folds.
fn out_of_fold_scores(
    cfg: &PipelineConfig,
    g: &Graph,
    rows: &[[f64; 3]],
    training: &TrainingSet,
    edge_scores: &EdgeScores,
) -> Result<Vec<f64>> {
    let folds = training.stratified_folds(cfg.folds)?;
    let mut oof = vec![0.5; g.node_count()];
    for fold in &folds {
        let rest = training.without(fold);
        let (_, scores) = local_scores(rows, &rest, &cfg.hyper)?;
        let f = weighted_lbp(g, &scores, edge_scores, &cfg.propagation(Engine::Lbp, rest))?;
        for (v, _) in fold.iter() {
            oof[v as usize] = f.get(v as usize);
        }
    }
    Ok(oof)
}

fn run_method(
    method: Method,
    cfg: &PipelineConfig,
    g: &Graph,
    labels: &LabelMap,
    training: &TrainingSet,
    node_scores: &NodeScores,
    edge_scores: &EdgeScores,
) -> Result<Vec<f64>> {
    Ok(match method {
        Method::SfLbp => weighted_lbp(
            g,
            node_scores,
            edge_scores,
            &cfg.propagation(Engine::Lbp, training.clone()),
        )?
        .into_vec(),
        Method::SfRw => weighted_random_walk(
            g,
            node_scores,
            edge_scores,
            &cfg.propagation(Engine::RandomWalk, training.clone()),
        )?
        .into_vec(),
        Method::SybilRank => sybilrank(g, training, cfg.rw_iterations)?.into_vec(),
        Method::Cia => cia(g, training.sybil(), cfg.restart, cfg.rw_iterations)?
            .as_slice()
            .iter()
            .map(|b| 1.0 - b)
            .collect(),
        Method::SybilBelief => sybilbelief(g, training, cfg.homophily, cfg.lbp_iterations)?.into_vec(),
        Method::IntegroPerfect => {
            let p = perfect_victim_probabilities(g, labels);
            let w = integro_edge_weights(g, &p, cfg.beta)?;
            integro(g, training, &w, cfg.rw_iterations)?.into_vec()
        }
        Method::Local => node_scores.as_slice().to_vec(),
        Method::RandomGuess => {
            let mut rng = seed::rng(seed::derive(cfg.seed, "random-guess"));
            (0..g.node_count()).map(|_| rng.gen::<f64>()).collect()
        }
    })
}

fn class_name(class: Option<SybilClass>) -> &'static str {
    class.map_or("-", SybilClass::as_str)
}

fn label_name(l: Label) -> &'static str {
    match l {
        Label::Benign => "benign",
        Label::Sybil => "sybil",
        Label::Unknown => "unknown",
    }
}

pub fn write_ranking(path: &Path, report: &RankingReport) -> Result<()> {
    io::write_with(path, |w: &mut dyn Write| {
        writeln!(w, "# rank\tnode_id\tscore\ttrue_label\tclass")?;
        for (i, e) in report.entries.iter().enumerate() {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                i + 1,
                e.node,
                e.score,
                label_name(e.truth),
                class_name(e.class)
            )?;
        }
        Ok(())
    })
}

/// Metric rows `metric param value`. Top-K values larger than the report are skipped.
pub fn metric_rows(report: &RankingReport, top_k: &[usize], with_accuracy: bool) -> Result<Vec<(String, String, f64)>> {
    let mut rows = vec![("auc".to_string(), "-".to_string(), report.auc)];
    if with_accuracy {
        rows.push(("accuracy".into(), report.threshold.to_string(), report.accuracy));
    }
    let has_census = report
        .entries
        .iter()
        .all(|e| e.truth != Label::Sybil || e.class.is_some());
    for &k in top_k.iter().filter(|&&k| k >= 1 && k <= report.len()) {
        rows.push((
            "top_k_sybil_fraction".into(),
            k.to_string(),
            top_k_sybil_fraction(report, k)?,
        ));
        if has_census {
            let d = decompose_top_k(report, k)?;
            for (name, n) in [
                ("top_k_isolated", d.isolated),
                ("top_k_lcc", d.lcc),
                ("top_k_others", d.others),
                ("top_k_benign", d.benign),
            ] {
                rows.push((name.into(), k.to_string(), n as f64));
            }
        }
    }
    Ok(rows)
}

pub fn write_metrics(path: &Path, rows: &[(String, String, f64)]) -> Result<()> {
    io::write_with(path, |w: &mut dyn Write| {
        writeln!(w, "# metric\tparam\tvalue")?;
        for (m, p, v) in rows {
            writeln!(w, "{m}\t{p}\t{v}")?;
        }
        Ok(())
    })
}

fn write_training(path: &Path, node_count: usize, training: &TrainingSet) -> Result<()> {
    let mut l = LabelMap::unknown(node_count);
    for (v, label) in training.iter() {
        l.set(v as usize, label);
    }
    io::write_labels(path, &l)
}

fn load_graphs(cfg: &PipelineConfig) -> Result<(DirectedGraph, Graph)> {
    if cfg.directed {
        let (d, _) = load_directed_edge_list(&cfg.edges).stage(STAGE_LOAD)?;
        let g = mutualize(&d);
        Ok((d, g))
    } else {
        let (g, _) = load_edge_list(&cfg.edges).stage(STAGE_LOAD)?;
        Ok((DirectedGraph::from_undirected(&g), g))
    }
}

/// Runs load → mutualize → features → sample → train → predict →
/// edge-scores → threshold → propagate → metrics and persists every artifact.
/// Errors carry the name of the failing stage.
pub fn run_detection_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let out = |name: &str| cfg.out_dir.join(name);

    let (directed, g) = load_graphs(cfg)?;
    let labels = io::read_labels(&cfg.labels, g.node_count()).stage(STAGE_LOAD)?;
    io::write_edge_list(&out("graph.tsv"), g.edges()).stage(STAGE_MUTUALIZE)?;

    let features = extract_features(&directed, &g).stage(STAGE_FEATURES)?;
    io::write_features(&out("features.tsv"), &features).stage(STAGE_FEATURES)?;
    let rows = feature_rows(&features);

    let mut rng = seed::rng(seed::derive(cfg.seed, STAGE_SAMPLE));
    let training = TrainingSet::sample(&labels, cfg.train_benign, cfg.train_sybil, &mut rng).stage(STAGE_SAMPLE)?;
    write_training(&out("train.tsv"), g.node_count(), &training).stage(STAGE_SAMPLE)?;

    let (model, node_scores) = local_scores(&rows, &training, &cfg.hyper)?;
    io::write_with(&out("model.txt"), |w: &mut dyn Write| {
        w.write_all(model.to_text().as_bytes())
    })
    .stage(STAGE_TRAIN)?;
    io::write_score_vector(&out("node_scores.tsv"), node_scores.as_slice()).stage(STAGE_PREDICT)?;

    let edge_scores = match cfg.edge_scores {
        EdgeScoreSource::Constant(v) => edge_scores_default(&g, v),
        EdgeScoreSource::Similarity(metric, rescale) => edge_scores_similarity(&g, metric, rescale),
    }
    .stage(STAGE_EDGE_SCORES)?;
    io::write_edge_scores(&out("edge_scores.tsv"), &g, edge_scores.as_slice()).stage(STAGE_EDGE_SCORES)?;

    let threshold = out_of_fold_scores(cfg, &g, &rows, &training, &edge_scores)
        .and_then(|oof| select_threshold(&oof, &training, cfg.folds))
        .stage(STAGE_THRESHOLD)?;

    let eval = training.mask(&labels);
    let census = sybil_census(&g, &labels).stage(STAGE_METRICS)?;
    let mut reports = Vec::with_capacity(cfg.methods.len());
    let mut summary = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let scores =
            run_method(method, cfg, &g, &labels, &training, &node_scores, &edge_scores).stage(STAGE_PROPAGATE)?;
        let name = method.as_str();
        io::write_score_vector(&out(&format!("{name}.scores.tsv")), &scores).stage(STAGE_PROPAGATE)?;

        let report = RankingReport::build(&scores, &eval, threshold, Some(&census)).stage(STAGE_METRICS)?;
        write_ranking(&out(&format!("{name}.ranking.tsv")), &report).stage(STAGE_METRICS)?;
        let rows = metric_rows(&report, &cfg.top_k, method.is_probabilistic()).stage(STAGE_METRICS)?;
        write_metrics(&out(&format!("{name}.metrics.tsv")), &rows).stage(STAGE_METRICS)?;
        summary.push((name, report.auc));
        reports.push((method, report));
    }
    io::write_with(&out("summary.tsv"), |w: &mut dyn Write| {
        writeln!(w, "# method\tauc\tthreshold")?;
        for (name, auc) in &summary {
            writeln!(w, "{name}\t{auc}\t{threshold}")?;
        }
        Ok(())
    })
    .stage(STAGE_METRICS)?;

    Ok(PipelineOutput {
        graph: g,
        labels,
        training,
        model,
        node_scores,
        edge_scores,
        threshold,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{compose_attack_scenario, ScenarioConfig};

    fn scenario_files(dir: &Path) -> (PathBuf, PathBuf) {
        let mut c = ScenarioConfig::basic(5);
        c.benign_count = 300;
        c.sybil_count = 150;
        c.attack_edge_count = 100;
        let s = compose_attack_scenario(&c).unwrap();
        let (e, l) = (dir.join("edges.tsv"), dir.join("labels.tsv"));
        io::write_edge_list(&e, s.graph.edges()).unwrap();
        io::write_labels(&l, &s.labels).unwrap();
        (e, l)
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("sybilscar".parse::<Method>().is_err());
    }

    #[test]
    fn zero_training_set_fails_in_train_stage() {
        let dir = tempfile::tempdir().unwrap();
        let (e, l) = scenario_files(dir.path());
        let mut cfg = PipelineConfig::new(e, l, dir.path().join("out"));
        cfg.train_benign = 0;
        cfg.train_sybil = 0;
        let err = run_detection_pipeline(&cfg).unwrap_err();
        assert_eq!(err.stage(), Some(STAGE_TRAIN));
    }

    #[test]
    fn missing_input_fails_in_load_stage() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig::new(dir.path().join("nope"), dir.path().join("nope"), dir.path());
        assert_eq!(run_detection_pipeline(&cfg).unwrap_err().stage(), Some(STAGE_LOAD));
    }

    #[test]
    fn reports_exclude_training_seeds() {
        let dir = tempfile::tempdir().unwrap();
        let (e, l) = scenario_files(dir.path());
        let out = run_detection_pipeline(&PipelineConfig::new(e, l, dir.path().join("out"))).unwrap();
        assert_eq!(out.reports.len(), Method::ALL.len());
        for (_, r) in &out.reports {
            assert_eq!(r.len(), 450 - 100);
            assert!(r.entries.iter().all(|e| !out.training.contains(e.node)));
        }
        assert!(dir.path().join("out/sf-lbp.ranking.tsv").exists());
    }
}
