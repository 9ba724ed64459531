use std::io::Write;
use std::path::{Path, PathBuf};

use trustprop::classifier::{
    edge_scores_default, edge_scores_similarity, train, Hyperparameters, LocalModel, SimilarityMetric,
    SimilarityRescale, TrainingSet,
};
use trustprop::features::{extract_features, FeatureVector};
use trustprop::graph::{
    connected_components, load_directed_edge_list, load_edge_list, modularity, mutualize, sybil_census, BuildStats,
    DirectedGraph, Graph, Label, LabelMap, SybilClass,
};
use trustprop::harness::{
    metric_rows, run_detection_pipeline, run_robustness_sweep, write_metrics, write_ranking, write_sweep,
    EdgeScoreSource, Method, PipelineConfig, ScoreMode, SweepSpec, SweepVariable,
};
use trustprop::io;
use trustprop::metrics::RankingReport;
use trustprop::propagate::{
    cia, integro, integro_edge_weights, sybilbelief, sybilrank, weighted_lbp, weighted_random_walk, Engine,
    PropagationConfig,
};
use trustprop::scores::{EdgeScores, FinalScores};
use trustprop::seed;
use trustprop::synth::{
    compose_attack_scenario, simulate_edge_scores, simulate_trust_scores, AttackTargeting, NoiseConfig, ScenarioConfig,
};
use trustprop::{Error, Result};

use super::args::*;

struct Ctx {
    seed: u64,
    out_dir: PathBuf,
}

impl Ctx {
    fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn report_dropped(path: &Path, stats: &BuildStats) {
    if stats.dropped() > 0 {
        eprintln!(
            "warning: {}: dropped {} self-loops and {} duplicate edges",
            path.display(),
            stats.self_loops,
            stats.duplicates
        );
    }
}

fn load_graph(path: &Path) -> Result<Graph> {
    let (g, stats) = load_edge_list(path)?;
    report_dropped(path, &stats);
    Ok(g)
}

fn load_seeds(path: Option<&Path>, node_count: usize) -> Result<TrainingSet> {
    match path {
        Some(p) => Ok(TrainingSet::from_labels(&io::read_labels(p, node_count)?)),
        None => Ok(TrainingSet::default()),
    }
}

fn hyper(h: &HyperArgs) -> Hyperparameters {
    Hyperparameters {
        learning_rate: h.learning_rate,
        l2: h.l2,
        epochs: h.epochs,
        ..Hyperparameters::default()
    }
}

fn scenario_config(s: &ScenarioArgs, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        benign_count: s.benign,
        sybil_count: s.sybil,
        avg_degree: s.avg_degree,
        attack_edge_count: s.attack_edges,
        seed,
        targeting: match s.targeting {
            Targeting::Uniform => AttackTargeting::Uniform,
            Targeting::DegreeBiased => AttackTargeting::DegreeBiased,
        },
    }
}

fn similarity(method: EdgeMethod) -> Option<SimilarityMetric> {
    match method {
        EdgeMethod::Default => None,
        EdgeMethod::Cosine => Some(SimilarityMetric::Cosine),
        EdgeMethod::Jaccard => Some(SimilarityMetric::Jaccard),
        EdgeMethod::AdamicAdar => Some(SimilarityMetric::AdamicAdar),
    }
}

fn rescale(r: Rescale) -> SimilarityRescale {
    match r {
        Rescale::Minmax => SimilarityRescale::MinMax,
        Rescale::Fixed => SimilarityRescale::Fixed,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        seed: cli.seed,
        out_dir: cli.out_dir,
    };
    match cli.command {
        Command::Generate(a) => generate(&ctx, a),
        Command::Mutualize(a) => mutualize_cmd(&ctx, a),
        Command::Features(a) => features(&ctx, a),
        Command::Train(a) => train_cmd(&ctx, a),
        Command::ScoreEdges(a) => score_edges(&ctx, a),
        Command::Propagate(a) => propagate(&ctx, a),
        Command::Rank(a) => rank(&ctx, a),
        Command::Evaluate(a) => evaluate(&ctx, a),
        Command::Sweep(a) => sweep(&ctx, a),
        Command::Pipeline(a) => pipeline(&ctx, a),
        Command::Components(a) => components(&ctx, a),
        Command::Modularity(a) => modularity_cmd(&ctx, a),
    }
}

fn generate(ctx: &Ctx, a: GenerateArgs) -> Result<()> {
    let cfg = scenario_config(&a.scenario, seed::derive(ctx.seed, "scenario"));
    let s = compose_attack_scenario(&cfg)?;
    let node_noise = NoiseConfig {
        fpr: a.fpr,
        fnr: a.fnr,
        seed: seed::derive(ctx.seed, "node-scores"),
    };
    let edge_noise = NoiseConfig {
        fpr: a.edge_fpr,
        fnr: a.edge_fnr,
        seed: seed::derive(ctx.seed, "edge-scores"),
    };
    let node_scores = simulate_trust_scores(&s.labels, &node_noise)?;
    let edge_scores = simulate_edge_scores(&s.graph, &s.labels, &edge_noise)?;
    io::write_edge_list(&ctx.out("edges.tsv"), s.graph.edges())?;
    io::write_labels(&ctx.out("labels.tsv"), &s.labels)?;
    io::write_edge_list(&ctx.out("attack_edges.tsv"), s.attack_edges.iter().copied())?;
    io::write_score_vector(&ctx.out("node_scores.tsv"), node_scores.as_slice())?;
    io::write_edge_scores(&ctx.out("edge_scores.tsv"), &s.graph, edge_scores.as_slice())?;
    println!(
        "nodes\t{}\nedges\t{}\nattack_edges\t{}",
        s.graph.node_count(),
        s.graph.edge_count(),
        s.attack_edges.len()
    );
    Ok(())
}

fn mutualize_cmd(ctx: &Ctx, a: MutualizeArgs) -> Result<()> {
    let (d, stats) = load_directed_edge_list(&a.graph)?;
    report_dropped(&a.graph, &stats);
    let g = mutualize(&d);
    io::write_edge_list(&ctx.out("graph.tsv"), g.edges())?;
    println!("directed_edges\t{}\nmutual_edges\t{}", d.edge_count(), g.edge_count());
    Ok(())
}

fn features(ctx: &Ctx, a: FeaturesArgs) -> Result<()> {
    let (d, g) = if a.directed {
        let (d, stats) = load_directed_edge_list(&a.graph)?;
        report_dropped(&a.graph, &stats);
        let g = mutualize(&d);
        (d, g)
    } else {
        let g = load_graph(&a.graph)?;
        (DirectedGraph::from_undirected(&g), g)
    };
    io::write_features(&ctx.out("features.tsv"), &extract_features(&d, &g)?)
}

fn feature_rows(f: &[FeatureVector]) -> Vec<[f64; 3]> {
    f.iter().map(|x| x.to_array()).collect()
}

fn train_cmd(ctx: &Ctx, a: TrainArgs) -> Result<()> {
    let feats = io::read_features(&a.features)?;
    let labels = io::read_labels(&a.labels, feats.len())?;
    let set = match (a.sample_benign, a.sample_sybil) {
        (Some(b), Some(s)) => {
            let mut rng = seed::rng(seed::derive(ctx.seed, "sample"));
            TrainingSet::sample(&labels, b, s, &mut rng)?
        }
        _ => TrainingSet::from_labels(&labels),
    };
    let rows = feature_rows(&feats);
    let model: LocalModel = train(&rows, &set, &hyper(&a.hyper))?;
    let scores = model.predict_scores(&rows)?;
    io::write_with(&ctx.out("model.txt"), |w: &mut dyn Write| {
        w.write_all(model.to_text().as_bytes())
    })?;
    io::write_score_vector(&ctx.out("node_scores.tsv"), scores.as_slice())?;
    io::write_labels(&ctx.out("train.tsv"), &training_labels(&set, feats.len()))
}

fn training_labels(set: &TrainingSet, n: usize) -> LabelMap {
    let mut l = LabelMap::unknown(n);
    for (v, label) in set.iter() {
        l.set(v as usize, label);
    }
    l
}

fn score_edges(ctx: &Ctx, a: ScoreEdgesArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let scores = match similarity(a.method) {
        None => edge_scores_default(&g, a.value)?,
        Some(m) => edge_scores_similarity(&g, m, rescale(a.rescale))?,
    };
    io::write_edge_scores(&ctx.out("edge_scores.tsv"), &g, scores.as_slice())
}

fn propagate(ctx: &Ctx, a: PropagateArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let n = g.node_count();
    let seeds = load_seeds(a.seeds.as_deref(), n)?;
    let need_seeds = |what: &str| -> Result<()> {
        if a.seeds.is_none() {
            return Err(usage(format!("--engine {what} requires --seeds")));
        }
        Ok(())
    };
    let final_scores: FinalScores = match a.engine {
        EngineArg::Lbp | EngineArg::Rw => {
            let Some(ns) = &a.node_scores else {
                return Err(usage("--engine lbp/rw requires --node-scores"));
            };
            let node_scores = io::read_node_scores(ns, n)?;
            let edge_scores = match &a.edge_scores {
                Some(p) => io::read_edge_scores(p, &g)?,
                None => EdgeScores::new(vec![0.9; g.edge_count()])?,
            };
            let engine = if a.engine == EngineArg::Lbp {
                Engine::Lbp
            } else {
                Engine::RandomWalk
            };
            let mut cfg = PropagationConfig::new(engine).with_seeds(seeds);
            cfg.iterations = a.iterations;
            cfg.pin_seeds = a.pin_seeds;
            cfg.degree_normalize = a.degree_normalize;
            match engine {
                Engine::Lbp => weighted_lbp(&g, &node_scores, &edge_scores, &cfg)?,
                Engine::RandomWalk => weighted_random_walk(&g, &node_scores, &edge_scores, &cfg)?,
            }
        }
        EngineArg::Sr => {
            need_seeds("sr")?;
            sybilrank(&g, &seeds, a.iterations)?
        }
        EngineArg::Cia => {
            need_seeds("cia")?;
            cia(&g, seeds.sybil(), a.restart, a.iterations)?
        }
        EngineArg::Sb => sybilbelief(&g, &seeds, a.homophily, a.iterations)?,
        EngineArg::Int => {
            need_seeds("int")?;
            let Some(vp) = &a.victims else {
                return Err(usage("--engine int requires --victims"));
            };
            let p = io::read_score_vector(vp, n)?;
            integro(&g, &seeds, &integro_edge_weights(&g, &p, a.beta)?, a.iterations)?
        }
    };
    io::write_score_vector(&ctx.out(&a.output), final_scores.as_slice())
}

type Census = Vec<Option<SybilClass>>;

/// Scores, evaluation labels (seeds masked) and optional census for rank/evaluate.
fn ranking_inputs(
    scores: &Path,
    labels: &Path,
    seeds: Option<&Path>,
    graph: Option<&Path>,
    invert: bool,
) -> Result<(Vec<f64>, LabelMap, Option<Census>)> {
    let mut s = io::read_score_table(scores)?;
    if invert {
        s.iter_mut().for_each(|x| *x = 1.0 - *x);
    }
    let labels = io::read_labels(labels, s.len())?;
    let census = match graph {
        Some(p) => {
            let g = load_graph(p)?;
            if g.node_count() > s.len() {
                return Err(Error::LengthMismatch {
                    what: "scores",
                    expected: g.node_count(),
                    actual: s.len(),
                });
            }
            let mut padded = Vec::with_capacity(s.len());
            padded.extend(labels.as_slice()[..g.node_count()].iter().copied());
            let c = sybil_census(&g, &LabelMap::from_vec(padded))?;
            let mut full = c;
            full.resize(s.len(), None);
            // Sybils beyond the graph have no edges at all.
            for (v, class) in full.iter_mut().enumerate().skip(g.node_count()) {
                if labels.get(v) == Label::Sybil {
                    *class = Some(SybilClass::Isolated);
                }
            }
            Some(full)
        }
        None => None,
    };
    let eval = load_seeds(seeds, s.len())?.mask(&labels);
    Ok((s, eval, census))
}

fn rank(ctx: &Ctx, a: RankArgs) -> Result<()> {
    let (s, eval, census) = ranking_inputs(&a.scores, &a.labels, a.seeds.as_deref(), a.graph.as_deref(), a.invert)?;
    let report = RankingReport::build(&s, &eval, a.threshold, census.as_deref())?;
    write_ranking(&ctx.out("ranking.tsv"), &report)
}

fn evaluate(ctx: &Ctx, a: EvaluateArgs) -> Result<()> {
    let (s, eval, census) = ranking_inputs(&a.scores, &a.labels, a.seeds.as_deref(), a.graph.as_deref(), a.invert)?;
    let report = RankingReport::build(&s, &eval, a.threshold, census.as_deref())?;
    if let Some(&k) = a.top_k.iter().find(|&&k| k == 0 || k > report.len()) {
        return Err(usage(format!("top-k {k} outside 1..={}", report.len())));
    }
    let rows = metric_rows(&report, &a.top_k, true)?;
    for (m, p, v) in &rows {
        println!("{m}\t{p}\t{v}");
    }
    write_metrics(&ctx.out("metrics.tsv"), &rows)
}

fn sweep(ctx: &Ctx, a: SweepArgs) -> Result<()> {
    let variable = match a.variable {
        VariableArg::FprFnr => SweepVariable::FprFnr,
        VariableArg::AttackEdges => SweepVariable::AttackEdges,
        VariableArg::SybilCount => SweepVariable::SybilCount,
    };
    let mut spec = SweepSpec::new(variable, ctx.seed);
    spec.base = scenario_config(&a.scenario, ctx.seed);
    if !a.grid.is_empty() {
        spec.grid = a.grid;
    }
    spec.trials = a.trials;
    spec.engines = a
        .engines
        .iter()
        .map(|e| match e {
            SweepEngine::Lbp => Engine::Lbp,
            SweepEngine::Rw => Engine::RandomWalk,
        })
        .collect();
    spec.mode = match a.mode {
        ModeArg::Node => ScoreMode::Node,
        ModeArg::Edge => ScoreMode::Edge,
    };
    spec.noise = a.noise;
    spec.edge_score = a.edge_score;
    spec.iterations = a.iterations;
    spec.rw_degree_normalize = !a.raw_rw;
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let rows = run_robustness_sweep(&spec)?;
    write_sweep(&ctx.out(&a.output), &rows)
}

fn pipeline(ctx: &Ctx, a: PipelineArgs) -> Result<()> {
    let mut cfg = PipelineConfig::new(&a.graph, &a.labels, &ctx.out_dir);
    cfg.directed = a.directed;
    cfg.seed = ctx.seed;
    cfg.train_benign = a.train_benign;
    cfg.train_sybil = a.train_sybil;
    cfg.hyper = hyper(&a.hyper);
    cfg.folds = a.folds;
    cfg.edge_scores = match similarity(a.edge_method) {
        None => EdgeScoreSource::Constant(a.edge_value),
        Some(m) => EdgeScoreSource::Similarity(m, rescale(a.rescale)),
    };
    cfg.lbp_iterations = a.lbp_iterations;
    cfg.rw_iterations = a.rw_iterations;
    cfg.pin_seeds = a.pin_seeds;
    cfg.degree_normalize = !a.raw_rw;
    cfg.restart = a.restart;
    cfg.homophily = a.homophily;
    cfg.beta = a.beta;
    cfg.top_k = a.top_k;
    if !a.methods.is_empty() {
        cfg.methods = a.methods.iter().map(|m| m.parse::<Method>()).collect::<Result<_>>()?;
    }
    let out = run_detection_pipeline(&cfg)?;
    println!("threshold\t{}", out.threshold);
    for (m, r) in &out.reports {
        println!("{}\tauc\t{}", m.as_str(), r.auc);
    }
    Ok(())
}

fn components(ctx: &Ctx, a: ComponentsArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    match &a.labels {
        None => {
            let comps = connected_components(&g, None)?;
            println!("components\t{}", comps.len());
            io::write_components(&ctx.out("components.tsv"), &comps)
        }
        Some(p) => {
            let labels = io::read_labels(p, g.node_count())?;
            let sybils = labels.nodes_with(Label::Sybil);
            let comps = connected_components(&g, Some(&sybils))?;
            let census = sybil_census(&g, &labels)?;
            let count = |c: SybilClass| census.iter().filter(|x| **x == Some(c)).count();
            println!(
                "sybil_components\t{}\nisolated\t{}\nlcc\t{}\nothers\t{}",
                comps.len(),
                count(SybilClass::Isolated),
                count(SybilClass::Lcc),
                count(SybilClass::Others)
            );
            io::write_components(&ctx.out("components.tsv"), &comps)
        }
    }
}

fn modularity_cmd(ctx: &Ctx, a: ModularityArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let labels = io::read_labels(&a.labels, g.node_count())?;
    let q = modularity(&g, &labels)?;
    println!("modularity\t{q}");
    write_metrics(&ctx.out("modularity.tsv"), &[("modularity".into(), "-".into(), q)])
}
