//! Robustness sweeps over synthetic scenarios.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::classifier::TrainingSet;
use crate::error::{Error, Result};
use crate::metrics::{accuracy_at_threshold, auc};
use crate::propagate::{weighted_lbp, weighted_random_walk, Engine, PropagationConfig};
use crate::scores::{EdgeScores, NodeScores};
use crate::seed;
use crate::synth::{compose_attack_scenario, simulate_edge_scores, simulate_trust_scores, NoiseConfig, ScenarioConfig};

/// The one factor a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// FPR and FNR together.
    FprFnr,
    AttackEdges,
    SybilCount,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::FprFnr => "fpr_fnr",
            SweepVariable::AttackEdges => "attack_edges",
            SweepVariable::SybilCount => "sybil_count",
        }
    }

    /// Grid used when none is given.
    pub fn default_grid(self) -> Vec<f64> {
        match self {
            SweepVariable::FprFnr => vec![0.0, 0.1, 0.2, 0.3, 0.4],
            SweepVariable::AttackEdges => vec![250.0, 500.0, 750.0, 1000.0, 1250.0, 1500.0],
            SweepVariable::SybilCount => vec![100.0, 250.0, 500.0, 750.0, 1000.0],
        }
    }
}

impl FromStr for SweepVariable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fpr_fnr" | "fpr-fnr" | "noise" => Ok(SweepVariable::FprFnr),
            "attack_edges" | "attack-edges" => Ok(SweepVariable::AttackEdges),
            "sybil_count" | "sybil-count" | "sybils" => Ok(SweepVariable::SybilCount),
            _ => Err(Error::invalid(format!("unknown sweep variable `{s}`"))),
        }
    }
}

/// Where the noisy local evidence lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMode {
    /// Simulated node scores, every edge at a fixed score, no seeds.
    Node,
    /// Node scores 0.5 except one benign and one Sybil seed; simulated edge scores.
    Edge,
}

impl ScoreMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoreMode::Node => "node",
            ScoreMode::Edge => "edge",
        }
    }
}

impl FromStr for ScoreMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "node" | "node_scores" | "node-scores" => Ok(ScoreMode::Node),
            "edge" | "edge_scores" | "edge-scores" => Ok(ScoreMode::Edge),
            _ => Err(Error::invalid(format!("unknown score mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Settings held fixed; `base.seed` is the sweep's base seed.
    pub base: ScenarioConfig,
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub engines: Vec<Engine>,
    pub mode: ScoreMode,
    /// FPR = FNR used when the noise level is not the swept variable.
    pub noise: f64,
    /// Edge score in node mode.
    pub edge_score: f64,
    /// Iterations per engine; `None` uses the engine default.
    pub iterations: Option<usize>,
    /// Divide random-walk output by weighted degree before ranking.
    pub rw_degree_normalize: bool,
}

impl SweepSpec {
    /// Basic setup, default grid, 10 trials, both engines, node mode,
    /// degree-normalized random-walk ranking.
    pub fn new(variable: SweepVariable, seed: u64) -> Self {
        Self {
            base: ScenarioConfig::basic(seed),
            variable,
            grid: variable.default_grid(),
            trials: 10,
            engines: vec![Engine::Lbp, Engine::RandomWalk],
            mode: ScoreMode::Node,
            noise: 0.3,
            edge_score: 0.9,
            iterations: None,
            rw_degree_normalize: true,
        }
    }

    /// Scenario and noise level at one grid value.
    fn point(&self, value: f64) -> Result<(ScenarioConfig, f64)> {
        let mut cfg = self.base.clone();
        let mut noise = self.noise;
        let count = || -> Result<usize> {
            if value >= 0.0 && value.fract() == 0.0 && value <= usize::MAX as f64 {
                Ok(value as usize)
            } else {
                Err(Error::invalid(format!(
                    "{} grid values must be non-negative integers, got {value}",
                    self.variable.as_str()
                )))
            }
        };
        match self.variable {
            SweepVariable::FprFnr => noise = value,
            SweepVariable::AttackEdges => cfg.attack_edge_count = count()?,
            SweepVariable::SybilCount => cfg.sybil_count = count()?,
        }
        cfg.validate()?;
        NoiseConfig {
            fpr: noise,
            fnr: noise,
            seed: 0,
        }
        .validate()?;
        Ok((cfg, noise))
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::invalid("sweep grid is empty"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.engines.is_empty() {
            return Err(Error::invalid("no engines selected"));
        }
        if self.iterations == Some(0) {
            return Err(Error::invalid("iterations must be at least 1"));
        }
        if !(0.1..=0.9).contains(&self.edge_score) {
            return Err(Error::OutOfRange {
                what: "edge score",
                value: self.edge_score,
                range: "[0.1, 0.9]",
            });
        }
        for &v in &self.grid {
            self.point(v)?;
        }
        Ok(())
    }
}

/// Per-trial metric values for one engine.
#[derive(Debug, Clone, Copy, PartialEq)]
struct TrialOutcome {
    engine: Engine,
    accuracy: Option<f64>,
    auc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// `sf-lbp` or `sf-rw`.
    pub engine: &'static str,
    pub metric: &'static str,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub std: f64,
    pub trials: usize,
}

impl fmt::Display for SweepRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.value, self.engine, self.metric, self.mean, self.std, self.trials
        )
    }
}

pub fn engine_label(engine: Engine) -> &'static str {
    match engine {
        Engine::Lbp => "sf-lbp",
        Engine::RandomWalk => "sf-rw",
    }
}

fn run_trial(spec: &SweepSpec, cfg: &ScenarioConfig, noise: f64, trial_seed: u64) -> Result<Vec<TrialOutcome>> {
    let mut cfg = cfg.clone();
    cfg.seed = seed::derive(trial_seed, "scenario");
    let scenario = compose_attack_scenario(&cfg)?;
    let g = &scenario.graph;
    let noise_cfg = NoiseConfig {
        fpr: noise,
        fnr: noise,
        seed: seed::derive(trial_seed, "local-scores"),
    };
    let (node_scores, edge_scores, seeds) = match spec.mode {
        ScoreMode::Node => (
            simulate_trust_scores(&scenario.labels, &noise_cfg)?,
            EdgeScores::new(vec![spec.edge_score; g.edge_count()])?,
            TrainingSet::default(),
        ),
        ScoreMode::Edge => {
            let mut rng = seed::rng(seed::derive(trial_seed, "seeds"));
            (
                NodeScores::uniform(g.node_count(), 0.5)?,
                simulate_edge_scores(g, &scenario.labels, &noise_cfg)?,
                TrainingSet::sample(&scenario.labels, 1, 1, &mut rng)?,
            )
        }
    };
    let eval = seeds.mask(&scenario.labels);
    spec.engines
        .iter()
        .map(|&engine| {
            let mut pc = PropagationConfig::new(engine).with_seeds(seeds.clone());
            pc.iterations = spec.iterations;
            Ok(match engine {
                Engine::Lbp => {
                    let f = weighted_lbp(g, &node_scores, &edge_scores, &pc)?;
                    TrialOutcome {
                        engine,
                        accuracy: Some(accuracy_at_threshold(f.as_slice(), &eval, 0.5)?),
                        auc: auc(f.as_slice(), &eval)?,
                    }
                }
                Engine::RandomWalk => {
                    pc.degree_normalize = spec.rw_degree_normalize;
                    let f = weighted_random_walk(g, &node_scores, &edge_scores, &pc)?;
                    TrialOutcome {
                        engine,
                        accuracy: None,
                        auc: auc(f.as_slice(), &eval)?,
                    }
                }
            })
        })
        .collect()
}

/// Mean and sample standard deviation, summed in sorted order.
fn mean_std(values: &mut [f64]) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs every `(grid value, trial)` pair and aggregates per engine.
///
/// Rows come in grid order, then engine order, with `accuracy` (LBP only)
/// before `auc`.
pub fn run_robustness_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let points: Vec<(ScenarioConfig, f64)> = spec.grid.iter().map(|&v| spec.point(v)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..spec.trials).map(move |t| (p, t)))
        .collect();
    let outcomes: Vec<Vec<TrialOutcome>> = jobs
        .par_iter()
        .map(|&(p, t)| {
            let trial_seed = seed::derive_indexed(spec.base.seed, "sweep-trial", &[p as u64, t as u64]);
            run_trial(spec, &points[p].0, points[p].1, trial_seed)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (p, &value) in spec.grid.iter().enumerate() {
        let trials = &outcomes[p * spec.trials..(p + 1) * spec.trials];
        for (i, &engine) in spec.engines.iter().enumerate() {
            let mut push = |metric: &'static str, mut vals: Vec<f64>| {
                let (mean, std) = mean_std(&mut vals);
                rows.push(SweepRow {
                    value,
                    engine: engine_label(engine),
                    metric,
                    mean,
                    std,
                    trials: vals.len(),
                });
            };
            if engine == Engine::Lbp {
                push("accuracy", trials.iter().filter_map(|t| t[i].accuracy).collect());
            }
            debug_assert!(trials.iter().all(|t| t[i].engine == engine));
            push("auc", trials.iter().map(|t| t[i].auc).collect());
        }
    }
    Ok(rows)
}

pub const SWEEP_HEADER: &str = "variable_value\tengine\tmetric\tmean\tstd\ttrials";

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    crate::io::write_with(path, |w: &mut dyn Write| {
        writeln!(w, "# {SWEEP_HEADER}")?;
        for r in rows {
            writeln!(w, "{r}")?;
        }
        Ok(())
    })
}
