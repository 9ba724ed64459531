//! Experiment drivers: synthetic robustness sweeps and the end-to-end
//! detection pipeline.

mod pipeline;
mod sweep;

pub use pipeline::{
    metric_rows, run_detection_pipeline, write_metrics, write_ranking, EdgeScoreSource, Method, PipelineConfig,
    PipelineOutput, STAGE_EDGE_SCORES, STAGE_FEATURES, STAGE_LOAD, STAGE_METRICS, STAGE_MUTUALIZE, STAGE_PREDICT,
    STAGE_PROPAGATE, STAGE_SAMPLE, STAGE_THRESHOLD, STAGE_TRAIN,
};
pub use sweep::{
    engine_label, run_robustness_sweep, write_sweep, ScoreMode, SweepRow, SweepSpec, SweepVariable, SWEEP_HEADER,
};
