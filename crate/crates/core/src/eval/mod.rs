//! Scoring, aggregation and the batch studies.

pub mod aggregate;
pub mod batch;
pub mod score;

pub use aggregate::{aggregate, aggregate_by_model, mean_sd, AggregateRow, MetricStat};
pub use batch::{
    ablation_conditions, record_stub_fixtures, run_ablation, run_generalization, scores_csv, shipped_fixture_dir,
    summary_markdown, ScoreMatrix, Study, DEFAULT_MODELS, STUB_ENDPOINT,
};
pub use score::{
    apply_overrides, count_fences, parse_overrides, score_cef, score_ma, score_rda, score_rm, score_run, score_tcp,
    ManualScore, Metric, Provenance, ScoreCard,
};
