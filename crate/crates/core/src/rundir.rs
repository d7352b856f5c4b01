//! On-disk layout of one pipeline run:
//!
//! ```text
//! <out>/<run_id>/
//!   artifacts.json     full run record, reloadable
//!   transcript.json    every agent request/response
//!   scores.csv         the run's score card
//!   final_report.md    merged, fence-free report
//!   reports/           raw markdown of each agent report
//!   code/              extracted code files
//!   figures/           SVG figures with CSV twins, per robot
//! ```

use crate::eval::{scores_csv, ScoreCard};
use crate::extract::{write_code_files, WriteError};
use crate::figures::{emit_figures, FigureError};
use crate::pipeline::PipelineArtifacts;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const ARTIFACTS_FILE: &str = "artifacts.json";
pub const TRANSCRIPT_FILE: &str = "transcript.json";
pub const SCORES_FILE: &str = "scores.csv";
pub const FINAL_REPORT_FILE: &str = "final_report.md";

#[derive(Debug, Error)]
pub enum RunDirError {
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path} is not a valid run record: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Figure(#[from] FigureError),
    #[error(transparent)]
    Code(#[from] WriteError),
}

fn write(path: PathBuf, content: impl AsRef<[u8]>) -> Result<(), RunDirError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| RunDirError::Write { path: parent.into(), source })?;
    }
    std::fs::write(&path, content).map_err(|source| RunDirError::Write { path, source })
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("run records serialize");
    s.push('\n');
    s
}

/// Figure file prefix for robot `i` (0-based).
pub fn robot_prefix(i: usize) -> String {
    format!("robot{}_", i + 1)
}

/// Writes (or regenerates) the figures of every trained robot.
pub fn write_figures(artifacts: &PipelineArtifacts, dir: &Path) -> Result<Vec<PathBuf>, RunDirError> {
    let mut paths = Vec::new();
    if let Some(exec) = &artifacts.execution {
        for (i, ((spec, result), trajs)) in exec.specs.iter().zip(&exec.results).zip(&exec.trajectories).enumerate() {
            paths.extend(emit_figures(spec, &result.learning_curve, trajs, &dir.join("figures"), &robot_prefix(i))?);
        }
    }
    Ok(paths)
}

/// Writes the complete run directory under `out_dir` and returns its path.
pub fn write_run_dir(artifacts: &PipelineArtifacts, card: &ScoreCard, out_dir: &Path) -> Result<PathBuf, RunDirError> {
    let dir = out_dir.join(artifacts.run_id());
    write(dir.join(ARTIFACTS_FILE), to_json(artifacts))?;
    write(dir.join(TRANSCRIPT_FILE), to_json(&artifacts.transcript))?;
    write(dir.join(SCORES_FILE), scores_csv(std::slice::from_ref(card)))?;
    write(dir.join(FINAL_REPORT_FILE), &artifacts.final_report)?;
    let reports = [
        ("analysis.md", artifacts.analysis.as_ref().map(|r| &r.raw_markdown)),
        ("design.md", artifacts.design.as_ref().map(|r| &r.raw_markdown)),
        ("rl.md", artifacts.rl.as_ref().map(|r| &r.raw_markdown)),
    ];
    for (name, raw) in reports {
        if let Some(raw) = raw {
            write(dir.join("reports").join(name), raw)?;
        }
    }
    write_code_files(&artifacts.code_files, &dir.join("code"))?;
    write_figures(artifacts, &dir)?;
    Ok(dir)
}

/// Reloads the run record written by [`write_run_dir`].
pub fn load_run(run_dir: &Path) -> Result<PipelineArtifacts, RunDirError> {
    let path = run_dir.join(ARTIFACTS_FILE);
    let text = std::fs::read_to_string(&path).map_err(|source| RunDirError::Read { path: path.clone(), source })?;
    serde_json::from_str(&text).map_err(|source| RunDirError::Parse { path, source })
}
