//! Task-to-policy pipeline for planar serial-arm robots.
//!
//! A natural-language task scenario passes through three LLM agents (task
//! analysis, robot design, RL design); the resulting design is verified by
//! deterministic geometry, executed by a native RL engine, and scored on
//! five 0-5 metrics.

pub mod arm;
pub mod eval;
pub mod extract;
pub mod figures;
pub mod gateway;
pub mod geometry;
pub mod oracle;
pub mod pipeline;
pub mod report;
pub mod rl;
pub mod rundir;
pub mod scenario;

pub use geometry::Point2;
pub use scenario::{builtin_scenarios, DescriptionLength, TaskScenario};
