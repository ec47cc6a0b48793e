//! Scenario files, seeded sampling and verification reports on top of
//! `lightfol-core`.

pub mod checks;
pub mod file;
pub mod fixtures;
pub mod report;
pub mod sampling;
pub mod scenario;

pub use report::{emit, run_checks, Format, Report};
pub use scenario::{load_scenario, load_str, ScenarioFile};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LoadError {
    #[error("{0}")]
    Io(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{field}: {message}")]
    Validation { field: String, message: String },
}
