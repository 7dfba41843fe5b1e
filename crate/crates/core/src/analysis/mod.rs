//! Membership, containment and diff over evaluated ODD trees.
//!
//! The meaning of a configured scalar (exact value, upper bound, inclusion
//! flag, ...) is not fixed by the language; an [`AnalysisProfile`] assigns a
//! [`Comparator`] to every leaf path. Listings are never compared.

mod compare;
mod diff;
mod profile;
mod scenario;

pub use compare::{contains, scenario_within, ContainmentReport, Outcome, PathOutcome, Verdict};
pub use diff::{diff, leaf_json, DiffEntry};
pub use profile::{AnalysisProfile, Comparator, PathPattern};
pub use scenario::{AttributePath, Scenario, ScenarioValue};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("paths `{path}` match equally specific patterns {patterns:?}")]
    AmbiguousProfile { path: String, patterns: Vec<String> },
    #[error("comparator `{comparator}` cannot compare {leaf_type} values at `{path}`")]
    InapplicableComparator {
        path: String,
        comparator: String,
        leaf_type: &'static str,
    },
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("trees have different shapes at `{path}`: {reason}")]
    ShapeMismatch { path: String, reason: String },
}
