use std::fmt;

use super::value::ValueTree;
use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    ConstraintViolated,
    UnknownProperty,
    TypeMismatch,
    MissingRequired,
    VersionGate,
    EnumOutOfRange,
    ProbabilityRange,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::ConstraintViolated => "CONSTRAINT_VIOLATED",
            ViolationKind::UnknownProperty => "UNKNOWN_PROPERTY",
            ViolationKind::TypeMismatch => "TYPE_MISMATCH",
            ViolationKind::MissingRequired => "MISSING_REQUIRED",
            ViolationKind::VersionGate => "VERSION_GATE",
            ViolationKind::EnumOutOfRange => "ENUM_OUT_OF_RANGE",
            ViolationKind::ProbabilityRange => "PROBABILITY_RANGE",
        })
    }
}

/// A diagnosed defect in a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// One-line human readable headline.
    pub message: String,
    pub constraint_text: Option<String>,
    pub offending_value: Option<String>,
    /// Dotted path from the instance root; empty for module-level problems.
    pub property_path: String,
    /// Declaring member as `module#Class.property` (or `module#Class`).
    pub member: Option<String>,
    pub decl_site: SourceSpan,
    /// Where the offending value was written, when it came from an amendment.
    pub use_site: Option<SourceSpan>,
}

impl Violation {
    pub(crate) fn new(
        kind: ViolationKind,
        message: impl Into<String>,
        path: &str,
        decl_site: &SourceSpan,
    ) -> Self {
        Self {
            kind,
            message: message.into(),
            constraint_text: None,
            offending_value: None,
            property_path: path.to_string(),
            member: None,
            decl_site: decl_site.clone(),
            use_site: None,
        }
    }

    pub(crate) fn with_value(mut self, value: impl Into<String>) -> Self {
        self.offending_value = Some(value.into());
        self
    }

    pub(crate) fn with_member(mut self, member: impl Into<String>) -> Self {
        self.member = Some(member.into());
        self
    }

    pub(crate) fn with_use_site(mut self, site: Option<&SourceSpan>) -> Self {
        self.use_site = site.cloned();
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)?;
        if !self.property_path.is_empty() {
            write!(f, " at {}", self.property_path)?;
        }
        Ok(())
    }
}

/// Outcome of evaluating or amending: a value, or at least one violation.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalResult {
    Success(ValueTree),
    Failure(Vec<Violation>),
}

impl EvalResult {
    pub(crate) fn from_parts(value: Option<ValueTree>, violations: Vec<Violation>) -> Self {
        match value {
            Some(v) if violations.is_empty() => EvalResult::Success(v),
            _ => {
                debug_assert!(!violations.is_empty(), "failure without violations");
                EvalResult::Failure(violations)
            }
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, EvalResult::Success(_))
    }

    pub fn value(&self) -> Option<&ValueTree> {
        match self {
            EvalResult::Success(v) => Some(v),
            EvalResult::Failure(_) => None,
        }
    }

    pub fn violations(&self) -> &[Violation] {
        match self {
            EvalResult::Success(_) => &[],
            EvalResult::Failure(v) => v,
        }
    }

    pub fn into_result(self) -> Result<ValueTree, Vec<Violation>> {
        match self {
            EvalResult::Success(v) => Ok(v),
            EvalResult::Failure(v) => Err(v),
        }
    }
}
