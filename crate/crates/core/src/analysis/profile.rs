use std::fmt;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::eval::Leaf;

/// How a scenario value is judged against the ODD's configured value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Comparator {
    /// Exact equality.
    Eq,
    /// `|scenario - odd| <= epsilon`.
    EqTolerance { epsilon: f64 },
    /// The ODD value is an upper bound; `floor`, when set, is a lower bound
    /// that applies to every ODD.
    Leq {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        floor: Option<f64>,
    },
    /// The ODD value is a lower bound.
    Geq,
    /// `odd - below <= scenario <= odd + above`.
    Range { below: f64, above: f64 },
    /// Scenario may assert `true` only where the ODD flag is `true`.
    FlagInclusion,
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Eq => "eq",
            Comparator::EqTolerance { .. } => "eq_tolerance",
            Comparator::Leq { .. } => "leq",
            Comparator::Geq => "geq",
            Comparator::Range { .. } => "range",
            Comparator::FlagInclusion => "flag_inclusion",
        })
    }
}

impl Comparator {
    fn validate(&self) -> Result<(), AnalysisError> {
        let ok = match *self {
            Comparator::EqTolerance { epsilon } => epsilon.is_finite() && epsilon >= 0.0,
            Comparator::Range { below, above } => {
                below.is_finite() && above.is_finite() && below >= 0.0 && above >= 0.0
            }
            Comparator::Leq { floor } => floor.is_none_or(f64::is_finite),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(AnalysisError::InvalidProfile(format!(
                "invalid parameters for {self:?}"
            )))
        }
    }

    fn applies_to(&self, leaf: &Leaf) -> bool {
        match self {
            Comparator::Eq => !matches!(leaf, Leaf::Listing(_)),
            Comparator::EqTolerance { .. }
            | Comparator::Leq { .. }
            | Comparator::Geq
            | Comparator::Range { .. } => {
                matches!(leaf, Leaf::Float(_))
            }
            Comparator::FlagInclusion => matches!(leaf, Leaf::Boolean(_)),
        }
    }
}

/// An exact dotted path, or `*.a.b` matching any path ending in `a.b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathPattern {
    Exact(String),
    Suffix(Vec<String>),
}

impl PathPattern {
    pub fn parse(text: &str) -> Result<Self, AnalysisError> {
        let bad = || AnalysisError::InvalidProfile(format!("malformed path pattern `{text}`"));
        let (suffix, body) = match text.strip_prefix("*.") {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        if body.is_empty() || body.split('.').any(|s| s.is_empty() || s.contains('*')) {
            return Err(bad());
        }
        Ok(if suffix {
            PathPattern::Suffix(body.split('.').map(str::to_string).collect())
        } else {
            PathPattern::Exact(body.to_string())
        })
    }

    pub fn matches(&self, path: &str) -> bool {
        match self {
            PathPattern::Exact(p) => p == path,
            PathPattern::Suffix(tail) => {
                let segs: Vec<&str> = path.split('.').collect();
                segs.len() >= tail.len()
                    && segs[segs.len() - tail.len()..]
                        .iter()
                        .zip(tail)
                        .all(|(a, b)| a == b)
            }
        }
    }

    /// Exact paths beat any suffix; longer suffixes beat shorter ones.
    fn specificity(&self) -> usize {
        match self {
            PathPattern::Exact(_) => usize::MAX,
            PathPattern::Suffix(tail) => tail.len(),
        }
    }
}

impl fmt::Display for PathPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathPattern::Exact(p) => f.write_str(p),
            PathPattern::Suffix(tail) => write!(f, "*.{}", tail.join(".")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisProfile {
    rules: Vec<(PathPattern, Comparator)>,
    pub default_float: Comparator,
    pub default_bool: Comparator,
    pub default_enum: Comparator,
}

impl Default for AnalysisProfile {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DefaultsFile {
    float: Option<Comparator>,
    bool: Option<Comparator>,
    #[serde(rename = "enum")]
    enumeration: Option<Comparator>,
}

impl AnalysisProfile {
    /// Profile with no path rules.
    pub fn with_defaults(
        default_float: Comparator,
        default_bool: Comparator,
        default_enum: Comparator,
    ) -> Self {
        Self {
            rules: Vec::new(),
            default_float,
            default_bool,
            default_enum,
        }
    }

    /// Profile for the bundled ISO 34503 templates: speed limits are upper
    /// bounds (never below zero), lane widths are matched to 1e-9, flags
    /// use inclusion and enumerations must match exactly.
    pub fn standard() -> Self {
        Self::with_defaults(Comparator::Eq, Comparator::FlagInclusion, Comparator::Eq)
            .rule("*.speed_limit", Comparator::Leq { floor: Some(0.0) })
            .and_then(|p| {
                p.rule(
                    "*.lane_dimension",
                    Comparator::EqTolerance { epsilon: 1e-9 },
                )
            })
            .expect("standard profile is valid")
    }

    pub fn rule(mut self, pattern: &str, comparator: Comparator) -> Result<Self, AnalysisError> {
        comparator.validate()?;
        self.rules.push((PathPattern::parse(pattern)?, comparator));
        Ok(self)
    }

    pub fn rules(&self) -> &[(PathPattern, Comparator)] {
        &self.rules
    }

    /// Reads a profile file: path patterns mapped to comparator
    /// descriptors, plus an optional `defaults` object.
    pub fn from_json(text: &str) -> Result<Self, AnalysisError> {
        let invalid = |e: serde_json::Error| AnalysisError::InvalidProfile(e.to_string());
        let value: serde_json::Value = serde_json::from_str(text).map_err(invalid)?;
        let serde_json::Value::Object(map) = value else {
            return Err(AnalysisError::InvalidProfile(
                "expected a JSON object".into(),
            ));
        };
        let standard = Self::standard();
        let mut profile = Self::with_defaults(
            standard.default_float,
            standard.default_bool,
            standard.default_enum,
        );
        for (key, v) in map {
            if key == "defaults" {
                let d: DefaultsFile = serde_json::from_value(v).map_err(invalid)?;
                for c in [&d.float, &d.bool, &d.enumeration].into_iter().flatten() {
                    c.validate()?;
                }
                profile.default_float = d.float.unwrap_or(profile.default_float);
                profile.default_bool = d.bool.unwrap_or(profile.default_bool);
                profile.default_enum = d.enumeration.unwrap_or(profile.default_enum);
            } else {
                let c: Comparator = serde_json::from_value(v).map_err(invalid)?;
                profile = profile.rule(&key, c)?;
            }
        }
        Ok(profile)
    }

    /// Comparator for the leaf at `path`. The most specific matching rule
    /// wins; otherwise the default for the leaf's type applies.
    pub fn resolve(&self, path: &str, leaf: &Leaf) -> Result<Comparator, AnalysisError> {
        let matching: Vec<&(PathPattern, Comparator)> =
            self.rules.iter().filter(|(p, _)| p.matches(path)).collect();
        let comparator = match matching.iter().map(|(p, _)| p.specificity()).max() {
            Some(best) => {
                let top: Vec<&&(PathPattern, Comparator)> = matching
                    .iter()
                    .filter(|(p, _)| p.specificity() == best)
                    .collect();
                if top.len() > 1 {
                    return Err(AnalysisError::AmbiguousProfile {
                        path: path.to_string(),
                        patterns: top.iter().map(|(p, _)| p.to_string()).collect(),
                    });
                }
                top[0].1
            }
            None => match leaf {
                Leaf::Float(_) => self.default_float,
                Leaf::Boolean(_) => self.default_bool,
                _ => self.default_enum,
            },
        };
        if !comparator.applies_to(leaf) {
            return Err(AnalysisError::InapplicableComparator {
                path: path.to_string(),
                comparator: comparator.to_string(),
                leaf_type: leaf.type_name(),
            });
        }
        Ok(comparator)
    }
}
