use std::fmt;

use serde::Serialize;

use super::AnalysisError;

/// Dotted path of property names from the tree root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct AttributePath(String);

impl AttributePath {
    pub fn new(path: impl Into<String>) -> Result<Self, AnalysisError> {
        let path = path.into();
        if path.is_empty() || path.split('.').any(str::is_empty) {
            return Err(AnalysisError::InvalidScenario(format!(
                "malformed attribute path `{path}`"
            )));
        }
        Ok(Self(path))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.0.split('.')
    }
}

impl fmt::Display for AttributePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioValue {
    Float(f64),
    Boolean(bool),
    String(String),
}

impl fmt::Display for ScenarioValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioValue::Float(v) => f.write_str(&crate::eval::format_float(*v)),
            ScenarioValue::Boolean(b) => write!(f, "{b}"),
            ScenarioValue::String(s) => write!(f, "{s:?}"),
        }
    }
}

/// A concrete, possibly partial, assignment of values to attribute paths.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scenario {
    assignments: Vec<(AttributePath, ScenarioValue)>,
}

impl Scenario {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an assignment; assigning the same path twice is an error.
    pub fn assign(&mut self, path: &str, value: ScenarioValue) -> Result<(), AnalysisError> {
        let path = AttributePath::new(path)?;
        if self.assignments.iter().any(|(p, _)| *p == path) {
            return Err(AnalysisError::InvalidScenario(format!(
                "`{path}` assigned twice"
            )));
        }
        self.assignments.push((path, value));
        Ok(())
    }

    pub fn with(mut self, path: &str, value: ScenarioValue) -> Result<Self, AnalysisError> {
        self.assign(path, value)?;
        Ok(self)
    }

    pub fn assignments(&self) -> &[(AttributePath, ScenarioValue)] {
        &self.assignments
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Parses a JSON object mapping dotted paths to scalars.
    pub fn from_json(text: &str) -> Result<Self, AnalysisError> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| AnalysisError::InvalidScenario(e.to_string()))?;
        let serde_json::Value::Object(map) = value else {
            return Err(AnalysisError::InvalidScenario(
                "expected a JSON object".into(),
            ));
        };
        let mut scenario = Scenario::new();
        for (path, v) in map {
            let value = match v {
                serde_json::Value::Bool(b) => ScenarioValue::Boolean(b),
                serde_json::Value::String(s) => ScenarioValue::String(s),
                serde_json::Value::Number(n) => {
                    ScenarioValue::Float(n.as_f64().ok_or_else(|| {
                        AnalysisError::InvalidScenario(format!("`{path}`: number out of range"))
                    })?)
                }
                other => {
                    return Err(AnalysisError::InvalidScenario(format!(
                        "`{path}`: expected a number, boolean or string, found {other}"
                    )))
                }
            };
            scenario.assign(&path, value)?;
        }
        Ok(scenario)
    }
}
