use serde::Serialize;

use super::diff::zip_leaves;
use super::{AnalysisError, AnalysisProfile, Comparator, Scenario, ScenarioValue};
use crate::eval::{format_float, Leaf, ValueTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Outcome {
    Pass,
    Fail,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathOutcome {
    pub path: String,
    pub outcome: Outcome,
    pub reason: String,
}

impl PathOutcome {
    fn new(path: &str, outcome: Outcome, reason: impl Into<String>) -> Self {
        Self {
            path: path.to_string(),
            outcome,
            reason: reason.into(),
        }
    }
}

/// Result of testing a scenario against an ODD.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub within: bool,
    pub per_path: Vec<PathOutcome>,
}

/// Result of testing whether one ODD covers another.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentReport {
    pub contains: bool,
    pub per_path: Vec<PathOutcome>,
}

fn no_failures(per_path: &[PathOutcome]) -> bool {
    per_path.iter().all(|p| p.outcome != Outcome::Fail)
}

/// Checks each assigned path of `scenario` against `odd`. Paths that do
/// not name a comparable leaf are reported as unresolved.
pub fn scenario_within(
    odd: &ValueTree,
    scenario: &Scenario,
    profile: &AnalysisProfile,
) -> Result<Verdict, AnalysisError> {
    let mut per_path = Vec::with_capacity(scenario.len());
    for (path, value) in scenario.assignments() {
        let path = path.as_str();
        let leaf = match odd.get(path) {
            None => {
                per_path.push(PathOutcome::new(
                    path,
                    Outcome::Unresolved,
                    "no such attribute",
                ));
                continue;
            }
            Some(ValueTree::Object(_)) => {
                per_path.push(PathOutcome::new(
                    path,
                    Outcome::Unresolved,
                    "path names an object, not a leaf",
                ));
                continue;
            }
            Some(ValueTree::Leaf(Leaf::Listing(_))) => {
                per_path.push(PathOutcome::new(
                    path,
                    Outcome::Unresolved,
                    "listings are not compared",
                ));
                continue;
            }
            Some(ValueTree::Leaf(leaf)) => leaf,
        };
        let comparator = profile.resolve(path, leaf)?;
        let (outcome, reason) = judge(comparator, leaf, value);
        per_path.push(PathOutcome::new(path, outcome, reason));
    }
    Ok(Verdict {
        within: no_failures(&per_path),
        per_path,
    })
}

fn verdict(pass: bool, reason: String) -> (Outcome, String) {
    (if pass { Outcome::Pass } else { Outcome::Fail }, reason)
}

fn judge(comparator: Comparator, odd: &Leaf, value: &ScenarioValue) -> (Outcome, String) {
    match (odd, value) {
        (Leaf::Float(o), ScenarioValue::Float(s)) => judge_float(comparator, *o, *s),
        (Leaf::Boolean(o), ScenarioValue::Boolean(s)) => match comparator {
            Comparator::FlagInclusion if *s && !*o => (
                Outcome::Fail,
                "scenario asserts a flag the ODD excludes".into(),
            ),
            Comparator::FlagInclusion => (Outcome::Pass, format!("{s} admitted by {o}")),
            _ => verdict(
                s == o,
                format!("{s} {} {o}", if s == o { "==" } else { "!=" }),
            ),
        },
        (Leaf::Enum { value: o, .. } | Leaf::String(o), ScenarioValue::String(s)) => verdict(
            s == o,
            format!("{s:?} {} {o:?}", if s == o { "==" } else { "!=" }),
        ),
        (leaf, value) => (
            Outcome::Fail,
            format!("expected {}, found {value}", leaf.type_name()),
        ),
    }
}

fn judge_float(comparator: Comparator, o: f64, s: f64) -> (Outcome, String) {
    let (fs, fo) = (format_float(s), format_float(o));
    if s.is_nan() {
        return (Outcome::Fail, "NaN is never admitted".into());
    }
    match comparator {
        Comparator::Leq { floor } => {
            if let Some(floor) = floor.filter(|f| s < *f) {
                return (
                    Outcome::Fail,
                    format!("{fs} < {} (floor)", format_float(floor)),
                );
            }
            if s <= o {
                (Outcome::Pass, format!("{fs} <= {fo}"))
            } else {
                (Outcome::Fail, format!("{fs} > {fo}"))
            }
        }
        Comparator::Geq => {
            if s >= o {
                (Outcome::Pass, format!("{fs} >= {fo}"))
            } else {
                (Outcome::Fail, format!("{fs} < {fo}"))
            }
        }
        Comparator::Eq => verdict(
            s == o,
            format!("{fs} {} {fo}", if s == o { "==" } else { "!=" }),
        ),
        Comparator::EqTolerance { epsilon } => {
            let pass = (s - o).abs() <= epsilon;
            let rel = if pass { "<=" } else { ">" };
            verdict(
                pass,
                format!("|{fs} - {fo}| {rel} {}", format_float(epsilon)),
            )
        }
        Comparator::Range { below, above } => {
            let (lo, hi) = (o - below, o + above);
            let pass = lo <= s && s <= hi;
            let rel = if pass { "in" } else { "outside" };
            verdict(
                pass,
                format!("{fs} {rel} [{}, {}]", format_float(lo), format_float(hi)),
            )
        }
        // Rejected by profile resolution.
        Comparator::FlagInclusion => (Outcome::Fail, "flag comparator on a Float".into()),
    }
}

/// True per path when every scenario value `inner` admits is also admitted
/// by `outer`. Both trees must come from the same classes.
pub fn contains(
    outer: &ValueTree,
    inner: &ValueTree,
    profile: &AnalysisProfile,
) -> Result<ContainmentReport, AnalysisError> {
    let mut per_path = Vec::new();
    for (path, o, i) in zip_leaves(outer, inner)? {
        if matches!(o, Leaf::Listing(_)) {
            continue;
        }
        let comparator = profile.resolve(&path, o)?;
        let (outcome, reason) = covers(comparator, o, i);
        per_path.push(PathOutcome {
            path,
            outcome,
            reason,
        });
    }
    Ok(ContainmentReport {
        contains: no_failures(&per_path),
        per_path,
    })
}

fn covers(comparator: Comparator, outer: &Leaf, inner: &Leaf) -> (Outcome, String) {
    match (outer, inner) {
        (Leaf::Float(o), Leaf::Float(i)) => {
            let (fo, fi) = (format_float(*o), format_float(*i));
            match comparator {
                // An inner bound below the floor admits nothing.
                Comparator::Leq { floor } if floor.is_some_and(|f| *i < f) => {
                    (Outcome::Pass, format!("inner bound {fi} admits no value"))
                }
                Comparator::Leq { .. } => verdict(
                    o >= i,
                    format!("{fo} {} {fi}", if o >= i { ">=" } else { "<" }),
                ),
                Comparator::Geq => verdict(
                    o <= i,
                    format!("{fo} {} {fi}", if o <= i { "<=" } else { ">" }),
                ),
                // Equal-width intervals nest only when their centres coincide.
                _ => verdict(
                    o == i,
                    format!("{fo} {} {fi}", if o == i { "==" } else { "!=" }),
                ),
            }
        }
        (Leaf::Boolean(o), Leaf::Boolean(i)) => match comparator {
            Comparator::FlagInclusion if *i && !*o => {
                (Outcome::Fail, "inner admits a flag outer excludes".into())
            }
            Comparator::FlagInclusion => (Outcome::Pass, format!("{i} within {o}")),
            _ => verdict(
                o == i,
                format!("{o} {} {i}", if o == i { "==" } else { "!=" }),
            ),
        },
        _ => verdict(
            outer == inner,
            format!(
                "{outer} {} {inner}",
                if outer == inner { "==" } else { "!=" }
            ),
        ),
    }
}
