use serde::Serialize;

use super::AnalysisError;
use crate::eval::{join_path, Leaf, Scalar, ValueTree};

/// A leaf whose value differs between two trees.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffEntry {
    pub path: String,
    pub a: serde_json::Value,
    pub b: serde_json::Value,
}

/// Leaf paths whose values differ, in declaration order.
pub fn diff(a: &ValueTree, b: &ValueTree) -> Result<Vec<DiffEntry>, AnalysisError> {
    Ok(zip_leaves(a, b)?
        .into_iter()
        .filter(|(_, x, y)| !same_leaf(x, y))
        .map(|(path, x, y)| DiffEntry {
            path,
            a: leaf_json(x),
            b: leaf_json(y),
        })
        .collect())
}

/// JSON form of a leaf, matching the JSON renderer.
pub fn leaf_json(leaf: &Leaf) -> serde_json::Value {
    use serde_json::Value;
    match leaf {
        Leaf::Float(v) => float_json(*v),
        Leaf::Boolean(b) => Value::Bool(*b),
        Leaf::Enum { value, .. } | Leaf::String(value) => Value::String(value.clone()),
        Leaf::Listing(records) => Value::Array(
            records
                .iter()
                .map(|r| {
                    Value::Object(
                        r.fields
                            .iter()
                            .map(|(name, s)| {
                                let v = match s {
                                    Scalar::Float(v) => float_json(*v),
                                    Scalar::Boolean(b) => Value::Bool(*b),
                                    Scalar::String(s) => Value::String(s.clone()),
                                };
                                (name.clone(), v)
                            })
                            .collect(),
                    )
                })
                .collect(),
        ),
    }
}

fn float_json(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

/// Equality as rendered: floats compare bitwise so `-0.0` and `0.0` differ.
fn same_leaf(a: &Leaf, b: &Leaf) -> bool {
    fn scalar(a: &Scalar, b: &Scalar) -> bool {
        match (a, b) {
            (Scalar::Float(x), Scalar::Float(y)) => x.to_bits() == y.to_bits(),
            _ => a == b,
        }
    }
    match (a, b) {
        (Leaf::Float(x), Leaf::Float(y)) => x.to_bits() == y.to_bits(),
        (Leaf::Listing(x), Leaf::Listing(y)) => {
            x.len() == y.len()
                && x.iter().zip(y.iter()).all(|(r, s)| {
                    r.fields.len() == s.fields.len()
                        && r.fields
                            .iter()
                            .zip(&s.fields)
                            .all(|((n, u), (m, v))| n == m && scalar(u, v))
                })
        }
        _ => a == b,
    }
}

/// Pairs up the leaves of two trees built from the same classes.
pub(crate) fn zip_leaves<'a>(
    a: &'a ValueTree,
    b: &'a ValueTree,
) -> Result<Vec<(String, &'a Leaf, &'a Leaf)>, AnalysisError> {
    let mut out = Vec::new();
    zip_into(a, b, String::new(), &mut out)?;
    Ok(out)
}

fn zip_into<'a>(
    a: &'a ValueTree,
    b: &'a ValueTree,
    path: String,
    out: &mut Vec<(String, &'a Leaf, &'a Leaf)>,
) -> Result<(), AnalysisError> {
    let mismatch = |reason: String| AnalysisError::ShapeMismatch {
        path: if path.is_empty() {
            "<root>".into()
        } else {
            path.clone()
        },
        reason,
    };
    match (a, b) {
        (ValueTree::Object(x), ValueTree::Object(y)) => {
            if x.class != y.class {
                return Err(mismatch(format!("class {} vs {}", x.class, y.class)));
            }
            if x.entries.len() != y.entries.len()
                || x.entries
                    .iter()
                    .zip(&y.entries)
                    .any(|((m, _), (n, _))| m != n)
            {
                return Err(mismatch("property sets differ".into()));
            }
            for ((name, u), (_, v)) in x.entries.iter().zip(&y.entries) {
                zip_into(u, v, join_path(&path, name), out)?;
            }
            Ok(())
        }
        (ValueTree::Leaf(x), ValueTree::Leaf(y)) => {
            let same_type = match (x, y) {
                (Leaf::Enum { alias: p, .. }, Leaf::Enum { alias: q, .. }) => p == q,
                _ => x.type_name() == y.type_name(),
            };
            if !same_type {
                return Err(mismatch(format!("{} vs {}", x.type_name(), y.type_name())));
            }
            out.push((path, x, y));
            Ok(())
        }
        (ValueTree::Object(_), ValueTree::Leaf(_)) => Err(mismatch("object vs leaf".into())),
        (ValueTree::Leaf(_), ValueTree::Object(_)) => Err(mismatch("leaf vs object".into())),
    }
}
