use std::fmt;
use std::sync::Arc;

/// Identifies the class an object node was built from: `module#Class`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassTag {
    pub module: Arc<str>,
    pub name: Arc<str>,
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.module, self.name)
    }
}

/// A fully evaluated configuration value. Object children are reference
/// counted, so amending a tree shares every untouched subtree with its base.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueTree {
    Object(Arc<ObjectNode>),
    Leaf(Leaf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectNode {
    pub class: ClassTag,
    /// Properties in class declaration order.
    pub entries: Vec<(Arc<str>, ValueTree)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Leaf {
    Float(f64),
    Boolean(bool),
    /// A string restricted to the alternatives of the named alias.
    Enum {
        alias: Arc<str>,
        value: String,
    },
    String(String),
    Listing(Arc<[Record]>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub fields: Vec<(String, Scalar)>,
}

impl Record {
    pub fn get(&self, name: &str) -> Option<&Scalar> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Float(f64),
    Boolean(bool),
    String(String),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Float(v) => f.write_str(&format_float(*v)),
            Scalar::Boolean(b) => write!(f, "{b}"),
            Scalar::String(s) => write!(f, "{s:?}"),
        }
    }
}

impl Leaf {
    pub fn type_name(&self) -> &'static str {
        match self {
            Leaf::Float(_) => "Float",
            Leaf::Boolean(_) => "Boolean",
            Leaf::Enum { .. } => "Enum",
            Leaf::String(_) => "String",
            Leaf::Listing(_) => "Listing",
        }
    }
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Leaf::Float(v) => f.write_str(&format_float(*v)),
            Leaf::Boolean(b) => write!(f, "{b}"),
            Leaf::Enum { value, .. } | Leaf::String(value) => write!(f, "{value:?}"),
            Leaf::Listing(records) => {
                f.write_str("[")?;
                for (i, r) in records.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str("(")?;
                    for (j, (name, value)) in r.fields.iter().enumerate() {
                        if j > 0 {
                            f.write_str("; ")?;
                        }
                        write!(f, "{name} = {value}")?;
                    }
                    f.write_str(")")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Shortest round-trip decimal form that always carries a fractional part:
/// `15.0`, `2.8`, `1.0e-9`.
pub fn format_float(v: f64) -> String {
    let s = format!("{v:?}");
    if s.contains('.') || !v.is_finite() {
        return s;
    }
    match s.find('e') {
        Some(pos) => format!("{}.0{}", &s[..pos], &s[pos..]),
        None => format!("{s}.0"),
    }
}

impl ObjectNode {
    pub fn get(&self, name: &str) -> Option<&ValueTree> {
        self.entries
            .iter()
            .find(|(n, _)| &**n == name)
            .map(|(_, v)| v)
    }
}

impl ValueTree {
    pub fn as_object(&self) -> Option<&Arc<ObjectNode>> {
        match self {
            ValueTree::Object(node) => Some(node),
            ValueTree::Leaf(_) => None,
        }
    }

    pub fn as_leaf(&self) -> Option<&Leaf> {
        match self {
            ValueTree::Leaf(leaf) => Some(leaf),
            ValueTree::Object(_) => None,
        }
    }

    /// Node at a dotted path; the empty path is the tree itself.
    pub fn get(&self, path: &str) -> Option<&ValueTree> {
        if path.is_empty() {
            return Some(self);
        }
        path.split('.')
            .try_fold(self, |node, segment| node.as_object()?.get(segment))
    }

    /// All leaves with their dotted paths, in declaration order.
    pub fn leaves(&self) -> Vec<(String, &Leaf)> {
        let mut out = Vec::new();
        collect_leaves(self, String::new(), &mut out);
        out
    }

    /// True when both trees are the same allocation (structural sharing).
    pub fn ptr_eq(&self, other: &ValueTree) -> bool {
        match (self, other) {
            (ValueTree::Object(a), ValueTree::Object(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

fn collect_leaves<'a>(tree: &'a ValueTree, prefix: String, out: &mut Vec<(String, &'a Leaf)>) {
    match tree {
        ValueTree::Leaf(leaf) => out.push((prefix, leaf)),
        ValueTree::Object(node) => {
            for (name, child) in &node.entries {
                collect_leaves(child, join_path(&prefix, name), out);
            }
        }
    }
}

pub(crate) fn join_path(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_keeps_a_fraction() {
        assert_eq!(format_float(15.0), "15.0");
        assert_eq!(format_float(2.8), "2.8");
        assert_eq!(format_float(30.0), "30.0");
        assert_eq!(format_float(0.0), "0.0");
        assert_eq!(format_float(-31.5), "-31.5");
        assert_eq!(format_float(1e-9), "1.0e-9");
        assert_eq!(format_float(1e20), "1.0e20");
        assert_eq!(format_float(0.1 + 0.2), "0.30000000000000004");
    }

    #[test]
    fn float_formatting_round_trips() {
        for v in [
            2.7,
            3.2,
            1.0 / 3.0,
            123456.789,
            2.7 - 1e-9,
            5e-324,
            f64::MAX,
        ] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }
}
