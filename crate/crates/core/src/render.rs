//! Serializes evaluated trees as JSON, YAML, or a PlantUML JSON diagram.
//!
//! Keys follow template declaration order at every depth. Floats always
//! carry a fractional part (`15.0`, never `15`). Output has no trailing
//! newline.

use std::fmt::Write;
use std::str::FromStr;

use crate::eval::{format_float, Leaf, Record, Scalar, ValueTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Yaml,
    PlantUml,
}

impl FromStr for Format {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "yaml" => Ok(Format::Yaml),
            "plantuml" => Ok(Format::PlantUml),
            other => Err(RenderError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RenderError {
    #[error("indent width {0} is outside 1..=8")]
    IndentOutOfRange(usize),
    #[error("unknown output format `{0}` (expected json, yaml or plantuml)")]
    UnknownFormat(String),
    #[error("non-finite Float at `{0}` cannot be rendered")]
    NonFinite(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    pub format: Format,
    indent_width: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            format: Format::Json,
            indent_width: 2,
        }
    }
}

impl RenderOptions {
    pub fn new(format: Format, indent_width: usize) -> Result<Self, RenderError> {
        if !(1..=8).contains(&indent_width) {
            return Err(RenderError::IndentOutOfRange(indent_width));
        }
        Ok(Self {
            format,
            indent_width,
        })
    }

    pub fn indent_width(&self) -> usize {
        self.indent_width
    }
}

pub fn render(tree: &ValueTree, opts: &RenderOptions) -> Result<String, RenderError> {
    match opts.format {
        Format::Json => render_json(tree, opts),
        Format::Yaml => render_yaml(tree, opts),
        Format::PlantUml => render_plantuml(tree, opts),
    }
}

pub fn render_json(tree: &ValueTree, opts: &RenderOptions) -> Result<String, RenderError> {
    let mut out = String::new();
    Json {
        out: &mut out,
        width: opts.indent_width,
    }
    .value(tree, 0, "")?;
    Ok(out)
}

/// PlantUML's `@startjson` diagram wrapped around the JSON rendering.
pub fn render_plantuml(tree: &ValueTree, opts: &RenderOptions) -> Result<String, RenderError> {
    Ok(format!(
        "@startjson\n{}\n@endjson",
        render_json(tree, opts)?
    ))
}

pub fn render_yaml(tree: &ValueTree, opts: &RenderOptions) -> Result<String, RenderError> {
    let mut lines = Vec::new();
    match tree {
        ValueTree::Object(node) if node.entries.is_empty() => lines.push("{}".to_string()),
        ValueTree::Object(node) => {
            let mut yaml = Yaml {
                lines: &mut lines,
                width: opts.indent_width,
            };
            for (key, child) in &node.entries {
                yaml.entry(key, child, 0, key)?;
            }
        }
        ValueTree::Leaf(Leaf::Listing(records)) if records.is_empty() => {
            lines.push("[]".to_string())
        }
        ValueTree::Leaf(Leaf::Listing(records)) => Yaml {
            lines: &mut lines,
            width: opts.indent_width,
        }
        .sequence(records, 0, "")?,
        ValueTree::Leaf(leaf) => lines.push(yaml_scalar(leaf, "")?),
    }
    Ok(lines.join("\n"))
}

fn finite(v: f64, path: &str) -> Result<String, RenderError> {
    if v.is_finite() {
        Ok(format_float(v))
    } else {
        Err(RenderError::NonFinite(path.to_string()))
    }
}

fn quoted(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn child_path(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

struct Json<'a> {
    out: &'a mut String,
    width: usize,
}

impl Json<'_> {
    fn pad(&mut self, depth: usize) {
        self.out
            .extend(std::iter::repeat_n(' ', depth * self.width));
    }

    fn value(&mut self, tree: &ValueTree, depth: usize, path: &str) -> Result<(), RenderError> {
        match tree {
            ValueTree::Object(node) => {
                let fields: Vec<(&str, &ValueTree)> =
                    node.entries.iter().map(|(k, v)| (&**k, v)).collect();
                self.object(&fields, depth, path)
            }
            ValueTree::Leaf(Leaf::Listing(records)) => self.listing(records, depth, path),
            ValueTree::Leaf(leaf) => {
                let text = match leaf {
                    Leaf::Float(v) => finite(*v, path)?,
                    Leaf::Boolean(b) => b.to_string(),
                    Leaf::Enum { value, .. } | Leaf::String(value) => quoted(value),
                    Leaf::Listing(_) => unreachable!(),
                };
                self.out.push_str(&text);
                Ok(())
            }
        }
    }

    fn object(
        &mut self,
        fields: &[(&str, &ValueTree)],
        depth: usize,
        path: &str,
    ) -> Result<(), RenderError> {
        if fields.is_empty() {
            self.out.push_str("{}");
            return Ok(());
        }
        self.out.push_str("{\n");
        for (i, (key, child)) in fields.iter().enumerate() {
            self.pad(depth + 1);
            let _ = write!(self.out, "{}: ", quoted(key));
            self.value(child, depth + 1, &child_path(path, key))?;
            self.out
                .push_str(if i + 1 < fields.len() { ",\n" } else { "\n" });
        }
        self.pad(depth);
        self.out.push('}');
        Ok(())
    }

    fn listing(&mut self, records: &[Record], depth: usize, path: &str) -> Result<(), RenderError> {
        if records.is_empty() {
            self.out.push_str("[]");
            return Ok(());
        }
        self.out.push_str("[\n");
        for (i, record) in records.iter().enumerate() {
            self.pad(depth + 1);
            let item_path = format!("{path}[{i}]");
            if record.fields.is_empty() {
                self.out.push_str("{}");
            } else {
                self.out.push_str("{\n");
                for (j, (name, value)) in record.fields.iter().enumerate() {
                    self.pad(depth + 2);
                    let text = json_scalar(value, &child_path(&item_path, name))?;
                    let _ = write!(self.out, "{}: {text}", quoted(name));
                    self.out.push_str(if j + 1 < record.fields.len() {
                        ",\n"
                    } else {
                        "\n"
                    });
                }
                self.pad(depth + 1);
                self.out.push('}');
            }
            self.out
                .push_str(if i + 1 < records.len() { ",\n" } else { "\n" });
        }
        self.pad(depth);
        self.out.push(']');
        Ok(())
    }
}

fn json_scalar(value: &Scalar, path: &str) -> Result<String, RenderError> {
    Ok(match value {
        Scalar::Float(v) => finite(*v, path)?,
        Scalar::Boolean(b) => b.to_string(),
        Scalar::String(s) => quoted(s),
    })
}

struct Yaml<'a> {
    lines: &'a mut Vec<String>,
    width: usize,
}

/// Words a YAML parser could read as something other than a string key.
const YAML_RESERVED: &[&str] = &[
    "true", "false", "null", "yes", "no", "on", "off", "y", "n", "~",
];

fn yaml_key(key: &str) -> String {
    let plain = key
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !YAML_RESERVED.contains(&key.to_ascii_lowercase().as_str());
    if plain {
        key.to_string()
    } else {
        quoted(key)
    }
}

fn yaml_scalar(leaf: &Leaf, path: &str) -> Result<String, RenderError> {
    Ok(match leaf {
        Leaf::Float(v) => finite(*v, path)?,
        Leaf::Boolean(b) => b.to_string(),
        Leaf::Enum { value, .. } | Leaf::String(value) => quoted(value),
        Leaf::Listing(records) if records.is_empty() => "[]".to_string(),
        Leaf::Listing(_) => unreachable!("non-empty listings render as block sequences"),
    })
}

impl Yaml<'_> {
    fn entry(
        &mut self,
        key: &str,
        value: &ValueTree,
        indent: usize,
        path: &str,
    ) -> Result<(), RenderError> {
        let pad = " ".repeat(indent);
        let key_text = yaml_key(key);
        match value {
            ValueTree::Object(node) if node.entries.is_empty() => {
                self.lines.push(format!("{pad}{key_text}: {{}}"))
            }
            ValueTree::Object(node) => {
                self.lines.push(format!("{pad}{key_text}:"));
                for (k, child) in &node.entries {
                    self.entry(k, child, indent + self.width, &child_path(path, k))?;
                }
            }
            ValueTree::Leaf(Leaf::Listing(records)) if !records.is_empty() => {
                self.lines.push(format!("{pad}{key_text}:"));
                self.sequence(records, indent + self.width, path)?;
            }
            ValueTree::Leaf(leaf) => self
                .lines
                .push(format!("{pad}{key_text}: {}", yaml_scalar(leaf, path)?)),
        }
        Ok(())
    }

    fn sequence(
        &mut self,
        records: &[Record],
        indent: usize,
        path: &str,
    ) -> Result<(), RenderError> {
        let pad = " ".repeat(indent);
        for (i, record) in records.iter().enumerate() {
            if record.fields.is_empty() {
                self.lines.push(format!("{pad}- {{}}"));
                continue;
            }
            for (j, (name, value)) in record.fields.iter().enumerate() {
                let lead = if j == 0 { "- " } else { "  " };
                let text = json_scalar(value, &format!("{path}[{i}].{name}"))?;
                self.lines
                    .push(format!("{pad}{lead}{}: {text}", yaml_key(name)));
            }
        }
        Ok(())
    }
}
