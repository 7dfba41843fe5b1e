use std::collections::HashMap;
use std::sync::Arc;

use semver::Version;

use super::schema::{ClassId, ClassInfo, PropType, PropertyInfo, Schema};
use super::value::{format_float, join_path, Leaf, ObjectNode, Record, Scalar, ValueTree};
use super::version::check_version_gate;
use super::violation::{EvalResult, Violation, ViolationKind};
use crate::error::Error;
use crate::imports::ModuleGraph;
use crate::span::SourceSpan;
use crate::syntax::{AmendEntry, AmendValue, AmendmentBlock, Literal, RecordLit};

/// Version of this toolkit, compared against `@ModuleInfo` gates.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Evaluates instances of one module graph.
#[derive(Debug, Clone)]
pub struct Evaluator {
    schema: Schema,
    tool_version: Version,
}

impl Evaluator {
    pub fn new(graph: &ModuleGraph, tool_version: &str) -> Result<Self, Error> {
        let tool_version = Version::parse(tool_version)
            .map_err(|_| Error::ToolVersion(tool_version.to_string()))?;
        Ok(Self {
            schema: Schema::build(graph)?,
            tool_version,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn tool_version(&self) -> &Version {
        &self.tool_version
    }

    /// Version gate violations for every module in the graph.
    pub fn version_violations(&self) -> Vec<Violation> {
        self.schema
            .gates()
            .iter()
            .filter_map(|g| {
                check_version_gate(&g.module_name, g.declared.as_ref(), &self.tool_version)
            })
            .collect()
    }

    /// Evaluates the named instance of the entry module.
    pub fn evaluate(&self, instance_name: &str) -> Result<EvalResult, Error> {
        let (decl, class) = self
            .schema
            .instances()
            .iter()
            .find(|(d, _)| d.name == instance_name)
            .ok_or_else(|| Error::UnknownInstance(instance_name.to_string()))?;
        Ok(self.instantiate(*class, &decl.amendment))
    }

    /// Builds an instance of `class` from its defaults and `amendment`.
    pub fn instantiate(&self, class: ClassId, amendment: &AmendmentBlock) -> EvalResult {
        let mut walker = Walker::new(&self.schema);
        walker.out = self.version_violations();
        let value = walker.build_object(class, Some(amendment), "");
        EvalResult::from_parts(value, walker.out)
    }

    pub fn amend(&self, base: &ValueTree, amendment: &AmendmentBlock) -> EvalResult {
        amend(base, amendment, &self.schema)
    }

    pub fn check_constraints(&self, tree: &ValueTree) -> Vec<Violation> {
        check_constraints(tree, &self.schema)
    }
}

/// Resolves `graph` and evaluates `instance_name` from its entry module.
pub fn evaluate(
    graph: &ModuleGraph,
    instance_name: &str,
    tool_version: &str,
) -> Result<EvalResult, Error> {
    Evaluator::new(graph, tool_version)?.evaluate(instance_name)
}

/// Overrides existing properties of `base`. The base tree is never
/// modified; untouched subtrees are shared with the result.
pub fn amend(base: &ValueTree, amendment: &AmendmentBlock, schema: &Schema) -> EvalResult {
    let mut walker = Walker::new(schema);
    let value = walker.amend_tree(base, amendment, "");
    if walker.out.is_empty() {
        if let Some(tree) = &value {
            walker.check_tree(tree, "");
        }
    }
    EvalResult::from_parts(value, walker.out)
}

/// Checks every Float constraint and listing probability in `tree`.
pub fn check_constraints(tree: &ValueTree, schema: &Schema) -> Vec<Violation> {
    let mut walker = Walker::new(schema);
    walker.check_tree(tree, "");
    walker.out
}

struct Walker<'s> {
    schema: &'s Schema,
    out: Vec<Violation>,
    /// Amendment spans of overridden leaves, by path.
    uses: HashMap<String, SourceSpan>,
}

fn literal_text(lit: &Literal) -> String {
    match lit {
        Literal::Float(v) => format_float(*v),
        Literal::Boolean(b) => b.to_string(),
        Literal::String(s) => format!("{s:?}"),
    }
}

fn scalar(lit: &Literal) -> Scalar {
    match lit {
        Literal::Float(v) => Scalar::Float(*v),
        Literal::Boolean(b) => Scalar::Boolean(*b),
        Literal::String(s) => Scalar::String(s.clone()),
    }
}

fn records(lits: &[RecordLit]) -> Arc<[Record]> {
    lits.iter()
        .map(|r| Record {
            fields: r
                .fields
                .iter()
                .map(|(n, v)| (n.clone(), scalar(v)))
                .collect(),
        })
        .collect()
}

impl<'s> Walker<'s> {
    fn new(schema: &'s Schema) -> Self {
        Self {
            schema,
            out: Vec::new(),
            uses: HashMap::new(),
        }
    }

    fn report_unknown(&mut self, class: &ClassInfo, block: &AmendmentBlock, path: &str) {
        for entry in &block.entries {
            if class.property(&entry.name).is_none() {
                self.out.push(
                    Violation::new(
                        ViolationKind::UnknownProperty,
                        format!(
                            "Cannot find property '{}' in class '{}'.",
                            entry.name, class.tag.name
                        ),
                        &join_path(path, &entry.name),
                        &class.span,
                    )
                    .with_member(class.tag.to_string())
                    .with_use_site(Some(&entry.span)),
                );
            }
        }
    }

    fn mismatch(
        &mut self,
        class: &ClassInfo,
        p: &PropertyInfo,
        path: &str,
        found: &str,
        site: Option<&SourceSpan>,
    ) {
        self.out.push(
            Violation::new(
                ViolationKind::TypeMismatch,
                format!(
                    "Expected value of type '{}', but got {found}.",
                    p.decl.declared_type.display_name()
                ),
                path,
                &p.decl.span,
            )
            .with_value(found)
            .with_member(class.member(p.name()))
            .with_use_site(site),
        );
    }

    fn build_object(
        &mut self,
        id: ClassId,
        block: Option<&AmendmentBlock>,
        path: &str,
    ) -> Option<ValueTree> {
        let class = self.schema.class(id);
        if let Some(block) = block {
            self.report_unknown(class, block, path);
        }
        let mut entries = Vec::with_capacity(class.properties.len());
        let mut complete = true;
        for p in &class.properties {
            let child_path = join_path(path, p.name());
            let entry = block.and_then(|b| b.entry(p.name()));
            match self.build_property(class, p, entry, &child_path) {
                Some(v) => entries.push((Arc::from(p.name()), v)),
                None => complete = false,
            }
        }
        complete.then(|| {
            ValueTree::Object(Arc::new(ObjectNode {
                class: class.tag.clone(),
                entries,
            }))
        })
    }

    fn build_property(
        &mut self,
        class: &ClassInfo,
        p: &PropertyInfo,
        entry: Option<&AmendEntry>,
        path: &str,
    ) -> Option<ValueTree> {
        let site = entry.map(|e| &e.span);
        match (&p.ty, entry.map(|e| &e.value)) {
            (PropType::Class(c), None) => self.build_object(*c, None, path),
            (PropType::Class(c), Some(AmendValue::Block(b))) => {
                self.build_object(*c, Some(b), path)
            }
            (PropType::Class(_), Some(other)) => {
                self.mismatch(class, p, path, describe(other), site);
                None
            }
            (PropType::Listing, None) => self.default_listing(class, p, path),
            (PropType::Listing, Some(AmendValue::Block(b))) if b.is_empty() => {
                self.default_listing(class, p, path)
            }
            (PropType::Listing, Some(AmendValue::Listing(lits))) => {
                let recs = records(lits);
                self.check_listing(class, p, &recs, path, site);
                Some(ValueTree::Leaf(Leaf::Listing(recs)))
            }
            (PropType::Listing, Some(other)) => {
                self.mismatch(class, p, path, describe(other), site);
                None
            }
            (_, Some(AmendValue::Leaf(lit))) => self.scalar_leaf(class, p, lit, path, site),
            (_, Some(other)) => {
                self.mismatch(class, p, path, describe(other), site);
                None
            }
            (_, None) => match &p.decl.default {
                None => {
                    self.out.push(
                        Violation::new(
                            ViolationKind::MissingRequired,
                            format!(
                                "Property '{}' has no default value and must be configured.",
                                p.name()
                            ),
                            path,
                            &p.decl.span,
                        )
                        .with_member(class.member(p.name())),
                    );
                    None
                }
                Some(expr) => match self.schema.consts().resolve(expr).cloned() {
                    Some(lit) => self.scalar_leaf(class, p, &lit, path, None),
                    None => {
                        let name = match expr {
                            crate::syntax::ValueExpr::ConstRef(n) => n.as_str(),
                            crate::syntax::ValueExpr::Literal(_) => "",
                        };
                        self.mismatch(
                            class,
                            p,
                            path,
                            &format!("unresolved constant '{name}'"),
                            None,
                        );
                        None
                    }
                },
            },
        }
    }

    fn default_listing(
        &mut self,
        class: &ClassInfo,
        p: &PropertyInfo,
        path: &str,
    ) -> Option<ValueTree> {
        match &p.decl.default {
            None => Some(ValueTree::Leaf(Leaf::Listing(Arc::from(Vec::new())))),
            Some(_) => {
                self.mismatch(class, p, path, "a scalar default", None);
                None
            }
        }
    }

    fn scalar_leaf(
        &mut self,
        class: &ClassInfo,
        p: &PropertyInfo,
        lit: &Literal,
        path: &str,
        site: Option<&SourceSpan>,
    ) -> Option<ValueTree> {
        let leaf = match (&p.ty, lit) {
            (PropType::Float, Literal::Float(v)) => {
                self.check_float(class, p, *v, path, site);
                Leaf::Float(*v)
            }
            (PropType::Boolean, Literal::Boolean(b)) => Leaf::Boolean(*b),
            (PropType::String, Literal::String(s)) => Leaf::String(s.clone()),
            (PropType::Alias(a), Literal::String(s)) => {
                let alias = self.schema.alias(*a);
                if !alias.alternatives.contains(s) {
                    let allowed: Vec<String> = alias
                        .alternatives
                        .iter()
                        .map(|a| format!("{a:?}"))
                        .collect();
                    self.out.push(
                        Violation::new(
                            ViolationKind::EnumOutOfRange,
                            format!("Expected one of {}, but got {s:?}.", allowed.join(" | ")),
                            path,
                            &p.decl.span,
                        )
                        .with_value(format!("{s:?}"))
                        .with_member(class.member(p.name()))
                        .with_use_site(site),
                    );
                    return None;
                }
                Leaf::Enum {
                    alias: alias.name.clone(),
                    value: s.clone(),
                }
            }
            _ => {
                self.mismatch(class, p, path, &literal_text(lit), site);
                return None;
            }
        };
        if let Some(site) = site {
            self.uses.insert(path.to_string(), site.clone());
        }
        Some(ValueTree::Leaf(leaf))
    }

    fn check_float(
        &mut self,
        class: &ClassInfo,
        p: &PropertyInfo,
        v: f64,
        path: &str,
        site: Option<&SourceSpan>,
    ) {
        let Some(c) = &p.decl.constraint else {
            return;
        };
        let mut bound = |expr| match self.schema.consts().resolve(expr) {
            Some(Literal::Float(x)) => Some(*x),
            _ => {
                let text = match expr {
                    crate::syntax::ValueExpr::ConstRef(n) => n.clone(),
                    crate::syntax::ValueExpr::Literal(l) => literal_text(l),
                };
                self.out.push(
                    Violation::new(
                        ViolationKind::TypeMismatch,
                        format!("Constraint bound '{text}' does not resolve to a Float constant."),
                        path,
                        &c.span,
                    )
                    .with_member(class.member(p.name())),
                );
                None
            }
        };
        let (Some(low), Some(high)) = (bound(&c.low), bound(&c.high)) else {
            return;
        };
        if low > high {
            self.out.push(
                Violation::new(
                    ViolationKind::TypeMismatch,
                    format!("Constraint '{}' has an empty range.", c.source_text),
                    path,
                    &c.span,
                )
                .with_member(class.member(p.name())),
            );
            return;
        }
        if !(low <= v && v <= high) {
            let mut violation = Violation::new(
                ViolationKind::ConstraintViolated,
                format!("Type constraint '{}' violated.", c.source_text),
                path,
                &c.span,
            )
            .with_value(format_float(v))
            .with_member(class.member(p.name()))
            .with_use_site(site.or_else(|| self.uses.get(path)));
            violation.constraint_text = Some(c.source_text.clone());
            self.out.push(violation);
        }
    }

    fn check_listing(
        &mut self,
        class: &ClassInfo,
        p: &PropertyInfo,
        records: &[Record],
        path: &str,
        site: Option<&SourceSpan>,
    ) {
        let site = site.or_else(|| self.uses.get(path)).cloned();
        for (i, r) in records.iter().enumerate() {
            let field_path = format!("{path}[{i}].probability");
            match r.get("probability") {
                None => {}
                Some(Scalar::Float(prob)) if (0.0..=1.0).contains(prob) => {}
                Some(Scalar::Float(prob)) => self.out.push(
                    Violation::new(
                        ViolationKind::ProbabilityRange,
                        "Probability must lie between 0.0 and 1.0.",
                        &field_path,
                        &p.decl.span,
                    )
                    .with_value(format_float(*prob))
                    .with_member(class.member(p.name()))
                    .with_use_site(site.as_ref()),
                ),
                Some(other) => self.out.push(
                    Violation::new(
                        ViolationKind::TypeMismatch,
                        format!("Expected a Float probability, but got {other}."),
                        &field_path,
                        &p.decl.span,
                    )
                    .with_value(other.to_string())
                    .with_member(class.member(p.name()))
                    .with_use_site(site.as_ref()),
                ),
            }
        }
    }

    fn amend_tree(
        &mut self,
        node: &ValueTree,
        block: &AmendmentBlock,
        path: &str,
    ) -> Option<ValueTree> {
        let schema = self.schema;
        let ValueTree::Object(obj) = node else {
            return None;
        };
        let Some(id) = schema.class_by_tag(&obj.class) else {
            self.out.push(Violation::new(
                ViolationKind::TypeMismatch,
                format!(
                    "Object of class '{}' is not described by this schema.",
                    obj.class
                ),
                path,
                &SourceSpan::new(Arc::from(""), 1, 1, 0, 0),
            ));
            return None;
        };
        if block.is_empty() {
            return Some(node.clone());
        }
        let class = schema.class(id);
        self.report_unknown(class, block, path);

        let mut entries = obj.entries.clone();
        let mut ok = true;
        for entry in &block.entries {
            let Some((idx, p)) = class.property(&entry.name) else {
                ok = false;
                continue;
            };
            let child_path = join_path(path, p.name());
            let site = Some(&entry.span);
            let current = &entries[idx].1;
            let replaced = match (&p.ty, &entry.value) {
                (PropType::Class(_), AmendValue::Block(b)) => {
                    self.amend_tree(current, b, &child_path)
                }
                (PropType::Listing, AmendValue::Listing(lits)) => {
                    self.uses.insert(child_path.clone(), entry.span.clone());
                    Some(ValueTree::Leaf(Leaf::Listing(records(lits))))
                }
                (PropType::Listing, AmendValue::Block(b)) if b.is_empty() => Some(current.clone()),
                (PropType::Class(_) | PropType::Listing, other) => {
                    self.mismatch(class, p, &child_path, describe(other), site);
                    None
                }
                (_, AmendValue::Leaf(lit)) => {
                    self.scalar_leaf_unchecked(class, p, lit, &child_path, site)
                }
                (_, other) => {
                    self.mismatch(class, p, &child_path, describe(other), site);
                    None
                }
            };
            match replaced {
                Some(v) => entries[idx].1 = v,
                None => ok = false,
            }
        }
        ok.then(|| {
            ValueTree::Object(Arc::new(ObjectNode {
                class: obj.class.clone(),
                entries,
            }))
        })
    }

    /// Converts a literal without constraint checks; `amend` checks the
    /// whole result afterwards.
    fn scalar_leaf_unchecked(
        &mut self,
        class: &ClassInfo,
        p: &PropertyInfo,
        lit: &Literal,
        path: &str,
        site: Option<&SourceSpan>,
    ) -> Option<ValueTree> {
        if let (PropType::Float, Literal::Float(v)) = (&p.ty, lit) {
            if let Some(site) = site {
                self.uses.insert(path.to_string(), site.clone());
            }
            return Some(ValueTree::Leaf(Leaf::Float(*v)));
        }
        self.scalar_leaf(class, p, lit, path, site)
    }

    fn check_tree(&mut self, tree: &ValueTree, path: &str) {
        let schema = self.schema;
        let ValueTree::Object(obj) = tree else {
            return;
        };
        let Some(id) = schema.class_by_tag(&obj.class) else {
            return;
        };
        let class = schema.class(id);
        for (name, child) in &obj.entries {
            let Some((_, p)) = class.property(name) else {
                continue;
            };
            let child_path = join_path(path, name);
            match (child, &p.ty) {
                (ValueTree::Object(_), PropType::Class(_)) => self.check_tree(child, &child_path),
                (ValueTree::Leaf(Leaf::Float(v)), PropType::Float) => {
                    self.check_float(class, p, *v, &child_path, None)
                }
                (ValueTree::Leaf(Leaf::Listing(recs)), PropType::Listing) => {
                    self.check_listing(class, p, recs, &child_path, None)
                }
                _ => {}
            }
        }
    }
}

fn describe(value: &AmendValue) -> &'static str {
    match value {
        AmendValue::Leaf(_) => "a literal",
        AmendValue::Block(_) => "an object amendment",
        AmendValue::Listing(_) => "listing elements",
    }
}
