//! Name resolution across a [`ModuleGraph`]: classes, aliases and constants.

use std::collections::HashMap;
use std::sync::Arc;

use super::value::{join_path, ClassTag};
use crate::imports::ModuleGraph;
use crate::span::SourceSpan;
use crate::syntax::{
    ConstraintExpr, InstanceDecl, Literal, PropertyDecl, TypeRef, ValueExpr, VersionAnnotation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AliasId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub enum PropType {
    Float,
    Boolean,
    String,
    Listing,
    Alias(AliasId),
    Class(ClassId),
}

#[derive(Debug, Clone)]
pub struct PropertyInfo {
    pub decl: PropertyDecl,
    pub ty: PropType,
}

impl PropertyInfo {
    pub fn name(&self) -> &str {
        &self.decl.name
    }
}

#[derive(Debug, Clone)]
pub struct ClassInfo {
    pub tag: ClassTag,
    pub span: SourceSpan,
    pub properties: Vec<PropertyInfo>,
}

impl ClassInfo {
    pub fn property(&self, name: &str) -> Option<(usize, &PropertyInfo)> {
        self.properties
            .iter()
            .enumerate()
            .find(|(_, p)| p.name() == name)
    }

    /// `module#Class.property`
    pub fn member(&self, property: &str) -> String {
        format!("{}.{}", self.tag, property)
    }
}

#[derive(Debug, Clone)]
pub struct AliasInfo {
    pub name: Arc<str>,
    pub module: Arc<str>,
    pub alternatives: Vec<String>,
}

/// Constants of every module in a graph, merged into one namespace.
#[derive(Debug, Clone, Default)]
pub struct ConstEnv {
    entries: Vec<(String, Literal, SourceSpan)>,
}

impl ConstEnv {
    pub fn get(&self, name: &str) -> Option<&Literal> {
        self.entries
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, v, _)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Literal)> {
        self.entries.iter().map(|(n, v, _)| (n.as_str(), v))
    }

    /// Resolves a literal or constant reference.
    pub fn resolve<'a>(&'a self, expr: &'a ValueExpr) -> Option<&'a Literal> {
        match expr {
            ValueExpr::Literal(l) => Some(l),
            ValueExpr::ConstRef(name) => self.get(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SchemaError {
    #[error("cannot resolve type `{name}` ({span})")]
    UnresolvedType { name: String, span: SourceSpan },
    #[error("`{name}` is not a class ({span})")]
    NotAClass { name: String, span: SourceSpan },
    #[error("constant `{name}` declared twice ({second}); first declared at {first}")]
    DuplicateConst {
        name: String,
        first: SourceSpan,
        second: SourceSpan,
    },
    #[error("class `{class}` contains itself through property `{property}` ({span})")]
    RecursiveClass {
        class: String,
        property: String,
        span: SourceSpan,
    },
}

impl SchemaError {
    pub fn span(&self) -> &SourceSpan {
        match self {
            SchemaError::UnresolvedType { span, .. }
            | SchemaError::NotAClass { span, .. }
            | SchemaError::RecursiveClass { span, .. } => span,
            SchemaError::DuplicateConst { second, .. } => second,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModuleGate {
    pub module_name: String,
    pub declared: Option<VersionAnnotation>,
}

/// Resolved view of a module graph used by evaluation.
#[derive(Debug, Clone)]
pub struct Schema {
    classes: Vec<ClassInfo>,
    aliases: Vec<AliasInfo>,
    by_tag: HashMap<ClassTag, ClassId>,
    consts: ConstEnv,
    gates: Vec<ModuleGate>,
    instances: Vec<(InstanceDecl, ClassId)>,
}

/// Leaf type as seen by callers walking a schema.
#[derive(Debug, Clone, PartialEq)]
pub enum LeafType {
    Float { bounds: Option<(f64, f64)> },
    Boolean,
    String,
    Enum { alternatives: Vec<String> },
    Listing,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SchemaNode {
    Object {
        path: String,
        class: ClassId,
    },
    Leaf {
        path: String,
        ty: LeafType,
        has_default: bool,
    },
}

impl Schema {
    pub fn build(graph: &ModuleGraph) -> Result<Schema, SchemaError> {
        let mut schema = Schema {
            classes: Vec::new(),
            aliases: Vec::new(),
            by_tag: HashMap::new(),
            consts: ConstEnv::default(),
            gates: Vec::new(),
            instances: Vec::new(),
        };

        // Pass 1: register names.
        let mut class_ids: HashMap<(usize, &str), ClassId> = HashMap::new();
        let mut alias_ids: HashMap<(usize, &str), AliasId> = HashMap::new();
        for (m, gm) in graph.modules().iter().enumerate() {
            let ast = &gm.module.ast;
            let module: Arc<str> = Arc::from(ast.module_name.as_str());
            schema.gates.push(ModuleGate {
                module_name: ast.module_name.clone(),
                declared: ast.min_tool_version.clone(),
            });
            for c in &ast.consts {
                if let Some((_, _, first)) =
                    schema.consts.entries.iter().find(|(n, _, _)| *n == c.name)
                {
                    return Err(SchemaError::DuplicateConst {
                        name: c.name.clone(),
                        first: first.clone(),
                        second: c.span.clone(),
                    });
                }
                schema
                    .consts
                    .entries
                    .push((c.name.clone(), c.value.clone(), c.span.clone()));
            }
            for a in &ast.type_aliases {
                alias_ids.insert((m, a.name.as_str()), AliasId(schema.aliases.len()));
                schema.aliases.push(AliasInfo {
                    name: Arc::from(a.name.as_str()),
                    module: module.clone(),
                    alternatives: a.alternatives.clone(),
                });
            }
            for c in &ast.classes {
                let id = ClassId(schema.classes.len());
                let tag = ClassTag {
                    module: module.clone(),
                    name: Arc::from(c.name.as_str()),
                };
                class_ids.insert((m, c.name.as_str()), id);
                schema.by_tag.insert(tag.clone(), id);
                schema.classes.push(ClassInfo {
                    tag,
                    span: c.span.clone(),
                    properties: Vec::new(),
                });
            }
        }

        // Pass 2: resolve property types.
        let lookup = |m: usize, parts: &[String]| -> Option<Named> {
            let (module, name) = match parts {
                [name] => (m, name.as_str()),
                [alias, name] => (graph.imported(m, alias)?, name.as_str()),
                _ => return None,
            };
            class_ids
                .get(&(module, name))
                .map(|c| Named::Class(*c))
                .or_else(|| alias_ids.get(&(module, name)).map(|a| Named::Alias(*a)))
        };
        for (m, gm) in graph.modules().iter().enumerate() {
            let ast = &gm.module.ast;
            for c in &ast.classes {
                let id = class_ids[&(m, c.name.as_str())];
                let mut props = Vec::with_capacity(c.properties.len());
                for p in &c.properties {
                    let ty = match &p.declared_type {
                        TypeRef::Float => PropType::Float,
                        TypeRef::Boolean => PropType::Boolean,
                        TypeRef::String => PropType::String,
                        TypeRef::Listing => PropType::Listing,
                        TypeRef::Named(parts) => match lookup(m, parts) {
                            Some(Named::Class(c)) => PropType::Class(c),
                            Some(Named::Alias(a)) => PropType::Alias(a),
                            None => {
                                return Err(SchemaError::UnresolvedType {
                                    name: parts.join("."),
                                    span: p.span.clone(),
                                })
                            }
                        },
                    };
                    props.push(PropertyInfo {
                        decl: p.clone(),
                        ty,
                    });
                }
                schema.classes[id.0].properties = props;
            }
        }

        let entry = graph.entry_index();
        for inst in &graph.entry_ast().instances {
            let id = match lookup(entry, &inst.target_type) {
                Some(Named::Class(c)) => c,
                Some(Named::Alias(_)) => {
                    return Err(SchemaError::NotAClass {
                        name: inst.target_type.join("."),
                        span: inst.span.clone(),
                    })
                }
                None => {
                    return Err(SchemaError::UnresolvedType {
                        name: inst.target_type.join("."),
                        span: inst.span.clone(),
                    })
                }
            };
            schema.instances.push((inst.clone(), id));
        }

        schema.check_acyclic()?;
        Ok(schema)
    }

    fn check_acyclic(&self) -> Result<(), SchemaError> {
        // 0 = unvisited, 1 = on stack, 2 = done
        fn visit(schema: &Schema, id: ClassId, state: &mut [u8]) -> Result<(), SchemaError> {
            state[id.0] = 1;
            for p in &schema.classes[id.0].properties {
                if let PropType::Class(child) = p.ty {
                    match state[child.0] {
                        1 => {
                            return Err(SchemaError::RecursiveClass {
                                class: schema.classes[child.0].tag.to_string(),
                                property: p.name().to_string(),
                                span: p.decl.span.clone(),
                            })
                        }
                        0 => visit(schema, child, state)?,
                        _ => {}
                    }
                }
            }
            state[id.0] = 2;
            Ok(())
        }
        let mut state = vec![0u8; self.classes.len()];
        for i in 0..self.classes.len() {
            if state[i] == 0 {
                visit(self, ClassId(i), &mut state)?;
            }
        }
        Ok(())
    }

    pub fn class(&self, id: ClassId) -> &ClassInfo {
        &self.classes[id.0]
    }

    pub fn classes(&self) -> impl Iterator<Item = (ClassId, &ClassInfo)> {
        self.classes
            .iter()
            .enumerate()
            .map(|(i, c)| (ClassId(i), c))
    }

    pub fn class_by_tag(&self, tag: &ClassTag) -> Option<ClassId> {
        self.by_tag.get(tag).copied()
    }

    /// Finds a class by module and class name.
    pub fn find_class(&self, module: &str, name: &str) -> Option<ClassId> {
        self.classes
            .iter()
            .position(|c| &*c.tag.module == module && &*c.tag.name == name)
            .map(ClassId)
    }

    pub fn alias(&self, id: AliasId) -> &AliasInfo {
        &self.aliases[id.0]
    }

    pub fn consts(&self) -> &ConstEnv {
        &self.consts
    }

    pub fn gates(&self) -> &[ModuleGate] {
        &self.gates
    }

    /// Instances declared in the entry module with their resolved classes.
    pub fn instances(&self) -> &[(InstanceDecl, ClassId)] {
        &self.instances
    }

    /// Resolved numeric bounds of a constraint, if both sides are Float.
    pub fn constraint_bounds(&self, c: &ConstraintExpr) -> Option<(f64, f64)> {
        match (self.consts.resolve(&c.low)?, self.consts.resolve(&c.high)?) {
            (Literal::Float(lo), Literal::Float(hi)) => Some((*lo, *hi)),
            _ => None,
        }
    }

    /// Every object and leaf path reachable from `root`, depth first in
    /// declaration order. The root itself is listed with an empty path.
    pub fn walk(&self, root: ClassId) -> Vec<SchemaNode> {
        let mut out = Vec::new();
        self.walk_into(root, String::new(), &mut out);
        out
    }

    fn walk_into(&self, id: ClassId, path: String, out: &mut Vec<SchemaNode>) {
        out.push(SchemaNode::Object {
            path: path.clone(),
            class: id,
        });
        for p in &self.classes[id.0].properties {
            let child = join_path(&path, p.name());
            let ty = match &p.ty {
                PropType::Class(c) => {
                    self.walk_into(*c, child, out);
                    continue;
                }
                PropType::Float => LeafType::Float {
                    bounds: p
                        .decl
                        .constraint
                        .as_ref()
                        .and_then(|c| self.constraint_bounds(c)),
                },
                PropType::Boolean => LeafType::Boolean,
                PropType::String => LeafType::String,
                PropType::Listing => LeafType::Listing,
                PropType::Alias(a) => LeafType::Enum {
                    alternatives: self.aliases[a.0].alternatives.clone(),
                },
            };
            out.push(SchemaNode::Leaf {
                path: child,
                ty,
                has_default: p.decl.default.is_some() || p.ty == PropType::Listing,
            });
        }
    }
}

enum Named {
    Class(ClassId),
    Alias(AliasId),
}
