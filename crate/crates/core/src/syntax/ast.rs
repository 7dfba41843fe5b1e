use crate::span::SourceSpan;

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleAst {
    /// Dotted module name; derived from the file name when the source has no
    /// `module` clause.
    pub module_name: String,
    pub min_tool_version: Option<VersionAnnotation>,
    pub imports: Vec<ImportDecl>,
    pub consts: Vec<ConstDecl>,
    pub type_aliases: Vec<TypeAliasDecl>,
    pub classes: Vec<ClassDecl>,
    pub instances: Vec<InstanceDecl>,
}

impl ModuleAst {
    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn type_alias(&self, name: &str) -> Option<&TypeAliasDecl> {
        self.type_aliases.iter().find(|a| a.name == name)
    }

    pub fn instance(&self, name: &str) -> Option<&InstanceDecl> {
        self.instances.iter().find(|i| i.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VersionAnnotation {
    pub value: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportDecl {
    /// Import path exactly as written, e.g. `scen_template.pkl`.
    pub path: String,
    pub span: SourceSpan,
}

impl ImportDecl {
    /// Name under which the imported module's members are referenced: the
    /// file stem of the import path.
    pub fn alias(&self) -> &str {
        let file = self.path.rsplit(['/', '\\']).next().unwrap_or(&self.path);
        file.split_once('.').map(|(stem, _)| stem).unwrap_or(file)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Float(f64),
    Boolean(bool),
    String(String),
}

impl Literal {
    pub fn type_name(&self) -> &'static str {
        match self {
            Literal::Float(_) => "Float",
            Literal::Boolean(_) => "Boolean",
            Literal::String(_) => "String",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstDecl {
    pub name: String,
    pub value: Literal,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeAliasDecl {
    pub name: String,
    pub alternatives: Vec<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDecl {
    pub name: String,
    pub properties: Vec<PropertyDecl>,
    pub span: SourceSpan,
}

impl ClassDecl {
    pub fn property(&self, name: &str) -> Option<&PropertyDecl> {
        self.properties.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeRef {
    Float,
    Boolean,
    String,
    Listing,
    /// Alias or class reference, optionally qualified by an import alias.
    Named(Vec<String>),
}

impl TypeRef {
    pub fn display_name(&self) -> String {
        match self {
            TypeRef::Float => "Float".into(),
            TypeRef::Boolean => "Boolean".into(),
            TypeRef::String => "String".into(),
            TypeRef::Listing => "Listing".into(),
            TypeRef::Named(parts) => parts.join("."),
        }
    }
}

/// Either a literal or a reference to a module constant.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueExpr {
    Literal(Literal),
    ConstRef(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyDecl {
    pub name: String,
    pub declared_type: TypeRef,
    pub constraint: Option<ConstraintExpr>,
    pub default: Option<ValueExpr>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    IsBetween,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintExpr {
    pub kind: ConstraintKind,
    pub low: ValueExpr,
    pub high: ValueExpr,
    /// Constraint text as written, with whitespace runs collapsed to one space.
    pub source_text: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceDecl {
    pub name: String,
    pub target_type: Vec<String>,
    pub amendment: AmendmentBlock,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AmendmentBlock {
    pub entries: Vec<AmendEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmendEntry {
    pub name: String,
    pub value: AmendValue,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AmendValue {
    Leaf(Literal),
    Block(AmendmentBlock),
    /// `new { ... }` elements of a Listing property.
    Listing(Vec<RecordLit>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordLit {
    pub fields: Vec<(String, Literal)>,
    pub span: SourceSpan,
}

impl AmendmentBlock {
    pub fn entry(&self, name: &str) -> Option<&AmendEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Builds nested blocks from dotted paths, e.g.
    /// `("scenery.zone.region_or_state", "Sweden")`. Later assignments to the
    /// same path replace earlier ones. Entry spans point at `span`.
    pub fn from_paths<'a>(
        assignments: impl IntoIterator<Item = (&'a str, Literal)>,
        span: &SourceSpan,
    ) -> AmendmentBlock {
        let mut root = AmendmentBlock::default();
        for (path, lit) in assignments {
            let segments: Vec<&str> = path.split('.').collect();
            root.insert(&segments, AmendValue::Leaf(lit), span);
        }
        root
    }

    /// Sets `value` at the nested `path`, creating intermediate blocks.
    pub fn insert(&mut self, path: &[&str], value: AmendValue, span: &SourceSpan) {
        let Some((head, rest)) = path.split_first() else {
            return;
        };
        let pos = self.entries.iter().position(|e| e.name == *head);
        if rest.is_empty() {
            let entry = AmendEntry {
                name: head.to_string(),
                value,
                span: span.clone(),
            };
            match pos {
                Some(i) => self.entries[i] = entry,
                None => self.entries.push(entry),
            }
            return;
        }
        let i = match pos {
            Some(i) if matches!(self.entries[i].value, AmendValue::Block(_)) => i,
            Some(i) => {
                self.entries[i].value = AmendValue::Block(AmendmentBlock::default());
                i
            }
            None => {
                self.entries.push(AmendEntry {
                    name: head.to_string(),
                    value: AmendValue::Block(AmendmentBlock::default()),
                    span: span.clone(),
                });
                self.entries.len() - 1
            }
        };
        if let AmendValue::Block(inner) = &mut self.entries[i].value {
            inner.insert(rest, value, span);
        }
    }
}
