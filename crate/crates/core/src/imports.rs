//! Local import resolution under an [`ImportPolicy`].

use std::collections::HashMap;
use std::io;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use crate::assets;
use crate::span::{bundled_uri, file_uri, SourceSpan};
use crate::syntax::{parse_source, ModuleAst, ParseError};

/// Where a module's source text came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModuleOrigin {
    File(PathBuf),
    Bundled(&'static str),
}

#[derive(Debug, Clone)]
pub struct SourceModule {
    pub origin: ModuleOrigin,
    pub uri: String,
    pub source: Arc<str>,
    pub ast: ModuleAst,
}

impl SourceModule {
    pub fn parse(origin: ModuleOrigin, source: impl Into<Arc<str>>) -> Result<Self, ParseError> {
        let uri = match &origin {
            ModuleOrigin::File(p) => file_uri(p),
            ModuleOrigin::Bundled(name) => bundled_uri(name),
        };
        let source = source.into();
        let ast = parse_source(&source, &uri)?;
        Ok(Self {
            origin,
            uri,
            source,
            ast,
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct ImportPolicy {
    pub allowed_roots: Vec<PathBuf>,
    pub allow_bundled: bool,
}

impl ImportPolicy {
    /// Allows the entry file's directory and the bundled templates.
    pub fn for_entry(entry: &Path) -> Self {
        let dir = match entry.parent() {
            Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
            _ => PathBuf::from("."),
        };
        Self {
            allowed_roots: vec![canonical(&dir)],
            allow_bundled: true,
        }
    }

    pub fn permits(&self, path: &Path) -> bool {
        let path = canonical(path);
        self.allowed_roots
            .iter()
            .any(|root| path.starts_with(canonical(root)))
    }
}

/// Canonical form of an existing path; other paths are only normalized.
fn canonical(path: &Path) -> PathBuf {
    path.canonicalize().unwrap_or_else(|_| normalize(path))
}

/// File access used by import resolution.
pub trait SourceLoader {
    /// Canonical path of `path` if it names an existing file.
    fn locate(&self, path: &Path) -> Option<PathBuf>;
    fn read(&self, path: &Path) -> io::Result<String>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FsLoader;

impl SourceLoader for FsLoader {
    fn locate(&self, path: &Path) -> Option<PathBuf> {
        path.is_file().then(|| path.canonicalize().ok()).flatten()
    }

    fn read(&self, path: &Path) -> io::Result<String> {
        std::fs::read_to_string(path)
    }
}

/// In-memory file set, keyed by normalized absolute path.
#[derive(Debug, Clone, Default)]
pub struct MemoryLoader {
    files: HashMap<PathBuf, String>,
}

impl MemoryLoader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, path: impl AsRef<Path>, source: impl Into<String>) -> Self {
        self.files.insert(normalize(path.as_ref()), source.into());
        self
    }
}

impl SourceLoader for MemoryLoader {
    fn locate(&self, path: &Path) -> Option<PathBuf> {
        let path = normalize(path);
        self.files.contains_key(&path).then_some(path)
    }

    fn read(&self, path: &Path) -> io::Result<String> {
        self.files
            .get(&normalize(path))
            .cloned()
            .ok_or_else(|| io::Error::from(io::ErrorKind::NotFound))
    }
}

/// Lexically resolves `.` and `..` components.
pub fn normalize(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for comp in path.components() {
        match comp {
            Component::CurDir => {}
            Component::ParentDir => {
                if !out.pop() {
                    out.push("..");
                }
            }
            other => out.push(other.as_os_str()),
        }
    }
    out
}

#[derive(Debug, thiserror::Error)]
pub enum ImportError {
    #[error("import cycle: {}", chain.join(" -> "))]
    Cycle { chain: Vec<String> },
    #[error("import of `{}` is not permitted by the import policy ({span})", path.display())]
    PolicyViolation { path: PathBuf, span: SourceSpan },
    #[error("cannot find module `{import}` ({span})")]
    NotFound { import: String, span: SourceSpan },
    #[error("cannot read `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("two modules named `{name}`: {first} and {second}")]
    DuplicateModuleName {
        name: String,
        first: String,
        second: String,
    },
    #[error("two imports share the name `{alias}` ({span})")]
    DuplicateAlias { alias: String, span: SourceSpan },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl ImportError {
    pub fn span(&self) -> Option<&SourceSpan> {
        match self {
            ImportError::PolicyViolation { span, .. }
            | ImportError::NotFound { span, .. }
            | ImportError::DuplicateAlias { span, .. } => Some(span),
            ImportError::Parse(e) => Some(e.span()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GraphModule {
    pub module: SourceModule,
    /// Import alias and index of the imported module, in import order.
    pub imports: Vec<(String, usize)>,
}

/// An entry module plus everything it transitively imports, each exactly
/// once. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ModuleGraph {
    modules: Vec<GraphModule>,
    entry: usize,
}

impl ModuleGraph {
    pub fn entry(&self) -> &GraphModule {
        &self.modules[self.entry]
    }

    pub fn entry_index(&self) -> usize {
        self.entry
    }

    pub fn entry_ast(&self) -> &ModuleAst {
        &self.entry().module.ast
    }

    pub fn modules(&self) -> &[GraphModule] {
        &self.modules
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn get(&self, module_name: &str) -> Option<&ModuleAst> {
        self.modules
            .iter()
            .map(|m| &m.module.ast)
            .find(|ast| ast.module_name == module_name)
    }

    /// Index of the module imported as `alias` by module `from`.
    pub fn imported(&self, from: usize, alias: &str) -> Option<usize> {
        self.modules[from]
            .imports
            .iter()
            .find(|(a, _)| a == alias)
            .map(|(_, idx)| *idx)
    }

    /// Source text of the module loaded from `uri`.
    pub fn source_for_uri(&self, uri: &str) -> Option<&str> {
        self.modules
            .iter()
            .find(|m| m.module.uri == uri)
            .map(|m| &*m.module.source)
    }
}

/// Loads, parses and links every module reachable from `entry`.
pub fn resolve_imports(
    entry: SourceModule,
    loader: &dyn SourceLoader,
    policy: &ImportPolicy,
) -> Result<ModuleGraph, ImportError> {
    let mut resolver = Resolver {
        loader,
        policy,
        modules: Vec::new(),
        by_origin: HashMap::new(),
        stack: Vec::new(),
    };
    let entry_idx = resolver.add(entry);
    resolver.visit(entry_idx)?;

    let mut names: HashMap<&str, &str> = HashMap::new();
    for m in &resolver.modules {
        if let Some(first) = names.insert(&m.module.ast.module_name, &m.module.uri) {
            return Err(ImportError::DuplicateModuleName {
                name: m.module.ast.module_name.clone(),
                first: first.to_string(),
                second: m.module.uri.clone(),
            });
        }
    }
    Ok(ModuleGraph {
        modules: resolver.modules,
        entry: entry_idx,
    })
}

/// Reads and resolves a module file with the given loader and policy.
pub fn load_file(
    path: &Path,
    loader: &dyn SourceLoader,
    policy: &ImportPolicy,
) -> Result<ModuleGraph, ImportError> {
    let located = loader.locate(path).unwrap_or_else(|| normalize(path));
    let source = loader.read(&located).map_err(|source| ImportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let entry = SourceModule::parse(ModuleOrigin::File(located), source)?;
    resolve_imports(entry, loader, policy)
}

struct Resolver<'a> {
    loader: &'a dyn SourceLoader,
    policy: &'a ImportPolicy,
    modules: Vec<GraphModule>,
    by_origin: HashMap<ModuleOrigin, usize>,
    stack: Vec<usize>,
}

impl Resolver<'_> {
    fn add(&mut self, module: SourceModule) -> usize {
        let idx = self.modules.len();
        self.by_origin.insert(module.origin.clone(), idx);
        self.modules.push(GraphModule {
            module,
            imports: Vec::new(),
        });
        idx
    }

    fn visit(&mut self, idx: usize) -> Result<(), ImportError> {
        self.stack.push(idx);
        let decls = self.modules[idx].module.ast.imports.clone();
        let mut links: Vec<(String, usize)> = Vec::new();
        for decl in decls {
            let alias = decl.alias().to_string();
            if links.iter().any(|(a, _)| *a == alias) {
                return Err(ImportError::DuplicateAlias {
                    alias,
                    span: decl.span.clone(),
                });
            }
            let origin = self.locate(idx, &decl.path, &decl.span)?;
            let target = match self.by_origin.get(&origin) {
                Some(&t) if self.stack.contains(&t) => {
                    let pos = self.stack.iter().position(|&s| s == t).unwrap_or(0);
                    let mut chain: Vec<String> = self.stack[pos..]
                        .iter()
                        .map(|&s| self.modules[s].module.ast.module_name.clone())
                        .collect();
                    chain.push(self.modules[t].module.ast.module_name.clone());
                    return Err(ImportError::Cycle { chain });
                }
                Some(&t) => t,
                None => {
                    let module = self.load(origin)?;
                    let t = self.add(module);
                    self.visit(t)?;
                    t
                }
            };
            links.push((alias, target));
        }
        self.modules[idx].imports = links;
        self.stack.pop();
        Ok(())
    }

    fn locate(
        &self,
        from: usize,
        import: &str,
        span: &SourceSpan,
    ) -> Result<ModuleOrigin, ImportError> {
        let mapped = map_extension(import);
        let bare = !mapped.contains(['/', '\\']);
        let bundled = || {
            (self.policy.allow_bundled && bare)
                .then(|| assets::bundled_file(&mapped))
                .flatten()
                .map(ModuleOrigin::Bundled)
        };
        match &self.modules[from].module.origin {
            ModuleOrigin::Bundled(_) => bundled().ok_or_else(|| ImportError::NotFound {
                import: import.to_string(),
                span: span.clone(),
            }),
            ModuleOrigin::File(path) => {
                let base = path.parent().unwrap_or(Path::new(""));
                let candidate = normalize(&base.join(&mapped));
                if let Some(found) = self.loader.locate(&candidate) {
                    if self.policy.permits(&found) {
                        return Ok(ModuleOrigin::File(found));
                    }
                    return Err(ImportError::PolicyViolation {
                        path: found,
                        span: span.clone(),
                    });
                }
                if !self.policy.permits(&candidate) {
                    return Err(ImportError::PolicyViolation {
                        path: candidate,
                        span: span.clone(),
                    });
                }
                bundled().ok_or_else(|| ImportError::NotFound {
                    import: import.to_string(),
                    span: span.clone(),
                })
            }
        }
    }

    fn load(&self, origin: ModuleOrigin) -> Result<SourceModule, ImportError> {
        let source: Arc<str> = match &origin {
            ModuleOrigin::Bundled(name) => {
                Arc::from(assets::bundled_source(name).unwrap_or_default())
            }
            ModuleOrigin::File(path) => self
                .loader
                .read(path)
                .map_err(|source| ImportError::Io {
                    path: path.clone(),
                    source,
                })?
                .into(),
        };
        Ok(SourceModule::parse(origin, source)?)
    }
}

/// `.pkl` imports refer to the corresponding `.odd` files.
fn map_extension(import: &str) -> String {
    match import.strip_suffix(".pkl") {
        Some(stem) => format!("{stem}.odd"),
        None => import.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(loader: &MemoryLoader, path: &str) -> SourceModule {
        let src = loader.read(Path::new(path)).unwrap();
        SourceModule::parse(ModuleOrigin::File(PathBuf::from(path)), src).unwrap()
    }

    fn policy(root: &str) -> ImportPolicy {
        ImportPolicy {
            allowed_roots: vec![PathBuf::from(root)],
            allow_bundled: true,
        }
    }

    #[test]
    fn single_module_graph() {
        let loader = MemoryLoader::new().with("/w/a.odd", "module a\nconst x = 1");
        let graph = resolve_imports(entry(&loader, "/w/a.odd"), &loader, &policy("/w")).unwrap();
        assert_eq!(graph.len(), 1);
        assert_eq!(graph.entry_ast().module_name, "a");
    }

    #[test]
    fn bundled_top_template_pulls_in_three_branches() {
        let loader = MemoryLoader::new().with("/w/odd1.odd", "import \"ODD_template.pkl\"");
        let graph = resolve_imports(entry(&loader, "/w/odd1.odd"), &loader, &policy("/w")).unwrap();
        assert_eq!(graph.len(), 5);
        let top = graph.imported(graph.entry_index(), "ODD_template").unwrap();
        assert_eq!(graph.modules()[top].imports.len(), 3);
        assert!(graph.get("ODD.scen_template").is_some());
    }

    #[test]
    fn diamond_imports_load_once() {
        let loader = MemoryLoader::new()
            .with("/w/a.odd", "import \"b.odd\"\nimport \"c.odd\"")
            .with("/w/b.odd", "import \"d.odd\"")
            .with("/w/c.odd", "import \"d.odd\"")
            .with("/w/d.odd", "const k = 1");
        let graph = resolve_imports(entry(&loader, "/w/a.odd"), &loader, &policy("/w")).unwrap();
        assert_eq!(graph.len(), 4);
    }

    #[test]
    fn cycle_is_reported_with_chain() {
        let loader = MemoryLoader::new()
            .with("/w/A.odd", "module A\nimport \"B.odd\"")
            .with("/w/B.odd", "module B\nimport \"A.odd\"");
        let err = resolve_imports(entry(&loader, "/w/A.odd"), &loader, &policy("/w")).unwrap_err();
        match err {
            ImportError::Cycle { chain } => assert_eq!(chain, ["A", "B", "A"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn escaping_the_allowed_root_is_a_policy_violation() {
        let loader = MemoryLoader::new()
            .with("/w/a.odd", "import \"../secret/b.odd\"")
            .with("/secret/b.odd", "const k = 1");
        let err = resolve_imports(entry(&loader, "/w/a.odd"), &loader, &policy("/w")).unwrap_err();
        match err {
            ImportError::PolicyViolation { path, span } => {
                assert_eq!(path, PathBuf::from("/secret/b.odd"));
                assert_eq!(span.line, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_import_reports_importing_span() {
        let loader = MemoryLoader::new().with("/w/a.odd", "module a\n\nimport \"nope.odd\"");
        let err = resolve_imports(entry(&loader, "/w/a.odd"), &loader, &policy("/w")).unwrap_err();
        match err {
            ImportError::NotFound { import, span } => {
                assert_eq!(import, "nope.odd");
                assert_eq!(span.line, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bundled_fallback_can_be_disabled() {
        let loader = MemoryLoader::new().with("/w/a.odd", "import \"scen_template.odd\"");
        let strict = ImportPolicy {
            allowed_roots: vec![PathBuf::from("/w")],
            allow_bundled: false,
        };
        assert!(matches!(
            resolve_imports(entry(&loader, "/w/a.odd"), &loader, &strict),
            Err(ImportError::NotFound { .. })
        ));
    }

    #[test]
    fn local_file_shadows_bundled_template() {
        let loader = MemoryLoader::new()
            .with("/w/a.odd", "import \"scen_template.pkl\"")
            .with("/w/scen_template.odd", "module local.scen\nconst k = 1");
        let graph = resolve_imports(entry(&loader, "/w/a.odd"), &loader, &policy("/w")).unwrap();
        assert!(graph.get("local.scen").is_some());
    }

    #[test]
    fn normalize_resolves_parent_components() {
        assert_eq!(
            normalize(Path::new("/a/b/../c/./d")),
            PathBuf::from("/a/c/d")
        );
    }
}
