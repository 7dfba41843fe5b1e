//! ISO 34503 taxonomy templates shipped with the toolkit.

use crate::error::Error;
use crate::imports::{
    resolve_imports, ImportPolicy, MemoryLoader, ModuleGraph, ModuleOrigin, SourceModule,
};

include!(concat!(env!("OUT_DIR"), "/asset_checksums.rs"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemplateAsset {
    pub name: &'static str,
    pub file_name: &'static str,
    pub source_text: &'static str,
    pub declared_min_tool_version: &'static str,
}

const TEMPLATES: &[TemplateAsset] = &[
    TemplateAsset {
        name: "odd_template",
        file_name: "ODD_template.odd",
        source_text: include_str!("../assets/ODD_template.odd"),
        declared_min_tool_version: "0.25.1",
    },
    TemplateAsset {
        name: "scen_template",
        file_name: "scen_template.odd",
        source_text: include_str!("../assets/scen_template.odd"),
        declared_min_tool_version: "0.25.1",
    },
    TemplateAsset {
        name: "env_template",
        file_name: "env_template.odd",
        source_text: include_str!("../assets/env_template.odd"),
        declared_min_tool_version: "0.25.1",
    },
    TemplateAsset {
        name: "dyn_template",
        file_name: "dyn_template.odd",
        source_text: include_str!("../assets/dyn_template.odd"),
        declared_min_tool_version: "0.25.1",
    },
];

pub fn list_standard_templates() -> Vec<&'static str> {
    TEMPLATES.iter().map(|t| t.name).collect()
}

pub fn standard_templates() -> &'static [TemplateAsset] {
    TEMPLATES
}

pub fn template_asset(name: &str) -> Option<&'static TemplateAsset> {
    TEMPLATES.iter().find(|t| t.name == name)
}

/// Static file name of the bundled asset called `file_name`, if any.
pub(crate) fn bundled_file(file_name: &str) -> Option<&'static str> {
    TEMPLATES
        .iter()
        .find(|t| t.file_name == file_name)
        .map(|t| t.file_name)
}

pub(crate) fn bundled_source(file_name: &str) -> Option<&'static str> {
    TEMPLATES
        .iter()
        .find(|t| t.file_name == file_name)
        .map(|t| t.source_text)
}

pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}

/// Checks an embedded asset against the checksum recorded at build time.
pub fn verify_integrity(asset: &TemplateAsset) -> Result<(), Error> {
    let recorded = CHECKSUMS
        .iter()
        .find(|(f, _)| *f == asset.file_name)
        .map(|(_, sum)| *sum);
    if recorded == Some(fnv1a64(asset.source_text.as_bytes())) {
        Ok(())
    } else {
        Err(Error::AssetIntegrity(asset.file_name.to_string()))
    }
}

/// Parses the named bundled template and resolves its imports against the
/// other bundled templates. The template's own AST is the graph's entry.
pub fn load_standard_template(name: &str) -> Result<ModuleGraph, Error> {
    let asset = template_asset(name).ok_or_else(|| Error::UnknownTemplate(name.to_string()))?;
    verify_integrity(asset)?;
    let entry = SourceModule::parse(ModuleOrigin::Bundled(asset.file_name), asset.source_text)?;
    let policy = ImportPolicy {
        allowed_roots: Vec::new(),
        allow_bundled: true,
    };
    Ok(resolve_imports(entry, &MemoryLoader::new(), &policy)?)
}
