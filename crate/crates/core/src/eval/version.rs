use semver::Version;

use super::violation::{Violation, ViolationKind};
use crate::syntax::VersionAnnotation;

/// Checks a module's minimum tool version against the running toolkit.
/// A missing declaration always passes.
pub fn check_version_gate(
    module_name: &str,
    declared: Option<&VersionAnnotation>,
    tool_version: &Version,
) -> Option<Violation> {
    let declared = declared?;
    match Version::parse(&declared.value) {
        Err(err) => Some(
            Violation::new(
                ViolationKind::TypeMismatch,
                format!("Malformed version '{}' in module '{module_name}': {err}.", declared.value),
                "",
                &declared.span,
            )
            .with_value(format!("{:?}", declared.value))
            .with_member(module_name),
        ),
        Ok(required) if required > *tool_version => Some(
            Violation::new(
                ViolationKind::VersionGate,
                format!("Module '{module_name}' requires tool version {required} or later, but this is {tool_version}."),
                "",
                &declared.span,
            )
            .with_value(required.to_string())
            .with_member(module_name),
        ),
        Ok(_) => None,
    }
}
