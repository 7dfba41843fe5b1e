//! Human readable rendering of violations and load errors.

use crate::eval::{Violation, ViolationKind};
use crate::imports::ModuleGraph;
use crate::span::SourceSpan;
use crate::Error;

/// Renders one violation. Constraint violations take the form
///
/// ```text
/// Type constraint 'isBetween(0, speed_limit_global)' violated.
/// Value: 31.0
///
/// 139 | speed_limit : Float (isBetween(0, speed_limit_global))
///                             ^^^^^^^^^^^^^^^^^^^^^^^^^^^^^^^^
/// at ODD.scen_template#Drivable_area_lane_specification.speed_limit (bundled:///scen_template.odd, line 139)
/// ```
pub fn render_violation(v: &Violation, graph: &ModuleGraph) -> String {
    let mut out = String::new();
    out.push_str(&v.message);
    out.push('\n');
    if let Some(value) = &v.offending_value {
        out.push_str(&format!("Value: {value}\n"));
    }
    let site = match v.kind {
        ViolationKind::ConstraintViolated => &v.decl_site,
        _ => {
            if !v.property_path.is_empty() {
                out.push_str(&format!("Path: {}\n", v.property_path));
            }
            v.use_site.as_ref().unwrap_or(&v.decl_site)
        }
    };
    out.push('\n');
    let source = graph
        .source_for_uri(&site.file_uri)
        .map(str::to_string)
        .or_else(|| source_for_uri(&site.file_uri));
    if let Some(snippet) = source.as_deref().and_then(|s| snippet(site, s)) {
        out.push_str(&snippet);
    }
    let who = v.member.as_deref().unwrap_or(&v.property_path);
    if who.is_empty() {
        out.push_str(&format!("at {}, line {}", site.file_uri, site.line));
    } else {
        out.push_str(&format!("at {who} ({}, line {})", site.file_uri, site.line));
    }
    out
}

/// Renders every violation, separated by blank lines.
pub fn render_violations(violations: &[Violation], graph: &ModuleGraph) -> String {
    violations
        .iter()
        .map(|v| render_violation(v, graph))
        .collect::<Vec<_>>()
        .join("\n\n")
}

/// Renders an error that prevented evaluation, with a source excerpt when
/// the error carries a location.
pub fn render_error(error: &Error) -> String {
    let mut out = format!("error: {error}");
    if let Some(snippet) = error
        .span()
        .and_then(|span| snippet(span, &source_for_uri(&span.file_uri)?))
    {
        out.push_str("\n\n");
        out.push_str(snippet.trim_end());
    }
    out
}

/// The source line containing `span` followed by a caret underline. The
/// underline stops at the end of the line for spans that continue past it.
pub fn snippet(span: &SourceSpan, source: &str) -> Option<String> {
    let text = source.lines().nth(span.line.checked_sub(1)?)?;
    let gutter = format!("{} | ", span.line);
    let prefix: String = text
        .chars()
        .take(span.column - 1)
        .map(|c| if c == '\t' { '\t' } else { ' ' })
        .collect();
    let available = text.chars().count().saturating_sub(span.column - 1);
    let width = span.length.min(available).max(1);
    Some(format!(
        "{gutter}{text}\n{}{prefix}{}\n",
        " ".repeat(gutter.len()),
        "^".repeat(width)
    ))
}

/// Source text behind a `file:///` or `bundled:///` URI.
fn source_for_uri(uri: &str) -> Option<String> {
    if let Some(name) = uri.strip_prefix("bundled:///") {
        return crate::assets::bundled_source(name).map(str::to_string);
    }
    let path = uri.strip_prefix("file://")?;
    // `file:///C:/x` carries a drive letter after the third slash.
    let path = match path.as_bytes() {
        [b'/', _, b':', ..] => &path[1..],
        _ => path,
    };
    std::fs::read_to_string(path).ok()
}
