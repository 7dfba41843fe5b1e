mod common;

use common::*;
use oddl_core::diagnostics::{render_error, render_violations};
use oddl_core::imports::{load_file, FsLoader};
use oddl_core::{Error, ImportPolicy, ViolationKind};

fn diagnose(name: &str) -> String {
    let path = fixture(name);
    let graph = load_file(&path, &FsLoader, &ImportPolicy::for_entry(&path)).unwrap();
    let ev = oddl_core::Evaluator::new(&graph, oddl_core::TOOL_VERSION).unwrap();
    let instance = ev.schema().instances()[0].0.name.clone();
    let violations = ev.evaluate(&instance).unwrap().violations().to_vec();
    render_violations(&violations, &graph)
}

#[test]
fn constraint_diagnostic_shape() {
    let text = diagnose("ODD1_31.odd");
    let source = oddl_core::assets::template_asset("scen_template")
        .unwrap()
        .source_text;
    let (n, line) = source
        .lines()
        .enumerate()
        .find(|(_, l)| l.trim_start().starts_with("speed_limit :"))
        .unwrap();
    let n = n + 1;
    let col = line.find("isBetween").unwrap();
    let gutter = format!("{n} | ");
    let expected = format!(
        "Type constraint 'isBetween(0, speed_limit_global)' violated.\n\
         Value: 31.0\n\
         \n\
         {gutter}{line}\n\
         {}{}\n\
         at ODD.scen_template#Drivable_area_lane_specification.speed_limit (bundled:///scen_template.odd, line {n})",
        " ".repeat(gutter.len() + col),
        "^".repeat("isBetween(0, speed_limit_global)".len()),
    );
    assert_eq!(text, expected);
}

#[test]
fn missing_required_points_at_declaration() {
    let text = diagnose("ODD1_no_direction.odd");
    assert!(text.contains("direction_of_travel"));
    assert!(text.contains(
        "Path: scenery.drivable_area.drivable_area_lane_specification.direction_of_travel"
    ));
    assert!(text.contains("bundled:///scen_template.odd"));
}

#[test]
fn parse_errors_show_location() {
    let path = fixture("broken.odd");
    let err: Error = load_file(&path, &FsLoader, &ImportPolicy::for_entry(&path))
        .unwrap_err()
        .into();
    let text = render_error(&err);
    assert!(text.starts_with("error: unclosed '{'"));
    assert!(text.contains("1 | "));
    assert!(text.contains('^'));
}

#[test]
fn violation_kind_names() {
    assert_eq!(
        ViolationKind::ConstraintViolated.to_string(),
        "CONSTRAINT_VIOLATED"
    );
    assert_eq!(
        ViolationKind::MissingRequired.to_string(),
        "MISSING_REQUIRED"
    );
}
