use std::path::Path;
use std::sync::Arc;

use super::*;
use crate::assets;
use crate::imports::{load_file, ImportPolicy, MemoryLoader, ModuleGraph};
use crate::span::SourceSpan;
use crate::syntax::{AmendmentBlock, Literal};

const ODD1: &str = include_str!("../../tests/fixtures/ODD1_test.odd");
const SPEC: &str = "scenery.drivable_area.drivable_area_lane_specification";

fn graph(source: &str) -> ModuleGraph {
    let loader = MemoryLoader::new().with("/fx/main.odd", source);
    let policy = ImportPolicy::for_entry(Path::new("/fx/main.odd"));
    load_file(Path::new("/fx/main.odd"), &loader, &policy).unwrap()
}

fn evaluator(source: &str) -> Evaluator {
    Evaluator::new(&graph(source), TOOL_VERSION).unwrap()
}

fn blank() -> SourceSpan {
    SourceSpan::new(Arc::from("test:amend"), 1, 1, 0, 0)
}

fn block(assignments: &[(&str, Literal)]) -> AmendmentBlock {
    AmendmentBlock::from_paths(assignments.iter().map(|(p, l)| (*p, l.clone())), &blank())
}

fn odd1() -> (Evaluator, ValueTree) {
    let ev = evaluator(ODD1);
    let tree = ev.evaluate("odd1").unwrap().into_result().unwrap();
    (ev, tree)
}

fn leaf<'t>(tree: &'t ValueTree, path: &str) -> &'t Leaf {
    tree.get(path)
        .and_then(ValueTree::as_leaf)
        .unwrap_or_else(|| panic!("no leaf at {path}"))
}

#[test]
fn odd1_instance_values() {
    let (_, tree) = odd1();
    assert_eq!(
        leaf(&tree, &format!("{SPEC}.speed_limit")),
        &Leaf::Float(15.0)
    );
    assert_eq!(
        leaf(&tree, &format!("{SPEC}.direction_of_travel")),
        &Leaf::Enum {
            alias: "Direction_of_travel".into(),
            value: "right_hand_travel".into()
        }
    );
    assert_eq!(
        leaf(&tree, &format!("{SPEC}.lane_usage")),
        &Leaf::Boolean(true)
    );
    assert_eq!(
        leaf(&tree, &format!("{SPEC}.lane_dimensions.lane_dimension")),
        &Leaf::Float(2.8)
    );
    for (flag, expected) in [
        ("clear_lane_marking", true),
        ("blurred_lane_marking", false),
        ("no_lane_marking", false),
        ("temporary_lane_marking", false),
    ] {
        assert_eq!(
            leaf(&tree, &format!("{SPEC}.lane_markings.{flag}")),
            &Leaf::Boolean(expected)
        );
    }
    assert_eq!(
        leaf(&tree, "scenery.zone.region_or_state"),
        &Leaf::String("Sweden".into())
    );
}

#[test]
fn speed_above_global_limit_violates_constraint() {
    let ev = evaluator(&ODD1.replace("speed_limit = 15.0", "speed_limit = 31.0"));
    let result = ev.evaluate("odd1").unwrap();
    let violations = result.violations();
    assert_eq!(violations.len(), 1);
    let v = &violations[0];
    assert_eq!(v.kind, ViolationKind::ConstraintViolated);
    assert_eq!(
        v.constraint_text.as_deref(),
        Some("isBetween(0, speed_limit_global)")
    );
    assert_eq!(v.offending_value.as_deref(), Some("31.0"));
    assert_eq!(v.property_path, format!("{SPEC}.speed_limit"));
    assert_eq!(
        v.member.as_deref(),
        Some("ODD.scen_template#Drivable_area_lane_specification.speed_limit")
    );
    let scen = assets::template_asset("scen_template").unwrap().source_text;
    let decl_line = scen
        .lines()
        .position(|l| l.trim_start().starts_with("speed_limit :"))
        .unwrap()
        + 1;
    assert_eq!(v.decl_site.line, decl_line);
    assert_eq!(
        v.decl_site.file_uri.as_ref(),
        "bundled:///scen_template.odd"
    );
    assert_eq!(v.use_site.as_ref().unwrap().line, 16);
}

#[test]
fn missing_direction_is_required() {
    let src: String = ODD1
        .lines()
        .filter(|l| !l.contains("direction_of_travel"))
        .collect::<Vec<_>>()
        .join("\n");
    let result = evaluator(&src).evaluate("odd1").unwrap();
    let v = result.violations();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].kind, ViolationKind::MissingRequired);
    assert_eq!(v[0].property_path, format!("{SPEC}.direction_of_travel"));
}

#[test]
fn omitted_lane_usage_defaults_to_true() {
    let src: String = ODD1
        .lines()
        .filter(|l| !l.contains("lane_usage"))
        .collect::<Vec<_>>()
        .join("\n");
    let tree = evaluator(&src)
        .evaluate("odd1")
        .unwrap()
        .into_result()
        .unwrap();
    assert_eq!(
        leaf(&tree, &format!("{SPEC}.lane_usage")),
        &Leaf::Boolean(true)
    );
}

#[test]
fn violations_are_collected_exhaustively() {
    let src = ODD1
        .replace("speed_limit = 15.0", "speed_limit = 31.0")
        .replace("lane_dimension = 2.8", "lane_dimension = 4.0")
        .replace("lane_usage = true", "lane_usage = true\n bogus = 1")
        .replace("\"right_hand_travel\"", "\"middle\"");
    let result = evaluator(&src).evaluate("odd1").unwrap();
    let mut kinds: Vec<ViolationKind> = result.violations().iter().map(|v| v.kind).collect();
    kinds.sort_by_key(|k| k.to_string());
    assert_eq!(
        kinds,
        [
            ViolationKind::ConstraintViolated,
            ViolationKind::ConstraintViolated,
            ViolationKind::EnumOutOfRange,
            ViolationKind::UnknownProperty
        ]
    );
}

#[test]
fn type_mismatches() {
    let src = ODD1.replace("lane_usage = true", "lane_usage = 1");
    let v = evaluator(&src)
        .evaluate("odd1")
        .unwrap()
        .violations()
        .to_vec();
    assert_eq!(v[0].kind, ViolationKind::TypeMismatch);
    assert_eq!(v[0].property_path, format!("{SPEC}.lane_usage"));

    let src = ODD1.replace("region_or_state = \"Sweden\"", "region_or_state { x = 1 }");
    let v = evaluator(&src)
        .evaluate("odd1")
        .unwrap()
        .violations()
        .to_vec();
    assert_eq!(v[0].kind, ViolationKind::TypeMismatch);

    let src = ODD1.replace("zone {", "zone = 3\n zonex {");
    let v = evaluator(&src)
        .evaluate("odd1")
        .unwrap()
        .violations()
        .to_vec();
    assert!(v
        .iter()
        .any(|v| v.kind == ViolationKind::TypeMismatch && v.property_path == "scenery.zone"));
}

#[test]
fn version_gates() {
    let src = "@ModuleInfo { minToolVersion = \"9.0.0\" }\nclass A { x : Boolean = true }\na : A = new { }";
    let ev = Evaluator::new(&graph(src), "0.25.1").unwrap();
    let v = ev.evaluate("a").unwrap().violations().to_vec();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].kind, ViolationKind::VersionGate);

    // The bundled templates declare 0.25.1.
    let ev = Evaluator::new(&graph(ODD1), "0.25.1").unwrap();
    assert!(ev.evaluate("odd1").unwrap().is_success());
    let ev = Evaluator::new(&graph(ODD1), "0.25.0").unwrap();
    assert_eq!(ev.version_violations().len(), 4);
}

#[test]
fn probability_listing() {
    let src = include_str!("../../tests/fixtures/events.odd");
    let tree = evaluator(src)
        .evaluate("odd_events")
        .unwrap()
        .into_result()
        .unwrap();
    let Leaf::Listing(records) = leaf(&tree, "dynamic.events") else {
        panic!("expected listing");
    };
    assert_eq!(records[0].get("probability"), Some(&Scalar::Float(0.6)));

    let bad = src.replace("probability = 0.6", "probability = 1.5");
    let v = evaluator(&bad)
        .evaluate("odd_events")
        .unwrap()
        .violations()
        .to_vec();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].kind, ViolationKind::ProbabilityRange);
    assert_eq!(v[0].property_path, "dynamic.events[0].probability");
    assert_eq!(v[0].offending_value.as_deref(), Some("1.5"));
}

#[test]
fn amend_overrides_without_touching_base() {
    let (ev, base) = odd1();
    let snapshot = base.clone();
    let path = format!("{SPEC}.lane_usage");
    let amended = ev
        .amend(&base, &block(&[(&path, Literal::Boolean(false))]))
        .into_result()
        .unwrap();
    assert_eq!(leaf(&amended, &path), &Leaf::Boolean(false));
    assert_eq!(leaf(&base, &path), &Leaf::Boolean(true));
    assert_eq!(base, snapshot);
    // Untouched branches are shared, not copied.
    assert!(amended
        .get("environment")
        .unwrap()
        .ptr_eq(base.get("environment").unwrap()));
    assert!(!amended
        .get("scenery")
        .unwrap()
        .ptr_eq(base.get("scenery").unwrap()));
}

#[test]
fn amend_rejects_new_properties() {
    let (ev, base) = odd1();
    let path = format!("{SPEC}.foo");
    let v = ev
        .amend(&base, &block(&[(&path, Literal::Float(1.0))]))
        .violations()
        .to_vec();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].kind, ViolationKind::UnknownProperty);
    assert_eq!(v[0].property_path, path);
}

#[test]
fn empty_amendment_is_identity() {
    let (ev, base) = odd1();
    let same = ev
        .amend(&base, &AmendmentBlock::default())
        .into_result()
        .unwrap();
    assert_eq!(same, base);
    assert!(same.ptr_eq(&base));
}

#[test]
fn amend_checks_constraints_of_result() {
    let (ev, base) = odd1();
    let path = format!("{SPEC}.speed_limit");
    let v = ev
        .amend(&base, &block(&[(&path, Literal::Float(30.5))]))
        .violations()
        .to_vec();
    assert_eq!(v[0].kind, ViolationKind::ConstraintViolated);
    assert_eq!(
        v[0].use_site.as_ref().unwrap().file_uri.as_ref(),
        "test:amend"
    );
}

#[test]
fn constraint_bounds_are_inclusive() {
    let (ev, base) = odd1();
    let dim = format!("{SPEC}.lane_dimensions.lane_dimension");
    let speed = format!("{SPEC}.speed_limit");
    for (path, v) in [(&dim, 2.7), (&dim, 3.2), (&speed, 0.0), (&speed, 30.0)] {
        let r = ev.amend(&base, &block(&[(path, Literal::Float(v))]));
        assert!(r.is_success(), "{path} = {v}");
    }
    for (path, v) in [
        (&dim, 2.7 - 1e-9),
        (&dim, 3.2 + 1e-9),
        (&speed, -1e-9),
        (&speed, 30.0 + 1e-9),
    ] {
        let r = ev.amend(&base, &block(&[(path, Literal::Float(v))]));
        assert_eq!(
            r.violations()[0].kind,
            ViolationKind::ConstraintViolated,
            "{path} = {v}"
        );
    }
}

#[test]
fn check_constraints_on_valid_tree_is_empty() {
    let (ev, tree) = odd1();
    assert!(ev.check_constraints(&tree).is_empty());
}

#[test]
fn unresolved_constant_in_constraint() {
    let src = "class A { x : Float (isBetween(0, nowhere)) = 1 }\na : A = new { }";
    let v = evaluator(src).evaluate("a").unwrap().violations().to_vec();
    assert_eq!(v[0].kind, ViolationKind::TypeMismatch);
}

#[test]
fn const_defaults_resolve() {
    let src =
        "const limit = 12.5\nclass A { x : Float (isBetween(0, limit)) = limit }\na : A = new { }";
    let tree = evaluator(src).evaluate("a").unwrap().into_result().unwrap();
    assert_eq!(leaf(&tree, "x"), &Leaf::Float(12.5));
}

#[test]
fn schema_errors() {
    let bad = graph("class A { x : Missing }\na : A = new { }");
    assert!(matches!(
        Evaluator::new(&bad, TOOL_VERSION),
        Err(crate::Error::Schema(SchemaError::UnresolvedType { .. }))
    ));
    let rec = graph("class A { b : B }\nclass B { a : A }");
    assert!(matches!(
        Evaluator::new(&rec, TOOL_VERSION),
        Err(crate::Error::Schema(SchemaError::RecursiveClass { .. }))
    ));
    let dup = graph("import \"scen_template.pkl\"\nconst speed_limit_global = 1");
    assert!(matches!(
        Evaluator::new(&dup, TOOL_VERSION),
        Err(crate::Error::Schema(SchemaError::DuplicateConst { .. }))
    ));
    assert!(matches!(
        evaluator(ODD1).evaluate("nope"),
        Err(crate::Error::UnknownInstance(_))
    ));
}

#[test]
fn every_declared_property_is_present() {
    let (ev, tree) = odd1();
    let root = ev
        .schema()
        .find_class("ODD.ODD_template.pkl", "odd")
        .unwrap();
    let expected: Vec<String> = ev
        .schema()
        .walk(root)
        .into_iter()
        .filter_map(|n| match n {
            SchemaNode::Leaf { path, .. } => Some(path),
            SchemaNode::Object { .. } => None,
        })
        .collect();
    let actual: Vec<String> = tree.leaves().into_iter().map(|(p, _)| p).collect();
    assert_eq!(actual, expected);
}

#[test]
fn evaluation_is_deterministic() {
    let (_, a) = odd1();
    let (_, b) = odd1();
    assert_eq!(a, b);
}

#[test]
fn values_are_thread_safe() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<ValueTree>();
    assert_send_sync::<Evaluator>();
    assert_send_sync::<ModuleGraph>();

    let (ev, tree) = odd1();
    std::thread::scope(|s| {
        for _ in 0..4 {
            s.spawn(|| assert_eq!(ev.evaluate("odd1").unwrap().value(), Some(&tree)));
        }
    });
}
