mod common;

use oddl_core::assets::{load_standard_template, standard_templates};
use oddl_core::eval::ClassId;
use oddl_core::syntax::AmendmentBlock;
use oddl_core::{EvalResult, Evaluator, ViolationKind, TOOL_VERSION};

#[test]
fn every_template_resolves_and_self_validates() {
    assert_eq!(standard_templates().len(), 4);
    for asset in standard_templates() {
        let graph = load_standard_template(asset.name).unwrap();
        let ev = Evaluator::new(&graph, TOOL_VERSION).unwrap();
        assert!(ev.version_violations().is_empty(), "{}", asset.name);
        let ids: Vec<ClassId> = ev.schema().classes().map(|(id, _)| id).collect();
        assert!(!ids.is_empty());
        for id in ids {
            // Defaults alone may leave required fields unset but never
            // break a constraint or a type.
            if let EvalResult::Failure(vs) = ev.instantiate(id, &AmendmentBlock::default()) {
                for v in vs {
                    assert_eq!(
                        v.kind,
                        ViolationKind::MissingRequired,
                        "{}: {v}",
                        asset.name
                    );
                }
            }
        }
    }
}

#[test]
fn templates_reject_older_tools() {
    let graph = load_standard_template("odd_template").unwrap();
    let ev = Evaluator::new(&graph, "0.25.0").unwrap();
    assert_eq!(ev.version_violations().len(), 4);
    let ev = Evaluator::new(&graph, "0.25.1").unwrap();
    assert!(ev.version_violations().is_empty());
}
