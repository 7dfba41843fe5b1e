#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use oddl_core::eval::{ClassId, LeafType, SchemaNode};
use oddl_core::imports::{load_file, FsLoader};
use oddl_core::span::SourceSpan;
use oddl_core::syntax::{AmendmentBlock, Literal};
use oddl_core::{Evaluator, ImportPolicy, ValueTree, TOOL_VERSION};
use proptest::prelude::*;

pub const LANE_SPEC: &str = "scenery.drivable_area.drivable_area_lane_specification";

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn evaluator(name: &str) -> Evaluator {
    let path = fixture(name);
    let graph = load_file(&path, &FsLoader, &ImportPolicy::for_entry(&path)).unwrap();
    Evaluator::new(&graph, TOOL_VERSION).unwrap()
}

pub fn eval_fixture(name: &str, instance: &str) -> ValueTree {
    evaluator(name)
        .evaluate(instance)
        .unwrap()
        .into_result()
        .unwrap()
}

pub fn odd1() -> ValueTree {
    eval_fixture("ODD1_test.odd", "odd1")
}

/// Class of the single instance declared by the entry module.
pub fn root_class(ev: &Evaluator) -> ClassId {
    ev.schema().instances()[0].1
}

pub fn span() -> SourceSpan {
    SourceSpan::new(Arc::from("test:generated"), 1, 1, 0, 0)
}

pub fn block(assignments: &[(String, Literal)]) -> AmendmentBlock {
    AmendmentBlock::from_paths(
        assignments.iter().map(|(p, l)| (p.as_str(), l.clone())),
        &span(),
    )
}

/// Scalar leaves of the class tree rooted at `root`.
pub fn scalar_leaves(ev: &Evaluator, root: ClassId) -> Vec<(String, LeafType)> {
    ev.schema()
        .walk(root)
        .into_iter()
        .filter_map(|node| match node {
            SchemaNode::Leaf { path, ty, .. } if ty != LeafType::Listing => Some((path, ty)),
            _ => None,
        })
        .collect()
}

/// A value the schema accepts for a leaf of type `ty`.
pub fn legal_value(ty: &LeafType) -> BoxedStrategy<Literal> {
    match ty {
        LeafType::Float {
            bounds: Some((lo, hi)),
        } => {
            let (lo, hi) = (*lo, *hi);
            prop_oneof![Just(lo), Just(hi), lo..=hi]
                .prop_map(Literal::Float)
                .boxed()
        }
        LeafType::Float { bounds: None } => (-1e3..1e3f64).prop_map(Literal::Float).boxed(),
        LeafType::Boolean => any::<bool>().prop_map(Literal::Boolean).boxed(),
        LeafType::String => "[A-Za-z][A-Za-z ]{0,11}".prop_map(Literal::String).boxed(),
        LeafType::Enum { alternatives } => proptest::sample::select(alternatives.clone())
            .prop_map(Literal::String)
            .boxed(),
        LeafType::Listing => unreachable!("listings are not generated"),
    }
}

/// Legal assignments to a random subset of distinct leaves.
pub fn legal_amendment(
    leaves: Vec<(String, LeafType)>,
    max: usize,
) -> BoxedStrategy<Vec<(String, Literal)>> {
    proptest::sample::subsequence(leaves, 0..=max)
        .prop_flat_map(|chosen| {
            chosen
                .into_iter()
                .map(|(path, ty)| legal_value(&ty).prop_map(move |v| (path.clone(), v)))
                .collect::<Vec<_>>()
        })
        .boxed()
}
