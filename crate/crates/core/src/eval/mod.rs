mod evaluate;
mod schema;
mod value;
mod version;
mod violation;

pub use evaluate::{amend, check_constraints, evaluate, Evaluator, TOOL_VERSION};
pub use schema::{
    AliasId, AliasInfo, ClassId, ClassInfo, ConstEnv, LeafType, ModuleGate, PropType, PropertyInfo,
    Schema, SchemaError, SchemaNode,
};
pub(crate) use value::join_path;
pub use value::{format_float, ClassTag, Leaf, ObjectNode, Record, Scalar, ValueTree};
pub use version::check_version_gate;
pub use violation::{EvalResult, Violation, ViolationKind};

#[cfg(test)]
mod tests;
