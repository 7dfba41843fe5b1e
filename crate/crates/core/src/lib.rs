//! ODDL: a small configuration language for operational design domains.
//!
//! Source files are tokenized and parsed ([`syntax`]), linked with their
//! imports ([`imports`]), evaluated into immutable [`ValueTree`]s
//! ([`eval`]), rendered ([`render`]) and compared ([`analysis`]).

pub mod analysis;
pub mod assets;
pub mod diagnostics;
mod error;
pub mod eval;
pub mod imports;
pub mod render;
pub mod span;
pub mod syntax;

pub use error::Error;
pub use eval::{EvalResult, Evaluator, ValueTree, Violation, ViolationKind, TOOL_VERSION};
pub use imports::{ImportPolicy, ModuleGraph};
