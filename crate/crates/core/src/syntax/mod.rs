mod ast;
mod lexer;
mod parser;
mod print;

pub use ast::*;
pub use lexer::{tokenize, LexError, Token, TokenKind, KEYWORDS};
pub use parser::{parse_module, ParseError};
pub use print::render_source;

/// Tokenizes and parses `source` in one step.
pub fn parse_source(source: &str, file_uri: &str) -> Result<ModuleAst, ParseError> {
    let tokens = tokenize(source, file_uri)?;
    parse_module(&tokens)
}
