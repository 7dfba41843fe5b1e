//! Recursive-descent parser for ODDL modules.
//!
//! Grammar:
//!
//! ```text
//! module      := annotation? ("module" dotted-name)? import* decl*
//! annotation  := "@ModuleInfo" "{" ("minToolVersion" | "minPklVersion") "=" STRING "}"
//! import      := "import" STRING
//! decl        := const | typealias | class | instance
//! const       := "const" IDENT "=" literal
//! typealias   := "typealias" IDENT "=" STRING ("|" STRING)*
//! class       := "class" IDENT "{" property* "}"
//! property    := IDENT ":" typeref constraint? ("=" (literal | IDENT))?
//! typeref     := "Float" | "Boolean" | "String" | "Listing" | dotted-name
//! constraint  := "(" "isBetween" "(" arg "," arg ")" ")"
//! instance    := IDENT ":" dotted-name "=" "new" "{" amendment* "}"
//! amendment   := IDENT "=" literal | IDENT "{" (amendment* | element*) "}"
//! element     := "new" "{" (IDENT "=" literal ";"?)* "}"
//! literal     := "-"? NUMBER | STRING | BOOL
//! ```

use std::collections::HashMap;

use super::ast::*;
use super::lexer::{LexError, Token, TokenKind};
use crate::span::SourceSpan;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("expected {expected}, found {found_kind} `{found}` ({span})")]
    Unexpected {
        expected: String,
        found_kind: TokenKind,
        found: String,
        span: SourceSpan,
    },
    #[error("unclosed '{{' opened at {open}")]
    Unclosed { open: SourceSpan },
    #[error("duplicate {what} `{name}` ({span}); first declared at {first}")]
    Duplicate {
        what: &'static str,
        name: String,
        span: SourceSpan,
        first: Box<SourceSpan>,
    },
    #[error("constraint on property `{property}` of non-Float type ({span})")]
    ConstraintOnNonFloat { property: String, span: SourceSpan },
    #[error("unknown @ModuleInfo key `{key}` ({span})")]
    UnknownAnnotationKey { key: String, span: SourceSpan },
}

impl ParseError {
    pub fn span(&self) -> &SourceSpan {
        match self {
            ParseError::Lex(e) => e.span(),
            ParseError::Unexpected { span, .. }
            | ParseError::Duplicate { span, .. }
            | ParseError::ConstraintOnNonFloat { span, .. }
            | ParseError::UnknownAnnotationKey { span, .. } => span,
            ParseError::Unclosed { open } => open,
        }
    }
}

type PResult<T> = Result<T, ParseError>;

/// Parses a token stream produced by [`tokenize`](super::tokenize). Comment
/// tokens are dropped before parsing.
pub fn parse_module(tokens: &[Token]) -> PResult<ModuleAst> {
    let tokens: Vec<&Token> = tokens
        .iter()
        .filter(|t| t.kind != TokenKind::Comment)
        .collect();
    assert!(
        tokens.last().is_some_and(|t| t.kind == TokenKind::Eof),
        "token stream must end with EOF"
    );
    Parser { tokens, pos: 0 }.module()
}

struct Parser<'t> {
    tokens: Vec<&'t Token>,
    pos: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        self.tokens[self.pos]
    }

    fn peek_at(&self, n: usize) -> &'t Token {
        self.tokens[(self.pos + n).min(self.tokens.len() - 1)]
    }

    fn advance(&mut self) -> &'t Token {
        let tok = self.tokens[self.pos];
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    fn unexpected<T>(&self, expected: impl Into<String>) -> PResult<T> {
        let tok = self.peek();
        Err(ParseError::Unexpected {
            expected: expected.into(),
            found_kind: tok.kind,
            found: tok.lexeme.clone(),
            span: tok.span.clone(),
        })
    }

    fn expect_punct(&mut self, p: &str) -> PResult<&'t Token> {
        if self.peek().is_punct(p) {
            Ok(self.advance())
        } else {
            self.unexpected(format!("`{p}`"))
        }
    }

    fn expect_kind(&mut self, kind: TokenKind) -> PResult<&'t Token> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            self.unexpected(kind.to_string())
        }
    }

    fn ident(&mut self) -> PResult<&'t Token> {
        self.expect_kind(TokenKind::Ident)
    }

    /// Consumes the closing brace of a block opened at `open`.
    fn close_brace(&mut self, open: &Token) -> PResult<()> {
        if self.peek().kind == TokenKind::Eof {
            return Err(ParseError::Unclosed {
                open: open.span.clone(),
            });
        }
        self.expect_punct("}").map(|_| ())
    }

    fn dotted_name(&mut self) -> PResult<Vec<String>> {
        let mut parts = vec![self.ident()?.lexeme.clone()];
        while self.peek().is_punct(".") {
            self.advance();
            parts.push(self.ident()?.lexeme.clone());
        }
        Ok(parts)
    }

    fn module(mut self) -> PResult<ModuleAst> {
        let min_tool_version = if self.peek().kind == TokenKind::Annotation {
            Some(self.annotation()?)
        } else {
            None
        };
        let module_name = if self.peek().is_keyword("module") {
            self.advance();
            self.dotted_name()?.join(".")
        } else {
            module_name_from_uri(&self.peek().span.file_uri)
        };

        let mut ast = ModuleAst {
            module_name,
            min_tool_version,
            imports: Vec::new(),
            consts: Vec::new(),
            type_aliases: Vec::new(),
            classes: Vec::new(),
            instances: Vec::new(),
        };

        while self.peek().is_keyword("import") {
            self.advance();
            let tok = self.expect_kind(TokenKind::StringLit)?;
            ast.imports.push(ImportDecl {
                path: tok.string_value().unwrap_or_default(),
                span: tok.span.clone(),
            });
        }

        let mut names: HashMap<String, SourceSpan> = HashMap::new();
        loop {
            let tok = self.peek();
            let (name, span) = match tok.kind {
                TokenKind::Eof => break,
                TokenKind::Keyword if tok.lexeme == "const" => {
                    let c = self.const_decl()?;
                    let key = (c.name.clone(), c.span.clone());
                    ast.consts.push(c);
                    key
                }
                TokenKind::Keyword if tok.lexeme == "typealias" => {
                    let a = self.type_alias()?;
                    let key = (a.name.clone(), a.span.clone());
                    ast.type_aliases.push(a);
                    key
                }
                TokenKind::Keyword if tok.lexeme == "class" => {
                    let c = self.class_decl()?;
                    let key = (c.name.clone(), c.span.clone());
                    ast.classes.push(c);
                    key
                }
                TokenKind::Ident => {
                    let i = self.instance()?;
                    let key = (i.name.clone(), i.span.clone());
                    ast.instances.push(i);
                    key
                }
                _ => return self.unexpected("declaration"),
            };
            if let Some(first) = names.get(&name) {
                return Err(ParseError::Duplicate {
                    what: "top-level name",
                    name,
                    span,
                    first: Box::new(first.clone()),
                });
            }
            names.insert(name, span);
        }
        Ok(ast)
    }

    fn annotation(&mut self) -> PResult<VersionAnnotation> {
        let tok = self.advance();
        if tok.lexeme != "@ModuleInfo" {
            return Err(ParseError::UnknownAnnotationKey {
                key: tok.lexeme.clone(),
                span: tok.span.clone(),
            });
        }
        let open = self.expect_punct("{")?;
        let key = self.ident()?;
        if key.lexeme != "minToolVersion" && key.lexeme != "minPklVersion" {
            return Err(ParseError::UnknownAnnotationKey {
                key: key.lexeme.clone(),
                span: key.span.clone(),
            });
        }
        self.expect_punct("=")?;
        let value = self.expect_kind(TokenKind::StringLit)?;
        self.close_brace(open)?;
        Ok(VersionAnnotation {
            value: value.string_value().unwrap_or_default(),
            span: value.span.clone(),
        })
    }

    fn literal(&mut self) -> PResult<Literal> {
        let tok = self.peek();
        match tok.kind {
            TokenKind::FloatLit => {
                self.advance();
                Ok(Literal::Float(parse_number(tok)))
            }
            TokenKind::Punct
                if tok.lexeme == "-" && self.peek_at(1).kind == TokenKind::FloatLit =>
            {
                self.advance();
                Ok(Literal::Float(-parse_number(self.advance())))
            }
            TokenKind::StringLit => {
                self.advance();
                Ok(Literal::String(tok.string_value().unwrap_or_default()))
            }
            TokenKind::BoolLit => {
                self.advance();
                Ok(Literal::Boolean(tok.lexeme == "true"))
            }
            _ => self.unexpected("literal"),
        }
    }

    fn value_expr(&mut self) -> PResult<ValueExpr> {
        if self.peek().kind == TokenKind::Ident {
            Ok(ValueExpr::ConstRef(self.advance().lexeme.clone()))
        } else {
            self.literal().map(ValueExpr::Literal)
        }
    }

    fn const_decl(&mut self) -> PResult<ConstDecl> {
        self.advance();
        let name = self.ident()?;
        self.expect_punct("=")?;
        let value = self.literal()?;
        Ok(ConstDecl {
            name: name.lexeme.clone(),
            value,
            span: name.span.clone(),
        })
    }

    fn type_alias(&mut self) -> PResult<TypeAliasDecl> {
        self.advance();
        let name = self.ident()?;
        self.expect_punct("=")?;
        let mut alternatives: Vec<String> = Vec::new();
        loop {
            let tok = self.expect_kind(TokenKind::StringLit)?;
            let alt = tok.string_value().unwrap_or_default();
            if alternatives.contains(&alt) {
                return Err(ParseError::Duplicate {
                    what: "alias alternative",
                    name: alt,
                    span: tok.span.clone(),
                    first: Box::new(name.span.clone()),
                });
            }
            alternatives.push(alt);
            if !self.peek().is_punct("|") {
                break;
            }
            self.advance();
        }
        Ok(TypeAliasDecl {
            name: name.lexeme.clone(),
            alternatives,
            span: name.span.clone(),
        })
    }

    fn class_decl(&mut self) -> PResult<ClassDecl> {
        self.advance();
        let name = self.ident()?;
        let open = self.expect_punct("{")?;
        let mut properties: Vec<PropertyDecl> = Vec::new();
        while self.peek().kind == TokenKind::Ident {
            let prop = self.property()?;
            if let Some(first) = properties.iter().find(|p| p.name == prop.name) {
                return Err(ParseError::Duplicate {
                    what: "property",
                    name: prop.name,
                    span: prop.span,
                    first: Box::new(first.span.clone()),
                });
            }
            properties.push(prop);
        }
        self.close_brace(open)?;
        Ok(ClassDecl {
            name: name.lexeme.clone(),
            properties,
            span: name.span.clone(),
        })
    }

    fn property(&mut self) -> PResult<PropertyDecl> {
        let name = self.advance();
        self.expect_punct(":")?;
        let declared_type = self.type_ref()?;
        let constraint = if self.peek().is_punct("(") {
            let c = self.constraint()?;
            if declared_type != TypeRef::Float {
                return Err(ParseError::ConstraintOnNonFloat {
                    property: name.lexeme.clone(),
                    span: c.span,
                });
            }
            Some(c)
        } else {
            None
        };
        let default = if self.peek().is_punct("=") {
            self.advance();
            Some(self.value_expr()?)
        } else {
            None
        };
        Ok(PropertyDecl {
            name: name.lexeme.clone(),
            declared_type,
            constraint,
            default,
            span: name.span.clone(),
        })
    }

    fn type_ref(&mut self) -> PResult<TypeRef> {
        let parts = self.dotted_name()?;
        Ok(match parts.as_slice() {
            [single] if single == "Float" => TypeRef::Float,
            [single] if single == "Boolean" => TypeRef::Boolean,
            [single] if single == "String" => TypeRef::String,
            [single] if single == "Listing" => TypeRef::Listing,
            _ => TypeRef::Named(parts),
        })
    }

    fn constraint(&mut self) -> PResult<ConstraintExpr> {
        self.expect_punct("(")?;
        let start = self.pos;
        let head = self.peek();
        if head.kind != TokenKind::Ident || head.lexeme != "isBetween" {
            return self.unexpected("`isBetween`");
        }
        self.advance();
        self.expect_punct("(")?;
        let low = self.value_expr()?;
        self.expect_punct(",")?;
        let high = self.value_expr()?;
        let close = self.expect_punct(")")?;
        let end = self.pos;
        self.expect_punct(")")?;

        let used = &self.tokens[start..end];
        let mut source_text = String::new();
        for (i, tok) in used.iter().enumerate() {
            if i > 0 {
                let prev = used[i - 1];
                if tok.span.offset > prev.span.offset + prev.lexeme.len() {
                    source_text.push(' ');
                }
            }
            source_text.push_str(&tok.lexeme);
        }
        let span = SourceSpan {
            length: close.span.offset + close.lexeme.len() - head.span.offset,
            ..head.span.clone()
        };
        Ok(ConstraintExpr {
            kind: ConstraintKind::IsBetween,
            low,
            high,
            source_text,
            span,
        })
    }

    fn instance(&mut self) -> PResult<InstanceDecl> {
        let name = self.advance();
        self.expect_punct(":")?;
        let target_type = self.dotted_name()?;
        self.expect_punct("=")?;
        if !self.peek().is_keyword("new") {
            return self.unexpected("`new`");
        }
        self.advance();
        let open = self.expect_punct("{")?;
        let amendment = self.amendment_body(open)?;
        Ok(InstanceDecl {
            name: name.lexeme.clone(),
            target_type,
            amendment,
            span: name.span.clone(),
        })
    }

    /// Parses amendment entries up to and including the closing brace.
    fn amendment_body(&mut self, open: &Token) -> PResult<AmendmentBlock> {
        let mut block = AmendmentBlock::default();
        while self.peek().kind == TokenKind::Ident {
            let name = self.advance();
            let value = if self.peek().is_punct("=") {
                self.advance();
                AmendValue::Leaf(self.literal()?)
            } else if self.peek().is_punct("{") {
                let inner_open = self.advance();
                if self.peek().is_keyword("new") {
                    AmendValue::Listing(self.listing_elements(inner_open)?)
                } else {
                    AmendValue::Block(self.amendment_body(inner_open)?)
                }
            } else {
                return self.unexpected("`=` or `{`");
            };
            if let Some(first) = block.entry(&name.lexeme) {
                return Err(ParseError::Duplicate {
                    what: "amendment entry",
                    name: name.lexeme.clone(),
                    span: name.span.clone(),
                    first: Box::new(first.span.clone()),
                });
            }
            block.entries.push(AmendEntry {
                name: name.lexeme.clone(),
                value,
                span: name.span.clone(),
            });
        }
        self.close_brace(open)?;
        Ok(block)
    }

    fn listing_elements(&mut self, open: &Token) -> PResult<Vec<RecordLit>> {
        let mut records = Vec::new();
        while self.peek().is_keyword("new") {
            let new_tok = self.advance();
            let rec_open = self.expect_punct("{")?;
            let mut fields: Vec<(String, Literal)> = Vec::new();
            while self.peek().kind == TokenKind::Ident {
                let field = self.advance();
                self.expect_punct("=")?;
                let value = self.literal()?;
                if fields.iter().any(|(n, _)| *n == field.lexeme) {
                    return Err(ParseError::Duplicate {
                        what: "record field",
                        name: field.lexeme.clone(),
                        span: field.span.clone(),
                        first: Box::new(new_tok.span.clone()),
                    });
                }
                fields.push((field.lexeme.clone(), value));
                if self.peek().is_punct(";") {
                    self.advance();
                }
            }
            self.close_brace(rec_open)?;
            records.push(RecordLit {
                fields,
                span: new_tok.span.clone(),
            });
        }
        self.close_brace(open)?;
        Ok(records)
    }
}

fn parse_number(tok: &Token) -> f64 {
    // The lexer only produces digit runs with an optional fraction.
    tok.lexeme.parse().expect("numeric lexeme")
}

fn module_name_from_uri(uri: &str) -> String {
    let file = uri.rsplit('/').next().unwrap_or(uri);
    file.split_once('.')
        .map(|(stem, _)| stem)
        .unwrap_or(file)
        .to_string()
}
