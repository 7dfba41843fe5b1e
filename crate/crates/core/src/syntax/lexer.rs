use std::fmt;
use std::sync::Arc;

use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Ident,
    FloatLit,
    StringLit,
    BoolLit,
    Punct,
    Annotation,
    Comment,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            TokenKind::Keyword => "keyword",
            TokenKind::Ident => "identifier",
            TokenKind::FloatLit => "number",
            TokenKind::StringLit => "string",
            TokenKind::BoolLit => "boolean",
            TokenKind::Punct => "punctuation",
            TokenKind::Annotation => "annotation",
            TokenKind::Comment => "comment",
            TokenKind::Eof => "end of file",
        };
        f.write_str(name)
    }
}

pub const KEYWORDS: &[&str] = &["module", "import", "const", "typealias", "class", "new"];

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Exact source text of the token, quotes and escapes included.
    pub lexeme: String,
    pub span: SourceSpan,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        self.kind == TokenKind::Punct && self.lexeme == p
    }

    pub fn is_keyword(&self, k: &str) -> bool {
        self.kind == TokenKind::Keyword && self.lexeme == k
    }

    /// Decoded value of a string literal token.
    pub fn string_value(&self) -> Option<String> {
        if self.kind != TokenKind::StringLit {
            return None;
        }
        let inner = &self.lexeme[1..self.lexeme.len() - 1];
        let mut out = String::with_capacity(inner.len());
        let mut chars = inner.chars();
        while let Some(c) = chars.next() {
            if c == '\\' {
                out.extend(chars.next());
            } else {
                out.push(c);
            }
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LexError {
    #[error("illegal character {ch:?} ({span})")]
    IllegalChar { ch: char, span: SourceSpan },
    #[error("unterminated string literal ({span})")]
    UnterminatedString { span: SourceSpan },
    #[error("unsupported escape sequence \\{ch} ({span})")]
    BadEscape { ch: char, span: SourceSpan },
}

impl LexError {
    pub fn span(&self) -> &SourceSpan {
        match self {
            LexError::IllegalChar { span, .. }
            | LexError::UnterminatedString { span }
            | LexError::BadEscape { span, .. } => span,
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    uri: Arc<str>,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_second(&self) -> Option<char> {
        self.peek_nth(1)
    }

    fn peek_nth(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat_while(&mut self, pred: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
    }

    fn span_from(&self, start: (usize, usize, usize)) -> SourceSpan {
        let (offset, line, column) = start;
        let length = self.src[offset..self.pos].chars().count();
        SourceSpan::new(self.uri.clone(), line, column, length, offset)
    }

    fn mark(&self) -> (usize, usize, usize) {
        (self.pos, self.line, self.column)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `source` into tokens. Comment tokens are kept; the stream always
/// ends with a single `Eof` token.
pub fn tokenize(source: &str, file_uri: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor {
        src: source,
        uri: Arc::from(file_uri),
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        let start = cur.mark();
        let kind = match c {
            ' ' | '\t' | '\r' | '\n' => {
                cur.bump();
                continue;
            }
            '#' => {
                cur.eat_while(|c| c != '\n');
                TokenKind::Comment
            }
            '/' if cur.peek_second() == Some('/') => {
                cur.eat_while(|c| c != '\n');
                TokenKind::Comment
            }
            '"' => {
                lex_string(&mut cur, start)?;
                TokenKind::StringLit
            }
            '@' if cur.peek_second().is_some_and(is_ident_start) => {
                cur.bump();
                cur.eat_while(is_ident_continue);
                TokenKind::Annotation
            }
            c if c.is_ascii_digit() => {
                cur.eat_while(|c| c.is_ascii_digit());
                if cur.peek() == Some('.') && cur.peek_second().is_some_and(|c| c.is_ascii_digit())
                {
                    cur.bump();
                    cur.eat_while(|c| c.is_ascii_digit());
                }
                if matches!(cur.peek(), Some('e' | 'E')) {
                    let sign = usize::from(matches!(cur.peek_second(), Some('+' | '-')));
                    if cur.peek_nth(1 + sign).is_some_and(|c| c.is_ascii_digit()) {
                        for _ in 0..=sign {
                            cur.bump();
                        }
                        cur.eat_while(|c| c.is_ascii_digit());
                    }
                }
                TokenKind::FloatLit
            }
            c if is_ident_start(c) => {
                cur.eat_while(is_ident_continue);
                let word = &source[start.0..cur.pos];
                if KEYWORDS.contains(&word) {
                    TokenKind::Keyword
                } else if word == "true" || word == "false" {
                    TokenKind::BoolLit
                } else {
                    TokenKind::Ident
                }
            }
            '{' | '}' | '(' | ')' | '=' | ':' | ',' | '.' | '|' | ';' | '-' => {
                cur.bump();
                TokenKind::Punct
            }
            other => {
                cur.bump();
                return Err(LexError::IllegalChar {
                    ch: other,
                    span: cur.span_from(start),
                });
            }
        };
        tokens.push(Token {
            kind,
            lexeme: source[start.0..cur.pos].to_string(),
            span: cur.span_from(start),
        });
    }

    let eof = cur.mark();
    tokens.push(Token {
        kind: TokenKind::Eof,
        lexeme: String::new(),
        span: cur.span_from(eof),
    });
    Ok(tokens)
}

fn lex_string(cur: &mut Cursor<'_>, start: (usize, usize, usize)) -> Result<(), LexError> {
    cur.bump();
    loop {
        match cur.peek() {
            None | Some('\n') => {
                return Err(LexError::UnterminatedString {
                    span: cur.span_from(start),
                })
            }
            Some('"') => {
                cur.bump();
                return Ok(());
            }
            Some('\\') => {
                let esc = cur.mark();
                cur.bump();
                match cur.peek() {
                    Some('"') | Some('\\') => {
                        cur.bump();
                    }
                    Some(ch) if ch != '\n' => {
                        cur.bump();
                        return Err(LexError::BadEscape {
                            ch,
                            span: cur.span_from(esc),
                        });
                    }
                    _ => {
                        return Err(LexError::UnterminatedString {
                            span: cur.span_from(start),
                        })
                    }
                }
            }
            Some(_) => {
                cur.bump();
            }
        }
    }
}
