use std::fmt;
use std::sync::Arc;

/// Location of a piece of source text.
///
/// `line` and `column` are 1-based and count characters; `length` is the
/// number of characters covered. `offset` is the byte offset into the file
/// and is kept so diagnostics can slice the original text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub file_uri: Arc<str>,
    pub line: usize,
    pub column: usize,
    pub length: usize,
    pub offset: usize,
}

impl SourceSpan {
    pub fn new(
        file_uri: Arc<str>,
        line: usize,
        column: usize,
        length: usize,
        offset: usize,
    ) -> Self {
        debug_assert!(line >= 1 && column >= 1);
        Self {
            file_uri,
            line,
            column,
            length,
            offset,
        }
    }

    /// Span covering `self` through the end of `end`. Both must be in the same file.
    pub fn to(&self, end: &SourceSpan, source: &str) -> SourceSpan {
        let end_byte = end.offset + byte_len(source, end.offset, end.length);
        let length = source
            .get(self.offset..end_byte)
            .map(|s| s.chars().count())
            .unwrap_or(self.length);
        SourceSpan {
            length,
            ..self.clone()
        }
    }

    /// The text this span covers in `source`, if the offsets are in range.
    pub fn slice<'a>(&self, source: &'a str) -> Option<&'a str> {
        let len = byte_len(source, self.offset, self.length);
        source.get(self.offset..self.offset + len)
    }
}

fn byte_len(source: &str, offset: usize, chars: usize) -> usize {
    source
        .get(offset..)
        .map(|rest| rest.chars().take(chars).map(char::len_utf8).sum())
        .unwrap_or(0)
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}, line {}, column {}",
            self.file_uri, self.line, self.column
        )
    }
}

/// `file:///` URI for a local path.
pub fn file_uri(path: &std::path::Path) -> String {
    let text = path.to_string_lossy().replace('\\', "/");
    if text.starts_with('/') {
        format!("file://{text}")
    } else {
        format!("file:///{text}")
    }
}

/// URI used for templates shipped inside the toolkit.
pub fn bundled_uri(file_name: &str) -> String {
    format!("bundled:///{file_name}")
}
