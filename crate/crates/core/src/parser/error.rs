use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::SourceSpan;

use super::lexer::Pos;

/// A source location attached to a parse error; `Display` shows `line:col`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorSpan(pub SourceSpan);

impl fmt::Display for ErrorSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.0.file {
            write!(f, "{file}:")?;
        }
        write!(f, "{}:{}", self.0.start_line, self.0.start_col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{span}: {message}")]
    Syntax { span: ErrorSpan, message: String },
    #[error("{span}: `{name}` is already defined")]
    DuplicateDefinition { name: String, span: ErrorSpan },
    #[error("{span}: unknown name `{name}`")]
    UnknownName { name: String, span: ErrorSpan },
    #[error("{span}: `{name}` takes {expected} argument(s) but {found} were given")]
    ArityMismatch { name: String, expected: usize, found: usize, span: ErrorSpan },
    #[error("{span}: variable `{var}` is free in the body of `{name}` but is not a parameter")]
    NotAParameter { name: String, var: String, span: ErrorSpan },
}

impl ParseError {
    pub fn span(&self) -> &SourceSpan {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::DuplicateDefinition { span, .. }
            | ParseError::UnknownName { span, .. }
            | ParseError::ArityMismatch { span, .. }
            | ParseError::NotAParameter { span, .. } => &span.0,
        }
    }

    /// A short machine-readable kind.
    pub fn kind(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "syntax",
            ParseError::DuplicateDefinition { .. } => "duplicate-definition",
            ParseError::UnknownName { .. } => "unknown-name",
            ParseError::ArityMismatch { .. } => "arity-mismatch",
            ParseError::NotAParameter { .. } => "not-a-parameter",
        }
    }

    pub fn message(&self) -> String {
        let full = self.to_string();
        let prefix = format!("{}: ", ErrorSpan(self.span().clone()));
        full.strip_prefix(&prefix).map(str::to_string).unwrap_or(full)
    }

    pub(crate) fn syntax_at(start: Pos, end: Pos, message: String) -> ParseError {
        ParseError::Syntax { span: make_span(None, start, end), message }
    }

    pub(crate) fn set_file(&mut self, file: Option<Arc<str>>) {
        let span = match self {
            ParseError::Syntax { span, .. }
            | ParseError::DuplicateDefinition { span, .. }
            | ParseError::UnknownName { span, .. }
            | ParseError::ArityMismatch { span, .. }
            | ParseError::NotAParameter { span, .. } => span,
        };
        if span.0.file.is_none() {
            span.0.file = file;
        }
    }
}

pub(crate) fn make_span(file: Option<Arc<str>>, start: Pos, end: Pos) -> ErrorSpan {
    ErrorSpan(SourceSpan {
        file,
        start_line: start.line,
        start_col: start.col,
        end_line: end.line,
        end_col: end.col,
    })
}
