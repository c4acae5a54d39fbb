//! Model ingestion: the `.behavior` DSL and the JSON interchange format.

mod dsl;
mod json;

use std::fmt;
use std::path::{Path, PathBuf};

pub use dsl::{parse_dsl, print_dsl};
pub use json::{parse_json, print_json};

use crate::model::ActivityModel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: PathBuf,
    /// 1-based.
    pub line: usize,
    /// 1-based, counted in characters.
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file.display(), self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErrorLocation {
    Span(SourceSpan),
    /// RFC 6901 pointer into a JSON document; the empty string is the root.
    Pointer(String),
}

impl fmt::Display for ErrorLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorLocation::Span(span) => span.fmt(f),
            ErrorLocation::Pointer(p) if p.is_empty() => f.write_str("<json root>"),
            ErrorLocation::Pointer(p) => write!(f, "<json {p}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub location: ErrorLocation,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn new(location: ErrorLocation, message: impl Into<String>) -> ParseError {
        ParseError {
            location,
            message: message.into(),
            expected: Vec::new(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// Errors from [`load_model`].
#[derive(Debug)]
pub enum LoadError {
    Io(PathBuf, std::io::Error),
    Parse(Vec<ParseError>),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io(path, err) => write!(f, "{}: cannot read file: {err}", path.display()),
            LoadError::Parse(errors) => {
                for (i, e) in errors.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for LoadError {}

/// Reads a model file, choosing the JSON reader for `.json` files and the
/// DSL reader otherwise.
pub fn load_model(path: &Path) -> Result<ActivityModel, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(path.to_path_buf(), e))?;
    let is_json = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
    if is_json {
        parse_json(&text).map_err(LoadError::Parse)
    } else {
        parse_dsl(&text, path).map_err(LoadError::Parse)
    }
}
