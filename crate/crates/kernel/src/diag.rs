//! Diagnostics with stable error codes and source spans.

use std::fmt;
use std::sync::Arc;

/// Stable machine-readable error codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    /// Type mismatch, including failed conversion.
    Mismatch,
    Unbound,
    CannotInfer,
    FuelExhausted,
    Syntax,
    Duplicate,
    ImportCycle,
    Lexical,
    /// A large type used where an element of `U` is required.
    Universe,
    ExpectedPi,
    ExpectedSigma,
    ExpectedId,
    ExpectedW,
    /// Forbidden constant in a file that must avoid it.
    Lint,
    Internal,
    ImportNotFound,
}

impl ErrorCode {
    pub const ALL: [ErrorCode; 16] = [
        ErrorCode::Mismatch,
        ErrorCode::Unbound,
        ErrorCode::CannotInfer,
        ErrorCode::FuelExhausted,
        ErrorCode::Syntax,
        ErrorCode::Duplicate,
        ErrorCode::ImportCycle,
        ErrorCode::Lexical,
        ErrorCode::Universe,
        ErrorCode::ExpectedPi,
        ErrorCode::ExpectedSigma,
        ErrorCode::ExpectedId,
        ErrorCode::ExpectedW,
        ErrorCode::Lint,
        ErrorCode::Internal,
        ErrorCode::ImportNotFound,
    ];

    pub fn code(self) -> &'static str {
        match self {
            ErrorCode::Mismatch => "E001",
            ErrorCode::Unbound => "E002",
            ErrorCode::CannotInfer => "E003",
            ErrorCode::FuelExhausted => "E004",
            ErrorCode::Syntax => "E005",
            ErrorCode::Duplicate => "E006",
            ErrorCode::ImportCycle => "E007",
            ErrorCode::Lexical => "E008",
            ErrorCode::Universe => "E009",
            ErrorCode::ExpectedPi => "E010",
            ErrorCode::ExpectedSigma => "E011",
            ErrorCode::ExpectedId => "E012",
            ErrorCode::ExpectedW => "E013",
            ErrorCode::Lint => "E014",
            ErrorCode::Internal => "E015",
            ErrorCode::ImportNotFound => "E016",
        }
    }

    pub fn from_code(s: &str) -> Option<ErrorCode> {
        Self::ALL.iter().copied().find(|c| c.code() == s)
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// 1-based line and byte column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Span {
    pub file: Arc<str>,
    pub start: Pos,
    pub end: Pos,
}

impl Span {
    pub fn new(file: Arc<str>, start: Pos, end: Pos) -> Span {
        Span { file, start, end }
    }

    /// Smallest span covering both.
    pub fn join(&self, other: &Span) -> Span {
        Span {
            file: self.file.clone(),
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.start.line, self.start.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: ErrorCode,
    pub message: String,
    pub span: Option<Span>,
    pub expected: Option<String>,
    pub actual: Option<String>,
    pub notes: Vec<String>,
}

impl Diagnostic {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            code,
            message: message.into(),
            span: None,
            expected: None,
            actual: None,
            notes: Vec::new(),
        }
    }

    pub fn at(mut self, span: Span) -> Diagnostic {
        self.span = Some(span);
        self
    }

    /// Attach a span only if none is set yet.
    pub fn or_at(mut self, span: &Span) -> Diagnostic {
        if self.span.is_none() {
            self.span = Some(span.clone());
        }
        self
    }

    pub fn expected_actual(mut self, expected: String, actual: String) -> Diagnostic {
        self.expected = Some(expected);
        self.actual = Some(actual);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Diagnostic {
        self.notes.push(note.into());
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.span {
            Some(s) => write!(f, "{s}: ")?,
            None => write!(f, "<unknown>: ")?,
        }
        write!(f, "error[{}]: {}", self.code, self.message)?;
        if let Some(e) = &self.expected {
            write!(f, "\n  expected: {e}")?;
        }
        if let Some(a) = &self.actual {
            write!(f, "\n  actual:   {a}")?;
        }
        for n in &self.notes {
            write!(f, "\n  note: {n}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostic {}
