//! JSON-lines rendering of diagnostics.

use hw_kernel::diag::{Diagnostic, Pos};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonPos {
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonSpan {
    pub file: String,
    pub start: JsonPos,
    pub end: JsonPos,
}

/// One diagnostic per line; absent fields are `null`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonDiagnostic {
    pub code: String,
    pub message: String,
    pub span: Option<JsonSpan>,
    pub expected: Option<String>,
    pub actual: Option<String>,
    pub notes: Vec<String>,
}

fn pos(p: Pos) -> JsonPos {
    JsonPos {
        line: p.line,
        col: p.col,
    }
}

impl From<&Diagnostic> for JsonDiagnostic {
    fn from(d: &Diagnostic) -> Self {
        JsonDiagnostic {
            code: d.code.code().to_string(),
            message: d.message.clone(),
            span: d.span.as_ref().map(|s| JsonSpan {
                file: s.file.to_string(),
                start: pos(s.start),
                end: pos(s.end),
            }),
            expected: d.expected.clone(),
            actual: d.actual.clone(),
            notes: d.notes.clone(),
        }
    }
}

pub fn to_json_line(d: &Diagnostic) -> String {
    serde_json::to_string(&JsonDiagnostic::from(d)).expect("diagnostics serialize")
}
