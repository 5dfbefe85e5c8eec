//! Surface syntax: lexing, parsing, elaboration and printing.

pub mod elab;
pub mod lexer;
pub mod parser;
pub mod pretty;

pub use elab::{elaborate, elaborate_term};
pub use parser::{parse, parse_term, SourceModule};
pub use pretty::pretty;
