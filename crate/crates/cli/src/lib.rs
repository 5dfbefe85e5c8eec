//! Driver library behind the `hw` binary.

pub mod derive;
pub mod driver;
pub mod emit;

pub use driver::{parse_manifest, with_big_stack, Failure, ManifestEntry, Session};
