//! The neighborhood definition language: syntax tree, parser, static
//! analysis, optimizer and interpreter.

mod analyze;
mod ast;
mod interp;
mod optimize;
mod parser;

pub use analyze::{analyze, Code, Diagnostic, Diagnostics};
pub use ast::{Atom, ProgVar, Program};
pub use interp::{neighbors, preserves, Limits, NeighborSet, DEFAULT_CAP, DEFAULT_FUEL};
pub use optimize::optimize;
pub use parser::{parse, ParseError};
