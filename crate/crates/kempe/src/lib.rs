//! File formats, expression parsing, SVG output and the command line for
//! the linkage compiler in `kempe-core`.

pub mod cli;
pub mod json;
pub mod parse;
pub mod svg;
