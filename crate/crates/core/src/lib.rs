//! Compilation of polynomial maps into planar functional linkages.
//!
//! A linkage is a graph with edge lengths whose vertices are placed in the
//! plane. Functional linkages carry input and output vertices whose
//! positions are related by a fixed function. The crate builds elementary
//! mechanisms (translators, pantographs, adders, inversors, straight-line
//! linkages, conjugators), glues them together along vertices, and places
//! and refines their realizations numerically.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod compiler;
pub mod compose;
pub mod elementary;
pub mod expr;
pub mod functional;
pub mod geom;
pub mod linkage;
pub mod placement;
pub mod solve;

pub use geom::{Disk, Point};
pub use functional::{Field, FunctionalLinkage};
pub use linkage::{AbstractLinkage, Realization, VertexId};
