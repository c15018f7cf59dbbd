//! Functional linkages: linkages with input and output vertices, a certified
//! input polydisc and a closed-form placement program.

use alloc::vec::Vec;

use crate::geom::{Disk, Point};
use crate::linkage::{AbstractLinkage, VertexId};
use crate::placement::PlacementProgram;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallKind {
    /// Fixed locus of a symmetry of the input covering.
    Wall,
    /// Other irregular locus (e.g. the inversion circle).
    Quasiwall,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WallShape {
    Circle { center: Point, radius: f64 },
    Line { point: Point, direction: Point },
}

impl WallShape {
    /// Distance from `disk` to the curve; negative when they meet.
    pub fn clearance(&self, disk: &Disk) -> f64 {
        match *self {
            WallShape::Circle { center, radius } => disk.circle_clearance(center, radius),
            WallShape::Line { point, direction } => disk.line_clearance(point, direction),
        }
    }

    /// Signed offset of a point from the curve (zero on it).
    pub fn offset(&self, z: Point) -> f64 {
        match *self {
            WallShape::Circle { center, radius } => (z - center).norm() - radius,
            WallShape::Line { point, direction } => ((z - point) * (direction / direction.norm()).conj()).im,
        }
    }
}

/// An irregular curve of a block, expressed in the coordinate of one of the
/// composite linkage's vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wall {
    pub kind: WallKind,
    pub vertex: VertexId,
    /// When present the curve is expressed in `φ(vertex) - φ(origin)`.
    pub origin: Option<VertexId>,
    pub shape: WallShape,
}

/// Clearance margin demanded between a certified disk and any wall.
pub fn wall_margin(radius: f64) -> f64 {
    if radius.is_finite() {
        (radius / 100.0).max(1e-6)
    } else {
        1e-6
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalLinkage {
    pub linkage: AbstractLinkage,
    pub inputs: Vec<VertexId>,
    pub outputs: Vec<VertexId>,
    pub field: Field,
    /// One closed disk per input coordinate (an interval on the real axis
    /// for real linkages). Walls keep a positive margin from it.
    pub certified_ball: Vec<Disk>,
    /// Enclosure of each output over the certified ball.
    pub output_range: Vec<Disk>,
    pub placement: PlacementProgram,
    pub walls: Vec<Wall>,
}

impl FunctionalLinkage {
    pub fn sym_bits(&self) -> usize {
        self.placement.bits
    }

    /// `2^bits`, or `None` when it does not fit in 128 bits.
    pub fn sym_order(&self) -> Option<u128> {
        1u128.checked_shl(self.placement.bits as u32)
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    /// True when `x` lies in the closed certified polydisc (and on the real
    /// axis for real linkages).
    pub fn in_ball(&self, x: &[Point]) -> Result<(), usize> {
        for (i, (z, d)) in x.iter().zip(&self.certified_ball).enumerate() {
            let off_axis = self.field == Field::Real && z.im.abs() > 1e-12;
            if off_axis || !(d.contains(*z) || !d.is_bounded()) {
                return Err(i);
            }
        }
        Ok(())
    }

    /// Replaces the certified ball by a smaller one. Output enclosures are
    /// left as they are (still valid, possibly loose).
    pub fn shrink_ball(mut self, ball: Vec<Disk>) -> Self {
        debug_assert!(ball.iter().zip(&self.certified_ball).all(|(a, b)| b.contains_disk(a)));
        self.certified_ball = ball;
        self
    }
}
