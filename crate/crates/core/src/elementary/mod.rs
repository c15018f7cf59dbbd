//! Elementary functional linkages and their parameter searches.
//!
//! Every constructor takes the disk (or polydisc) of inputs it must accept
//! and searches edge lengths until that disk clears the block's walls and
//! quasiwalls by `wall_margin(radius)`.

mod adder;
mod conjugator;
mod constant;
mod inversor;
mod pantograph;
mod products;
mod straight_line;
mod translator;

use alloc::vec;
use alloc::vec::Vec;

pub use adder::make_adder;
pub use conjugator::{conjugator_core, make_conjugator};
pub use constant::make_constant;
pub use inversor::{inversor_linkage, inversor_rho, make_inversor};
pub use pantograph::{make_pantograph, make_plain_pantograph, pantograph_linkage, PantographMode};
pub use products::{expand_domain, make_multiplier, make_squarer, squarer_germ, SQUARER_GERM_RADIUS};
pub use straight_line::{make_straight_line, straight_line_for, straight_line_t};
pub use translator::{make_translator, translator_linkage, Direction};

use crate::compose::ComposeError;
use crate::functional::{wall_margin, Field, FunctionalLinkage, Wall, WallShape};
use crate::geom::{Disk, Point};
use crate::linkage::LinkageBuilder;
use crate::placement::{BlockKind, PlacementProgram};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ElementaryError {
    #[error("no parameters certify the requested ball for {0:?}")]
    UncoverableBall(BlockKind),
    #[error("ball meets the inversion circle")]
    BallMeetsInversionCircle,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error(transparent)]
    Compose(#[from] ComposeError),
}

/// Iteration cap of the doubling searches.
pub(crate) const SEARCH_STEPS: usize = 60;

/// Smallest clearance between `disk` and the given curves.
pub(crate) fn clearance(disk: &Disk, shapes: &[WallShape]) -> f64 {
    shapes.iter().map(|s| s.clearance(disk)).fold(f64::INFINITY, f64::min)
}

pub(crate) fn clears(disk: &Disk, shapes: &[WallShape]) -> bool {
    clearance(disk, shapes) >= wall_margin(disk.radius)
}

/// True when every wall of `l` expressed in an input coordinate (without
/// origin) clears the matching certified disk.
pub fn walls_clear(l: &FunctionalLinkage) -> bool {
    l.walls.iter().all(|w| match (w.origin, l.inputs.iter().position(|&v| v == w.vertex)) {
        (None, Some(i)) => w.shape.clearance(&l.certified_ball[i]) >= wall_margin(l.certified_ball[i].radius),
        _ => true,
    })
}

/// True when `disk` lies inside the annulus `lo < |z - center| < hi` with
/// room `wall_margin(radius)` on both sides.
pub(crate) fn in_annulus(disk: &Disk, center: Point, lo: f64, hi: f64) -> bool {
    let m = wall_margin(disk.radius);
    let d = (disk.center - center).norm();
    d - disk.radius >= lo + m && d + disk.radius <= hi - m
}

pub(crate) fn circle(center: Point, radius: f64) -> WallShape {
    WallShape::Circle { center, radius }
}

/// Identity linkage on a single vertex.
pub fn make_wire(disk: Disk, field: Field) -> FunctionalLinkage {
    let mut b = LinkageBuilder::new();
    let v = b.vertex("x");
    FunctionalLinkage {
        linkage: b.build().expect("single vertex"),
        inputs: vec![v],
        outputs: vec![v],
        field,
        certified_ball: vec![disk],
        output_range: vec![disk],
        placement: PlacementProgram::default(),
        walls: Vec::new(),
    }
}

pub(crate) fn real(x: f64) -> Point {
    Point::new(x, 0.0)
}

pub(crate) fn walls_of(kind: crate::functional::WallKind, vertex: crate::linkage::VertexId, shapes: &[WallShape]) -> Vec<Wall> {
    shapes.iter().map(|&shape| Wall { kind, vertex, origin: None, shape }).collect()
}
