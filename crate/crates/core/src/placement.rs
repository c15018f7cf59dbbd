//! Closed-form placement programs.
//!
//! A program is a list of steps, one per elementary block. Each step places
//! the block's free vertices from already placed ones by affine combinations
//! and circle intersections; every intersection owns one branch bit.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::geom::{circle_hit, circle_line_hit, Disk, GeomError, Point};
use crate::linkage::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockKind {
    TranslatorFwd,
    TranslatorBwd,
    PantographScale,
    PantographDiv,
    PantographNegate,
    HalfSum,
    Inversor,
    StraightLine,
    Conjugator,
    Constant,
}

impl BlockKind {
    pub const ALL: [BlockKind; 10] = [
        BlockKind::TranslatorFwd,
        BlockKind::TranslatorBwd,
        BlockKind::PantographScale,
        BlockKind::PantographDiv,
        BlockKind::PantographNegate,
        BlockKind::HalfSum,
        BlockKind::Inversor,
        BlockKind::StraightLine,
        BlockKind::Conjugator,
        BlockKind::Constant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BlockKind::TranslatorFwd => "translator_fwd",
            BlockKind::TranslatorBwd => "translator_bwd",
            BlockKind::PantographScale => "pantograph_scale",
            BlockKind::PantographDiv => "pantograph_div",
            BlockKind::PantographNegate => "pantograph_negate",
            BlockKind::HalfSum => "half_sum",
            BlockKind::Inversor => "inversor",
            BlockKind::StraightLine => "straight_line",
            BlockKind::Conjugator => "conjugator",
            BlockKind::Constant => "constant",
        }
    }

    pub fn from_name(s: &str) -> Option<BlockKind> {
        BlockKind::ALL.iter().copied().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlaceOp {
    /// `target = offset + Σ coeff · φ(v)`.
    Affine { target: VertexId, terms: Vec<(VertexId, Point)>, offset: Point },
    /// Intersection of circles about `c1` and `c2`; side `bit XOR flip`.
    CircleCircle { target: VertexId, c1: VertexId, r1: f64, c2: VertexId, r2: f64, bit: usize, flip: bool },
    /// Intersection of the circle about `center` with the line `p q`.
    CircleLine { target: VertexId, center: VertexId, radius: f64, p: VertexId, q: VertexId, bit: usize, flip: bool },
}

impl PlaceOp {
    pub fn target(&self) -> VertexId {
        match self {
            PlaceOp::Affine { target, .. } | PlaceOp::CircleCircle { target, .. } | PlaceOp::CircleLine { target, .. } => *target,
        }
    }

    pub fn bit(&self) -> Option<usize> {
        match self {
            PlaceOp::Affine { .. } => None,
            PlaceOp::CircleCircle { bit, .. } | PlaceOp::CircleLine { bit, .. } => Some(*bit),
        }
    }

    fn map(&self, f: &impl Fn(VertexId) -> VertexId, bit_offset: usize) -> PlaceOp {
        match self {
            PlaceOp::Affine { target, terms, offset } => PlaceOp::Affine {
                target: f(*target),
                terms: terms.iter().map(|&(v, c)| (f(v), c)).collect(),
                offset: *offset,
            },
            &PlaceOp::CircleCircle { target, c1, r1, c2, r2, bit, flip } => {
                PlaceOp::CircleCircle { target: f(target), c1: f(c1), r1, c2: f(c2), r2, bit: bit + bit_offset, flip }
            }
            &PlaceOp::CircleLine { target, center, radius, p, q, bit, flip } => PlaceOp::CircleLine {
                target: f(target),
                center: f(center),
                radius,
                p: f(p),
                q: f(q),
                bit: bit + bit_offset,
                flip,
            },
        }
    }

    fn sources(&self) -> Vec<VertexId> {
        match self {
            PlaceOp::Affine { terms, .. } => terms.iter().map(|t| t.0).collect(),
            PlaceOp::CircleCircle { c1, c2, .. } => vec![*c1, *c2],
            PlaceOp::CircleLine { center, p, q, .. } => vec![*center, *p, *q],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub value: f64,
}

/// Placement of one elementary block.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementStep {
    pub kind: BlockKind,
    pub params: Vec<Param>,
    /// Input disks the block was certified for.
    pub domain: Vec<Disk>,
    pub ops: Vec<PlaceOp>,
}

impl PlacementStep {
    pub fn new(kind: BlockKind, params: &[(&str, f64)], domain: Vec<Disk>) -> Self {
        let params = params.iter().map(|&(n, v)| Param { name: String::from(n), value: v }).collect();
        PlacementStep { kind, params, domain, ops: Vec::new() }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }

    pub fn bits(&self) -> Vec<usize> {
        self.ops.iter().filter_map(PlaceOp::bit).collect()
    }

    pub fn affine(&mut self, target: VertexId, terms: &[(VertexId, f64)], offset: Point) {
        let terms = terms.iter().map(|&(v, c)| (v, Point::new(c, 0.0))).collect();
        self.ops.push(PlaceOp::Affine { target, terms, offset });
    }

    pub fn circle_circle(&mut self, target: VertexId, c1: VertexId, r1: f64, c2: VertexId, r2: f64, bit: usize, flip: bool) {
        self.ops.push(PlaceOp::CircleCircle { target, c1, r1, c2, r2, bit, flip });
    }

    pub fn circle_line(&mut self, target: VertexId, center: VertexId, radius: f64, p: VertexId, q: VertexId, bit: usize, flip: bool) {
        self.ops.push(PlaceOp::CircleLine { target, center, radius, p, q, bit, flip });
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlacementProgram {
    /// Vertices pinned to constant positions before any step runs.
    pub fixed: Vec<(VertexId, Point)>,
    pub steps: Vec<PlacementStep>,
    pub bits: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum PlaceError {
    #[error("step {step}: circle intersection within tangency tolerance")]
    Degenerate { step: usize },
    #[error("step {step}: {source}")]
    Geometry { step: usize, source: GeomError },
    #[error("vertex {0} is used before it is placed")]
    Unplaced(VertexId),
    #[error("vertex {0} is placed twice")]
    Replaced(VertexId),
    #[error("branch vector has {found} bits, program needs {expected}")]
    BranchLength { expected: usize, found: usize },
}

impl PlacementProgram {
    /// Renames vertices through `f` and shifts every bit index.
    pub fn remap(&self, f: impl Fn(VertexId) -> VertexId, bit_offset: usize) -> PlacementProgram {
        PlacementProgram {
            fixed: self.fixed.iter().map(|&(v, z)| (f(v), z)).collect(),
            steps: self
                .steps
                .iter()
                .map(|s| PlacementStep {
                    kind: s.kind,
                    params: s.params.clone(),
                    domain: s.domain.clone(),
                    ops: s.ops.iter().map(|o| o.map(&f, bit_offset)).collect(),
                })
                .collect(),
            bits: self.bits,
        }
    }

    /// Sequential composition: `self` runs first.
    pub fn then(mut self, other: PlacementProgram) -> PlacementProgram {
        for (v, z) in other.fixed {
            if !self.fixed.iter().any(|&(w, _)| w == v) {
                self.fixed.push((v, z));
            }
        }
        self.steps.extend(other.steps);
        self.bits += other.bits;
        self
    }

    /// Places every vertex of an `n`-vertex linkage. Vertices not reached by
    /// the program keep `NaN` coordinates and are reported by `check`.
    pub fn run(&self, n: usize, inputs: &[(VertexId, Point)], branch: &[bool]) -> Result<Vec<Point>, PlaceError> {
        if branch.len() != self.bits {
            return Err(PlaceError::BranchLength { expected: self.bits, found: branch.len() });
        }
        let nan = Point::new(f64::NAN, f64::NAN);
        let mut x = vec![nan; n];
        let mut placed = vec![false; n];
        let mut put = |x: &mut Vec<Point>, v: VertexId, z: Point| {
            if placed[v.index()] {
                return Err(PlaceError::Replaced(v));
            }
            placed[v.index()] = true;
            x[v.index()] = z;
            Ok(())
        };
        for &(v, z) in self.fixed.iter().chain(inputs) {
            put(&mut x, v, z)?;
        }
        for (si, step) in self.steps.iter().enumerate() {
            for op in &step.ops {
                for s in op.sources() {
                    if x[s.index()].re.is_nan() {
                        return Err(PlaceError::Unplaced(s));
                    }
                }
                let z = match op {
                    PlaceOp::Affine { terms, offset, .. } => terms.iter().fold(*offset, |acc, &(v, c)| acc + c * x[v.index()]),
                    &PlaceOp::CircleCircle { c1, r1, c2, r2, bit, flip, .. } => {
                        let h = circle_hit(x[c1.index()], r1, x[c2.index()], r2, branch[bit] ^ flip)
                            .map_err(|source| PlaceError::Geometry { step: si, source })?;
                        if h.is_tangential() {
                            return Err(PlaceError::Degenerate { step: si });
                        }
                        h.point
                    }
                    &PlaceOp::CircleLine { center, radius, p, q, bit, flip, .. } => {
                        let h = circle_line_hit(x[center.index()], radius, x[p.index()], x[q.index()], branch[bit] ^ flip)
                            .map_err(|source| PlaceError::Geometry { step: si, source })?;
                        if h.is_tangential() {
                            return Err(PlaceError::Degenerate { step: si });
                        }
                        h.point
                    }
                };
                put(&mut x, op.target(), z)?;
            }
        }
        Ok(x)
    }

    /// Checks that, with `inputs` supplied externally, each vertex of an
    /// `n`-vertex linkage is placed exactly once and only after its sources.
    pub fn check(&self, n: usize, inputs: &[VertexId]) -> Result<(), PlaceError> {
        let mut placed = vec![false; n];
        let mut put = |v: VertexId| {
            if core::mem::replace(&mut placed[v.index()], true) {
                Err(PlaceError::Replaced(v))
            } else {
                Ok(())
            }
        };
        for &(v, _) in &self.fixed {
            put(v)?;
        }
        for &v in inputs {
            put(v)?;
        }
        for step in &self.steps {
            for op in &step.ops {
                put(op.target())?;
            }
        }
        let mut ready = vec![false; n];
        for &(v, _) in &self.fixed {
            ready[v.index()] = true;
        }
        for &v in inputs {
            ready[v.index()] = true;
        }
        for step in &self.steps {
            for op in &step.ops {
                if let Some(s) = op.sources().into_iter().find(|s| !ready[s.index()]) {
                    return Err(PlaceError::Unplaced(s));
                }
                ready[op.target().index()] = true;
            }
        }
        match ready.iter().position(|r| !r) {
            Some(i) => Err(PlaceError::Unplaced(VertexId::from(i))),
            None => Ok(()),
        }
    }
}

/// Bits of an integer branch index, least significant first.
pub fn branch_from_index(index: u64, bits: usize) -> Vec<bool> {
    (0..bits).map(|i| i < 64 && (index >> i) & 1 == 1).collect()
}
