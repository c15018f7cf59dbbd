//! Translators: two chained rigidified parallelograms `[A C D B]` and
//! `[C E F D]` with `A`, `B` fixed at `0`, `b`.

use alloc::vec;
use alloc::vec::Vec;

use super::{circle, clears, in_annulus, real, walls_of, ElementaryError, SEARCH_STEPS};
use crate::functional::{wall_margin, Field, FunctionalLinkage, WallKind, WallShape};
use crate::geom::{Disk, Point};
use crate::linkage::LinkageBuilder;
use crate::placement::{BlockKind, PlacementProgram, PlacementStep};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Input `E`, output `F = E + b`.
    Fwd,
    /// Input `F`, output `E = F - b`.
    Bwd,
}

/// Walls and quasiwalls in the coordinate `E` (which is `F - b` for `Bwd`).
fn shapes(b: Point, s: f64, t: f64) -> ([WallShape; 2], [WallShape; 4]) {
    let beta = b / b.norm();
    (
        [circle(real(0.0), s - t), circle(real(0.0), s + t)],
        [circle(beta * s, t), circle(-beta * s, t), circle(beta * t, s), circle(-beta * t, s)],
    )
}

/// Translator with explicit lengths `s = |AC| > t = |CE|`, certified for `ball`
/// (not checked here).
pub fn translator_linkage(b: Point, dir: Direction, s: f64, t: f64, ball: Disk) -> FunctionalLinkage {
    let mut lb = LinkageBuilder::new();
    let [a, bb, c, d, e, f] = ["A", "B", "C", "D", "E", "F"].map(|l| lb.vertex(l));
    let len_b = b.norm();
    lb.mark(a, real(0.0));
    lb.mark(bb, b);
    let (m1, m2) = lb.rigid_parallelogram([a, c, d, bb], s, len_b, [false; 4], "ACDB.");
    let (m3, m4) = lb.rigid_parallelogram([c, e, f, d], t, len_b, [false, false, false, true], "CEFD.");
    let linkage = lb.build().expect("translator wiring");

    let kind = match dir {
        Direction::Fwd => BlockKind::TranslatorFwd,
        Direction::Bwd => BlockKind::TranslatorBwd,
    };
    let mut step = PlacementStep::new(kind, &[("b_re", b.re), ("b_im", b.im), ("s", s), ("t", t)], vec![ball]);
    let (input, output, offset, shift) = match dir {
        Direction::Fwd => {
            step.circle_circle(c, a, s, e, t, 0, false);
            step.affine(d, &[(c, 1.0), (bb, 1.0), (a, -1.0)], real(0.0));
            step.affine(f, &[(e, 1.0), (d, 1.0), (c, -1.0)], real(0.0));
            (e, f, real(0.0), b)
        }
        Direction::Bwd => {
            step.circle_circle(d, bb, s, f, t, 0, false);
            step.affine(c, &[(d, 1.0), (a, 1.0), (bb, -1.0)], real(0.0));
            step.affine(e, &[(f, 1.0), (c, 1.0), (d, -1.0)], real(0.0));
            (f, e, b, -b)
        }
    };
    step.affine(m1, &[(a, 0.5), (c, 0.5)], real(0.0));
    step.affine(m2, &[(bb, 0.5), (d, 0.5)], real(0.0));
    step.affine(m3, &[(c, 0.5), (e, 0.5)], real(0.0));
    step.affine(m4, &[(d, 0.5), (f, 0.5)], real(0.0));

    let (w, q) = shapes(b, s, t);
    let moved = |sh: &WallShape| match *sh {
        WallShape::Circle { center, radius } => circle(center + offset, radius),
        other => other,
    };
    let mut walls = walls_of(WallKind::Wall, input, &w.iter().map(moved).collect::<Vec<_>>());
    walls.extend(walls_of(WallKind::Quasiwall, input, &q.iter().map(moved).collect::<Vec<_>>()));
    FunctionalLinkage {
        linkage,
        inputs: vec![input],
        outputs: vec![output],
        field: Field::Complex,
        certified_ball: vec![ball],
        output_range: vec![ball.affine(real(1.0), shift)],
        placement: PlacementProgram { fixed: vec![(a, real(0.0)), (bb, b)], steps: vec![step], bits: 1 },
        walls,
    }
}

/// Searches `s > t` so that the ball (in `E` coordinates) clears all six
/// circles: fixes the gap `s - t` at half the ball's distance to the line
/// through 0 perpendicular to `b`, then doubles `s`.
fn search(b: Point, ball: Disk) -> Option<(f64, f64)> {
    let beta = b / b.norm();
    let m = wall_margin(ball.radius);
    let d = (ball.center * beta.conj()).re.abs() - ball.radius;
    if !(d > 2.0 * m) || !ball.is_bounded() {
        return None;
    }
    let g = d / 2.0;
    let mut s = (2.0 * ball.sup_norm()).max(1.0);
    for _ in 0..SEARCH_STEPS {
        let t = s - g;
        let (_, q) = shapes(b, s, t);
        if in_annulus(&ball, real(0.0), s - t, s + t) && clears(&ball, &q) {
            return Some((s, t));
        }
        s *= 2.0;
    }
    None
}

/// Translator for `z -> z + b` (`Fwd`) or `z -> z - b` (`Bwd`) certified on `ball`.
pub fn make_translator(b: Point, dir: Direction, ball: Disk) -> Result<FunctionalLinkage, ElementaryError> {
    if !(b.norm() > 0.0) || !b.is_finite() {
        return Err(ElementaryError::InvalidParameter("translation must be nonzero"));
    }
    let kind = if dir == Direction::Fwd { BlockKind::TranslatorFwd } else { BlockKind::TranslatorBwd };
    let local = match dir {
        Direction::Fwd => ball,
        Direction::Bwd => ball.affine(real(1.0), -b),
    };
    let (s, t) = search(b, local).ok_or(ElementaryError::UncoverableBall(kind))?;
    Ok(translator_linkage(b, dir, s, t, ball))
}
