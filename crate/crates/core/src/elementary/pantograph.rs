//! Pantographs: triangle `A B G` with `|AB| = s`, `|BG| = t`, points `C`
//! on `AB` and `E` on `BG` at ratio `1/λ`, and the rigidified parallelogram
//! `[B C D E]`, so that `D - A = (G - A) / λ`.

use alloc::vec;
use alloc::vec::Vec;

use super::{circle, make_translator, real, Direction, ElementaryError};
use crate::compose::compose_functional;
use crate::functional::{wall_margin, Field, FunctionalLinkage, Wall, WallKind};
use crate::geom::Disk;
use crate::linkage::LinkageBuilder;
use crate::placement::{BlockKind, PlacementProgram, PlacementStep};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PantographMode {
    /// `z -> λ z`, `λ > 1`.
    Scale(f64),
    /// `z -> z / λ`, `λ > 1`.
    Div(f64),
    /// `z -> -z`.
    Negate,
}

/// Plain pantograph variants, distinguished by which vertices are inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Plain {
    Mode(PantographMode),
    /// Inputs `A`, `G`, output `D = (A + G) / 2`, nothing fixed.
    HalfSum,
}

impl Plain {
    fn lambda(self) -> f64 {
        match self {
            Plain::Mode(PantographMode::Scale(l) | PantographMode::Div(l)) => l,
            _ => 2.0,
        }
    }

    fn kind(self) -> BlockKind {
        match self {
            Plain::Mode(PantographMode::Scale(_)) => BlockKind::PantographScale,
            Plain::Mode(PantographMode::Div(_)) => BlockKind::PantographDiv,
            Plain::Mode(PantographMode::Negate) => BlockKind::PantographNegate,
            Plain::HalfSum => BlockKind::HalfSum,
        }
    }

    /// Factor `κ` with `|G - A| = κ |input|` (for the half-sum, the input is `A - G`).
    fn kappa(self) -> f64 {
        match self {
            Plain::Mode(PantographMode::Scale(l)) => l,
            Plain::Mode(PantographMode::Negate) => 2.0,
            _ => 1.0,
        }
    }
}

/// Pantograph with explicit `s = |AB|`, `t = |BG|`, `s != t`.
pub(crate) fn plain_linkage(mode: Plain, s: f64, t: f64, ball: Vec<Disk>) -> FunctionalLinkage {
    let lambda = mode.lambda();
    let k = 1.0 / lambda;
    let mut lb = LinkageBuilder::new();
    let [a, b, c, d, e, g] = ["A", "B", "C", "D", "E", "G"].map(|l| lb.vertex(l));
    lb.edge(a, b, s);
    lb.edge(b, g, t);
    lb.collinear(a, c, b, k);
    lb.collinear(b, e, g, k);
    // [B C D E]: BC and EB lie on the constrained segments.
    let (m1, m2) = lb.rigid_parallelogram([b, c, d, e], s * (1.0 - k), t * k, [true, false, false, true], "BCDE.");
    let (fixed, inputs, outputs) = match mode {
        Plain::Mode(PantographMode::Scale(_)) => (vec![(a, real(0.0))], vec![d], vec![g]),
        Plain::Mode(PantographMode::Div(_)) => (vec![(a, real(0.0))], vec![g], vec![d]),
        Plain::Mode(PantographMode::Negate) => (vec![(d, real(0.0))], vec![a], vec![g]),
        Plain::HalfSum => (vec![], vec![a, g], vec![d]),
    };
    for &(v, z) in &fixed {
        lb.mark(v, z);
    }
    let linkage = lb.build().expect("pantograph wiring");

    let mut step = PlacementStep::new(mode.kind(), &[("lambda", lambda), ("s", s), ("t", t)], ball.clone());
    match mode {
        Plain::Mode(PantographMode::Scale(_)) => step.affine(g, &[(d, lambda), (a, 1.0 - lambda)], real(0.0)),
        Plain::Mode(PantographMode::Div(_)) => step.affine(d, &[(g, k), (a, 1.0 - k)], real(0.0)),
        Plain::Mode(PantographMode::Negate) => step.affine(g, &[(d, 2.0), (a, -1.0)], real(0.0)),
        Plain::HalfSum => {}
    }
    step.circle_circle(b, a, s, g, t, 0, false);
    step.affine(c, &[(a, 1.0 - k), (b, k)], real(0.0));
    step.affine(e, &[(b, 1.0 - k), (g, k)], real(0.0));
    if mode == Plain::HalfSum {
        step.affine(d, &[(c, 1.0), (e, 1.0), (b, -1.0)], real(0.0));
    }
    step.affine(m1, &[(b, 0.5), (c, 0.5)], real(0.0));
    step.affine(m2, &[(e, 0.5), (d, 0.5)], real(0.0));

    let (lo, hi) = ((s - t).abs(), s + t);
    let kappa = mode.kappa();
    let walls = match mode {
        Plain::HalfSum => [lo, hi]
            .iter()
            .map(|&r| Wall { kind: WallKind::Wall, vertex: a, origin: Some(g), shape: circle(real(0.0), r) })
            .collect(),
        _ => [lo, hi]
            .iter()
            .map(|&r| Wall { kind: WallKind::Wall, vertex: inputs[0], origin: None, shape: circle(real(0.0), r / kappa) })
            .collect(),
    };
    let output_range = match mode {
        Plain::Mode(PantographMode::Scale(l)) => ball[0].affine(real(l), real(0.0)),
        Plain::Mode(PantographMode::Div(l)) => ball[0].affine(real(1.0 / l), real(0.0)),
        Plain::Mode(PantographMode::Negate) => ball[0].affine(real(-1.0), real(0.0)),
        Plain::HalfSum => ball[0].add(&ball[1]).affine(real(0.5), real(0.0)),
    };
    FunctionalLinkage {
        linkage,
        inputs,
        outputs,
        field: Field::Complex,
        certified_ball: ball,
        output_range: vec![output_range],
        placement: PlacementProgram { fixed, steps: vec![step], bits: 1 },
        walls,
    }
}

/// Chooses `s`, `t` so the annulus `|s - t| <= |G - A| <= s + t` contains the
/// disk `q` of values of `G - A` with room to spare, preferring `s = 2t`.
fn search(q: Disk, margin: f64) -> Option<(f64, f64)> {
    let lo = q.center.norm() - q.radius;
    let hi = q.sup_norm();
    if !(lo > 2.0 * margin) || !hi.is_finite() {
        return None;
    }
    let d = q.center.norm();
    let ok = |s: f64, t: f64| d - q.radius >= (s - t).abs() + margin && d + q.radius <= s + t - margin;
    let t = (lo + hi / 3.0) / 2.0;
    if ok(2.0 * t, t) {
        return Some((2.0 * t, t));
    }
    let (diff, sum) = (lo / 2.0, 2.0 * hi);
    let (s, t) = ((sum + diff) / 2.0, (sum - diff) / 2.0);
    ok(s, t).then_some((s, t))
}

pub(crate) fn make_plain(mode: Plain, ball: Vec<Disk>) -> Result<FunctionalLinkage, ElementaryError> {
    let kappa = mode.kappa();
    let (q, margin) = match mode {
        Plain::HalfSum => (ball[0].sub(&ball[1]), wall_margin(ball[0].radius.max(ball[1].radius))),
        _ => (ball[0].affine(real(kappa), real(0.0)), kappa * wall_margin(ball[0].radius)),
    };
    let (s, t) = search(q, margin).ok_or(ElementaryError::UncoverableBall(mode.kind()))?;
    Ok(plain_linkage(mode, s, t, ball))
}

/// Pantograph with explicit lengths, for direct experiments.
pub fn pantograph_linkage(mode: PantographMode, s: f64, t: f64, ball: Disk) -> FunctionalLinkage {
    plain_linkage(Plain::Mode(mode), s, t, vec![ball])
}

/// Unmodified pantograph; its domain is an annulus, so the ball must avoid
/// the fixed vertex.
pub fn make_plain_pantograph(mode: PantographMode, ball: Disk) -> Result<FunctionalLinkage, ElementaryError> {
    check_mode(mode)?;
    make_plain(Plain::Mode(mode), vec![ball])
}

fn check_mode(mode: PantographMode) -> Result<(), ElementaryError> {
    match mode {
        PantographMode::Scale(l) | PantographMode::Div(l) if !(l > 1.0) || !l.is_finite() => {
            Err(ElementaryError::InvalidParameter("pantograph ratio must exceed 1"))
        }
        _ => Ok(()),
    }
}

/// Modified pantograph: the plain one between two real translators, using
/// `λz = λ(z + b) - λb`, `z/λ = (z + b)/λ - b/λ` and `-z = -(z + b) + b`.
pub fn make_pantograph(mode: PantographMode, ball: Disk) -> Result<FunctionalLinkage, ElementaryError> {
    check_mode(mode)?;
    let b = (2.0 * ball.sup_norm()).max(1.0);
    let pre = make_translator(real(-b), Direction::Bwd, ball)?;
    let mid = make_plain(Plain::Mode(mode), vec![pre.output_range[0]])?;
    let shift = match mode {
        PantographMode::Scale(l) => -l * b,
        PantographMode::Div(l) => -b / l,
        PantographMode::Negate => b,
    };
    let post = make_translator(real(shift), Direction::Fwd, mid.output_range[0])?;
    let inner = compose_functional(&mid, &pre, &[(0, 0)])?;
    let mut out = compose_functional(&post, &inner, &[(0, 0)])?;
    out.output_range = vec![match mode {
        PantographMode::Scale(l) => ball.affine(real(l), real(0.0)),
        PantographMode::Div(l) => ball.affine(real(1.0 / l), real(0.0)),
        PantographMode::Negate => ball.affine(real(-1.0), real(0.0)),
    }];
    Ok(out)
}
