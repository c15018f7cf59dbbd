//! Complex conjugation: a rigidified rhombus `[A P B Q]` of side `L` whose
//! vertices `A`, `B` are held on the real axis by `S^2`, so that `Q` is the
//! mirror image of `P`. A hook on `A`, `B` keeps them apart. The germ sits
//! at `P = i h`; two translators move it to the origin via
//! `conj(z) = conj(z + ih) + ih`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;

use super::{make_translator, real, straight_line_t, Direction, ElementaryError, SEARCH_STEPS};
use crate::compose::{fiber_sum, GlueMap};
use crate::functional::{wall_margin, Field, FunctionalLinkage, Wall, WallKind, WallShape};
use crate::geom::{Disk, Point};
use crate::linkage::LinkageBuilder;
use crate::placement::{BlockKind, PlacementProgram, PlacementStep};

/// Unshifted conjugator with rhombus side `side`, hook gap `eps` and
/// straight-line radius `t`, certified (unchecked) on `ball`.
pub fn conjugator_core(side: f64, eps: f64, t: f64, ball: Disk) -> Result<FunctionalLinkage, ElementaryError> {
    let (bh, ah) = (side, side + 2.0 * eps);
    let mut lb = LinkageBuilder::new();
    let [v1, v2, av, p, bv, q, h] = ["v1", "v2", "A", "P", "B", "Q", "H"].map(|l| lb.vertex(l));
    lb.mark(v1, real(0.0));
    lb.mark(v2, real(1.0));
    let (m1, m2) = lb.rigid_parallelogram([av, p, bv, q], side, side, [false; 4], "APBQ.");
    lb.edge(av, h, ah);
    lb.edge(bv, h, bh);
    let core = lb.build().expect("conjugator wiring");

    let mut step = PlacementStep::new(BlockKind::Conjugator, &[("L", side), ("eps", eps), ("t", t)], vec![ball]);
    step.circle_line(av, p, side, v1, v2, 0, false);
    step.circle_line(bv, p, side, v1, v2, 0, true);
    step.affine(q, &[(av, 1.0), (bv, 1.0), (p, -1.0)], real(0.0));
    step.circle_circle(h, av, ah, bv, bh, 1, false);
    step.affine(m1, &[(av, 0.5), (p, 0.5)], real(0.0));
    step.affine(m2, &[(q, 0.5), (bv, 0.5)], real(0.0));
    let core_prog = PlacementProgram { fixed: vec![(v1, real(0.0)), (v2, real(1.0))], steps: vec![step], bits: 2 };

    let s2 = straight_line_t(2, t);
    let sl = |l: &str| s2.linkage.find_label(l).expect("straight-line label");
    let beta = GlueMap::new(vec![(av, s2.inputs[0]), (bv, s2.inputs[1]), (v1, sl("v1")), (v2, sl("v2"))]);
    let fs = fiber_sum(&core, &s2.linkage, &beta)?;
    let (ma, mb) = (&fs.map_a, &fs.map_b);
    let placement = core_prog.remap(|v| ma[v.index()], 0).then(s2.placement.remap(|v| mb[v.index()], 2));

    let lim = (side * side - eps * eps).sqrt();
    let pin = fs.map_a[p.index()];
    let line = |y: f64, kind| Wall { kind, vertex: pin, origin: None, shape: WallShape::Line { point: Point::new(0.0, y), direction: real(1.0) } };
    Ok(FunctionalLinkage {
        linkage: fs.linkage,
        inputs: vec![pin],
        outputs: vec![fs.map_a[q.index()]],
        field: Field::Complex,
        certified_ball: vec![ball],
        output_range: vec![ball.conj()],
        placement,
        walls: vec![line(0.0, WallKind::Wall), line(lim, WallKind::Wall), line(-lim, WallKind::Wall)],
    })
}

/// Conjugator `z -> conj(z)` certified on `ball`: doubles the germ height
/// `h` (with `L = √2 h`) until `ball + ih` sits strictly between the real
/// axis and the hook limit.
pub fn make_conjugator(ball: Disk) -> Result<FunctionalLinkage, ElementaryError> {
    if !ball.is_bounded() {
        return Err(ElementaryError::UncoverableBall(BlockKind::Conjugator));
    }
    let m = wall_margin(ball.radius);
    let mut h = 1.0;
    for _ in 0..SEARCH_STEPS {
        let side = 2f64.sqrt() * h;
        let eps = 0.1 * side;
        let lim = (side * side - eps * eps).sqrt();
        let lifted = ball.affine(real(1.0), Point::new(0.0, h));
        let (lo, hi) = (lifted.center.im - lifted.radius, lifted.center.im + lifted.radius);
        if lo > m && hi < lim - m {
            // A and B stay within |Re P| + L of the origin.
            let reach = lifted.center.re.abs() + lifted.radius + side;
            let t = 2.0 * reach * 1.05;
            let core = conjugator_core(side, eps, t, lifted)?;
            let pre = make_translator(Point::new(0.0, -h), Direction::Bwd, ball)?;
            let post = make_translator(Point::new(0.0, h), Direction::Fwd, core.output_range[0])?;
            let inner = crate::compose::compose_functional(&core, &pre, &[(0, 0)])?;
            let mut out = crate::compose::compose_functional(&post, &inner, &[(0, 0)])?;
            out.output_range = vec![ball.conj()];
            return Ok(out);
        }
        h *= 2.0;
    }
    Err(ElementaryError::UncoverableBall(BlockKind::Conjugator))
}
