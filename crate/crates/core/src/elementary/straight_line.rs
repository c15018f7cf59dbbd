//! Based straight-line linkages: an inversor about `F = ± i t/2` whose
//! output `D` is held on the circle `|D - G| = t`, `G = -F`, forces the input
//! `B` onto the real axis. Copies share `v1 = 0`, `v2 = 1`, `F` and `G`.

use alloc::format;
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use super::{circle, real, ElementaryError};
use crate::functional::{wall_margin, Field, FunctionalLinkage, Wall, WallKind};
use crate::geom::Disk;
use crate::linkage::LinkageBuilder;
use crate::placement::{BlockKind, PlacementProgram, PlacementStep};

/// `S^m` with inversion radius `t`; certified on the cube
/// `[-(√3/2) t, (√3/2) t]^m` shrunk by the wall margin.
pub fn straight_line_t(m: usize, t: f64) -> FunctionalLinkage {
    let a = 2.5 * t;
    let r = (a * a - t * t).sqrt();
    let eps = 0.1 * t;
    let (ec, ae) = (a + r, a + r + 2.0 * eps);
    let slant = (1.0 + t * t / 4.0).sqrt();

    let mut lb = LinkageBuilder::new();
    let [v1, v2, f, g] = ["v1", "v2", "F", "G"].map(|l| lb.vertex(l));
    lb.mark(v1, real(0.0));
    lb.mark(v2, real(1.0));
    lb.edge(v1, v2, 1.0);
    lb.based(v1, v2);
    lb.edge(f, v2, slant);
    lb.edge(g, v2, slant);
    lb.edge(f, g, t);
    lb.collinear(f, v1, g, 0.5);

    let half = 3f64.sqrt() / 2.0 * t;
    let ball = Disk::new(real(0.0), half - wall_margin(half));
    let mut step = PlacementStep::new(BlockKind::StraightLine, &[("t", t), ("a", a), ("r", r), ("eps", eps)], vec![ball; m]);
    step.circle_circle(f, v1, t / 2.0, v2, slant, 0, false);
    step.affine(g, &[(v1, 2.0), (f, -1.0)], real(0.0));

    let mut inputs = Vec::with_capacity(m);
    let mut walls = Vec::new();
    for j in 0..m {
        let tag = |l: &str| format!("{l}{}", j + 1);
        let [av, b, c, d, e] = ["A", "B", "C", "D", "E"].map(|l| lb.vertex(&tag(l)));
        lb.edge(f, av, a);
        lb.edge(f, c, a);
        let (m1, m2) = lb.rigid_parallelogram([b, av, d, c], r, r, [false; 4], &tag("BADC."));
        lb.edge(av, e, ae);
        lb.edge(e, c, ec);
        lb.edge(g, d, t);
        let bit = 1 + 2 * j;
        step.circle_circle(av, f, a, b, r, bit, false);
        step.circle_circle(c, f, a, b, r, bit, true);
        step.affine(d, &[(av, 1.0), (c, 1.0), (b, -1.0)], real(0.0));
        step.circle_circle(e, av, ae, c, ec, bit + 1, false);
        step.affine(m1, &[(b, 0.5), (av, 0.5)], real(0.0));
        step.affine(m2, &[(c, 0.5), (d, 0.5)], real(0.0));
        inputs.push(b);
        // |B - F| = t, the inversion circle, meets the axis at ±(√3/2) t.
        walls.push(Wall { kind: WallKind::Quasiwall, vertex: b, origin: None, shape: circle(real(0.0), half) });
    }
    let linkage = lb.build().expect("straight-line wiring");
    FunctionalLinkage {
        linkage,
        outputs: inputs.clone(),
        inputs,
        field: Field::Real,
        certified_ball: vec![ball; m],
        output_range: vec![ball; m],
        placement: PlacementProgram { fixed: vec![(v1, real(0.0)), (v2, real(1.0))], steps: vec![step], bits: 1 + 2 * m },
        walls,
    }
}

/// `S^m` with `t = 2 half_width`, certified on `[-half_width, half_width]^m`
/// (well inside the interval of half width `√3 half_width` it could reach).
pub fn make_straight_line(m: usize, half_width: f64) -> Result<FunctionalLinkage, ElementaryError> {
    if m == 0 || !(half_width > 0.0) || !half_width.is_finite() {
        return Err(ElementaryError::InvalidParameter("straight line needs m >= 1 and a positive half width"));
    }
    let ball = vec![Disk::new(real(0.0), half_width); m];
    let mut s = straight_line_t(m, 2.0 * half_width).shrink_ball(ball.clone());
    s.output_range = ball;
    Ok(s)
}

/// `S^m` restricted to the given real intervals (disks centred on the axis).
pub fn straight_line_for(ball: &[Disk]) -> Result<FunctionalLinkage, ElementaryError> {
    let hw = ball.iter().map(|d| d.center.re.abs() + d.radius).fold(0.0, f64::max);
    let s = make_straight_line(ball.len(), hw)?;
    let mut s = s.shrink_ball(ball.to_vec());
    s.output_range = ball.to_vec();
    Ok(s)
}
