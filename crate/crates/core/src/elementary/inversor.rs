//! Peaucellier inversor with a rigidified rhombus and a hook: `F` fixed at
//! the origin, `|FA| = |FC| = a`, rhombus `[B A D C]` of side `r` with
//! `a² - r² = t²`, and a hook `E` keeping `|A - C| >= 2ε`. Then
//! `φ(D) = t² / conj(φ(B))`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;

use super::{circle, in_annulus, real, walls_of, ElementaryError, SEARCH_STEPS};
use crate::functional::{wall_margin, Field, FunctionalLinkage, WallKind};
use crate::geom::Disk;
use crate::linkage::LinkageBuilder;
use crate::placement::{BlockKind, PlacementProgram, PlacementStep};

/// Inner radius of the inversor's annular domain,
/// `sqrt(a² - ε²) - sqrt(r² - ε²)`, evaluated without cancellation.
pub fn inversor_rho(a: f64, r: f64, eps: f64) -> f64 {
    (a - r) * (a + r) / ((a * a - eps * eps).sqrt() + (r * r - eps * eps).sqrt())
}

/// Inversor with explicit rhombus side `r` and hook gap `eps`; `a` follows
/// from `a² = t² + r²`.
pub fn inversor_linkage(t: f64, r: f64, eps: f64, ball: Disk) -> FunctionalLinkage {
    let a = (t * t + r * r).sqrt();
    let ec = a + r;
    let ae = ec + 2.0 * eps;
    let mut lb = LinkageBuilder::new();
    let [f, av, b, c, d, e] = ["F", "A", "B", "C", "D", "E"].map(|l| lb.vertex(l));
    lb.mark(f, real(0.0));
    lb.edge(f, av, a);
    lb.edge(f, c, a);
    let (m1, m2) = lb.rigid_parallelogram([b, av, d, c], r, r, [false; 4], "BADC.");
    lb.edge(av, e, ae);
    lb.edge(e, c, ec);
    let linkage = lb.build().expect("inversor wiring");

    let mut step = PlacementStep::new(BlockKind::Inversor, &[("t", t), ("a", a), ("r", r), ("eps", eps)], vec![ball]);
    step.circle_circle(av, f, a, b, r, 0, false);
    step.circle_circle(c, f, a, b, r, 0, true);
    step.affine(d, &[(av, 1.0), (c, 1.0), (b, -1.0)], real(0.0));
    step.circle_circle(e, av, ae, c, ec, 1, false);
    step.affine(m1, &[(b, 0.5), (av, 0.5)], real(0.0));
    step.affine(m2, &[(c, 0.5), (d, 0.5)], real(0.0));

    let rho = inversor_rho(a, r, eps);
    let mut walls = walls_of(WallKind::Wall, b, &[circle(real(0.0), rho), circle(real(0.0), t * t / rho)]);
    walls.extend(walls_of(WallKind::Quasiwall, b, &[circle(real(0.0), t)]));
    let range = ball.invert(t).unwrap_or(Disk::plane());
    FunctionalLinkage {
        linkage,
        inputs: vec![b],
        outputs: vec![d],
        field: Field::Complex,
        certified_ball: vec![ball],
        output_range: vec![range],
        placement: PlacementProgram { fixed: vec![(f, real(0.0))], steps: vec![step], bits: 2 },
        walls,
    }
}

/// Inversor for `z -> t² / conj(z)` certified on `ball`: grows the rhombus
/// side `r` (with `ε = r/4`) until `[ρ, t²/ρ]` holds the ball.
pub fn make_inversor(t: f64, ball: Disk) -> Result<FunctionalLinkage, ElementaryError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(ElementaryError::InvalidParameter("inversion radius must be positive"));
    }
    let m = wall_margin(ball.radius);
    if !ball.is_bounded() || ball.circle_clearance(real(0.0), t) < m {
        return Err(ElementaryError::BallMeetsInversionCircle);
    }
    if ball.center.norm() - ball.radius <= 2.0 * m {
        return Err(ElementaryError::UncoverableBall(BlockKind::Inversor));
    }
    let mut r = t;
    for _ in 0..SEARCH_STEPS {
        let eps = r / 4.0;
        let a = (t * t + r * r).sqrt();
        let rho = inversor_rho(a, r, eps);
        if in_annulus(&ball, real(0.0), rho, t * t / rho) {
            return Ok(inversor_linkage(t, r, eps, ball));
        }
        r *= 2.0;
    }
    Err(ElementaryError::UncoverableBall(BlockKind::Inversor))
}
