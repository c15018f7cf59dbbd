//! Squarer and multiplier, from
//! `1/(z - 1/2) - 1/(z + 1/2) = 1/(z² - 1/4)` (written with the inversion
//! `J(z) = 1/conj(z)`, whose double application removes the conjugates) and
//! `zw = [(z + w)² - (z² + w²)] / 2`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;

use super::pantograph::{make_plain, Plain};
use super::{make_adder, make_inversor, make_pantograph, make_translator, real, Direction, ElementaryError, PantographMode};
use crate::compose::{compose_functional, restrict_equal_inputs};
use crate::functional::FunctionalLinkage;
use crate::geom::Disk;
use crate::placement::BlockKind;

/// Radius of the disk about 0 on which [`squarer_germ`] is certified.
pub const SQUARER_GERM_RADIUS: f64 = 0.3;

/// `z -> J(z - shift)`, negated when `negate` is set.
fn branch(ball: Disk, shift: f64, negate: bool) -> Result<FunctionalLinkage, ElementaryError> {
    let tr = make_translator(real(shift), Direction::Bwd, ball)?;
    let inv = make_inversor(1.0, tr.output_range[0])?;
    let out = compose_functional(&inv, &tr, &[(0, 0)])?;
    if !negate {
        return Ok(out);
    }
    let neg = make_plain(Plain::Mode(PantographMode::Negate), vec![out.output_range[0]])?;
    Ok(compose_functional(&neg, &out, &[(0, 0)])?)
}

/// Squarer certified on the disk of radius [`SQUARER_GERM_RADIUS`] about 0.
pub fn squarer_germ() -> Result<FunctionalLinkage, ElementaryError> {
    let ball = Disk::new(real(0.0), SQUARER_GERM_RADIUS);
    let left = branch(ball, 0.5, false)?;
    let right = branch(ball, -0.5, true)?;
    let add = make_adder(left.output_range[0], right.output_range[0])?;
    let sum = compose_functional(&add, &left, &[(0, 0)])?;
    let sum = compose_functional(&sum, &right, &[(1, 0)])?;
    let sum = restrict_equal_inputs(&sum, 0, 1)?;
    let inv = make_inversor(1.0, sum.output_range[0])?;
    let shift = make_translator(real(0.25), Direction::Fwd, inv.output_range[0])?;
    let out = compose_functional(&inv, &sum, &[(0, 0)])?;
    let mut out = compose_functional(&shift, &out, &[(0, 0)])?;
    out.output_range = vec![ball.mul(&ball)];
    Ok(out)
}

/// Extends a linkage for a homogeneous map of degree `degree`, certified on
/// a polydisc centred at 0, to the polydisc of radius `1.5 radius` via
/// `g(y) = λ^{-d} g(λ y)` with `λ = ε / (2 radius)`. Returned unchanged
/// when its ball already has radius at least `2 radius`, or for degree 0.
pub fn expand_domain(germ: &FunctionalLinkage, degree: u32, radius: f64) -> Result<FunctionalLinkage, ElementaryError> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(ElementaryError::InvalidParameter("expansion radius must be positive"));
    }
    if germ.outputs.len() != 1 {
        return Err(ElementaryError::InvalidParameter("expansion takes a single-output germ"));
    }
    if germ.certified_ball.iter().any(|d| d.center != real(0.0)) {
        return Err(ElementaryError::InvalidParameter("germ ball must be centred at 0"));
    }
    let eps = germ.certified_ball.iter().map(|d| d.radius).fold(f64::INFINITY, f64::min);
    let lambda = eps / (2.0 * radius);
    if degree == 0 || lambda >= 1.0 {
        return Ok(germ.clone());
    }
    let mu = lambda.powi(-(degree as i32));
    let post = make_pantograph(PantographMode::Scale(mu), germ.output_range[0])?;
    let mut out = compose_functional(&post, germ, &[(0, 0)])?;
    let wide = Disk::new(real(0.0), 1.5 * radius);
    for i in 0..germ.inputs.len() {
        let pre = make_pantograph(PantographMode::Div(1.0 / lambda), wide)?;
        out = compose_functional(&out, &pre, &[(i, 0)])?;
    }
    out.output_range = germ.output_range.iter().map(|d| d.affine(real(mu), real(0.0))).collect();
    Ok(out)
}

/// Squarer certified on `ball`.
pub fn make_squarer(ball: Disk) -> Result<FunctionalLinkage, ElementaryError> {
    if !ball.is_bounded() {
        return Err(ElementaryError::UncoverableBall(BlockKind::Inversor));
    }
    let germ = squarer_germ()?;
    let r = ball.sup_norm().max(SQUARER_GERM_RADIUS / 4.0);
    let sq = expand_domain(&germ, 2, r)?;
    let mut sq = sq.shrink_ball(vec![ball]);
    sq.output_range = vec![ball.mul(&ball)];
    Ok(sq)
}

/// Multiplier `(z, w) -> zw` certified on the polydisc `ball`.
pub fn make_multiplier(ball: &[Disk]) -> Result<FunctionalLinkage, ElementaryError> {
    let [z, w]: [Disk; 2] = ball.try_into().map_err(|_| ElementaryError::InvalidParameter("multiplier takes two disks"))?;
    let add = make_adder(z, w)?;
    let sq = make_squarer(add.output_range[0])?;
    let whole = compose_functional(&sq, &add, &[(0, 0)])?;

    let (sz, sw) = (make_squarer(z)?, make_squarer(w)?);
    let add = make_adder(sz.output_range[0], sw.output_range[0])?;
    let parts = compose_functional(&add, &sz, &[(0, 0)])?;
    let parts = compose_functional(&parts, &sw, &[(1, 0)])?;
    let neg = make_pantograph(PantographMode::Negate, parts.output_range[0])?;
    let parts = compose_functional(&neg, &parts, &[(0, 0)])?;

    let add = make_adder(whole.output_range[0], parts.output_range[0])?;
    let diff = compose_functional(&add, &whole, &[(0, 0)])?;
    let diff = compose_functional(&diff, &parts, &[(2, 0)])?;
    let diff = restrict_equal_inputs(&diff, 0, 2)?;
    let diff = restrict_equal_inputs(&diff, 1, 2)?;
    let half = make_pantograph(PantographMode::Div(2.0), diff.output_range[0])?;
    let mut out = compose_functional(&half, &diff, &[(0, 0)])?;
    out.output_range = vec![z.mul(&w)];
    Ok(out)
}
