//! The adder `(z, w) -> z + w`: a half-sum pantograph fed through two real
//! translators (`(z + b) + (w - b)`), then doubled by a modified pantograph.

use alloc::vec;

use super::pantograph::{make_plain, Plain};
use super::{make_pantograph, make_translator, real, Direction, ElementaryError, PantographMode};
use crate::compose::compose_functional;
use crate::functional::FunctionalLinkage;
use crate::geom::Disk;

pub fn make_adder(z: Disk, w: Disk) -> Result<FunctionalLinkage, ElementaryError> {
    // Pushes the two inputs 2b apart so |z - w| stays in the half-sum annulus.
    let b = 1.0 + z.sup_norm().max(w.sup_norm()).max(z.sub(&w).sup_norm());
    let tz = make_translator(real(-b), Direction::Bwd, z)?;
    let tw = make_translator(real(b), Direction::Bwd, w)?;
    let half = make_plain(Plain::HalfSum, vec![tz.output_range[0], tw.output_range[0]])?;
    let double = make_pantograph(PantographMode::Scale(2.0), half.output_range[0])?;
    let q = compose_functional(&half, &tz, &[(0, 0)])?;
    let q = compose_functional(&q, &tw, &[(1, 0)])?;
    let mut sum = compose_functional(&double, &q, &[(0, 0)])?;
    sum.output_range = vec![z.add(&w)];
    Ok(sum)
}
