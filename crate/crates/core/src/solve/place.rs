use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::Rng;

use super::SolveError;
use crate::functional::FunctionalLinkage;
use crate::geom::Point;
use crate::linkage::Realization;
use crate::placement::branch_from_index;

/// Largest bit count `enumerate_realizations` accepts.
pub const MAX_ENUMERATION_BITS: usize = 16;

/// Places every vertex of `f` with the inputs at `inputs`, choosing circle
/// intersections by `branch`.
pub fn forward_place(f: &FunctionalLinkage, inputs: &[Point], branch: &[bool]) -> Result<Realization, SolveError> {
    if inputs.len() != f.arity() {
        return Err(SolveError::Arity { expected: f.arity(), found: inputs.len() });
    }
    f.in_ball(inputs).map_err(|slot| SolveError::OutsideCertifiedBall { slot })?;
    let pairs: Vec<_> = f.inputs.iter().copied().zip(inputs.iter().copied()).collect();
    Ok(Realization::new(f.placement.run(f.linkage.vertex_count(), &pairs, branch)?))
}

/// One realization per branch vector, in order of the branch index.
pub fn enumerate_realizations(f: &FunctionalLinkage, inputs: &[Point]) -> Result<Vec<Realization>, SolveError> {
    let bits = f.sym_bits();
    if bits > MAX_ENUMERATION_BITS {
        return Err(SolveError::TooManyBranches { bits });
    }
    (0..1u64 << bits).map(|i| forward_place(f, inputs, &branch_from_index(i, bits))).collect()
}

/// Realizations at `count` distinct random branch vectors (all of them
/// when there are at most `count`).
pub fn sample_branches<R: Rng>(f: &FunctionalLinkage, inputs: &[Point], count: usize, rng: &mut R) -> Result<Vec<Realization>, SolveError> {
    let bits = f.sym_bits();
    if bits < 64 && (1u64 << bits) as u128 <= count as u128 {
        return enumerate_realizations(f, inputs);
    }
    let mut seen = BTreeSet::new();
    while seen.len() < count {
        seen.insert((0..bits).map(|_| rng.gen()).collect::<Vec<bool>>());
    }
    seen.iter().map(|b| forward_place(f, inputs, b)).collect()
}
