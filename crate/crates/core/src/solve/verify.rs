#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::place::{forward_place, sample_branches};
use crate::expr::PolyExpr;
use crate::functional::{Field, FunctionalLinkage};
use crate::geom::{Disk, Point};
use crate::linkage::residual;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyTolerances {
    pub residual: f64,
    /// Bound on `|out - f| / (1 + |f|)`.
    pub relative: f64,
    /// Bound on the spread of outputs across branches.
    pub branch_spread: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        VerifyTolerances { residual: 1e-9, relative: 1e-6, branch_spread: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub samples: usize,
    /// Samples whose placement failed.
    pub failures: usize,
    pub max_residual: f64,
    pub max_relative_error: f64,
    pub max_branch_spread: f64,
    /// Distinct realizations found at each spot check, and how many were
    /// expected (`sym_order`, or the number of sampled branches when the
    /// order is too large to enumerate).
    pub branch_counts: Vec<(usize, usize)>,
    pub pass: bool,
}

/// Uniform point of the polydisc (of the interval, for real linkages).
/// Unbounded disks are sampled on their unit disk.
pub fn sample_ball<R: Rng>(ball: &[Disk], field: Field, rng: &mut R) -> Vec<Point> {
    ball.iter()
        .map(|d| {
            let r = if d.is_bounded() { d.radius } else { 1.0 };
            match field {
                Field::Real => Point::new(d.center.re + r * rng.gen_range(-1.0..1.0), 0.0),
                Field::Complex => {
                    let rho = r * rng.gen::<f64>().sqrt();
                    let th = rng.gen_range(0.0..core::f64::consts::TAU);
                    d.center + Point::from_polar(rho, th)
                }
            }
        })
        .collect()
}

/// Number of clusters among `points` at separation `tol`.
fn distinct(reals: &[Vec<Point>], tol: f64) -> usize {
    let mut reps: Vec<&Vec<Point>> = Vec::new();
    for r in reals {
        let far = |q: &&Vec<Point>| r.iter().zip(q.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) > tol;
        if reps.iter().all(far) {
            reps.push(r);
        }
    }
    reps.len()
}

/// Samples `n` inputs in the certified ball of `l`, places them on the
/// canonical branch and compares the outputs with `f`; at three of them
/// also counts realizations across branches.
pub fn verify_functional(l: &FunctionalLinkage, f: &PolyExpr, n: usize, seed: u64, tol: &VerifyTolerances) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let canonical = alloc::vec![false; l.sym_bits()];
    let mut rep = VerifyReport {
        samples: n,
        failures: 0,
        max_residual: 0.0,
        max_relative_error: 0.0,
        max_branch_spread: 0.0,
        branch_counts: Vec::new(),
        pass: false,
    };
    if f.arity() != l.arity() || f.outputs().len() != l.outputs.len() {
        return rep;
    }
    for k in 0..n {
        let x = sample_ball(&l.certified_ball, l.field, &mut rng);
        let Ok(phi) = forward_place(l, &x, &canonical) else {
            rep.failures += 1;
            continue;
        };
        let res = residual(&l.linkage, &phi).map(|r| r.max_abs).unwrap_or(f64::INFINITY);
        rep.max_residual = rep.max_residual.max(res);
        for (o, want) in l.outputs.iter().zip(f.eval(&x)) {
            let err = (phi.at(*o) - want).norm() / (1.0 + want.norm());
            rep.max_relative_error = rep.max_relative_error.max(err);
        }
        if k < 3 {
            let count = if l.sym_bits() <= 8 { 1usize << l.sym_bits() } else { 64 };
            match sample_branches(l, &x, count, &mut rng) {
                Ok(all) => {
                    for r in &all {
                        for o in &l.outputs {
                            rep.max_branch_spread = rep.max_branch_spread.max((r.at(*o) - phi.at(*o)).norm());
                        }
                    }
                    let pos: Vec<Vec<Point>> = all.into_iter().map(|r| r.positions).collect();
                    rep.branch_counts.push((distinct(&pos, 1e-9), pos.len()));
                }
                Err(_) => rep.failures += 1,
            }
        }
    }
    let err_ok = rep.max_relative_error.is_finite() && rep.max_relative_error < tol.relative;
    let res_ok = rep.max_residual.is_finite() && rep.max_residual < tol.residual;
    let counts_ok = rep.branch_counts.iter().all(|&(found, want)| found == want);
    rep.pass = rep.failures == 0 && err_ok && res_ok && rep.max_branch_spread < tol.branch_spread && counts_ok;
    rep
}
