mod common;

use common::{blocks, disk, p};
use kempe_core::elementary::*;
use kempe_core::expr::ExprBuilder;
use kempe_core::functional::WallShape;
use kempe_core::linkage::{assemble, residual, Edge, Mark, VertexId};
use kempe_core::solve::*;
use kempe_core::{FunctionalLinkage, Point, Realization};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn canonical(l: &FunctionalLinkage) -> Vec<bool> {
    vec![false; l.sym_bits()]
}

#[test]
fn translator_places_by_circle_intersection() {
    let l = make_translator(p(1.0, 0.0), Direction::Fwd, disk(1.0, 0.0, 0.5)).unwrap();
    let phi = forward_place(&l, &[p(1.0, 0.0)], &[false]).unwrap();
    assert!((phi.at(l.outputs[0]) - p(2.0, 0.0)).norm() < 1e-12);
    assert!(residual(&l.linkage, &phi).unwrap().max_abs < 1e-12);
    assert_eq!(phi.at(l.inputs[0]), p(1.0, 0.0));
}

#[test]
fn inputs_outside_the_ball_are_refused() {
    let l = make_translator(p(1.0, 0.0), Direction::Fwd, disk(1.0, 0.0, 0.5)).unwrap();
    assert_eq!(forward_place(&l, &[p(3.0, 0.0)], &[false]), Err(SolveError::OutsideCertifiedBall { slot: 0 }));
    assert!(matches!(forward_place(&l, &[], &[false]), Err(SolveError::Arity { .. })));
}

/// A point on every wall of an input coordinate is refused.
#[test]
fn wall_points_are_refused() {
    let mut checked = 0;
    for b in blocks() {
        let l = &b.linkage;
        for w in &l.walls {
            let Some(slot) = l.inputs.iter().position(|&v| v == w.vertex) else { continue };
            if w.origin.is_some() {
                continue;
            }
            let mut x: Vec<Point> = l.certified_ball.iter().map(|d| d.center).collect();
            x[slot] = match w.shape {
                WallShape::Circle { center, radius } => center + radius,
                WallShape::Line { point, .. } => point,
            };
            if l.field == kempe_core::Field::Real && x[slot].im != 0.0 {
                continue;
            }
            assert_eq!(forward_place(l, &x, &canonical(l)), Err(SolveError::OutsideCertifiedBall { slot }), "{}", b.name);
            checked += 1;
        }
    }
    assert!(checked >= 10);
}

#[test]
fn refine_recovers_perturbed_realizations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for b in blocks() {
        let l = &b.linkage;
        let x = sample_ball(&l.certified_ball, l.field, &mut rng);
        let exact = forward_place(l, &x, &canonical(l)).unwrap();
        let noisy = Realization::new(exact.positions.iter().map(|z| z + p(rng.gen_range(-1e-3..1e-3), rng.gen_range(-1e-3..1e-3))).collect());
        let pins = l.inputs.iter().zip(&x).flat_map(|(&v, &z)| LinearPin::point(v, z, 1e3)).collect();
        let out = refine_with(&l.linkage, &noisy, &RefineOptions { pins, ..RefineOptions::default() });
        assert_eq!(out.status, RefineStatus::Converged, "{}", b.name);
        assert!(out.iterations <= 25, "{}: {} iterations", b.name, out.iterations);
        for &o in &l.outputs {
            assert!((out.realization.at(o) - exact.at(o)).norm() < 1e-9, "{}", b.name);
        }
    }
}

#[test]
fn exact_seed_needs_no_iterations() {
    let l = make_inversor(1.0, disk(2.0, 0.0, 0.5)).unwrap();
    let phi = forward_place(&l, &[p(2.1, 0.2)], &canonical(&l)).unwrap();
    let out = refine(&l.linkage, &phi);
    assert_eq!(out.status, RefineStatus::Converged);
    assert_eq!(out.iterations, 0);
}

#[test]
fn based_triangle_has_two_realizations() {
    let e = |u: u32, v: u32, length: f64| Edge { u: VertexId(u), v: VertexId(v), length };
    let labels = vec![Some("A".into()), Some("B".into()), Some("C".into())];
    let marks = vec![Mark { vertex: VertexId(0), image: p(0.0, 0.0) }, Mark { vertex: VertexId(1), image: p(3.0, 0.0) }];
    let tri = assemble(labels, vec![e(0, 1, 3.0), e(1, 2, 2.5), e(0, 2, 2.0)], vec![], marks, Some((VertexId(0), VertexId(1)))).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut found: Vec<Realization> = Vec::new();
    for _ in 0..60 {
        let seed = Realization::new((0..3).map(|_| p(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0))).collect());
        let out = refine(&tri.clone(), &seed);
        if out.status == RefineStatus::Converged && found.iter().all(|r| r.distance(&out.realization) > 1e-6) {
            found.push(out.realization);
        }
    }
    assert_eq!(found.len(), 2);
    assert!((found[0].at(VertexId(2)) - found[1].at(VertexId(2)).conj()).norm() < 1e-9);
}

#[test]
fn sampled_branches_are_distinct() {
    let l = make_squarer(disk(0.0, 0.0, 1.0)).unwrap();
    assert!(matches!(enumerate_realizations(&l, &[p(0.5, 0.0)]), Err(SolveError::TooManyBranches { .. })));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rs = sample_branches(&l, &[p(0.5, 0.1)], 32, &mut rng).unwrap();
    assert_eq!(rs.len(), 32);
    for r in &rs {
        assert!((r.at(l.outputs[0]) - p(0.5, 0.1) * p(0.5, 0.1)).norm() < 1e-9);
    }
    for (i, a) in rs.iter().enumerate() {
        assert!(rs[..i].iter().all(|b| b.distance(a) > 1e-9));
    }
}

#[test]
fn verification_catches_a_corrupted_edge() {
    let mut b = ExprBuilder::new();
    let z = b.var(0);
    let f = b.neg(z);
    let f = b.finish(vec![f], None).unwrap();
    let good = make_pantograph(PantographMode::Negate, disk(0.0, 0.0, 1.0)).unwrap();
    assert!(verify_functional(&good, &f, 50, 1, &VerifyTolerances::default()).pass);
    let mut bad = good.clone();
    let len = bad.linkage.edges()[3].length;
    bad.linkage = bad.linkage.with_edge_length(3, len * 1.01).unwrap();
    let rep = verify_functional(&bad, &f, 50, 1, &VerifyTolerances::default());
    assert!(!rep.pass);
    assert!(rep.max_residual > 1e-9 || rep.failures > 0);
}

#[test]
fn constant_verifies_exactly() {
    let mut b = ExprBuilder::new();
    let c = b.constant(p(2.0, -1.0));
    let f = b.finish(vec![c], Some(1)).unwrap();
    let l = make_constant(&[p(2.0, -1.0)], 1);
    let rep = verify_functional(&l, &f, 20, 4, &VerifyTolerances::default());
    assert!(rep.pass);
    assert_eq!(rep.max_relative_error, 0.0);
}
