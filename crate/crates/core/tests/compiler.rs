mod common;

use common::p;
use kempe_core::compiler::*;
use kempe_core::expr::{ExprBuilder, PolyExpr};
use kempe_core::solve::*;
use kempe_core::Point;

fn square_plus_one() -> PolyExpr {
    let mut b = ExprBuilder::new();
    let z = b.var(0);
    let zz = b.mul(z, z);
    let one = b.real(1.0);
    let f = b.add(zz, one);
    b.finish(vec![f], None).unwrap()
}

fn circle(kind: &str) -> PolyExpr {
    let mut b = ExprBuilder::new();
    let one = b.real(1.0);
    let f = if kind == "set" {
        let (x, y) = (b.var(0), b.var(1));
        let (xx, yy) = (b.mul(x, x), b.mul(y, y));
        let s = b.add(xx, yy);
        b.sub(s, one)
    } else {
        let z = b.var(0);
        let zc = b.conj(z);
        let zz = b.mul(z, zc);
        b.sub(zz, one)
    };
    b.finish(vec![f], None).unwrap()
}

#[test]
fn compiled_polynomial_verifies() {
    let f = square_plus_one();
    let c = compile_complex(&f, &[p(0.0, 0.0)], 1.0).unwrap();
    let rep = verify_functional(&c.linkage, &f, 100, 1, &VerifyTolerances::default());
    assert!(rep.pass, "{rep:?}");
    assert_eq!(c.report.sym_bits, c.linkage.sym_bits());
    assert!(!c.report.stages.is_empty());
    let again = compile_complex(&f, &[p(0.0, 0.0)], 1.0).unwrap();
    assert_eq!(again.linkage, c.linkage);
}

#[test]
fn compile_errors() {
    let f = square_plus_one();
    assert!(matches!(compile_complex(&f, &[p(0.0, 0.0)], 0.0), Err(CompileError::BadRadius)));
    assert!(matches!(compile_complex(&f, &[p(0.0, 0.0); 2], 1.0), Err(CompileError::CenterArity { .. })));
    assert!(matches!(compile_complex(&circle("curve"), &[p(0.0, 0.0)], 1.0), Err(CompileError::ConjNotAllowed)));

    let mut b = ExprBuilder::new();
    let z = b.var(0);
    let i = b.constant(p(0.0, 1.0));
    let iz = b.mul(i, z);
    let g = b.finish(vec![iz], None).unwrap();
    assert!(matches!(compile_real(&g, &[0.0], 1.0), Err(CompileError::NotReal)));
    assert!(matches!(curve_linkage(&g, p(0.0, 0.0), 1.0), Err(CompileError::NotRealValued(_))));

    let mut b = ExprBuilder::new();
    let z = b.var(0);
    let zc = b.conj(z);
    let zz = b.mul(z, zc);
    let one = b.real(1.0);
    let g = b.add(zz, one);
    let g = b.finish(vec![g], None).unwrap();
    assert!(matches!(curve_linkage(&g, p(0.0, 0.0), 1.0), Err(CompileError::NoSeedFound)));
}

#[test]
fn real_compilation_keeps_inputs_on_the_axis() {
    let mut b = ExprBuilder::new();
    let x = b.var(0);
    let f = b.mul(x, x);
    let f = b.finish(vec![f], None).unwrap();
    let c = compile_real(&f, &[0.0], 1.0).unwrap();
    assert_eq!(c.linkage.field, kempe_core::Field::Real);
    assert!(forward_place(&c.linkage, &[p(0.5, 0.1)], &vec![false; c.linkage.sym_bits()]).is_err());
    for x in [-1.0, -0.3, 0.0, 0.7, 1.0] {
        let phi = forward_place(&c.linkage, &[p(x, 0.0)], &vec![false; c.linkage.sym_bits()]).unwrap();
        assert!((phi.at(c.linkage.outputs[0]) - p(x * x, 0.0)).norm() < 1e-9);
    }
}

#[test]
fn seed_search_lands_on_the_curve() {
    let f = circle("curve");
    let z = find_seed(|z| f.eval(&[z])[0].re, p(0.0, 0.0), 2.0).unwrap();
    assert!((z.norm() - 1.0).abs() < 1e-9);
}

#[test]
fn unit_circle_set_traces_a_closed_loop() {
    let c = realize_set(&circle("set"), &[0.0, 0.0], 2.0).unwrap();
    let seed = [p(1.0, 0.0), p(0.0, 0.0)];
    let t = trace_curve(&c.closed, &seed, &TraceOptions::default()).unwrap();
    assert!(t.closed);
    assert!(t.points.len() > 100);
    for q in &t.points {
        let (x, y) = (q.inputs[0].re, q.inputs[1].re);
        assert!((x * x + y * y - 1.0).abs() < 1e-8);
        assert!(q.residual < 1e-9);
    }
    let far = [p(0.2, 0.0), p(0.1, 0.0)];
    assert_eq!(trace_curve(&c.closed, &far, &TraceOptions::default()), Err(SolveError::SeedRejected));
}

#[test]
fn isolated_points_are_zero_dimensional() {
    let mut b = ExprBuilder::new();
    let x = b.var(0);
    let xx = b.mul(x, x);
    let one = b.real(1.0);
    let f = b.sub(xx, one);
    let f = b.finish(vec![f], None).unwrap();
    let c = realize_set(&f, &[0.0], 2.0).unwrap();
    for s in [1.0, -1.0] {
        let t = trace_curve(&c.closed, &[Point::new(s, 0.0)], &TraceOptions::default()).unwrap();
        assert_eq!(t.exit, TraceExit::ZeroDimensional);
        assert!((t.points[0].inputs[0] - p(s, 0.0)).norm() < 1e-9);
    }
}
