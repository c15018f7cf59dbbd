//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{blocks, disk, p};
use kempe::json::{to_json, LinkageDoc};
use kempe::parse::parse_expr;
use kempe_core::compiler::{compile_complex, compile_real, curve_linkage, realize_set, Compiled};
use kempe_core::compose::{basify, compose_functional};
use kempe_core::elementary::*;
use kempe_core::functional::WallShape;
use kempe_core::linkage::{assemble, residual, Edge, LinkageBuilder, Mark, VertexId};
use kempe_core::solve::*;
use kempe_core::{Field, FunctionalLinkage, Point, Realization};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn canonical(l: &FunctionalLinkage) -> Vec<bool> {
    vec![false; l.sym_bits()]
}

fn random_branch(l: &FunctionalLinkage, rng: &mut ChaCha8Rng) -> Vec<bool> {
    (0..l.sym_bits()).map(|_| rng.gen()).collect()
}

fn rel(got: Point, want: Point) -> f64 {
    (got - want).norm() / (1.0 + want.norm())
}

fn distinct(rs: &[Realization], tol: f64) -> usize {
    let mut reps: Vec<&Realization> = Vec::new();
    for r in rs {
        if reps.iter().all(|q| q.distance(r) > tol) {
            reps.push(r);
        }
    }
    reps.len()
}

fn perturb(r: &Realization, size: f64, rng: &mut ChaCha8Rng) -> Realization {
    Realization::new(r.positions.iter().map(|z| z + p(rng.gen_range(-size..size), rng.gen_range(-size..size))).collect())
}

fn elementary_suite() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_res, mut worst_err) = (0.0f64, 0.0f64);
    let all = blocks();
    for b in &all {
        let l = &b.linkage;
        for _ in 0..1000 {
            let x = sample_ball(&l.certified_ball, l.field, &mut rng);
            let phi = forward_place(l, &x, &random_branch(l, &mut rng)).map_err(|e| format!("{}: {e}", b.name))?;
            let res = residual(&l.linkage, &phi).unwrap().max_abs;
            ensure!(res < 1e-9, "{}: residual {res:e}", b.name);
            for (o, want) in l.outputs.iter().zip((b.f)(&x)) {
                let err = rel(phi.at(*o), want);
                ensure!(err < 1e-9, "{}: relative error {err:e}", b.name);
                worst_err = worst_err.max(err);
            }
            worst_res = worst_res.max(res);
        }
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(10), "took {took:?}");
    Ok(format!("{} blocks x 1000, max residual {worst_res:.1e}, max error {worst_err:.1e}", all.len()))
}

fn inversor_domain() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let eps: f64 = rng.gen_range(0.01..1.0);
        let r: f64 = eps + rng.gen_range(0.001..2.0);
        let a: f64 = r + rng.gen_range(0.001..2.0);
        let direct = (a * a - eps * eps).sqrt() - (r * r - eps * eps).sqrt();
        let d = (inversor_rho(a, r, eps) - direct).abs();
        ensure!(d < 1e-12, "rho({a}, {r}, {eps}) off by {d:e}");
        worst = worst.max(d);
    }
    let inv = make_inversor(1.0, disk(2.0, 0.0, 0.5)).map_err(|e| e.to_string())?;
    let phi = forward_place(&inv, &[p(2.0, 0.0)], &canonical(&inv)).map_err(|e| e.to_string())?;
    let j = phi.at(inv.outputs[0]);
    ensure!((j - p(0.5, 0.0)).norm() < 1e-12, "J1(2) = {j}");
    Ok(format!("max rho deviation {worst:.1e}, J1(2) = {:.15}", j.re))
}

fn symmetry_counts() -> Check {
    let tr = make_translator(p(1.0, 0.0), Direction::Fwd, disk(1.0, 0.0, 0.5)).map_err(|e| e.to_string())?;
    let pan = make_plain_pantograph(PantographMode::Scale(2.0), disk(1.0, 0.5, 0.5)).map_err(|e| e.to_string())?;
    let inv = make_inversor(1.0, disk(2.0, 0.0, 0.5)).map_err(|e| e.to_string())?;
    let second = make_translator(p(1.0, 0.0), Direction::Fwd, disk(2.0, 0.0, 0.5)).map_err(|e| e.to_string())?;
    let twice = compose_functional(&second, &tr, &[(0, 0)]).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut counts = Vec::new();
    for (name, l, order) in [("translator", &tr, 2u128), ("pantograph", &pan, 2), ("inversor", &inv, 4), ("translator^2", &twice, 4)] {
        ensure!(l.sym_order() == Some(order), "{name}: sym_order {:?}", l.sym_order());
        let ball = l.certified_ball[0];
        for _ in 0..10 {
            let x = ball.center + Point::from_polar(0.9 * ball.radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
            let all = enumerate_realizations(l, &[x]).map_err(|e| e.to_string())?;
            for phi in &all {
                ensure!(residual(&l.linkage, phi).unwrap().max_abs < 1e-9, "{name}: bad realization at {x}");
            }
            let n = distinct(&all, 1e-9);
            ensure!(n as u128 == order, "{name}: {n} realizations at {x}, expected {order}");
        }
        counts.push(format!("{name} {order}"));
    }
    Ok(counts.join(", "))
}

fn compile_doc(src: &str) -> Result<(Compiled, String), String> {
    let f = parse_expr(src).map_err(|e| e.to_string())?;
    let c = compile_complex(&f, &vec![p(0.0, 0.0); f.arity()], 1.0).map_err(|e| e.to_string())?;
    let mut doc = LinkageDoc::new(c.linkage.clone());
    doc.expr = Some(src.to_string());
    doc.report = Some(c.report.clone());
    Ok((c, to_json(&doc)))
}

fn compiler_end_to_end() -> Check {
    let start = Instant::now();
    let cases: [(&str, fn(&[Point]) -> Point); 3] = [
        ("z^2 + 1", |x| x[0] * x[0] + 1.0),
        ("z*w", |x| x[0] * x[1]),
        ("z^3 - z + 1", |x| x[0] * x[0] * x[0] - x[0] + 1.0),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut notes = Vec::new();
    for (src, f) in cases {
        let (c, first) = compile_doc(src)?;
        let (_, second) = compile_doc(src)?;
        ensure!(first == second, "{src}: artifacts differ");
        let l = &c.linkage;
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let x = sample_ball(&l.certified_ball, l.field, &mut rng);
            ensure!(x.iter().all(|z| z.norm() <= 1.0), "{src}: sample outside the unit ball");
            let phi = forward_place(l, &x, &random_branch(l, &mut rng)).map_err(|e| format!("{src}: {e}"))?;
            let res = residual(&l.linkage, &phi).unwrap().max_abs;
            ensure!(res < 1e-9, "{src}: residual {res:e}");
            let err = rel(phi.at(l.outputs[0]), f(&x));
            ensure!(err < 1e-6, "{src}: relative error {err:e} at {x:?}");
            worst = worst.max(err);
        }
        notes.push(format!("{src}: {} vertices, error {worst:.1e}", l.linkage.vertex_count()));
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(30), "took {took:?}");
    Ok(notes.join("; "))
}

fn real_restriction() -> Check {
    let f = parse_expr("x^2").map_err(|e| e.to_string())?;
    let c = compile_real(&f, &[0.0], 1.0).map_err(|e| e.to_string())?;
    let l = &c.linkage;
    ensure!(l.field == Field::Real, "field {:?}", l.field);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_im, mut worst_err) = (0.0f64, 0.0f64);
    let mut refined = 0;
    for k in 0..500 {
        let x = -1.0 + 2.0 * k as f64 / 499.0;
        let phi = forward_place(l, &[p(x, 0.0)], &random_branch(l, &mut rng)).map_err(|e| format!("x = {x}: {e}"))?;
        ensure!(residual(&l.linkage, &phi).unwrap().max_abs < 1e-9, "x = {x}: residual");
        let err = (phi.at(l.outputs[0]) - p(x * x, 0.0)).norm();
        ensure!(err < 1e-6, "x = {x}: output error {err:e}");
        worst_err = worst_err.max(err);
        // The linkage alone must hold the input on the axis: drop it and
        // solve again without any pin.
        if k % 5 == 0 {
            let out = refine(&l.linkage, &perturb(&phi, 1e-3, &mut rng));
            ensure!(out.status == RefineStatus::Converged, "x = {x}: refine {:?}", out.status);
            let z = out.realization.at(l.inputs[0]);
            ensure!(z.im.abs() < 1e-9, "x = {x}: input left the axis, Im = {:e}", z.im);
            let err = (out.realization.at(l.outputs[0]) - z * z).norm();
            ensure!(err < 1e-6, "x = {x}: refined output error {err:e}");
            worst_im = worst_im.max(z.im.abs());
            refined += 1;
        }
    }
    Ok(format!("500 placements, {refined} unpinned re-solves, max |Im| {worst_im:.1e}, max error {worst_err:.1e}"))
}

fn set_realization() -> Check {
    let circle = parse_expr("x^2 + y^2 - 1").map_err(|e| e.to_string())?;
    let c = realize_set(&circle, &[0.0, 0.0], 2.0).map_err(|e| e.to_string())?;
    let t = trace_curve(&c.closed, &[p(1.0, 0.0), p(0.0, 0.0)], &TraceOptions::default()).map_err(|e| e.to_string())?;
    ensure!(t.closed, "trace did not close: {:?}", t.exit);
    let mut worst = 0.0f64;
    for q in &t.points {
        let (x, y) = (q.inputs[0].re, q.inputs[1].re);
        let v = (x * x + y * y - 1.0).abs();
        ensure!(v < 1e-8, "|x^2+y^2-1| = {v:e} at ({x}, {y})");
        worst = worst.max(v);
    }

    let pair = parse_expr("x^2 - 1").map_err(|e| e.to_string())?;
    let s = realize_set(&pair, &[0.0], 2.0).map_err(|e| e.to_string())?;
    let open = &s.closed.open;
    let h = |x: f64| forward_place(open, &[p(x, 0.0)], &canonical(open)).map(|phi| phi.at(open.outputs[0]).re);
    // Sign changes of the open output along the real interval, refined by bisection.
    let grid: Vec<f64> = (0..=400).map(|k| -1.9 + 3.8 * k as f64 / 400.0).collect();
    let mut fibers = Vec::new();
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (ha, hb) = (h(a).map_err(|e| e.to_string())?, h(b).map_err(|e| e.to_string())?);
        if ha == 0.0 || ha.signum() == hb.signum() {
            continue;
        }
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if h(m).map_err(|e| e.to_string())?.signum() == ha.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        fibers.push(0.5 * (a + b));
    }
    ensure!(fibers.len() == 2, "found fibers {fibers:?}");
    ensure!((fibers[0] + 1.0).abs() < 1e-9 && (fibers[1] - 1.0).abs() < 1e-9, "found fibers {fibers:?}");

    let bits = open.sym_bits();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for &x in &fibers {
        let x = x.round();
        let t = trace_curve(&s.closed, &[p(x, 0.0)], &TraceOptions::default()).map_err(|e| e.to_string())?;
        ensure!(t.exit == TraceExit::ZeroDimensional, "x = {x}: trace exit {:?}", t.exit);
        // Every single reflection, then random sheets.
        let mut sheets: Vec<Vec<bool>> = (0..bits).map(|k| (0..bits).map(|j| j == k).collect()).collect();
        sheets.push(canonical(open));
        sheets.extend((0..64).map(|_| random_branch(open, &mut rng)));
        let mut found = Vec::new();
        for branch in &sheets {
            let phi = forward_place(open, &[p(x, 0.0)], branch).map_err(|e| e.to_string())?;
            let lifted = s.closed.lift(&phi);
            let res = residual(&s.closed.linkage, &lifted).unwrap().max_abs;
            ensure!(res < 1e-9, "x = {x}: closed residual {res:e}");
            found.push(lifted);
        }
        let n = distinct(&found, 1e-9);
        ensure!(n == sheets.len(), "x = {x}: only {n} of {} sheets distinct", sheets.len());
    }
    Ok(format!(
        "circle: {} points, max |f| {worst:.1e}; x^2-1: fibers at -1, 1, each 2^{bits} sheets ({} checked)",
        t.points.len(),
        bits + 65
    ))
}

fn curve_tracing() -> Check {
    let circle = parse_expr("z*conj(z) - 1").map_err(|e| e.to_string())?;
    let c = curve_linkage(&circle, p(0.0, 0.0), 2.0).map_err(|e| e.to_string())?;
    let t = trace_curve(&c.closed, &[p(1.0, 0.0)], &TraceOptions::default()).map_err(|e| e.to_string())?;
    ensure!(t.points.len() >= 100, "{} points", t.points.len());
    let worst = t.points.iter().map(|q| (q.inputs[0].norm() - 1.0).abs()).fold(0.0, f64::max);
    ensure!(worst < 1e-8, "| |z| - 1 | up to {worst:e}");

    let axis = parse_expr("-0.5i*(z - conj(z))").map_err(|e| e.to_string())?;
    let a = curve_linkage(&axis, p(0.0, 0.0), 2.0).map_err(|e| e.to_string())?;
    let opts = TraceOptions { max_steps: 200, ..TraceOptions::default() };
    let u = trace_curve(&a.closed, &[p(0.3, 0.0)], &opts).map_err(|e| e.to_string())?;
    ensure!(u.points.len() >= 10, "{} points on the axis", u.points.len());
    let off = u.points.iter().map(|q| q.inputs[0].im.abs()).fold(0.0, f64::max);
    ensure!(off < 1e-9, "Im z up to {off:e}");
    Ok(format!("circle: {} points, max deviation {worst:.1e}; axis: {} points, max |Im| {off:.1e}", t.points.len(), u.points.len()))
}

fn structural_invariants() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut checked = 0;
    while checked < 500 {
        let ang = rng.gen_range(0.0..std::f64::consts::TAU);
        let b = Point::from_polar(rng.gen_range(0.3..3.0), ang);
        let dist = rng.gen_range(0.5..3.0);
        let ball = kempe_core::Disk::new(Point::from_polar(dist, ang + rng.gen_range(-0.5..0.5)), rng.gen_range(0.05..0.4) * dist);
        let Ok(l) = make_translator(b, Direction::Fwd, ball) else { continue };
        let x = sample_ball(&l.certified_ball, l.field, &mut rng);
        let exact = forward_place(&l, &x, &random_branch(&l, &mut rng)).map_err(|e| e.to_string())?;
        let pins = LinearPin::point(l.inputs[0], x[0], 1e3).to_vec();
        let out = refine_with(&l.linkage, &perturb(&exact, 1e-3, &mut rng), &RefineOptions { pins, ..RefineOptions::default() });
        ensure!(out.status == RefineStatus::Converged, "refine {:?}", out.status);
        let v = |s: &str| out.realization.at(l.linkage.find_label(s).unwrap());
        for [q0, q1, q2, q3] in [["A", "C", "D", "B"], ["C", "E", "F", "D"]] {
            let d = ((v(q0) - v(q1)) - (v(q3) - v(q2))).norm();
            ensure!(d < 1e-9, "parallelogram {q0}{q1}{q2}{q3} off by {d:e}");
            worst = worst.max(d);
        }
        checked += 1;
    }

    let e = |u: u32, v: u32, length: f64| Edge { u: VertexId(u), v: VertexId(v), length };
    let marks = vec![Mark { vertex: VertexId(0), image: p(0.0, 0.0) }, Mark { vertex: VertexId(1), image: p(3.0, 0.0) }];
    let tri = assemble(vec![None, None, None], vec![e(0, 1, 3.0), e(1, 2, 2.5), e(0, 2, 2.0)], vec![], marks, Some((VertexId(0), VertexId(1))))
        .map_err(|e| e.to_string())?;
    let mut found: Vec<Realization> = Vec::new();
    for _ in 0..100 {
        let seed = Realization::new((0..3).map(|_| p(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0))).collect());
        let out = refine(&tri, &seed);
        if out.status == RefineStatus::Converged && found.iter().all(|r| r.distance(&out.realization) > 1e-6) {
            found.push(out.realization);
        }
    }
    ensure!(found.len() == 2, "triangle has {} realizations", found.len());

    let mut degrees = [0, 0];
    for trial in 0..20 {
        let k = rng.gen_range(2..5);
        let all_real = trial % 2 == 0;
        let images: Vec<Point> = (0..k)
            .map(|i| {
                let im = if all_real || (i > 0 && rng.gen()) { 0.0 } else { rng.gen_range(0.5..2.0) * if rng.gen() { 1.0 } else { -1.0 } };
                p(rng.gen_range(-3.0..3.0), im)
            })
            .collect();
        let mut lb = LinkageBuilder::new();
        let marked: Vec<VertexId> = (0..k).map(|i| lb.vertex(&format!("m{i}"))).collect();
        let free = lb.vertex("w");
        let wz = p(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        for (&v, &z) in marked.iter().zip(&images) {
            lb.mark(v, z);
        }
        lb.edge(free, marked[0], (wz - images[0]).norm());
        lb.edge(free, marked[1], (wz - images[1]).norm());
        let l = lb.build().map_err(|e| e.to_string())?;
        let b = basify(&l).map_err(|e| e.to_string())?;
        let expected = if images.iter().all(|z| z.im == 0.0) { 1 } else { 2 };
        ensure!(b.cover_degree == expected, "trial {trial}: degree {} for images {images:?}", b.cover_degree);
        degrees[expected as usize - 1] += 1;
        if expected == 2 {
            let mut x = vec![p(0.0, 0.0); b.linkage.vertex_count()];
            for (i, z) in images.iter().chain([wz].iter()).enumerate() {
                x[b.map[i].index()] = *z;
            }
            x[b.v1.index()] = p(0.0, 0.0);
            x[b.v2.index()] = p(1.0, 0.0);
            let phi = Realization::new(x);
            let mirror = phi.conj();
            for r in [&phi, &mirror] {
                let res = residual(&b.linkage, r).unwrap().max_abs;
                ensure!(res < 1e-9, "trial {trial}: residual {res:e}");
            }
            ensure!(phi.distance(&mirror) > 1e-6, "trial {trial}: conjugate coincides");
            let out = refine(&b.linkage, &perturb(&mirror, 1e-3, &mut rng));
            ensure!(out.status == RefineStatus::Converged, "trial {trial}: refine {:?}", out.status);
            ensure!(out.realization.distance(&mirror) < 1e-6 || out.realization.distance(&phi) < 1e-6, "trial {trial}: solver left the pair");
        }
    }
    Ok(format!(
        "{checked} parallelogram realizations, max defect {worst:.1e}; triangle 2; basify degrees 1 x{} and 2 x{}",
        degrees[0], degrees[1]
    ))
}

fn robustness() -> Check {
    let mut walls = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut most = 0;
    for b in blocks() {
        let l = &b.linkage;
        for w in &l.walls {
            let Some(slot) = l.inputs.iter().position(|&v| v == w.vertex) else { continue };
            if w.origin.is_some() {
                continue;
            }
            let mut x: Vec<Point> = l.certified_ball.iter().map(|d| d.center).collect();
            let on = match w.shape {
                WallShape::Circle { center, radius } => {
                    // Nearest point of the circle to the ball.
                    let d = x[slot] - center;
                    let dir = if d.norm() > 0.0 { d / d.norm() } else { p(1.0, 0.0) };
                    center + dir * radius
                }
                WallShape::Line { point, .. } => point,
            };
            if l.field == Field::Real && on.im != 0.0 {
                continue;
            }
            x[slot] = on;
            let got = forward_place(l, &x, &canonical(l));
            ensure!(got == Err(SolveError::OutsideCertifiedBall { slot }), "{}: wall point {on} gave {got:?}", b.name);
            walls += 1;
        }
        for _ in 0..5 {
            let x = sample_ball(&l.certified_ball, l.field, &mut rng);
            let exact = forward_place(l, &x, &random_branch(l, &mut rng)).map_err(|e| e.to_string())?;
            let pins = l.inputs.iter().zip(&x).flat_map(|(&v, &z)| LinearPin::point(v, z, 1e3)).collect();
            let out = refine_with(&l.linkage, &perturb(&exact, 1e-3, &mut rng), &RefineOptions { pins, ..RefineOptions::default() });
            ensure!(out.status == RefineStatus::Converged, "{}: refine {:?}", b.name, out.status);
            ensure!(out.iterations <= 25, "{}: {} iterations", b.name, out.iterations);
            for &o in &l.outputs {
                ensure!((out.realization.at(o) - exact.at(o)).norm() < 1e-9, "{}: refined output moved", b.name);
            }
            most = most.max(out.iterations);
        }
    }
    ensure!(walls >= 10, "only {walls} wall points checked");
    Ok(format!("{walls} wall points refused; refine needed at most {most} iterations"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("elementary suite", elementary_suite),
        ("inversor domain", inversor_domain),
        ("symmetry counting", symmetry_counts),
        ("compiler end to end", compiler_end_to_end),
        ("real restriction", real_restriction),
        ("set realization", set_realization),
        ("curve tracing", curve_tracing),
        ("structural invariants", structural_invariants),
        ("robustness", robustness),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err(String::from("panicked")));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("PASS {}. {name} ({secs:.2} s): {note}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name} ({secs:.2} s): {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
