//! Compilation of expression DAGs into functional linkages.
//!
//! Every node becomes a functional linkage whose inputs are the variables it
//! depends on and whose single output carries the node's value. A node's
//! block is sized on the output enclosures of its children, so compositions
//! never leave a certified ball.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::compose::{
    basify_functional, close_outputs, compose_functional, ensure_marked, juxtapose, move_input, restrict_equal_inputs,
    ClosedFunctionalLinkage, ComposeError,
};
use crate::elementary::{
    make_adder, make_conjugator, make_constant, make_multiplier, make_pantograph, make_squarer, make_wire, straight_line_for,
    ElementaryError, PantographMode,
};
use crate::expr::{Node, NodeId, PolyExpr};
use crate::functional::{Field, FunctionalLinkage};
use crate::geom::{Disk, Point};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompileError {
    #[error("parameter search failed at node {node}: {source}")]
    CompileOverflow { node: usize, source: ElementaryError },
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error("radius must be positive and finite")]
    BadRadius,
    #[error("expected {expected} centre coordinates, got {found}")]
    CenterArity { expected: usize, found: usize },
    #[error("conjugation is only allowed in curve linkages")]
    ConjNotAllowed,
    #[error("real compilation needs real constants and a real centre")]
    NotReal,
    #[error("expression is not real valued (coefficient defect {0:e})")]
    NotRealValued(f64),
    #[error("curve linkages take one variable and one output")]
    CurveArity,
    #[error("no point of the curve found in the ball")]
    NoSeedFound,
}

/// One block of the compilation.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    /// Operation name (`add`, `mul`, `square`, `neg`, `scale`, `conj`,
    /// `const`, `straight_line`, ...).
    pub op: String,
    /// DAG node, when the stage compiles one.
    pub node: Option<usize>,
    pub params: Vec<(String, f64)>,
    /// Disks the block is certified on.
    pub ball: Vec<Disk>,
    pub sym_bits: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompileReport {
    pub stages: Vec<Stage>,
    pub sym_bits: usize,
    pub certified_ball: Vec<Disk>,
}

impl CompileReport {
    /// `2^sym_bits`, when it fits.
    pub fn sym_order(&self) -> Option<u128> {
        1u128.checked_shl(self.sym_bits as u32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Compiled {
    pub linkage: FunctionalLinkage,
    pub report: CompileReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledSet {
    pub closed: ClosedFunctionalLinkage,
    pub report: CompileReport,
}

/// Partial result: a linkage over the sorted variables `vars`.
#[derive(Clone)]
struct Part {
    link: FunctionalLinkage,
    vars: Vec<usize>,
}

struct Compiler<'a> {
    expr: &'a PolyExpr,
    ball: Vec<Disk>,
    allow_conj: bool,
    stages: Vec<Stage>,
}

fn stage(op: &str, node: Option<usize>, params: &[(&str, f64)], block: &FunctionalLinkage) -> Stage {
    Stage {
        op: String::from(op),
        node,
        params: params.iter().map(|&(k, v)| (String::from(k), v)).collect(),
        ball: block.certified_ball.clone(),
        sym_bits: block.sym_bits(),
    }
}

/// Identifies repeated variables and sorts the inputs by variable.
fn normalize(mut link: FunctionalLinkage, mut vars: Vec<usize>) -> Result<Part, ComposeError> {
    let mut j = vars.len();
    while j > 0 {
        j -= 1;
        if let Some(i) = vars[..j].iter().position(|&v| v == vars[j]) {
            link = restrict_equal_inputs(&link, i, j)?;
            vars.remove(j);
        }
    }
    // Selection sort by moving inputs; arities are small.
    for k in 0..vars.len() {
        let m = (k..vars.len()).min_by_key(|&i| vars[i]).unwrap();
        if m != k {
            link = move_input(link, m, k);
            let v = vars.remove(m);
            vars.insert(k, v);
        }
    }
    Ok(Part { link, vars })
}

impl Compiler<'_> {
    fn fail(node: usize) -> impl Fn(ElementaryError) -> CompileError {
        move |source| CompileError::CompileOverflow { node, source }
    }

    /// Feeds the children into `block`; equal children share one output.
    fn join(&mut self, block: FunctionalLinkage, kids: &[&Part]) -> Result<Part, CompileError> {
        if kids.len() == 2 && core::ptr::eq(kids[0], kids[1]) {
            let link = compose_functional(&block, &kids[0].link, &[(0, 0), (1, 0)])?;
            return Ok(Part { link, vars: kids[0].vars.clone() });
        }
        let links: Vec<&FunctionalLinkage> = kids.iter().map(|k| &k.link).collect();
        let both = juxtapose(&links)?;
        let vars: Vec<usize> = kids.iter().flat_map(|k| k.vars.iter().copied()).collect();
        let pairs: Vec<(usize, usize)> = (0..kids.len()).map(|k| (k, k)).collect();
        let link = compose_functional(&block, &both, &pairs)?;
        Ok(normalize(link, vars)?)
    }

    fn node(&mut self, id: usize, parts: &[Option<Part>]) -> Result<Part, CompileError> {
        let get = |n: NodeId| parts[n.index()].as_ref().expect("children compile first");
        let fail = Self::fail(id);
        Ok(match self.expr.nodes()[id] {
            Node::Var(i) => Part { link: make_wire(self.ball[i], Field::Complex), vars: vec![i] },
            Node::Const(z) => {
                let c = make_constant(&[z], 0);
                self.stages.push(stage("const", Some(id), &[("re", z.re), ("im", z.im)], &c));
                Part { link: c, vars: Vec::new() }
            }
            Node::Add(a, b) => {
                let (pa, pb) = (get(a), get(b));
                let block = make_adder(pa.link.output_range[0], pb.link.output_range[0]).map_err(fail)?;
                self.stages.push(stage("add", Some(id), &[], &block));
                self.join(block, &[pa, pb])?
            }
            Node::Mul(a, b) if a == b => {
                let pa = get(a);
                let block = make_squarer(pa.link.output_range[0]).map_err(fail)?;
                self.stages.push(stage("square", Some(id), &[], &block));
                self.join(block, &[pa])?
            }
            Node::Mul(a, b) => {
                let (pa, pb) = (get(a), get(b));
                let block = make_multiplier(&[pa.link.output_range[0], pb.link.output_range[0]]).map_err(fail)?;
                self.stages.push(stage("mul", Some(id), &[], &block));
                self.join(block, &[pa, pb])?
            }
            Node::Neg(a) => {
                let pa = get(a);
                let block = make_pantograph(PantographMode::Negate, pa.link.output_range[0]).map_err(fail)?;
                self.stages.push(stage("neg", Some(id), &[], &block));
                self.join(block, &[pa])?
            }
            Node::Scale(l, a) => self.scale(id, l, get(a))?,
            Node::Conj(a) => {
                if !self.allow_conj {
                    return Err(CompileError::ConjNotAllowed);
                }
                let pa = get(a);
                let block = make_conjugator(pa.link.output_range[0]).map_err(fail)?;
                self.stages.push(stage("conj", Some(id), &[], &block));
                self.join(block, &[pa])?
            }
        })
    }

    /// `λ x` as a negation (for `λ < 0`) followed by a scaling or division.
    fn scale(&mut self, id: usize, l: f64, pa: &Part) -> Result<Part, CompileError> {
        let fail = Self::fail(id);
        if l == 0.0 {
            let c = make_constant(&[Point::new(0.0, 0.0)], 0);
            self.stages.push(stage("const", Some(id), &[("re", 0.0), ("im", 0.0)], &c));
            return Ok(Part { link: c, vars: Vec::new() });
        }
        let mut cur = pa.clone();
        if l < 0.0 {
            let block = make_pantograph(PantographMode::Negate, cur.link.output_range[0]).map_err(fail)?;
            self.stages.push(stage("neg", Some(id), &[], &block));
            cur = self.join(block, &[&cur])?;
        }
        let a = l.abs();
        if a != 1.0 {
            let mode = if a > 1.0 { PantographMode::Scale(a) } else { PantographMode::Div(1.0 / a) };
            let block = make_pantograph(mode, cur.link.output_range[0]).map_err(Self::fail(id))?;
            self.stages.push(stage("scale", Some(id), &[("lambda", a)], &block));
            cur = self.join(block, &[&cur])?;
        }
        Ok(cur)
    }

    fn run(mut self) -> Result<Compiled, CompileError> {
        let n = self.expr.nodes().len();
        // Only nodes reachable from the outputs are compiled.
        let mut live = vec![false; n];
        for o in self.expr.outputs() {
            live[o.index()] = true;
        }
        for id in (0..n).rev() {
            if live[id] {
                match self.expr.nodes()[id] {
                    Node::Add(a, b) | Node::Mul(a, b) => {
                        live[a.index()] = true;
                        live[b.index()] = true;
                    }
                    Node::Neg(a) | Node::Scale(_, a) | Node::Conj(a) => live[a.index()] = true,
                    Node::Var(_) | Node::Const(_) => {}
                }
            }
        }
        let mut parts: Vec<Option<Part>> = vec![None; n];
        for id in 0..n {
            if live[id] {
                let p = self.node(id, &parts)?;
                parts[id] = Some(p);
            }
        }
        let m = self.expr.arity();
        let roots: Vec<Part> = self.expr.outputs().iter().map(|o| parts[o.index()].clone().unwrap()).collect();
        let mut links: Vec<&FunctionalLinkage> = roots.iter().map(|p| &p.link).collect();
        let mut vars: Vec<usize> = roots.iter().flat_map(|p| p.vars.iter().copied()).collect();
        let missing: Vec<usize> = (0..m).filter(|i| !vars.contains(i)).collect();
        let free = make_constant(&[], missing.len());
        if !missing.is_empty() {
            links.push(&free);
            vars.extend_from_slice(&missing);
        }
        let link = if links.len() == 1 { links[0].clone() } else { juxtapose(&links)? };
        let mut part = normalize(link, vars)?;
        part.link.certified_ball = self.ball.clone();
        part.link.field = Field::Complex;
        let report = CompileReport { stages: self.stages, sym_bits: part.link.sym_bits(), certified_ball: self.ball };
        debug_assert_eq!(report.stages.iter().map(|s| s.sym_bits).sum::<usize>(), report.sym_bits);
        Ok(Compiled { linkage: part.link, report })
    }
}

fn polydisc(center: &[Point], radius: f64, arity: usize) -> Result<Vec<Disk>, CompileError> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(CompileError::BadRadius);
    }
    if center.len() != arity {
        return Err(CompileError::CenterArity { expected: arity, found: center.len() });
    }
    Ok(center.iter().map(|&c| Disk::new(c, radius)).collect())
}

/// Complex functional linkage for `f` certified on the polydisc of radius
/// `radius` about `center` (which contains the ball of that radius).
pub fn compile_complex(f: &PolyExpr, center: &[Point], radius: f64) -> Result<Compiled, CompileError> {
    if f.has_conj() {
        return Err(CompileError::ConjNotAllowed);
    }
    let ball = polydisc(center, radius, f.arity())?;
    Compiler { expr: f, ball, allow_conj: false, stages: Vec::new() }.run()
}

/// Real functional linkage for a polynomial with real coefficients, with
/// inputs held on the real axis by a straight-line linkage and the marking
/// replaced by the based edge.
pub fn compile_real(f: &PolyExpr, center: &[f64], radius: f64) -> Result<Compiled, CompileError> {
    if !f.constants_real() || center.iter().any(|c| !c.is_finite()) {
        return Err(CompileError::NotReal);
    }
    let zc: Vec<Point> = center.iter().map(|&c| Point::new(c, 0.0)).collect();
    let Compiled { linkage, mut report } = compile_complex(f, &zc, radius)?;
    let mut link = linkage;
    if f.arity() > 0 {
        let s = straight_line_for(&link.certified_ball).map_err(|source| CompileError::CompileOverflow { node: usize::MAX, source })?;
        let t = s.placement.steps[0].param("t").unwrap_or(0.0);
        report.stages.push(stage("straight_line", None, &[("t", t)], &s));
        let pairs: Vec<(usize, usize)> = (0..f.arity()).map(|i| (i, i)).collect();
        link = compose_functional(&link, &s, &pairs)?;
    } else {
        link = ensure_marked(&link, Point::new(0.0, 0.0), "v1")?;
    }
    link.field = Field::Real;
    let link = basify_functional(&link)?;
    report.sym_bits = link.sym_bits();
    report.certified_ball = link.certified_ball.clone();
    Ok(Compiled { linkage: link, report })
}

/// Closed linkage whose admissible inputs are the common zeros of the
/// outputs of `f` in the ball.
pub fn realize_set(f: &PolyExpr, center: &[f64], radius: f64) -> Result<CompiledSet, CompileError> {
    let Compiled { linkage, report } = compile_real(f, center, radius)?;
    let zeros = vec![Point::new(0.0, 0.0); linkage.outputs.len()];
    Ok(CompiledSet { closed: close_outputs(&linkage, &zeros)?, report })
}

/// Point of `{g = 0}` in the disk of radius `radius` about `center`: scans
/// a grid for a sign change and bisects along it.
pub fn find_seed(g: impl Fn(Point) -> f64, center: Point, radius: f64) -> Option<Point> {
    const N: i32 = 48;
    let r = 0.95 * radius;
    let at = |i: i32, j: i32| center + Point::new(r * (2 * i - N) as f64 / N as f64, r * (2 * j - N) as f64 / N as f64);
    let inside = |z: Point| (z - center).norm() <= r;
    let mut best: Option<(f64, Point)> = None;
    for i in 0..=N {
        for j in 0..=N {
            let p = at(i, j);
            if !inside(p) {
                continue;
            }
            for q in [at(i + 1, j), at(i, j + 1)] {
                if !inside(q) {
                    continue;
                }
                let (gp, gq) = (g(p), g(q));
                if gp == 0.0 {
                    return Some(p);
                }
                if gp * gq < 0.0 {
                    let (mut a, mut b, mut ga) = (p, q, gp);
                    for _ in 0..200 {
                        let m = (a + b) / 2.0;
                        let gm = g(m);
                        if gm == 0.0 || (b - a).norm() < 1e-15 * (1.0 + m.norm()) {
                            a = m;
                            break;
                        }
                        if (gm < 0.0) == (ga < 0.0) {
                            a = m;
                            ga = gm;
                        } else {
                            b = m;
                        }
                    }
                    let v = g(a).abs();
                    if best.is_none_or(|(bv, _)| v < bv) {
                        best = Some((v, a));
                    }
                }
            }
        }
    }
    best.filter(|(v, _)| *v < 1e-9).map(|(_, p)| p)
}

/// Linkage drawing the real curve `{f(z, conj z) = 0}` inside the disk of
/// radius `radius` about `center`; `f` must be real valued.
pub fn curve_linkage(f: &PolyExpr, center: Point, radius: f64) -> Result<CompiledSet, CompileError> {
    if f.arity() != 1 || f.outputs().len() != 1 {
        return Err(CompileError::CurveArity);
    }
    let scale = f.expand(0).values().map(|c| c.norm()).fold(1.0, f64::max);
    let defect = f.realness_defect(0);
    if defect > 1e-12 * scale {
        return Err(CompileError::NotRealValued(defect));
    }
    find_seed(|z| f.eval(&[z])[0].re, center, radius).ok_or(CompileError::NoSeedFound)?;
    let ball = polydisc(&[center], radius, 1)?;
    let Compiled { linkage, report } = Compiler { expr: f, ball, allow_conj: true, stages: Vec::new() }.run()?;
    let link = ensure_marked(&linkage, Point::new(0.0, 0.0), "O")?;
    Ok(CompiledSet { closed: close_outputs(&link, &[Point::new(0.0, 0.0)])?, report })
}
