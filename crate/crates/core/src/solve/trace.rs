//! Predictor–corrector tracing of the input curve of a closed linkage.
//!
//! The traced observable `u` collects the real coordinates of the inputs
//! (one per real input, two per complex one). The open linkage supplies the
//! constraint `h(u) = Re(output)` by forward placement; its gradient gives
//! the tangent. The corrector refines the whole closed linkage with `u`
//! held on the hyperplane through the predicted point normal to the tangent,
//! then polishes `u` by Newton steps on the open linkage, whose forward
//! placement is far better conditioned than the closed residual.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use super::place::forward_place;
use super::refine::{refine_with, LinearPin, RefineOptions, RefineStatus};
use super::SolveError;
use crate::compose::ClosedFunctionalLinkage;
use crate::functional::Field;
use crate::geom::Point;
use crate::linkage::{residual, Realization, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceExit {
    /// Returned within half a step of the seed after at least ten steps.
    Closed,
    /// The predictor left the certified ball.
    BallExit,
    MaxSteps,
    /// The step shrank below its floor without a successful correction.
    Stalled,
    /// The input set has no tangent direction (isolated points).
    ZeroDimensional,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceOptions {
    pub step: f64,
    pub max_steps: usize,
    /// Weight of the hyperplane pin in the corrector.
    pub pin_weight: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { step: 0.05, max_steps: 2000, pin_weight: 1e3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    pub inputs: Vec<Point>,
    /// Largest residual of the closed linkage at this point.
    pub residual: f64,
    /// `|output|` of the open linkage placed at these inputs.
    pub value: f64,
    pub realization: Realization,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub points: Vec<TracePoint>,
    pub closed: bool,
    pub exit: TraceExit,
}

/// Real coordinates of the inputs and back.
struct Chart {
    inputs: Vec<VertexId>,
    field: Field,
}

impl Chart {
    fn dim(&self) -> usize {
        match self.field {
            Field::Real => self.inputs.len(),
            Field::Complex => 2 * self.inputs.len(),
        }
    }

    fn to_points(&self, u: &[f64]) -> Vec<Point> {
        match self.field {
            Field::Real => u.iter().map(|&x| Point::new(x, 0.0)).collect(),
            Field::Complex => u.chunks(2).map(|c| Point::new(c[0], c[1])).collect(),
        }
    }

    fn from_points(&self, z: &[Point]) -> Vec<f64> {
        match self.field {
            Field::Real => z.iter().map(|p| p.re).collect(),
            Field::Complex => z.iter().flat_map(|p| [p.re, p.im]).collect(),
        }
    }

    /// Pin `Σ τ_k u_k = <τ, p>` on the input vertices of the closed linkage.
    fn hyperplane(&self, tau: &[f64], p: &[f64], weight: f64) -> LinearPin {
        let terms = match self.field {
            Field::Real => self.inputs.iter().zip(tau).map(|(&v, &t)| (v, Point::new(t, 0.0))).collect(),
            Field::Complex => self.inputs.iter().zip(tau.chunks(2)).map(|(&v, t)| (v, Point::new(t[0], t[1]))).collect(),
        };
        LinearPin { terms, target: dot(tau, p), weight }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Tracer<'a> {
    c: &'a ClosedFunctionalLinkage,
    chart: Chart,
    canonical: Vec<bool>,
    weight: f64,
}

impl Tracer<'_> {
    /// Open placement at `u` and the constraint values `Re(output_k - target_k)`.
    fn place(&self, u: &[f64]) -> Result<(Realization, Vec<f64>), SolveError> {
        let open = &self.c.open;
        let phi = forward_place(open, &self.chart.to_points(u), &self.canonical)?;
        let h = self.c.targets.iter().enumerate().map(|(k, t)| (phi.at(open.outputs[k]) - t).re).collect();
        Ok((phi, h))
    }

    /// Unit tangent of the level set at `u` (requires one constraint in two
    /// dimensions), oriented along `prev` when given.
    fn tangent(&self, u: &[f64], prev: Option<&[f64]>) -> Result<Vec<f64>, SolveError> {
        let grad = self.gradient(u)?;
        let mut t = vec![-grad[1], grad[0]];
        let n = norm(&t);
        if !(n > 0.0) {
            return Err(SolveError::SeedRejected);
        }
        t.iter_mut().for_each(|x| *x /= n);
        if prev.is_some_and(|p| dot(p, &t) < 0.0) {
            t.iter_mut().for_each(|x| *x = -*x);
        }
        Ok(t)
    }

    /// Gradient of the first constraint by central differences.
    fn gradient(&self, u: &[f64]) -> Result<Vec<f64>, SolveError> {
        let d = 1e-6 * norm(u).max(1.0);
        let mut grad = vec![0.0; u.len()];
        for k in 0..u.len() {
            let (mut up, mut dn) = (u.to_vec(), u.to_vec());
            up[k] += d;
            dn[k] -= d;
            grad[k] = (self.place(&up)?.1[0] - self.place(&dn)?.1[0]) / (2.0 * d);
        }
        Ok(grad)
    }

    /// Newton steps along the gradient onto `h = 0`, then the exact open
    /// placement lifted to the closed linkage.
    fn polish(&self, mut u: Vec<f64>) -> Option<TracePoint> {
        for _ in 0..8 {
            let h = self.place(&u).ok()?.1[0];
            if h.abs() < 1e-14 {
                break;
            }
            let g = self.gradient(&u).ok()?;
            let gg = dot(&g, &g);
            if !(gg > 0.0) {
                return None;
            }
            u.iter_mut().zip(&g).for_each(|(x, gk)| *x -= h * gk / gg);
        }
        let (open, h) = self.place(&u).ok()?;
        let realization = self.c.lift(&open);
        let res = residual(&self.c.linkage, &realization).ok()?.max_abs;
        let value = h.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        (res < 1e-9).then(|| TracePoint { inputs: self.chart.to_points(&u), residual: res, value, realization })
    }

    /// Corrects the point predicted at `u` with the hyperplane normal `tau`.
    fn correct(&self, u: &[f64], tau: &[f64]) -> Option<TracePoint> {
        let (open, _) = self.place(u).ok()?;
        let seed = self.c.lift(&open);
        let opts = RefineOptions { pins: vec![self.chart.hyperplane(tau, u, self.weight)], ..RefineOptions::default() };
        let out = refine_with(&self.c.linkage, &seed, &opts);
        if out.status != RefineStatus::Converged || out.max_abs >= 1e-9 {
            return None;
        }
        let inputs: Vec<Point> = self.c.inputs.iter().map(|v| out.realization.at(*v)).collect();
        self.polish(self.chart.from_points(&inputs))
    }
}

/// Traces the curve of admissible inputs of `c` from `seed`.
pub fn trace_curve(c: &ClosedFunctionalLinkage, seed: &[Point], opts: &TraceOptions) -> Result<TraceResult, SolveError> {
    let chart = Chart { inputs: c.inputs.clone(), field: c.field() };
    let t = Tracer { c, chart, canonical: vec![false; c.open.sym_bits()], weight: opts.pin_weight };
    let u0 = t.chart.from_points(seed);
    let dim = t.chart.dim();
    if dim != c.targets.len() + 1 {
        // Zero-dimensional fibres: only the seed itself can be confirmed.
        if dim == c.targets.len() {
            let (open, h) = t.place(&u0)?;
            if h.iter().any(|x| x.abs() > 1e-6) {
                return Err(SolveError::SeedRejected);
            }
            let out = refine_with(&c.linkage, &c.lift(&open), &RefineOptions::default());
            if out.status != RefineStatus::Converged {
                return Err(SolveError::SeedRejected);
            }
            let inputs = c.inputs.iter().map(|v| out.realization.at(*v)).collect();
            let p = TracePoint { inputs, residual: out.max_abs, value: h.iter().fold(0.0f64, |m, x| m.max(x.abs())), realization: out.realization };
            return Ok(TraceResult { points: vec![p], closed: false, exit: TraceExit::ZeroDimensional });
        }
        return Err(SolveError::SeedRejected);
    }
    if t.place(&u0)?.1.iter().any(|x| x.abs() > 1e-6) {
        return Err(SolveError::SeedRejected);
    }
    let tau0 = t.tangent(&u0, None)?;
    let first = t.correct(&u0, &tau0).ok_or(SolveError::SeedRejected)?;
    let start = t.chart.from_points(&first.inputs);
    let mut points = vec![first];
    let mut u = start.clone();
    let mut tau = tau0;
    let mut h = opts.step;
    let floor = opts.step / 1024.0;
    let mut streak = 0;
    let mut exit = TraceExit::MaxSteps;
    let mut closed = false;
    while points.len() <= opts.max_steps {
        let pred: Vec<f64> = u.iter().zip(&tau).map(|(a, b)| a + h * b).collect();
        if c.open.in_ball(&t.chart.to_points(&pred)).is_err() {
            exit = TraceExit::BallExit;
            break;
        }
        let next = t.correct(&pred, &tau);
        let ok = next.as_ref().is_some_and(|p| {
            let v = t.chart.from_points(&p.inputs);
            norm(&v.iter().zip(&u).map(|(a, b)| a - b).collect::<Vec<_>>()) <= 2.0 * h
        });
        if !ok {
            h /= 2.0;
            streak = 0;
            if h < floor {
                exit = TraceExit::Stalled;
                break;
            }
            continue;
        }
        let p = next.unwrap();
        u = t.chart.from_points(&p.inputs);
        points.push(p);
        streak += 1;
        if streak >= 5 {
            h = (2.0 * h).min(opts.step);
            streak = 0;
        }
        let back = norm(&u.iter().zip(&start).map(|(a, b)| a - b).collect::<Vec<_>>());
        if points.len() > 10 && back <= opts.step / 2.0 {
            closed = true;
            exit = TraceExit::Closed;
            break;
        }
        tau = match t.tangent(&u, Some(&tau)) {
            Ok(x) => x,
            Err(_) => {
                exit = TraceExit::Stalled;
                break;
            }
        };
    }
    Ok(TraceResult { points, closed, exit })
}
