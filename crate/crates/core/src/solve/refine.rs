//! Levenberg–Marquardt refinement of realizations on the residual vector of
//! a linkage, with optional linear pins.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use super::sparse::SymbolicCholesky;
use crate::geom::Point;
use crate::linkage::{AbstractLinkage, Realization, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineStatus {
    Converged,
    /// No further decrease was possible above the tolerance.
    Stalled,
    /// The iterate blew up or left the finite range.
    Diverged,
}

/// Soft constraint `weight * (Σ Re(conj(c) x_v) - target) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPin {
    pub terms: Vec<(VertexId, Point)>,
    pub target: f64,
    pub weight: f64,
}

impl LinearPin {
    /// Pins `v` to `z` through two rows.
    pub fn point(v: VertexId, z: Point, weight: f64) -> [LinearPin; 2] {
        [
            LinearPin { terms: vec![(v, Point::new(1.0, 0.0))], target: z.re, weight },
            LinearPin { terms: vec![(v, Point::new(0.0, 1.0))], target: z.im, weight },
        ]
    }

    fn value(&self, x: &[Point]) -> f64 {
        self.terms.iter().map(|&(v, c)| (c.conj() * x[v.index()]).re).sum::<f64>() - self.target
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineOptions {
    pub max_iter: usize,
    /// Target for the largest linkage residual; raised to the rounding floor
    /// of the configuration's scale when that is larger.
    pub tol: f64,
    pub pins: Vec<LinearPin>,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions { max_iter: 100, tol: 1e-12, pins: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineOutcome {
    pub realization: Realization,
    pub status: RefineStatus,
    pub iterations: usize,
    /// Largest linkage residual at the returned realization.
    pub max_abs: f64,
    /// Largest unweighted pin violation.
    pub pin_abs: f64,
}

/// Residual rows with their gradients, over unknowns `2v` (real part) and
/// `2v + 1` (imaginary part).
struct System<'a> {
    l: &'a AbstractLinkage,
    pins: &'a [LinearPin],
}

impl System<'_> {
    fn rows(&self, x: &[Point], mut emit: impl FnMut(f64, &[(usize, f64)], bool)) {
        let re = |v: VertexId| 2 * v.index();
        let im = |v: VertexId| 2 * v.index() + 1;
        for e in self.l.edges() {
            let d = x[e.u.index()] - x[e.v.index()];
            let n = d.norm();
            let g = if n > 0.0 { d / n } else { Point::new(0.0, 0.0) };
            emit(n - e.length, &[(re(e.u), g.re), (im(e.u), g.im), (re(e.v), -g.re), (im(e.v), -g.im)], true);
        }
        for c in self.l.collinear() {
            let d = x[c.b.index()] - x[c.a.index()] * c.r - x[c.c.index()] * c.s;
            emit(d.re, &[(re(c.b), 1.0), (re(c.a), -c.r), (re(c.c), -c.s)], true);
            emit(d.im, &[(im(c.b), 1.0), (im(c.a), -c.r), (im(c.c), -c.s)], true);
        }
        for m in self.l.marking() {
            let d = x[m.vertex.index()] - m.image;
            emit(d.re, &[(re(m.vertex), 1.0)], true);
            emit(d.im, &[(im(m.vertex), 1.0)], true);
        }
        let mut buf = Vec::new();
        for p in self.pins {
            buf.clear();
            for &(v, c) in &p.terms {
                buf.push((re(v), p.weight * c.re));
                buf.push((im(v), p.weight * c.im));
            }
            emit(p.weight * p.value(x), &buf, false);
        }
    }

    fn cost(&self, x: &[Point]) -> (f64, f64, f64) {
        let (mut f, mut link, mut pin) = (0.0, 0.0f64, 0.0f64);
        self.rows(x, |r, _, own| {
            f += 0.5 * r * r;
            if own {
                link = link.max(r.abs());
            }
        });
        for p in self.pins {
            pin = pin.max(p.value(x).abs());
        }
        (f, link, pin)
    }
}

/// `refine_with` under the default options.
pub fn refine(l: &AbstractLinkage, seed: &Realization) -> RefineOutcome {
    refine_with(l, seed, &RefineOptions::default())
}

/// Damped Gauss–Newton from `seed`, with Nielsen's update of the damping.
pub fn refine_with(l: &AbstractLinkage, seed: &Realization, opts: &RefineOptions) -> RefineOutcome {
    let sys = System { l, pins: &opts.pins };
    let n = 2 * l.vertex_count();
    let mut x = seed.positions.clone();
    let scale = x.iter().map(|z| z.norm()).chain(l.edges().iter().map(|e| e.length)).fold(1.0, f64::max);
    let tol = opts.tol.max(64.0 * f64::EPSILON * scale);

    let mut pairs = Vec::new();
    sys.rows(&x, |_, g, _| {
        for (a, &(i, _)) in g.iter().enumerate() {
            for &(j, _) in &g[..a] {
                pairs.push((i, j));
            }
        }
    });
    let sym = SymbolicCholesky::analyze(n, pairs);

    let (mut f, mut link, mut pin) = sys.cost(&x);
    let done = |link: f64, pin: f64| link < tol && pin < tol.max(1e-12);
    let mut mu = 0.0;
    let mut nu = 2.0;
    let mut iterations = 0;
    let mut status = RefineStatus::Stalled;
    // Extra steps once converged, to get from the tolerance to rounding
    // level (skipped when the seed is already a realization).
    let mut polish = 2;
    'outer: while iterations < opts.max_iter {
        if !f.is_finite() {
            status = RefineStatus::Diverged;
            break;
        }
        if done(link, pin) {
            status = RefineStatus::Converged;
            if iterations == 0 || polish == 0 {
                break;
            }
            polish -= 1;
        }
        let mut a = sym.zeroed();
        let mut grad = vec![0.0; n];
        sys.rows(&x, |r, g, _| {
            for (k, &(i, gi)) in g.iter().enumerate() {
                grad[i] += gi * r;
                sym.add_diagonal(&mut a, i, gi * gi);
                for &(j, gj) in &g[..k] {
                    sym.add(&mut a, i, j, gi * gj);
                }
            }
        });
        if mu == 0.0 {
            mu = 1e-6 * (0..n).map(|i| sym.diagonal(&a, i)).fold(1e-12, f64::max);
        }
        iterations += 1;
        loop {
            let mut m = a.clone();
            for i in 0..n {
                sym.add_diagonal(&mut m, i, mu);
            }
            if sym.factor(&mut m).is_err() {
                mu *= nu;
                nu *= 2.0;
                continue;
            }
            let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
            let step = sym.solve(&m, &neg);
            let xn: Vec<f64> = x.iter().map(|z| z.norm()).collect();
            let tiny = step.iter().enumerate().all(|(i, d)| d.abs() <= 1e-15 * (xn[i / 2] + 1e-15));
            if tiny {
                break 'outer;
            }
            let trial: Vec<Point> = x.iter().enumerate().map(|(v, z)| z + Point::new(step[2 * v], step[2 * v + 1])).collect();
            let (ft, lt, pt) = sys.cost(&trial);
            let predicted: f64 = 0.5 * step.iter().zip(&grad).map(|(d, g)| d * (mu * d - g)).sum::<f64>();
            let rho = if predicted > 0.0 { (f - ft) / predicted } else { -1.0 };
            if ft.is_finite() && rho > 0.0 {
                x = trial;
                (f, link, pin) = (ft, lt, pt);
                mu *= (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0);
                nu = 2.0;
                break;
            }
            if status == RefineStatus::Converged {
                break 'outer;
            }
            mu *= nu;
            nu *= 2.0;
            if !(mu < 1e40) {
                break 'outer;
            }
        }
    }
    if status != RefineStatus::Diverged && done(link, pin) {
        status = RefineStatus::Converged;
    }
    if x.iter().any(|z| !z.is_finite()) {
        status = RefineStatus::Diverged;
    }
    RefineOutcome { realization: Realization::new(x), status, iterations, max_abs: link, pin_abs: pin }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkage::LinkageBuilder;

    fn triangle() -> (AbstractLinkage, Realization) {
        let mut b = LinkageBuilder::new();
        let [p, q, r] = ["p", "q", "r"].map(|l| b.vertex(l));
        b.edge(p, q, 1.0);
        b.edge(q, r, 1.0);
        b.edge(r, p, 1.0);
        b.mark(p, Point::new(0.0, 0.0));
        b.mark(q, Point::new(1.0, 0.0));
        let exact = Realization::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, 3f64.sqrt() / 2.0)]);
        (b.build().unwrap(), exact)
    }

    #[test]
    fn exact_seed_takes_no_iterations() {
        let (l, x) = triangle();
        let out = refine(&l, &x);
        assert_eq!(out.status, RefineStatus::Converged);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn perturbed_triangle_returns_to_the_same_branch() {
        let (l, x) = triangle();
        let mut seed = x.clone();
        seed.positions[2] += Point::new(0.05, -0.03);
        let out = refine(&l, &seed);
        assert_eq!(out.status, RefineStatus::Converged);
        assert!(out.realization.distance(&x) < 1e-10);
    }

    #[test]
    fn collapsed_seed_does_not_converge() {
        let (l, _) = triangle();
        let seed = Realization::new(vec![Point::new(0.3, 0.0); 3]);
        assert_ne!(refine(&l, &seed).status, RefineStatus::Converged);
    }
}
