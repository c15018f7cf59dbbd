//! Abstract marked linkages, realizations and constraint residuals.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;


use crate::geom::Point;

/// Structural equality tolerance.
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Constraint satisfaction tolerance for realizations.
pub const CONSTRAINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i as u32)
    }
}

impl core::fmt::Display for VertexId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub length: f64,
}

/// Degenerate triangle `a b c` with `b` on the segment: `φ(b) = r φ(a) + s φ(c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollinearConstraint {
    pub a: VertexId,
    pub b: VertexId,
    pub c: VertexId,
    pub r: f64,
    pub s: f64,
}

impl CollinearConstraint {
    /// `b = (1 - s) a + s c`.
    pub fn new(a: VertexId, b: VertexId, c: VertexId, s: f64) -> Self {
        CollinearConstraint { a, b, c, r: 1.0 - s, s }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mark {
    pub vertex: VertexId,
    pub image: Point,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinkageError {
    #[error("edge joins {0} to itself")]
    SelfLoop(VertexId),
    #[error("edge {u}-{v} has non-positive length {length}")]
    NonPositiveLength { u: VertexId, v: VertexId, length: f64 },
    #[error("vertex {0} is marked twice")]
    DuplicateMarking(VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("label {0:?} is used twice")]
    DuplicateLabel(String),
    #[error("collinear constraint on {b} has weights r={r}, s={s}")]
    InvalidCollinear { b: VertexId, r: f64, s: f64 },
    #[error("based edge {0}-{1} is not an edge pinned to [0, length]")]
    InvalidBasedEdge(VertexId, VertexId),
    #[error("realization has {found} positions for {expected} vertices")]
    MissingVertexPosition { expected: usize, found: usize },
}

/// Metric graph with marked vertices and collinearity constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct AbstractLinkage {
    labels: Vec<Option<String>>,
    edges: Vec<Edge>,
    collinear: Vec<CollinearConstraint>,
    marking: Vec<Mark>,
    based_edge: Option<(VertexId, VertexId)>,
}

/// Validates and builds a linkage. Vertex `i` carries `labels[i]`.
pub fn assemble(
    labels: Vec<Option<String>>,
    edges: Vec<Edge>,
    collinear: Vec<CollinearConstraint>,
    marking: Vec<Mark>,
    based_edge: Option<(VertexId, VertexId)>,
) -> Result<AbstractLinkage, LinkageError> {
    let n = labels.len();
    let check = |v: VertexId| if v.index() < n { Ok(()) } else { Err(LinkageError::UnknownVertex(v)) };
    let mut seen = BTreeSet::new();
    for l in labels.iter().flatten() {
        if !seen.insert(l.as_str()) {
            return Err(LinkageError::DuplicateLabel(l.clone()));
        }
    }
    for e in &edges {
        check(e.u)?;
        check(e.v)?;
        if e.u == e.v {
            return Err(LinkageError::SelfLoop(e.u));
        }
        if !(e.length > 0.0) || !e.length.is_finite() {
            return Err(LinkageError::NonPositiveLength { u: e.u, v: e.v, length: e.length });
        }
    }
    for c in &collinear {
        check(c.a)?;
        check(c.b)?;
        check(c.c)?;
        let ok = c.r > 0.0 && c.r < 1.0 && c.s > 0.0 && c.s < 1.0 && (c.r + c.s - 1.0).abs() <= STRUCTURAL_TOL;
        if !ok {
            return Err(LinkageError::InvalidCollinear { b: c.b, r: c.r, s: c.s });
        }
    }
    let mut marked = BTreeMap::new();
    for m in &marking {
        check(m.vertex)?;
        if marked.insert(m.vertex, m.image).is_some() {
            return Err(LinkageError::DuplicateMarking(m.vertex));
        }
    }
    if let Some((u, v)) = based_edge {
        check(u)?;
        check(v)?;
        let e = edges.iter().find(|e| (e.u == u && e.v == v) || (e.u == v && e.v == u));
        let ok = match (e, marked.get(&u), marked.get(&v)) {
            (Some(e), Some(zu), Some(zv)) => {
                zu.norm() <= STRUCTURAL_TOL && (*zv - Point::new(e.length, 0.0)).norm() <= STRUCTURAL_TOL * e.length.max(1.0)
            }
            _ => false,
        };
        if !ok {
            return Err(LinkageError::InvalidBasedEdge(u, v));
        }
    }
    Ok(AbstractLinkage { labels, edges, collinear, marking, based_edge })
}

impl AbstractLinkage {
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.labels.len()).map(VertexId::from)
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels.get(v.index()).and_then(|l| l.as_deref())
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn find_label(&self, label: &str) -> Option<VertexId> {
        self.labels.iter().position(|l| l.as_deref() == Some(label)).map(VertexId::from)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn collinear(&self) -> &[CollinearConstraint] {
        &self.collinear
    }

    pub fn marking(&self) -> &[Mark] {
        &self.marking
    }

    pub fn based_edge(&self) -> Option<(VertexId, VertexId)> {
        self.based_edge
    }

    pub fn mark_of(&self, v: VertexId) -> Option<Point> {
        self.marking.iter().find(|m| m.vertex == v).map(|m| m.image)
    }

    /// Number of rows of the residual vector.
    pub fn residual_len(&self) -> usize {
        self.edges.len() + 2 * self.collinear.len() + 2 * self.marking.len()
    }

    /// Copy of this linkage with the given edge length replaced.
    pub fn with_edge_length(&self, edge: usize, length: f64) -> Result<AbstractLinkage, LinkageError> {
        let mut edges = self.edges.clone();
        edges[edge].length = length;
        assemble(self.labels.clone(), edges, self.collinear.clone(), self.marking.clone(), self.based_edge)
    }

    /// Copy with every vertex renumbered by `perm` (old index -> new index).
    pub fn relabel(&self, perm: &[VertexId]) -> Result<AbstractLinkage, LinkageError> {
        let map = |v: VertexId| perm[v.index()];
        let mut labels = alloc::vec![None; self.labels.len()];
        for (i, l) in self.labels.iter().enumerate() {
            labels[perm[i].index()] = l.clone();
        }
        let edges = self.edges.iter().map(|e| Edge { u: map(e.u), v: map(e.v), length: e.length }).collect();
        let collinear =
            self.collinear.iter().map(|c| CollinearConstraint { a: map(c.a), b: map(c.b), c: map(c.c), r: c.r, s: c.s }).collect();
        let marking = self.marking.iter().map(|m| Mark { vertex: map(m.vertex), image: m.image }).collect();
        assemble(labels, edges, collinear, marking, self.based_edge.map(|(u, v)| (map(u), map(v))))
    }
}

/// Positions of all vertices, indexed by vertex number.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub positions: Vec<Point>,
}

impl Realization {
    pub fn new(positions: Vec<Point>) -> Self {
        Realization { positions }
    }

    pub fn at(&self, v: VertexId) -> Point {
        self.positions[v.index()]
    }

    pub fn conj(&self) -> Realization {
        Realization { positions: self.positions.iter().map(|z| z.conj()).collect() }
    }

    /// Largest pointwise distance to another realization of the same linkage.
    pub fn distance(&self, other: &Realization) -> f64 {
        self.positions.iter().zip(&other.positions).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub max_abs: f64,
    pub vector: Vec<f64>,
}

/// Constraint residuals: one row per edge, two per collinear constraint, two
/// per marked vertex.
pub fn residual(l: &AbstractLinkage, phi: &Realization) -> Result<Residual, LinkageError> {
    if phi.positions.len() != l.vertex_count() {
        return Err(LinkageError::MissingVertexPosition { expected: l.vertex_count(), found: phi.positions.len() });
    }
    let mut vector = Vec::with_capacity(l.residual_len());
    residual_into(l, &phi.positions, &mut vector);
    let max_abs = vector.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(Residual { max_abs, vector })
}

pub(crate) fn residual_into(l: &AbstractLinkage, x: &[Point], out: &mut Vec<f64>) {
    out.clear();
    for e in &l.edges {
        out.push((x[e.u.index()] - x[e.v.index()]).norm() - e.length);
    }
    for c in &l.collinear {
        let d = x[c.b.index()] - x[c.a.index()] * c.r - x[c.c.index()] * c.s;
        out.push(d.re);
        out.push(d.im);
    }
    for m in &l.marking {
        let d = x[m.vertex.index()] - m.image;
        out.push(d.re);
        out.push(d.im);
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    /// Connected components (edges and collinear constraints both connect).
    pub components: usize,
    /// Components containing no marked vertex, by smallest vertex.
    pub floating_components: Vec<VertexId>,
    /// Triangles whose side lengths fail the strict triangle inequality.
    pub triangle_violations: Vec<(VertexId, VertexId, VertexId)>,
    /// Edges between marked vertices whose images disagree with the length.
    pub marking_conflicts: Vec<(VertexId, VertexId)>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.floating_components.is_empty() && self.triangle_violations.is_empty() && self.marking_conflicts.is_empty()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Structural report; never rejects a linkage.
pub fn validate(l: &AbstractLinkage) -> ValidationReport {
    let n = l.vertex_count();
    let mut uf = UnionFind((0..n).collect());
    for e in &l.edges {
        uf.union(e.u.index(), e.v.index());
    }
    for c in &l.collinear {
        uf.union(c.a.index(), c.b.index());
        uf.union(c.b.index(), c.c.index());
    }
    let mut roots = BTreeSet::new();
    let mut anchored = BTreeSet::new();
    for i in 0..n {
        roots.insert(uf.find(i));
    }
    for m in &l.marking {
        anchored.insert(uf.find(m.vertex.index()));
    }
    let floating_components = roots.iter().filter(|r| !anchored.contains(*r)).map(|&r| VertexId::from(r)).collect();

    let mut len: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
    let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    for e in &l.edges {
        let key = if e.u < e.v { (e.u, e.v) } else { (e.v, e.u) };
        len.insert(key, e.length);
        adj.entry(e.u).or_default().insert(e.v);
        adj.entry(e.v).or_default().insert(e.u);
    }
    let get = |a: VertexId, b: VertexId| len[&if a < b { (a, b) } else { (b, a) }];
    let mut triangle_violations = Vec::new();
    for (&(a, b), _) in &len {
        if let (Some(na), Some(nb)) = (adj.get(&a), adj.get(&b)) {
            for &c in na.intersection(nb) {
                if c > b {
                    let (x, y, z) = (get(a, b), get(b, c), get(a, c));
                    if x >= y + z || y >= x + z || z >= x + y {
                        triangle_violations.push((a, b, c));
                    }
                }
            }
        }
    }

    let mut marking_conflicts = Vec::new();
    for e in &l.edges {
        if let (Some(zu), Some(zv)) = (l.mark_of(e.u), l.mark_of(e.v)) {
            if ((zu - zv).norm() - e.length).abs() > CONSTRAINT_TOL * e.length.max(1.0) {
                marking_conflicts.push((e.u, e.v));
            }
        }
    }
    ValidationReport { components: roots.len(), floating_components, triangle_violations, marking_conflicts }
}

/// Incremental construction of linkages used by the elementary constructors.
#[derive(Debug, Clone, Default)]
pub struct LinkageBuilder {
    labels: Vec<Option<String>>,
    edges: Vec<Edge>,
    collinear: Vec<CollinearConstraint>,
    marking: Vec<Mark>,
    based_edge: Option<(VertexId, VertexId)>,
}

impl LinkageBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, label: &str) -> VertexId {
        self.labels.push(Some(String::from(label)));
        VertexId::from(self.labels.len() - 1)
    }

    pub fn edge(&mut self, u: VertexId, v: VertexId, length: f64) {
        self.edges.push(Edge { u, v, length });
    }

    /// `b = (1 - s) a + s c`.
    pub fn collinear(&mut self, a: VertexId, b: VertexId, c: VertexId, s: f64) {
        self.collinear.push(CollinearConstraint::new(a, b, c, s));
    }

    pub fn mark(&mut self, v: VertexId, image: Point) {
        self.marking.push(Mark { vertex: v, image });
    }

    pub fn based(&mut self, u: VertexId, v: VertexId) {
        self.based_edge = Some((u, v));
    }

    /// Rigidified parallelogram on the cycle `q[0] q[1] q[2] q[3]` with
    /// `q[0] - q[1] = q[3] - q[2]`: sides of lengths `(ab, bc, ab, bc)`,
    /// midpoints of `q[0]q[1]` and `q[3]q[2]`, and a bar of length `bc`
    /// joining them. Sides flagged in `skip` are left out (they are already
    /// enforced elsewhere). Returns the two midpoints.
    pub fn rigid_parallelogram(&mut self, q: [VertexId; 4], ab: f64, bc: f64, skip: [bool; 4], tag: &str) -> (VertexId, VertexId) {
        let lens = [ab, bc, ab, bc];
        for i in 0..4 {
            if !skip[i] {
                self.edge(q[i], q[(i + 1) % 4], lens[i]);
            }
        }
        let m1 = self.vertex(&alloc::format!("{tag}m1"));
        let m2 = self.vertex(&alloc::format!("{tag}m2"));
        self.collinear(q[0], m1, q[1], 0.5);
        self.collinear(q[3], m2, q[2], 0.5);
        self.edge(m1, m2, bc);
        (m1, m2)
    }

    pub fn build(self) -> Result<AbstractLinkage, LinkageError> {
        assemble(self.labels, self.edges, self.collinear, self.marking, self.based_edge)
    }
}
