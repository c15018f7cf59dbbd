//! Fiber sums and the composition, input identification and output closing
//! operations on functional linkages.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;


use crate::functional::{Field, FunctionalLinkage, Wall};
use crate::geom::{Disk, Point};
use crate::linkage::{assemble, AbstractLinkage, CollinearConstraint, Edge, LinkageError, Mark, Realization, VertexId};
use crate::placement::PlacementProgram;

const IMAGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ComposeError {
    #[error("glued marked vertices carry different images at {0}")]
    MarkingImageMismatch(VertexId),
    #[error("vertex {0} is glued to itself")]
    TrivialGlue(VertexId),
    #[error("gluing collapses an edge at {0}")]
    CollapsedEdge(VertexId),
    #[error("output range escapes the certified ball of input slot {slot}")]
    RangeEscapesDomain { slot: usize },
    #[error("certified ball misses the diagonal")]
    EmptySlice,
    #[error("no marked vertex carries the image {0}")]
    UnknownTarget(Point),
    #[error("slot {0} is out of range or repeated")]
    BadSlot(usize),
    #[error("linkage has no marked vertex")]
    EmptyMarking,
    #[error("marking has non-real images")]
    NonRealMarking,
    #[error(transparent)]
    Linkage(#[from] LinkageError),
}

/// Vertex identifications `(vertex of the first linkage, vertex of the second)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GlueMap {
    pub pairs: Vec<(VertexId, VertexId)>,
}

impl GlueMap {
    pub fn new(pairs: Vec<(VertexId, VertexId)>) -> Self {
        GlueMap { pairs }
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Disjoint union of `parts` with the given identifications between global
/// vertex numbers (part offsets in order). Returns the glued linkage and the
/// new number of every global vertex.
fn merge(parts: &[&AbstractLinkage], pairs: &[(usize, usize)]) -> Result<(AbstractLinkage, Vec<VertexId>), ComposeError> {
    let offsets: Vec<usize> = parts
        .iter()
        .scan(0, |acc, p| {
            let o = *acc;
            *acc += p.vertex_count();
            Some(o)
        })
        .collect();
    let n: usize = parts.iter().map(|p| p.vertex_count()).sum();
    let mut parent: Vec<usize> = (0..n).collect();
    for &(a, b) in pairs {
        if a == b {
            return Err(ComposeError::TrivialGlue(VertexId::from(a)));
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut new_id = vec![usize::MAX; n];
    let mut map = Vec::with_capacity(n);
    let mut count = 0;
    for g in 0..n {
        let r = find(&mut parent, g);
        if new_id[r] == usize::MAX {
            new_id[r] = count;
            count += 1;
        }
        map.push(VertexId::from(new_id[r]));
    }

    let mut labels: Vec<Option<String>> = vec![None; count];
    let mut used: BTreeSet<String> = BTreeSet::new();
    let mut images: Vec<Option<Point>> = vec![None; count];
    let (mut edges, mut collinear) = (Vec::new(), Vec::new());
    let mut based = None;
    for (pi, part) in parts.iter().enumerate() {
        let m = |v: VertexId| map[offsets[pi] + v.index()];
        for (i, l) in part.labels().iter().enumerate() {
            let id = map[offsets[pi] + i].index();
            if let (Some(l), None) = (l, &labels[id]) {
                let mut name = l.clone();
                let mut k = 2;
                while used.contains(&name) {
                    name = format!("{l}#{k}");
                    k += 1;
                }
                used.insert(name.clone());
                labels[id] = Some(name);
            }
        }
        for e in part.edges() {
            let (u, v) = (m(e.u), m(e.v));
            if u == v {
                return Err(ComposeError::CollapsedEdge(u));
            }
            edges.push(Edge { u, v, length: e.length });
        }
        for c in part.collinear() {
            collinear.push(CollinearConstraint { a: m(c.a), b: m(c.b), c: m(c.c), r: c.r, s: c.s });
        }
        for mk in part.marking() {
            let id = m(mk.vertex);
            match images[id.index()] {
                Some(z) if (z - mk.image).norm() > IMAGE_TOL * z.norm().max(1.0) => {
                    return Err(ComposeError::MarkingImageMismatch(id));
                }
                Some(_) => {}
                None => images[id.index()] = Some(mk.image),
            }
        }
        if based.is_none() {
            based = part.based_edge().map(|(u, v)| (m(u), m(v)));
        }
    }
    let marking = images.iter().enumerate().filter_map(|(i, z)| z.map(|z| Mark { vertex: VertexId::from(i), image: z })).collect();
    Ok((assemble(labels, edges, collinear, marking, based)?, map))
}

/// Result of a fiber sum with the renumbering of both summands.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSum {
    pub linkage: AbstractLinkage,
    pub map_a: Vec<VertexId>,
    pub map_b: Vec<VertexId>,
}

pub fn fiber_sum(a: &AbstractLinkage, b: &AbstractLinkage, beta: &GlueMap) -> Result<FiberSum, ComposeError> {
    let na = a.vertex_count();
    let pairs: Vec<_> = beta.pairs.iter().map(|&(u, v)| (u.index(), na + v.index())).collect();
    for &(u, v) in &beta.pairs {
        if u.index() >= na {
            return Err(LinkageError::UnknownVertex(u).into());
        }
        if v.index() >= b.vertex_count() {
            return Err(LinkageError::UnknownVertex(v).into());
        }
    }
    let (linkage, map) = merge(&[a, b], &pairs)?;
    Ok(FiberSum { linkage, map_a: map[..na].to_vec(), map_b: map[na..].to_vec() })
}

pub fn self_fiber_sum(a: &AbstractLinkage, beta: &GlueMap) -> Result<(AbstractLinkage, Vec<VertexId>), ComposeError> {
    for &(u, v) in &beta.pairs {
        for w in [u, v] {
            if w.index() >= a.vertex_count() {
                return Err(LinkageError::UnknownVertex(w).into());
            }
        }
    }
    let pairs: Vec<_> = beta.pairs.iter().map(|&(u, v)| (u.index(), v.index())).collect();
    merge(&[a], &pairs)
}

fn dedup_fixed(mut p: PlacementProgram) -> PlacementProgram {
    let mut seen = BTreeSet::new();
    p.fixed.retain(|(v, _)| seen.insert(*v));
    p
}

fn map_walls<'a>(walls: &'a [Wall], map: &[VertexId]) -> impl Iterator<Item = Wall> + 'a {
    let map = map.to_vec();
    walls.iter().map(move |w| Wall { vertex: map[w.vertex.index()], origin: w.origin.map(|o| map[o.index()]), ..*w })
}

/// Glues outputs of `b` onto inputs of `a`: `pairs` lists
/// `(input slot of a, output slot of b)`. The inputs of `b` take the place
/// of the first glued slot of `a`.
pub fn compose_functional(a: &FunctionalLinkage, b: &FunctionalLinkage, pairs: &[(usize, usize)]) -> Result<FunctionalLinkage, ComposeError> {
    if pairs.is_empty() {
        return Err(ComposeError::BadSlot(0));
    }
    let mut t_slots = BTreeSet::new();
    for &(t, o) in pairs {
        if t >= a.inputs.len() || !t_slots.insert(t) {
            return Err(ComposeError::BadSlot(t));
        }
        if o >= b.outputs.len() {
            return Err(ComposeError::BadSlot(o));
        }
        if !a.certified_ball[t].contains_disk(&b.output_range[o]) {
            return Err(ComposeError::RangeEscapesDomain { slot: t });
        }
    }
    let beta = GlueMap::new(pairs.iter().map(|&(t, o)| (a.inputs[t], b.outputs[o])).collect());
    let fs = fiber_sum(&a.linkage, &b.linkage, &beta)?;
    let first = *t_slots.iter().next().unwrap();
    let mut inputs = Vec::new();
    let mut ball = Vec::new();
    for (i, &v) in a.inputs.iter().enumerate() {
        if i == first {
            inputs.extend(b.inputs.iter().map(|w| fs.map_b[w.index()]));
            ball.extend_from_slice(&b.certified_ball);
        }
        if !t_slots.contains(&i) {
            inputs.push(fs.map_a[v.index()]);
            ball.push(a.certified_ball[i]);
        }
    }
    let a_rest = a.inputs.len() - t_slots.len();
    let field = if b.field == Field::Real && (a_rest == 0 || a.field == Field::Real) { Field::Real } else { Field::Complex };
    let (ma, mb) = (&fs.map_a, &fs.map_b);
    let placement = dedup_fixed(b.placement.remap(|v| mb[v.index()], 0).then(a.placement.remap(|v| ma[v.index()], b.placement.bits)));
    let walls = map_walls(&b.walls, mb).chain(map_walls(&a.walls, ma)).collect();
    Ok(FunctionalLinkage {
        outputs: a.outputs.iter().map(|v| ma[v.index()]).collect(),
        linkage: fs.linkage,
        inputs,
        field,
        certified_ball: ball,
        output_range: a.output_range.clone(),
        placement,
        walls,
    })
}

/// Identifies input slots `i` and `j`; the merged input keeps the earlier
/// slot and the largest disk inside both certified disks.
pub fn restrict_equal_inputs(a: &FunctionalLinkage, i: usize, j: usize) -> Result<FunctionalLinkage, ComposeError> {
    let n = a.inputs.len();
    if i >= n || j >= n || i == j {
        return Err(ComposeError::BadSlot(i.max(j)));
    }
    let (keep, drop) = (i.min(j), i.max(j));
    let lens = a.certified_ball[keep].lens_inscribed(&a.certified_ball[drop]).ok_or(ComposeError::EmptySlice)?;
    let (linkage, map) = self_fiber_sum(&a.linkage, &GlueMap::new(vec![(a.inputs[keep], a.inputs[drop])]))?;
    let mut inputs = Vec::new();
    let mut ball = Vec::new();
    for (k, &v) in a.inputs.iter().enumerate() {
        if k != drop {
            inputs.push(map[v.index()]);
            ball.push(if k == keep { lens } else { a.certified_ball[k] });
        }
    }
    Ok(FunctionalLinkage {
        linkage,
        inputs,
        outputs: a.outputs.iter().map(|v| map[v.index()]).collect(),
        field: a.field,
        certified_ball: ball,
        output_range: a.output_range.clone(),
        placement: dedup_fixed(a.placement.remap(|v| map[v.index()], 0)),
        walls: map_walls(&a.walls, &map).collect(),
    })
}

/// Moves input slot `from` to position `to`.
pub fn move_input(mut a: FunctionalLinkage, from: usize, to: usize) -> FunctionalLinkage {
    let v = a.inputs.remove(from);
    let d = a.certified_ball.remove(from);
    a.inputs.insert(to, v);
    a.certified_ball.insert(to, d);
    a
}

/// Side-by-side union of functional linkages with no identifications; the
/// inputs and outputs are concatenated in order.
pub fn juxtapose(parts: &[&FunctionalLinkage]) -> Result<FunctionalLinkage, ComposeError> {
    let links: Vec<&AbstractLinkage> = parts.iter().map(|p| &p.linkage).collect();
    let (linkage, map) = merge(&links, &[])?;
    let mut out = FunctionalLinkage {
        linkage,
        inputs: Vec::new(),
        outputs: Vec::new(),
        field: if parts.iter().all(|p| p.field == Field::Real) { Field::Real } else { Field::Complex },
        certified_ball: Vec::new(),
        output_range: Vec::new(),
        placement: PlacementProgram::default(),
        walls: Vec::new(),
    };
    let mut offset = 0;
    for p in parts {
        let m = &map[offset..offset + p.linkage.vertex_count()];
        out.inputs.extend(p.inputs.iter().map(|v| m[v.index()]));
        out.outputs.extend(p.outputs.iter().map(|v| m[v.index()]));
        out.certified_ball.extend_from_slice(&p.certified_ball);
        out.output_range.extend_from_slice(&p.output_range);
        let bits = out.placement.bits;
        out.placement = core::mem::take(&mut out.placement).then(p.placement.remap(|v| m[v.index()], bits));
        out.walls.extend(map_walls(&p.walls, m));
        offset += p.linkage.vertex_count();
    }
    Ok(out)
}

/// A functional linkage whose outputs are glued to fixed vertices. It keeps
/// the open linkage for closed-form placement and maps its vertices into
/// the closed one.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFunctionalLinkage {
    pub linkage: AbstractLinkage,
    pub inputs: Vec<VertexId>,
    pub targets: Vec<Point>,
    pub open: FunctionalLinkage,
    /// Vertex of the closed linkage for each vertex of `open`.
    pub vertex_map: Vec<VertexId>,
}

impl ClosedFunctionalLinkage {
    pub fn field(&self) -> Field {
        self.open.field
    }

    pub fn certified_ball(&self) -> &[Disk] {
        &self.open.certified_ball
    }

    /// Transfers a realization of the open linkage; merged vertices take the
    /// fixed image.
    pub fn lift(&self, open: &Realization) -> Realization {
        let mut x = vec![Point::new(0.0, 0.0); self.linkage.vertex_count()];
        for (i, z) in open.positions.iter().enumerate() {
            x[self.vertex_map[i].index()] = *z;
        }
        for m in self.linkage.marking() {
            x[m.vertex.index()] = m.image;
        }
        Realization::new(x)
    }

    /// Inverse of `lift` on the open vertices.
    pub fn project(&self, closed: &Realization) -> Realization {
        Realization::new(self.vertex_map.iter().map(|v| closed.at(*v)).collect())
    }

    pub fn input_values(&self, closed: &Realization) -> Vec<Point> {
        self.inputs.iter().map(|v| closed.at(*v)).collect()
    }
}

/// Glues output `k` onto the marked vertex carrying `targets[k]`.
pub fn close_outputs(a: &FunctionalLinkage, targets: &[Point]) -> Result<ClosedFunctionalLinkage, ComposeError> {
    if targets.len() > a.outputs.len() {
        return Err(ComposeError::BadSlot(targets.len()));
    }
    let mut pairs = Vec::new();
    for (k, &z) in targets.iter().enumerate() {
        let out = a.outputs[k];
        if a.linkage.mark_of(out).is_some_and(|w| (w - z).norm() <= IMAGE_TOL) {
            continue;
        }
        let m = a
            .linkage
            .marking()
            .iter()
            .find(|m| (m.image - z).norm() <= IMAGE_TOL * z.norm().max(1.0))
            .ok_or(ComposeError::UnknownTarget(z))?;
        pairs.push((m.vertex, out));
    }
    let (linkage, map) = self_fiber_sum(&a.linkage, &GlueMap::new(pairs))?;
    Ok(ClosedFunctionalLinkage {
        linkage,
        inputs: a.inputs.iter().map(|v| map[v.index()]).collect(),
        targets: targets.to_vec(),
        open: a.clone(),
        vertex_map: map,
    })
}

/// Output of `basify`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basified {
    pub linkage: AbstractLinkage,
    pub cover_degree: u8,
    /// New number of every original vertex.
    pub map: Vec<VertexId>,
    pub v1: VertexId,
    pub v2: VertexId,
}

fn is_real(z: Point) -> bool {
    z.im.abs() <= IMAGE_TOL * z.norm().max(1.0)
}

/// Replaces the marking by the based unit segment `v1 v2` (images 0 and 1)
/// and braces every formerly marked vertex to it. Marked vertices with equal
/// images, or with images 0 or 1, are identified with each other or with
/// `v1`, `v2`.
///
/// Real images are braced by a collinear constraint plus one edge, which
/// pins them uniquely. Non-real images are joined to `v1`, `v2` and to the
/// first non-real vertex, which pins all of them up to one global complex
/// conjugation; the cover degree is then 2.
pub fn basify(a: &AbstractLinkage) -> Result<Basified, ComposeError> {
    if a.marking().is_empty() {
        return Err(ComposeError::EmptyMarking);
    }
    let na = a.vertex_count();
    let base = assemble(
        vec![Some(String::from("v1")), Some(String::from("v2"))],
        vec![Edge { u: VertexId(0), v: VertexId(1), length: 1.0 }],
        vec![],
        vec![Mark { vertex: VertexId(0), image: Point::new(0.0, 0.0) }, Mark { vertex: VertexId(1), image: Point::new(1.0, 0.0) }],
        Some((VertexId(0), VertexId(1))),
    )?;
    let mut pairs = Vec::new();
    let marks = a.marking();
    for (i, m) in marks.iter().enumerate() {
        for (k, z) in [Point::new(0.0, 0.0), Point::new(1.0, 0.0)].iter().enumerate() {
            if (m.image - z).norm() <= IMAGE_TOL {
                pairs.push((m.vertex.index(), na + k));
            }
        }
        if let Some(prev) = marks[..i].iter().find(|p| (p.image - m.image).norm() <= IMAGE_TOL * m.image.norm().max(1.0)) {
            pairs.push((prev.vertex.index(), m.vertex.index()));
        }
    }
    let (merged, map) = merge(&[a, &base], &pairs)?;
    let (v1, v2) = (map[na], map[na + 1]);

    let mut reps: Vec<(VertexId, Point)> = Vec::new();
    for m in merged.marking() {
        if m.vertex != v1 && m.vertex != v2 {
            reps.push((m.vertex, m.image));
        }
    }
    let mut edges = merged.edges().to_vec();
    let mut collinear = merged.collinear().to_vec();
    let anchor = reps.iter().find(|(_, z)| !is_real(*z)).copied();
    for &(w, z) in &reps {
        if is_real(z) {
            let x = z.re;
            if x < 0.0 {
                // v1 lies between w and v2.
                collinear.push(CollinearConstraint::new(w, v1, v2, -x / (1.0 - x)));
                edges.push(Edge { u: w, v: v2, length: 1.0 - x });
            } else if x < 1.0 {
                collinear.push(CollinearConstraint::new(v1, w, v2, x));
            } else {
                collinear.push(CollinearConstraint::new(v1, v2, w, 1.0 / x));
                edges.push(Edge { u: v1, v: w, length: x });
            }
        } else {
            edges.push(Edge { u: w, v: v1, length: z.norm() });
            edges.push(Edge { u: w, v: v2, length: (z - 1.0).norm() });
            if let Some((w0, z0)) = anchor {
                if w0 != w {
                    edges.push(Edge { u: w, v: w0, length: (z - z0).norm() });
                }
            }
        }
    }
    let marking = vec![Mark { vertex: v1, image: Point::new(0.0, 0.0) }, Mark { vertex: v2, image: Point::new(1.0, 0.0) }];
    let linkage = assemble(merged.labels().to_vec(), edges, collinear, marking, Some((v1, v2)))?;
    Ok(Basified { linkage, cover_degree: if anchor.is_some() { 2 } else { 1 }, map: map[..na].to_vec(), v1, v2 })
}

/// `basify` for a functional linkage whose marking is real; the previous
/// fixed vertices stay fixed in the placement program.
pub fn basify_functional(a: &FunctionalLinkage) -> Result<FunctionalLinkage, ComposeError> {
    if a.linkage.marking().iter().any(|m| !is_real(m.image)) {
        return Err(ComposeError::NonRealMarking);
    }
    let b = basify(&a.linkage)?;
    let map = &b.map;
    let mut placement = a.placement.remap(|v| map[v.index()], 0);
    placement.fixed.insert(0, (b.v2, Point::new(1.0, 0.0)));
    placement.fixed.insert(0, (b.v1, Point::new(0.0, 0.0)));
    Ok(FunctionalLinkage {
        linkage: b.linkage,
        inputs: a.inputs.iter().map(|v| map[v.index()]).collect(),
        outputs: a.outputs.iter().map(|v| map[v.index()]).collect(),
        field: a.field,
        certified_ball: a.certified_ball.clone(),
        output_range: a.output_range.clone(),
        placement: dedup_fixed(placement),
        walls: map_walls(&a.walls, map).collect(),
    })
}

/// Adds a marked vertex with the given image unless one exists already.
pub fn ensure_marked(a: &FunctionalLinkage, image: Point, label: &str) -> Result<FunctionalLinkage, ComposeError> {
    if a.linkage.marking().iter().any(|m| (m.image - image).norm() <= IMAGE_TOL) {
        return Ok(a.clone());
    }
    let extra = assemble(vec![Some(String::from(label))], vec![], vec![], vec![Mark { vertex: VertexId(0), image }], None)?;
    let (linkage, map) = merge(&[&a.linkage, &extra], &[])?;
    let mut out = a.clone();
    out.linkage = linkage;
    out.placement.fixed.push((map[a.linkage.vertex_count()], image));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkage::LinkageBuilder;

    fn unit_edge(marked: Option<Point>) -> AbstractLinkage {
        let mut b = LinkageBuilder::new();
        let (u, v) = (b.vertex("u"), b.vertex("v"));
        b.edge(u, v, 1.0);
        if let Some(z) = marked {
            b.mark(u, z);
        }
        b.build().unwrap()
    }

    #[test]
    fn path_from_two_edges() {
        let e = unit_edge(None);
        let fs = fiber_sum(&e, &e, &GlueMap::new(vec![(VertexId(1), VertexId(0))])).unwrap();
        assert_eq!(fs.linkage.vertex_count(), 3);
        assert_eq!(fs.linkage.edges().len(), 2);
        assert_eq!(fs.linkage.label(VertexId(2)), Some("v#2"));
    }

    #[test]
    fn digon_from_path() {
        let e = unit_edge(None);
        let fs = fiber_sum(&e, &e, &GlueMap::new(vec![(VertexId(1), VertexId(0))])).unwrap();
        let (d, _) = self_fiber_sum(&fs.linkage, &GlueMap::new(vec![(VertexId(0), VertexId(2))])).unwrap();
        assert_eq!(d.vertex_count(), 2);
        assert_eq!(d.edges().len(), 2);
        let e = self_fiber_sum(&d, &GlueMap::new(vec![(VertexId(1), VertexId(1))]));
        assert_eq!(e, Err(ComposeError::TrivialGlue(VertexId(1))));
    }

    #[test]
    fn mismatched_marks() {
        let a = unit_edge(Some(Point::new(0.0, 0.0)));
        let b = unit_edge(Some(Point::new(1.0, 0.0)));
        let e = fiber_sum(&a, &b, &GlueMap::new(vec![(VertexId(0), VertexId(0))]));
        assert!(matches!(e, Err(ComposeError::MarkingImageMismatch(_))));
    }

    #[test]
    fn basify_identifies_origin() {
        let a = unit_edge(Some(Point::new(0.0, 0.0)));
        let b = basify(&a).unwrap();
        assert_eq!(b.cover_degree, 1);
        assert_eq!(b.linkage.vertex_count(), 3);
        assert_eq!(b.map[0], b.v1);
        assert_eq!(b.linkage.edges().len(), 2);
    }
}
