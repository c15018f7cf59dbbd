//! Polynomial expressions in complex variables and their conjugates, stored
//! as a hash-consed DAG.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::geom::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    Var(usize),
    Const(Point),
    Add(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Neg(NodeId),
    Scale(f64, NodeId),
    Conj(NodeId),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("variable index {index} is not below the arity {arity}")]
    VarOutOfRange { index: usize, arity: usize },
    #[error("expression has no outputs")]
    NoOutputs,
    #[error("non-finite constant")]
    NonFinite,
}

/// Expression DAG with `arity` variables and one or more outputs. Children
/// always precede their parents.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyExpr {
    nodes: Vec<Node>,
    outputs: Vec<NodeId>,
    arity: usize,
}

/// Hash-consing key of a node (constants by bit pattern).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Var(usize),
    Const(u64, u64),
    Add(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Neg(NodeId),
    Scale(u64, NodeId),
    Conj(NodeId),
}

#[derive(Debug, Clone, Default)]
pub struct ExprBuilder {
    nodes: Vec<Node>,
    seen: BTreeMap<Key, NodeId>,
}

impl ExprBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, node: Node) -> NodeId {
        let key = match node {
            Node::Var(i) => Key::Var(i),
            Node::Const(z) => Key::Const(z.re.to_bits(), z.im.to_bits()),
            // Addition and multiplication are commutative; order operands.
            Node::Add(a, b) => Key::Add(a.min(b), a.max(b)),
            Node::Mul(a, b) => Key::Mul(a.min(b), a.max(b)),
            Node::Neg(a) => Key::Neg(a),
            Node::Scale(l, a) => Key::Scale(l.to_bits(), a),
            Node::Conj(a) => Key::Conj(a),
        };
        if let Some(&id) = self.seen.get(&key) {
            return id;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(node);
        self.seen.insert(key, id);
        id
    }

    pub fn var(&mut self, i: usize) -> NodeId {
        self.push(Node::Var(i))
    }

    pub fn constant(&mut self, z: Point) -> NodeId {
        self.push(Node::Const(z))
    }

    pub fn real(&mut self, x: f64) -> NodeId {
        self.constant(Point::new(x, 0.0))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Node::Add(a, b))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let nb = self.neg(b);
        self.add(a, nb)
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Node::Mul(a, b))
    }

    pub fn neg(&mut self, a: NodeId) -> NodeId {
        self.push(Node::Neg(a))
    }

    pub fn scale(&mut self, l: f64, a: NodeId) -> NodeId {
        self.push(Node::Scale(l, a))
    }

    pub fn conj(&mut self, a: NodeId) -> NodeId {
        self.push(Node::Conj(a))
    }

    pub fn pow(&mut self, a: NodeId, n: u32) -> NodeId {
        if n == 0 {
            return self.real(1.0);
        }
        let mut acc = a;
        for _ in 1..n {
            acc = self.mul(acc, a);
        }
        acc
    }

    /// Finishes with the given outputs; the arity is `arity` or, when
    /// `None`, one more than the largest variable index.
    pub fn finish(self, outputs: Vec<NodeId>, arity: Option<usize>) -> Result<PolyExpr, ExprError> {
        if outputs.is_empty() {
            return Err(ExprError::NoOutputs);
        }
        let used = self.nodes.iter().filter_map(|n| if let Node::Var(i) = n { Some(i + 1) } else { None }).max().unwrap_or(0);
        let arity = arity.unwrap_or(used);
        for n in &self.nodes {
            match *n {
                Node::Var(i) if i >= arity => return Err(ExprError::VarOutOfRange { index: i, arity }),
                Node::Const(z) if !z.is_finite() => return Err(ExprError::NonFinite),
                Node::Scale(l, _) if !l.is_finite() => return Err(ExprError::NonFinite),
                _ => {}
            }
        }
        Ok(PolyExpr { nodes: self.nodes, outputs, arity })
    }
}

/// Monomial `Π z_i^{a_i} conj(z_i)^{b_i}` as exponent pairs per variable.
pub type Monomial = Vec<(u32, u32)>;

impl PolyExpr {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id.index()]
    }

    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn has_conj(&self) -> bool {
        self.nodes.iter().any(|n| matches!(n, Node::Conj(_)))
    }

    pub fn constants_real(&self) -> bool {
        self.nodes.iter().all(|n| !matches!(n, Node::Const(z) if z.im != 0.0))
    }

    /// Values of every output at `x`.
    pub fn eval(&self, x: &[Point]) -> Vec<Point> {
        let mut v: Vec<Point> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let z = match *n {
                Node::Var(i) => x[i],
                Node::Const(z) => z,
                Node::Add(a, b) => v[a.index()] + v[b.index()],
                Node::Mul(a, b) => v[a.index()] * v[b.index()],
                Node::Neg(a) => -v[a.index()],
                Node::Scale(l, a) => v[a.index()] * l,
                Node::Conj(a) => v[a.index()].conj(),
            };
            v.push(z);
        }
        self.outputs.iter().map(|o| v[o.index()]).collect()
    }

    /// Variables each node depends on, as a sorted list.
    pub fn support(&self) -> Vec<Vec<usize>> {
        let mut s: Vec<Vec<usize>> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let vars = match *n {
                Node::Var(i) => vec![i],
                Node::Const(_) => Vec::new(),
                Node::Add(a, b) | Node::Mul(a, b) => {
                    let mut u = s[a.index()].clone();
                    u.extend_from_slice(&s[b.index()]);
                    u.sort_unstable();
                    u.dedup();
                    u
                }
                Node::Neg(a) | Node::Scale(_, a) | Node::Conj(a) => s[a.index()].clone(),
            };
            s.push(vars);
        }
        s
    }

    /// Expansion of output `k` into monomials in the variables and their
    /// conjugates.
    pub fn expand(&self, k: usize) -> BTreeMap<Monomial, Point> {
        let m = self.arity;
        let mut polys: Vec<BTreeMap<Monomial, Point>> = Vec::with_capacity(self.nodes.len());
        let one = vec![(0, 0); m];
        for n in &self.nodes {
            let p = match *n {
                Node::Var(i) => {
                    let mut e = one.clone();
                    e[i].0 = 1;
                    BTreeMap::from([(e, Point::new(1.0, 0.0))])
                }
                Node::Const(z) => BTreeMap::from([(one.clone(), z)]),
                Node::Add(a, b) => {
                    let mut p = polys[a.index()].clone();
                    for (e, c) in &polys[b.index()] {
                        *p.entry(e.clone()).or_insert(Point::new(0.0, 0.0)) += c;
                    }
                    p
                }
                Node::Mul(a, b) => {
                    let mut p = BTreeMap::new();
                    for (ea, ca) in &polys[a.index()] {
                        for (eb, cb) in &polys[b.index()] {
                            let e: Monomial = ea.iter().zip(eb).map(|(x, y)| (x.0 + y.0, x.1 + y.1)).collect();
                            *p.entry(e).or_insert(Point::new(0.0, 0.0)) += ca * cb;
                        }
                    }
                    p
                }
                Node::Neg(a) => polys[a.index()].iter().map(|(e, c)| (e.clone(), -c)).collect(),
                Node::Scale(l, a) => polys[a.index()].iter().map(|(e, c)| (e.clone(), c * l)).collect(),
                Node::Conj(a) => polys[a.index()]
                    .iter()
                    .map(|(e, c)| (e.iter().map(|&(x, y)| (y, x)).collect(), c.conj()))
                    .collect(),
            };
            polys.push(p);
        }
        let mut out = polys.swap_remove(self.outputs[k].index());
        out.retain(|_, c| *c != Point::new(0.0, 0.0));
        out
    }

    /// Largest violation of `c(a, b) = conj(c(b, a))` over the expansion of
    /// output `k`, the condition for real values everywhere.
    pub fn realness_defect(&self, k: usize) -> f64 {
        let p = self.expand(k);
        p.iter()
            .map(|(e, c)| {
                let mirror: Monomial = e.iter().map(|&(x, y)| (y, x)).collect();
                let d = p.get(&mirror).copied().unwrap_or(Point::new(0.0, 0.0));
                (c - d.conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Total degree of output `k` (in variables and conjugates together).
    pub fn degree(&self, k: usize) -> u32 {
        self.expand(k).keys().map(|e| e.iter().map(|(a, b)| a + b).sum()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shared_subexpressions_are_merged() {
        let mut b = ExprBuilder::new();
        let z = b.var(0);
        let p = b.mul(z, z);
        let q = b.mul(z, z);
        assert_eq!(p, q);
        let w = b.var(1);
        assert_eq!(b.add(z, w), b.add(w, z));
    }

    #[test]
    fn modulus_squared_is_real() {
        let mut b = ExprBuilder::new();
        let z = b.var(0);
        let c = b.conj(z);
        let zz = b.mul(z, c);
        let one = b.real(1.0);
        let f = b.sub(zz, one);
        let e = b.finish(vec![f], None).unwrap();
        assert_eq!(e.realness_defect(0), 0.0);
        assert_eq!(e.degree(0), 2);
        let v = e.eval(&[Point::new(0.6, 0.8)])[0];
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn complex_coefficient_breaks_realness() {
        let mut b = ExprBuilder::new();
        let z = b.var(0);
        let i = b.constant(Point::new(0.0, 1.0));
        let f = b.mul(i, z);
        let e = b.finish(vec![f], None).unwrap();
        assert!(e.realness_defect(0) > 0.5);
    }

    #[test]
    fn variable_beyond_arity_is_rejected() {
        let mut b = ExprBuilder::new();
        let z = b.var(2);
        assert!(b.finish(vec![z], Some(2)).is_err());
    }
}
