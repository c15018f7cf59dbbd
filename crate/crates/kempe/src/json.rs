//! Linkage documents: a functional linkage, an optional output closure, the
//! source expression and the compile report, in a JSON layout with a fixed
//! field order. Reals are written with 17 significant digits; an infinite
//! radius is written as `null`.

use std::fmt::Write as _;

use kempe_core::compiler::{CompileReport, Stage};
use kempe_core::compose::{close_outputs, ClosedFunctionalLinkage};
use kempe_core::functional::{Field, FunctionalLinkage, Wall, WallKind, WallShape};
use kempe_core::geom::{Disk, Point};
use kempe_core::linkage::{assemble, CollinearConstraint, Edge, Mark, VertexId};
use kempe_core::placement::{BlockKind, Param, PlaceOp, PlacementProgram, PlacementStep};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq)]
pub struct LinkageDoc {
    pub linkage: FunctionalLinkage,
    /// Output targets when the outputs are glued to fixed vertices.
    pub closure: Option<Vec<Point>>,
    /// Source expression, as typed.
    pub expr: Option<String>,
    /// `complex`, `real`, `set` or `curve`.
    pub mode: Option<String>,
    pub report: Option<CompileReport>,
}

impl LinkageDoc {
    pub fn new(linkage: FunctionalLinkage) -> Self {
        LinkageDoc { linkage, closure: None, expr: None, mode: None, report: None }
    }

    pub fn closed(&self) -> Option<Result<ClosedFunctionalLinkage, kempe_core::compose::ComposeError>> {
        self.closure.as_ref().map(|t| close_outputs(&self.linkage, t))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("field `{0}` is missing or has the wrong type")]
    Field(String),
    #[error("unknown {what} `{name}`")]
    Unknown { what: &'static str, name: String },
    #[error("invalid linkage: {0}")]
    Linkage(#[from] kempe_core::linkage::LinkageError),
}

// ---------------------------------------------------------------- writing

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::from("null")
    }
}

fn string(s: &str) -> String {
    serde_json::to_string(s).expect("string encoding")
}

fn point(z: Point) -> String {
    format!("[{}, {}]", num(z.re), num(z.im))
}

fn disk(d: &Disk) -> String {
    format!("{{\"re\": {}, \"im\": {}, \"radius\": {}}}", num(d.center.re), num(d.center.im), num(d.radius))
}

fn list<T>(items: &[T], indent: &str, f: impl Fn(&T) -> String) -> String {
    if items.is_empty() {
        return String::from("[]");
    }
    let body: Vec<String> = items.iter().map(|x| format!("{indent}  {}", f(x))).collect();
    format!("[\n{}\n{indent}]", body.join(",\n"))
}

fn inline<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    format!("[{}]", items.iter().map(f).collect::<Vec<_>>().join(", "))
}

fn field_name(f: Field) -> &'static str {
    match f {
        Field::Real => "real",
        Field::Complex => "complex",
    }
}

fn op(o: &PlaceOp) -> String {
    match o {
        PlaceOp::Affine { target, terms, offset } => format!(
            "{{\"op\": \"affine\", \"target\": {}, \"terms\": {}, \"offset\": {}}}",
            target.0,
            inline(terms, |(v, c)| format!("[{}, {}, {}]", v.0, num(c.re), num(c.im))),
            point(*offset)
        ),
        PlaceOp::CircleCircle { target, c1, r1, c2, r2, bit, flip } => format!(
            "{{\"op\": \"circle_circle\", \"target\": {}, \"c1\": {}, \"r1\": {}, \"c2\": {}, \"r2\": {}, \"bit\": {bit}, \"flip\": {flip}}}",
            target.0,
            c1.0,
            num(*r1),
            c2.0,
            num(*r2)
        ),
        PlaceOp::CircleLine { target, center, radius, p, q, bit, flip } => format!(
            "{{\"op\": \"circle_line\", \"target\": {}, \"center\": {}, \"radius\": {}, \"p\": {}, \"q\": {}, \"bit\": {bit}, \"flip\": {flip}}}",
            target.0,
            center.0,
            num(*radius),
            p.0,
            q.0
        ),
    }
}

fn step(s: &PlacementStep, indent: &str) -> String {
    let inner = format!("{indent}  ");
    format!(
        "{{\n{inner}\"kind\": {},\n{inner}\"params\": {},\n{inner}\"domain\": {},\n{inner}\"ops\": {}\n{indent}}}",
        string(s.kind.name()),
        inline(&s.params, |p| format!("[{}, {}]", string(&p.name), num(p.value))),
        inline(&s.domain, disk),
        list(&s.ops, &inner, op)
    )
}

fn wall(w: &Wall) -> String {
    let kind = match w.kind {
        WallKind::Wall => "wall",
        WallKind::Quasiwall => "quasiwall",
    };
    let origin = w.origin.map_or(String::from("null"), |o| o.0.to_string());
    let shape = match w.shape {
        WallShape::Circle { center, radius } => format!("{{\"circle\": {}, \"radius\": {}}}", point(center), num(radius)),
        WallShape::Line { point: p, direction } => format!("{{\"line\": {}, \"direction\": {}}}", point(p), point(direction)),
    };
    format!("{{\"kind\": \"{kind}\", \"vertex\": {}, \"origin\": {origin}, \"shape\": {shape}}}", w.vertex.0)
}

fn stage(s: &Stage) -> String {
    format!(
        "{{\"op\": {}, \"node\": {}, \"params\": {}, \"ball\": {}, \"sym_bits\": {}}}",
        string(&s.op),
        s.node.map_or(String::from("null"), |n| n.to_string()),
        inline(&s.params, |(k, v)| format!("[{}, {}]", string(k), num(*v))),
        inline(&s.ball, disk),
        s.sym_bits
    )
}

/// Serializes `doc`. Equal documents give identical bytes.
pub fn to_json(doc: &LinkageDoc) -> String {
    let f = &doc.linkage;
    let l = &f.linkage;
    let mut out = String::from("{\n");
    let mut put = |key: &str, value: String| {
        let _ = writeln!(out, "  \"{key}\": {value},");
    };
    put("format", string("kempe-linkage/1"));
    put("mode", doc.mode.as_deref().map_or(String::from("null"), string));
    put("expr", doc.expr.as_deref().map_or(String::from("null"), string));
    put(
        "vertices",
        list(l.labels(), "  ", |lab| lab.as_deref().map_or(String::from("null"), string)),
    );
    put("edges", list(l.edges(), "  ", |e| format!("[{}, {}, {}]", e.u.0, e.v.0, num(e.length))));
    put(
        "collinear",
        list(l.collinear(), "  ", |c| format!("[{}, {}, {}, {}, {}]", c.a.0, c.b.0, c.c.0, num(c.r), num(c.s))),
    );
    put("marking", list(l.marking(), "  ", |m| format!("[{}, {}, {}]", m.vertex.0, num(m.image.re), num(m.image.im))));
    put("based_edge", l.based_edge().map_or(String::from("null"), |(u, v)| format!("[{}, {}]", u.0, v.0)));
    put("inputs", inline(&f.inputs, |v| v.0.to_string()));
    put("outputs", inline(&f.outputs, |v| v.0.to_string()));
    put("field", string(field_name(f.field)));
    put("certified_ball", inline(&f.certified_ball, disk));
    put("output_range", inline(&f.output_range, disk));
    put("sym_bits", f.sym_bits().to_string());
    put("sym_order", f.sym_order().map_or(String::from("null"), |o| o.to_string()));
    let p = &f.placement;
    put(
        "placement",
        format!(
            "{{\n    \"bits\": {},\n    \"fixed\": {},\n    \"steps\": {}\n  }}",
            p.bits,
            list(&p.fixed, "    ", |(v, z)| format!("[{}, {}, {}]", v.0, num(z.re), num(z.im))),
            list(&p.steps, "    ", |s| step(s, "      "))
        ),
    );
    put("walls", list(&f.walls, "  ", wall));
    put("closure", doc.closure.as_ref().map_or(String::from("null"), |t| inline(t, |z| point(*z))));
    let report = doc.report.as_ref().map_or(String::from("null"), |r| {
        format!(
            "{{\n    \"sym_bits\": {},\n    \"certified_ball\": {},\n    \"stages\": {}\n  }}",
            r.sym_bits,
            inline(&r.certified_ball, disk),
            list(&r.stages, "    ", stage)
        )
    });
    let _ = writeln!(out, "  \"report\": {report}");
    out.push_str("}\n");
    out
}

// ---------------------------------------------------------------- reading

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value, JsonError> {
    v.get(key).ok_or_else(|| JsonError::Field(key.to_string()))
}

fn arr<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>, JsonError> {
    v.as_array().ok_or_else(|| JsonError::Field(key.to_string()))
}

/// Reads a real; `null` stands for infinity. Parses the literal text so
/// that every written value reads back bit-exactly.
fn real(v: &Value, key: &str) -> Result<f64, JsonError> {
    match v {
        Value::Null => Ok(f64::INFINITY),
        Value::Number(n) => n.to_string().parse().map_err(|_| JsonError::Field(key.to_string())),
        _ => Err(JsonError::Field(key.to_string())),
    }
}

fn uint(v: &Value, key: &str) -> Result<usize, JsonError> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| JsonError::Field(key.to_string()))
}

fn vid(v: &Value, key: &str) -> Result<VertexId, JsonError> {
    uint(v, key).map(VertexId::from)
}

fn boolean(v: &Value, key: &str) -> Result<bool, JsonError> {
    v.as_bool().ok_or_else(|| JsonError::Field(key.to_string()))
}

fn item(v: &Value, i: usize, key: &str) -> Result<Value, JsonError> {
    v.get(i).cloned().ok_or_else(|| JsonError::Field(key.to_string()))
}

fn read_point(v: &Value, key: &str) -> Result<Point, JsonError> {
    Ok(Point::new(real(&item(v, 0, key)?, key)?, real(&item(v, 1, key)?, key)?))
}

fn read_disk(v: &Value, key: &str) -> Result<Disk, JsonError> {
    Ok(Disk::new(Point::new(real(get(v, "re")?, key)?, real(get(v, "im")?, key)?), real(get(v, "radius")?, key)?))
}

fn disks(v: &Value, key: &str) -> Result<Vec<Disk>, JsonError> {
    arr(v, key)?.iter().map(|d| read_disk(d, key)).collect()
}

fn read_op(v: &Value) -> Result<PlaceOp, JsonError> {
    let name = get(v, "op")?.as_str().ok_or_else(|| JsonError::Field("op".into()))?;
    let t = vid(get(v, "target")?, "target")?;
    Ok(match name {
        "affine" => PlaceOp::Affine {
            target: t,
            terms: arr(get(v, "terms")?, "terms")?
                .iter()
                .map(|x| Ok((vid(&item(x, 0, "terms")?, "terms")?, Point::new(real(&item(x, 1, "terms")?, "terms")?, real(&item(x, 2, "terms")?, "terms")?))))
                .collect::<Result<_, JsonError>>()?,
            offset: read_point(get(v, "offset")?, "offset")?,
        },
        "circle_circle" => PlaceOp::CircleCircle {
            target: t,
            c1: vid(get(v, "c1")?, "c1")?,
            r1: real(get(v, "r1")?, "r1")?,
            c2: vid(get(v, "c2")?, "c2")?,
            r2: real(get(v, "r2")?, "r2")?,
            bit: uint(get(v, "bit")?, "bit")?,
            flip: boolean(get(v, "flip")?, "flip")?,
        },
        "circle_line" => PlaceOp::CircleLine {
            target: t,
            center: vid(get(v, "center")?, "center")?,
            radius: real(get(v, "radius")?, "radius")?,
            p: vid(get(v, "p")?, "p")?,
            q: vid(get(v, "q")?, "q")?,
            bit: uint(get(v, "bit")?, "bit")?,
            flip: boolean(get(v, "flip")?, "flip")?,
        },
        other => return Err(JsonError::Unknown { what: "placement op", name: other.to_string() }),
    })
}

fn params(v: &Value, key: &str) -> Result<Vec<(String, f64)>, JsonError> {
    arr(v, key)?
        .iter()
        .map(|p| {
            let name = item(p, 0, key)?.as_str().ok_or_else(|| JsonError::Field(key.to_string()))?.to_string();
            Ok((name, real(&item(p, 1, key)?, key)?))
        })
        .collect()
}

fn read_step(v: &Value) -> Result<PlacementStep, JsonError> {
    let kind = get(v, "kind")?.as_str().ok_or_else(|| JsonError::Field("kind".into()))?;
    let kind = BlockKind::from_name(kind).ok_or_else(|| JsonError::Unknown { what: "block kind", name: kind.to_string() })?;
    Ok(PlacementStep {
        kind,
        params: params(get(v, "params")?, "params")?.into_iter().map(|(name, value)| Param { name, value }).collect(),
        domain: disks(get(v, "domain")?, "domain")?,
        ops: arr(get(v, "ops")?, "ops")?.iter().map(read_op).collect::<Result<_, _>>()?,
    })
}

fn read_wall(v: &Value) -> Result<Wall, JsonError> {
    let kind = match get(v, "kind")?.as_str() {
        Some("wall") => WallKind::Wall,
        Some("quasiwall") => WallKind::Quasiwall,
        _ => return Err(JsonError::Field("kind".into())),
    };
    let origin = match get(v, "origin")? {
        Value::Null => None,
        o => Some(vid(o, "origin")?),
    };
    let s = get(v, "shape")?;
    let shape = if let Some(c) = s.get("circle") {
        WallShape::Circle { center: read_point(c, "circle")?, radius: real(get(s, "radius")?, "radius")? }
    } else {
        WallShape::Line { point: read_point(get(s, "line")?, "line")?, direction: read_point(get(s, "direction")?, "direction")? }
    };
    Ok(Wall { kind, vertex: vid(get(v, "vertex")?, "vertex")?, origin, shape })
}

fn opt_string(v: &Value, key: &str) -> Result<Option<String>, JsonError> {
    match get(v, key)? {
        Value::Null => Ok(None),
        Value::String(s) => Ok(Some(s.clone())),
        _ => Err(JsonError::Field(key.to_string())),
    }
}

fn ids(v: &Value, key: &str) -> Result<Vec<VertexId>, JsonError> {
    arr(v, key)?.iter().map(|x| vid(x, key)).collect()
}

pub fn from_json(text: &str) -> Result<LinkageDoc, JsonError> {
    let v: Value = serde_json::from_str(text)?;
    let labels = arr(get(&v, "vertices")?, "vertices")?
        .iter()
        .map(|x| match x {
            Value::Null => Ok(None),
            Value::String(s) => Ok(Some(s.clone())),
            _ => Err(JsonError::Field("vertices".into())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let edges = arr(get(&v, "edges")?, "edges")?
        .iter()
        .map(|e| Ok(Edge { u: vid(&item(e, 0, "edges")?, "edges")?, v: vid(&item(e, 1, "edges")?, "edges")?, length: real(&item(e, 2, "edges")?, "edges")? }))
        .collect::<Result<Vec<_>, JsonError>>()?;
    let collinear = arr(get(&v, "collinear")?, "collinear")?
        .iter()
        .map(|c| {
            let k = "collinear";
            Ok(CollinearConstraint {
                a: vid(&item(c, 0, k)?, k)?,
                b: vid(&item(c, 1, k)?, k)?,
                c: vid(&item(c, 2, k)?, k)?,
                r: real(&item(c, 3, k)?, k)?,
                s: real(&item(c, 4, k)?, k)?,
            })
        })
        .collect::<Result<Vec<_>, JsonError>>()?;
    let marking = arr(get(&v, "marking")?, "marking")?
        .iter()
        .map(|m| {
            let k = "marking";
            Ok(Mark { vertex: vid(&item(m, 0, k)?, k)?, image: Point::new(real(&item(m, 1, k)?, k)?, real(&item(m, 2, k)?, k)?) })
        })
        .collect::<Result<Vec<_>, JsonError>>()?;
    let based = match get(&v, "based_edge")? {
        Value::Null => None,
        b => Some((vid(&item(b, 0, "based_edge")?, "based_edge")?, vid(&item(b, 1, "based_edge")?, "based_edge")?)),
    };
    let linkage = assemble(labels, edges, collinear, marking, based)?;
    let field = match get(&v, "field")?.as_str() {
        Some("real") => Field::Real,
        Some("complex") => Field::Complex,
        _ => return Err(JsonError::Field("field".into())),
    };
    let p = get(&v, "placement")?;
    let placement = PlacementProgram {
        fixed: arr(get(p, "fixed")?, "fixed")?
            .iter()
            .map(|f| Ok((vid(&item(f, 0, "fixed")?, "fixed")?, Point::new(real(&item(f, 1, "fixed")?, "fixed")?, real(&item(f, 2, "fixed")?, "fixed")?))))
            .collect::<Result<_, JsonError>>()?,
        steps: arr(get(p, "steps")?, "steps")?.iter().map(read_step).collect::<Result<_, _>>()?,
        bits: uint(get(p, "bits")?, "bits")?,
    };
    let functional = FunctionalLinkage {
        linkage,
        inputs: ids(get(&v, "inputs")?, "inputs")?,
        outputs: ids(get(&v, "outputs")?, "outputs")?,
        field,
        certified_ball: disks(get(&v, "certified_ball")?, "certified_ball")?,
        output_range: disks(get(&v, "output_range")?, "output_range")?,
        placement,
        walls: arr(get(&v, "walls")?, "walls")?.iter().map(read_wall).collect::<Result<_, _>>()?,
    };
    let closure = match get(&v, "closure")? {
        Value::Null => None,
        c => Some(arr(c, "closure")?.iter().map(|z| read_point(z, "closure")).collect::<Result<_, _>>()?),
    };
    let report = match get(&v, "report")? {
        Value::Null => None,
        r => Some(CompileReport {
            sym_bits: uint(get(r, "sym_bits")?, "sym_bits")?,
            certified_ball: disks(get(r, "certified_ball")?, "certified_ball")?,
            stages: arr(get(r, "stages")?, "stages")?
                .iter()
                .map(|s| {
                    Ok(Stage {
                        op: get(s, "op")?.as_str().ok_or_else(|| JsonError::Field("op".into()))?.to_string(),
                        node: match get(s, "node")? {
                            Value::Null => None,
                            n => Some(uint(n, "node")?),
                        },
                        params: params(get(s, "params")?, "params")?,
                        ball: disks(get(s, "ball")?, "ball")?,
                        sym_bits: uint(get(s, "sym_bits")?, "sym_bits")?,
                    })
                })
                .collect::<Result<_, JsonError>>()?,
        }),
    };
    Ok(LinkageDoc { linkage: functional, closure, expr: opt_string(&v, "expr")?, mode: opt_string(&v, "mode")?, report })
}
