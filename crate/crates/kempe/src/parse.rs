//! Expression text to `PolyExpr`.
//!
//! Variables are `z, w` or `x, y` (indices 0 and 1) or `x1, x2, ...`; the
//! three spellings cannot be mixed. Operators are `+ - * ^` with a
//! non-negative integer exponent, `conj(...)` and parentheses. Numbers are
//! decimals, optionally followed by `i`; `i` alone is the imaginary unit.
//! Several outputs are separated by `;`.

use kempe_core::expr::{ExprBuilder, NodeId, PolyExpr};
use kempe_core::Point;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("unexpected {found} at offset {at}")]
    Unexpected { at: usize, found: String },
    #[error("bad number `{0}`")]
    Number(String),
    #[error("variable `{name}` cannot be used together with `{other}`")]
    MixedVariables { name: String, other: String },
    #[error("expected a constant, found an expression in variables")]
    NotConstant,
    #[error(transparent)]
    Expr(#[from] kempe_core::expr::ExprError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, bool),
    Ident(String),
    Sym(char),
    End,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                if j < b.len() && b[j].is_ascii_digit() {
                    while j < b.len() && b[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &s[start..i];
            let x: f64 = text.parse().map_err(|_| ParseError::Number(text.to_string()))?;
            let imag = i < b.len() && b[i] == b'i' && !(i + 1 < b.len() && (b[i + 1] as char).is_ascii_alphanumeric());
            if imag {
                i += 1;
            }
            out.push((start, Tok::Num(x, imag)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(s[start..i].to_string())));
        } else if "+-*^();".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ParseError::Unexpected { at: i, found: format!("`{c}`") });
        }
    }
    out.push((s.len(), Tok::End));
    Ok(out)
}

/// Value of a subexpression: folded constant or a DAG node.
#[derive(Clone, Copy)]
enum Val {
    C(Point),
    N(NodeId),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    b: ExprBuilder,
    /// Spelling family of the variables seen so far and its first name.
    family: Option<(u8, String)>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn unexpected(&self) -> ParseError {
        let (at, t) = &self.toks[self.pos];
        let found = match t {
            Tok::Num(x, _) => format!("number {x}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => String::from("end of input"),
        };
        ParseError::Unexpected { at: *at, found }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn node(&mut self, v: Val) -> NodeId {
        match v {
            Val::C(z) => self.b.constant(z),
            Val::N(n) => n,
        }
    }

    fn add(&mut self, a: Val, b: Val) -> Val {
        match (a, b) {
            (Val::C(x), Val::C(y)) => Val::C(x + y),
            (Val::N(n), Val::C(c)) | (Val::C(c), Val::N(n)) if c == Point::new(0.0, 0.0) => Val::N(n),
            _ => {
                let (x, y) = (self.node(a), self.node(b));
                Val::N(self.b.add(x, y))
            }
        }
    }

    fn neg(&mut self, a: Val) -> Val {
        match a {
            Val::C(x) => Val::C(-x),
            Val::N(n) => Val::N(self.b.neg(n)),
        }
    }

    fn mul(&mut self, a: Val, b: Val) -> Val {
        match (a, b) {
            (Val::C(x), Val::C(y)) => Val::C(x * y),
            (Val::N(n), Val::C(c)) | (Val::C(c), Val::N(n)) if c.im == 0.0 => {
                if c.re == 0.0 {
                    Val::C(Point::new(0.0, 0.0))
                } else if c.re == 1.0 {
                    Val::N(n)
                } else if c.re == -1.0 {
                    Val::N(self.b.neg(n))
                } else {
                    Val::N(self.b.scale(c.re, n))
                }
            }
            _ => {
                let (x, y) = (self.node(a), self.node(b));
                Val::N(self.b.mul(x, y))
            }
        }
    }

    fn var(&mut self, name: &str) -> Option<Result<Val, ParseError>> {
        let (family, index) = match name {
            "z" => (0, 0),
            "w" => (0, 1),
            "x" => (1, 0),
            "y" => (1, 1),
            _ => {
                let n: usize = name.strip_prefix('x')?.parse().ok()?;
                if n == 0 || name.starts_with("x0") {
                    return None;
                }
                (2, n - 1)
            }
        };
        match &self.family {
            Some((f, other)) if *f != family => {
                return Some(Err(ParseError::MixedVariables { name: name.to_string(), other: other.clone() }))
            }
            None => self.family = Some((family, name.to_string())),
            _ => {}
        }
        Some(Ok(Val::N(self.b.var(index))))
    }

    fn atom(&mut self) -> Result<Val, ParseError> {
        match self.peek().clone() {
            Tok::Num(x, imag) => {
                self.pos += 1;
                Ok(Val::C(if imag { Point::new(0.0, x) } else { Point::new(x, 0.0) }))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let v = self.sum()?;
                self.expect(')')?;
                Ok(v)
            }
            Tok::Ident(name) => {
                if name == "i" {
                    self.pos += 1;
                    return Ok(Val::C(Point::new(0.0, 1.0)));
                }
                if name == "conj" {
                    self.pos += 1;
                    self.expect('(')?;
                    let v = self.sum()?;
                    self.expect(')')?;
                    return Ok(match v {
                        Val::C(z) => Val::C(z.conj()),
                        Val::N(n) => Val::N(self.b.conj(n)),
                    });
                }
                match self.var(&name) {
                    Some(v) => {
                        self.pos += 1;
                        v
                    }
                    None => Err(self.unexpected()),
                }
            }
            _ => Err(self.unexpected()),
        }
    }

    fn power(&mut self) -> Result<Val, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let n = match *self.peek() {
            Tok::Num(x, false) if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 => x as u32,
            _ => return Err(self.unexpected()),
        };
        self.pos += 1;
        Ok(match base {
            Val::C(z) => Val::C(z.powu(n)),
            Val::N(_) if n == 0 => Val::C(Point::new(1.0, 0.0)),
            Val::N(a) => Val::N(self.b.pow(a, n)),
        })
    }

    fn unary(&mut self) -> Result<Val, ParseError> {
        if self.eat('-') {
            let v = self.unary()?;
            return Ok(self.neg(v));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn product(&mut self) -> Result<Val, ParseError> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            let rhs = self.unary()?;
            acc = self.mul(acc, rhs);
        }
        Ok(acc)
    }

    fn sum(&mut self) -> Result<Val, ParseError> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                let rhs = self.product()?;
                acc = self.add(acc, rhs);
            } else if self.eat('-') {
                let rhs = self.product()?;
                let rhs = self.neg(rhs);
                acc = self.add(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }
}

fn parse_values(src: &str) -> Result<(Parser, Vec<Val>), ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, b: ExprBuilder::new(), family: None };
    let mut outs = vec![p.sum()?];
    while p.eat(';') {
        outs.push(p.sum()?);
    }
    if *p.peek() != Tok::End {
        return Err(p.unexpected());
    }
    Ok((p, outs))
}

/// Parses `src`; the arity is one more than the largest variable index.
pub fn parse_expr(src: &str) -> Result<PolyExpr, ParseError> {
    let (mut p, outs) = parse_values(src)?;
    let ids = outs.into_iter().map(|v| p.node(v)).collect();
    Ok(p.b.finish(ids, None)?)
}

/// Parses a constant such as `2`, `-1.5i` or `0.5-2i`.
pub fn parse_complex(src: &str) -> Result<Point, ParseError> {
    let (_, outs) = parse_values(src)?;
    match outs.as_slice() {
        [Val::C(z)] => Ok(*z),
        _ => Err(ParseError::NotConstant),
    }
}

/// Comma-separated constants.
pub fn parse_points(src: &str) -> Result<Vec<Point>, ParseError> {
    src.split(',').map(parse_complex).collect()
}

/// `a+bi` with up to 12 significant digits and no trailing zeros. Parts
/// below `1e-12 max(1, |z|)` print as 0.
pub fn format_complex(z: Point) -> String {
    let floor = 1e-12 * z.norm().max(1.0);
    let clip = |x: f64| if x.abs() < floor { 0.0 } else { x };
    let z = Point::new(clip(z.re), clip(z.im));
    fn short(x: f64) -> String {
        if x == 0.0 {
            return String::from("0");
        }
        let s = format!("{:.11e}", x);
        let (mant, exp) = s.split_once('e').expect("exponent");
        let exp: i32 = exp.parse().expect("exponent");
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        if (-5..12).contains(&exp) {
            let v: f64 = format!("{mant}e{exp}").parse().expect("float");
            format!("{v}")
        } else {
            format!("{mant}e{exp}")
        }
    }
    let re = short(z.re);
    let im = short(z.im.abs());
    let sign = if z.im < 0.0 && im != "0" { '-' } else { '+' };
    format!("{re}{sign}{im}i")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(src: &str, x: &[Point]) -> Point {
        parse_expr(src).unwrap().eval(x)[0]
    }

    #[test]
    fn precedence_and_literals() {
        let z = Point::new(1.5, -0.5);
        let got = at("z*z+1 - 2i*z^3", &[z]);
        let want = z * z + 1.0 - Point::new(0.0, 2.0) * z.powu(3);
        assert!((got - want).norm() < 1e-14);
        assert!((at("-(z - 1)*2.5e-1", &[z]) - (-(z - 1.0) * 0.25)).norm() < 1e-15);
    }

    #[test]
    fn variable_families() {
        let e = parse_expr("x1*x3 + conj(x2)").unwrap();
        assert_eq!(e.arity(), 3);
        assert!(e.has_conj());
        assert_eq!(parse_expr("z*w").unwrap().arity(), 2);
        assert!(matches!(parse_expr("z + x1"), Err(ParseError::MixedVariables { .. })));
        assert!(parse_expr("q + 1").is_err());
    }

    #[test]
    fn real_factors_become_scalings() {
        let e = parse_expr("3*z").unwrap();
        assert!(e.nodes().iter().all(|n| !matches!(n, kempe_core::expr::Node::Mul(..))));
    }

    #[test]
    fn several_outputs() {
        let e = parse_expr("z+w; z*w").unwrap();
        assert_eq!(e.outputs().len(), 2);
    }

    #[test]
    fn complex_constants() {
        assert_eq!(parse_complex("0.5-2i").unwrap(), Point::new(0.5, -2.0));
        assert_eq!(parse_complex("-i").unwrap(), Point::new(0.0, -1.0));
        assert_eq!(parse_points("1, 2i").unwrap(), vec![Point::new(1.0, 0.0), Point::new(0.0, 2.0)]);
        assert!(parse_complex("z").is_err());
        assert!(parse_complex("1 +").is_err());
    }

    #[test]
    fn formatting() {
        assert_eq!(format_complex(Point::new(2.0000000000000004, -1e-17)), "2+0i");
        assert_eq!(format_complex(Point::new(-0.5, 1.25)), "-0.5+1.25i");
        assert_eq!(format_complex(Point::new(0.0, -3.0)), "0-3i");
    }
}
