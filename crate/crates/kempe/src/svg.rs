//! SVG drawings: one realization (edges as segments, vertices as disks) or
//! a traced polyline. The view box fits the drawing with a 5% margin; the
//! vertical axis points up.

use std::fmt::Write as _;

use kempe_core::{AbstractLinkage, Point, Realization};

const SIZE: f64 = 800.0;

struct Frame {
    min: Point,
    scale: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn fit(points: &[Point]) -> Frame {
        let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in points.iter().filter(|p| p.is_finite()) {
            lo = Point::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Point::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        if !lo.re.is_finite() {
            lo = Point::new(-1.0, -1.0);
            hi = Point::new(1.0, 1.0);
        }
        let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-9);
        let pad = 0.05 * span;
        let min = lo - Point::new(pad, pad);
        let scale = SIZE / (span + 2.0 * pad);
        let width = ((hi.re - lo.re) + 2.0 * pad) * scale;
        let height = ((hi.im - lo.im) + 2.0 * pad) * scale;
        Frame { min, scale, width, height }
    }

    fn map(&self, p: Point) -> (f64, f64) {
        ((p.re - self.min.re) * self.scale, self.height - (p.im - self.min.im) * self.scale)
    }

    fn header(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.1}\" height=\"{h:.1}\" viewBox=\"0 0 {w:.3} {h:.3}\">",
            w = self.width,
            h = self.height
        );
        let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    }
}

/// FNV-1a, stable across platforms and releases.
fn fnv(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Color of a vertex, a function of its label (or index when unlabeled).
pub fn vertex_color(label: &str) -> String {
    let h = fnv(label);
    let hue = h % 360;
    let light = 25 + (h >> 16) % 30;
    format!("hsl({hue},70%,{light}%)")
}

pub fn render_realization(l: &AbstractLinkage, phi: &Realization) -> String {
    let f = Frame::fit(&phi.positions);
    let r = 0.006 * SIZE;
    let mut out = String::new();
    f.header(&mut out);
    let _ = writeln!(out, "<g stroke=\"#444\" stroke-width=\"{:.2}\">", 0.25 * r);
    for e in l.edges() {
        let (x1, y1) = f.map(phi.at(e.u));
        let (x2, y2) = f.map(phi.at(e.v));
        let _ = writeln!(out, "<line x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\"/>");
    }
    out.push_str("</g>\n<g>\n");
    for v in l.vertices() {
        let name = l.label(v).map_or_else(|| format!("v{}", v.0), str::to_string);
        let (x, y) = f.map(phi.at(v));
        let fill = if l.mark_of(v).is_some() { String::from("black") } else { vertex_color(&name) };
        let _ = writeln!(out, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{r:.2}\" fill=\"{fill}\"><title>{}</title></circle>", escape(&name));
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Polyline through `points`, closed when `closed` is set.
pub fn render_polyline(points: &[Point], closed: bool) -> String {
    let f = Frame::fit(points);
    let mut out = String::new();
    f.header(&mut out);
    let coords: Vec<String> = points
        .iter()
        .map(|&p| {
            let (x, y) = f.map(p);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let tag = if closed { "polygon" } else { "polyline" };
    let _ = writeln!(out, "<{tag} points=\"{}\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\"/>", coords.join(" "));
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colors_are_stable() {
        assert_eq!(vertex_color("A"), vertex_color("A"));
        assert_ne!(vertex_color("A"), vertex_color("B"));
    }

    #[test]
    fn margin_is_five_percent() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 1.0)];
        let f = Frame::fit(&pts);
        let (x0, y0) = f.map(pts[0]);
        let (x1, y1) = f.map(pts[1]);
        assert!((x0 - SIZE * 0.05 / 1.1).abs() < 1e-9);
        assert!((x1 - SIZE * 1.05 / 1.1).abs() < 1e-9);
        assert!((y0 - y1 - SIZE / 1.1).abs() < 1e-9);
    }

    #[test]
    fn closed_trace_is_a_polygon() {
        let pts: Vec<Point> = (0..8).map(|k| Point::from_polar(1.0, k as f64)).collect();
        assert!(render_polyline(&pts, true).contains("<polygon"));
    }
}
