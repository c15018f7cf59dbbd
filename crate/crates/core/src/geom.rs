//! Plane geometry primitives: circle intersections and disk arithmetic.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// A point of the plane, identified with a complex number.
pub type Point = Complex64;

/// Two circles closer than this to tangency meet in a single point.
pub const TANGENCY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum GeomError {
    #[error("circles do not intersect")]
    NoIntersection,
    #[error("circles are concentric")]
    Concentric,
    #[error("line is undefined by coincident points")]
    DegenerateLine,
}

/// Result of intersecting two curves: the chosen point and its distance
/// (in length units) from a tangential configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub point: Point,
    pub gap: f64,
}

impl Hit {
    pub fn is_tangential(&self) -> bool {
        self.gap <= TANGENCY_TOL
    }
}

fn tol(scale: f64) -> f64 {
    TANGENCY_TOL * scale.max(1.0)
}

/// Intersection of the circles `|z - c1| = r1` and `|z - c2| = r2`.
///
/// `branch = false` picks the point to the left of the directed line
/// `c1 -> c2`, `true` the point to the right.
pub fn circle_intersect(c1: Point, r1: f64, c2: Point, r2: f64, branch: bool) -> Result<Point, GeomError> {
    circle_hit(c1, r1, c2, r2, branch).map(|h| h.point)
}

pub fn circle_hit(c1: Point, r1: f64, c2: Point, r2: f64, branch: bool) -> Result<Hit, GeomError> {
    let v = c2 - c1;
    let d = v.norm();
    let eps = tol(r1 + r2);
    if d == 0.0 {
        return Err(if (r1 - r2).abs() <= eps { GeomError::Concentric } else { GeomError::NoIntersection });
    }
    if d > r1 + r2 + eps || d < (r1 - r2).abs() - eps {
        return Err(GeomError::NoIntersection);
    }
    let gap = (d - (r1 + r2)).abs().min((d - (r1 - r2).abs()).abs());
    let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h2 = (r1 - a) * (r1 + a);
    let h = if gap <= eps || h2 <= 0.0 { 0.0 } else { h2.sqrt() };
    let u = v / d;
    let left = u * Complex64::i();
    let side = if branch { -h } else { h };
    Ok(Hit { point: c1 + u * a + left * side, gap: gap / (r1 + r2).max(1.0) })
}

/// Intersection of the circle `|z - center| = radius` with the line through
/// `p` and `q`. `branch = false` picks the point nearer `p` along `p -> q`.
pub fn circle_line_hit(center: Point, radius: f64, p: Point, q: Point, branch: bool) -> Result<Hit, GeomError> {
    let dir = q - p;
    let len = dir.norm();
    if len == 0.0 {
        return Err(GeomError::DegenerateLine);
    }
    let u = dir / len;
    let rel = (center - p) * u.conj();
    let foot = p + u * rel.re;
    let dist = rel.im.abs();
    let eps = tol(radius);
    if dist > radius + eps {
        return Err(GeomError::NoIntersection);
    }
    let gap = (radius - dist).abs();
    let h2 = (radius - dist) * (radius + dist);
    let h = if gap <= eps || h2 <= 0.0 { 0.0 } else { h2.sqrt() };
    let side = if branch { h } else { -h };
    Ok(Hit { point: foot + u * side, gap: gap / radius.max(1.0) })
}

/// Mirror image of `z` in the line through `p` and `q`.
pub fn reflect(z: Point, p: Point, q: Point) -> Point {
    let u = (q - p) / (q - p).norm();
    p + u * u * (z - p).conj()
}

/// Closed disk `|z - center| <= radius`; an infinite radius is the whole plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point, radius: f64) -> Self {
        Disk { center, radius }
    }

    pub fn point(center: Point) -> Self {
        Disk { center, radius: 0.0 }
    }

    pub fn plane() -> Self {
        Disk { center: Point::new(0.0, 0.0), radius: f64::INFINITY }
    }

    pub fn is_bounded(&self) -> bool {
        self.radius.is_finite()
    }

    /// Largest modulus attained on the disk.
    pub fn sup_norm(&self) -> f64 {
        self.center.norm() + self.radius
    }

    /// Membership in the closed disk.
    pub fn contains(&self, z: Point) -> bool {
        (z - self.center).norm() <= self.radius
    }

    pub fn contains_disk(&self, other: &Disk) -> bool {
        if !self.is_bounded() {
            return true;
        }
        if !other.is_bounded() {
            return false;
        }
        let slack = 1e-12 * self.sup_norm().max(1.0);
        (other.center - self.center).norm() + other.radius <= self.radius + slack
    }

    /// Distance from the disk to the circle `|z - center| = radius`;
    /// negative when they meet.
    pub fn circle_clearance(&self, center: Point, radius: f64) -> f64 {
        ((self.center - center).norm() - radius).abs() - self.radius
    }

    /// Distance from the disk to the line through `p` with direction `dir`.
    pub fn line_clearance(&self, p: Point, dir: Point) -> f64 {
        let u = dir / dir.norm();
        ((self.center - p) * u.conj()).im.abs() - self.radius
    }

    /// Image under `z -> a z + b`.
    pub fn affine(&self, a: Point, b: Point) -> Disk {
        Disk { center: a * self.center + b, radius: a.norm() * self.radius }
    }

    pub fn conj(&self) -> Disk {
        Disk { center: self.center.conj(), radius: self.radius }
    }

    pub fn add(&self, other: &Disk) -> Disk {
        Disk { center: self.center + other.center, radius: self.radius + other.radius }
    }

    pub fn sub(&self, other: &Disk) -> Disk {
        Disk { center: self.center - other.center, radius: self.radius + other.radius }
    }

    /// Centred enclosure of `{x y : x in self, y in other}`.
    pub fn mul(&self, other: &Disk) -> Disk {
        let (c1, r1, c2, r2) = (self.center, self.radius, other.center, other.radius);
        Disk { center: c1 * c2, radius: c1.norm() * r2 + c2.norm() * r1 + r1 * r2 }
    }

    /// Exact image under `z -> t^2 / conj(z)`; `None` when the disk holds 0.
    pub fn invert(&self, t: f64) -> Option<Disk> {
        let m = self.center.norm();
        if !(m > self.radius) {
            return None;
        }
        let den = (m - self.radius) * (m + self.radius);
        let k = t * t / den;
        Some(Disk { center: self.center * k, radius: self.radius * k })
    }

    /// Largest disk inside both, centred on the segment joining the centres.
    pub fn lens_inscribed(&self, other: &Disk) -> Option<Disk> {
        if !self.is_bounded() {
            return Some(*other);
        }
        if !other.is_bounded() {
            return Some(*self);
        }
        let v = other.center - self.center;
        let d = v.norm();
        if d == 0.0 {
            return Some(Disk { center: self.center, radius: self.radius.min(other.radius) });
        }
        let u = v / d;
        // Extent of both disks along the axis, measured from self.center.
        let lo = (-self.radius).max(d - other.radius);
        let hi = self.radius.min(d + other.radius);
        if hi <= lo {
            return None;
        }
        Some(Disk { center: self.center + u * ((lo + hi) / 2.0), radius: (hi - lo) / 2.0 })
    }
}

/// Unit vector in the direction of `z`.
pub fn unit(z: Point) -> Point {
    z / z.norm()
}
