//! Small geometric value types: intervals, parameter rectangles, planar
//! points and triangles.

use crate::error::{Error, Result};

/// A closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Affine map of `x` from this interval onto `[-1, 1]` (lo -> -1).
    pub fn to_unit(&self, x: f64) -> f64 {
        (2.0 * x - self.hi - self.lo) / self.length()
    }

    /// Affine map of `u in [-1, 1]` back into this interval.
    pub fn from_unit(&self, u: f64) -> f64 {
        self.lo + 0.5 * (u + 1.0) * self.length()
    }

    /// Affine map of `x` from this interval onto `[0, 1]`.
    pub fn to_unit01(&self, x: f64) -> f64 {
        (x - self.lo) / self.length()
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }

    /// `n` equally spaced samples including both endpoints (`n >= 2`), or the
    /// midpoint for `n == 1`.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        if n <= 1 {
            return vec![self.midpoint()];
        }
        let step = self.length() / (n - 1) as f64;
        (0..n).map(|k| self.lo + k as f64 * step).collect()
    }
}

/// A parameter rectangle `I x J` in the `(s, t)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub s: Interval,
    pub t: Interval,
}

impl Rect {
    pub const UNIT: Rect = Rect {
        s: Interval::UNIT,
        t: Interval::UNIT,
    };

    pub fn new(s: Interval, t: Interval) -> Self {
        Rect { s, t }
    }

    pub fn diameter(&self) -> f64 {
        self.s.length().hypot(self.t.length())
    }

    pub fn center(&self) -> (f64, f64) {
        (self.s.midpoint(), self.t.midpoint())
    }

    pub fn contains(&self, s: f64, t: f64) -> bool {
        self.s.contains(s) && self.t.contains(t)
    }

    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        Some(Rect {
            s: self.s.intersect(&other.s)?,
            t: self.t.intersect(&other.t)?,
        })
    }
}

/// A point in the image plane of the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dist(&self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A planar triangle, the domain of the triangular Bernstein basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub vertices: [Point2; 3],
}

impl Triangle {
    pub fn new(a: Point2, b: Point2, c: Point2) -> Self {
        Triangle {
            vertices: [a, b, c],
        }
    }

    /// Twice the signed area (the barycentric denominator).
    fn doubled_signed_area(&self) -> f64 {
        let [a, b, c] = self.vertices;
        (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)
    }

    pub fn area(&self) -> f64 {
        0.5 * self.doubled_signed_area().abs()
    }

    pub fn squared_diameter(&self) -> f64 {
        let [a, b, c] = self.vertices;
        let d2 = |p: Point2, q: Point2| (p.x - q.x).powi(2) + (p.y - q.y).powi(2);
        d2(a, b).max(d2(b, c)).max(d2(a, c))
    }

    pub fn is_degenerate(&self) -> bool {
        self.area() <= 1e-12 * self.squared_diameter()
    }

    /// Barycentric coordinates `(u, v, w)` of `p` with respect to the three
    /// vertices (in order). Values outside `[0, 1]` mean `p` is outside.
    pub fn barycentric(&self, p: Point2) -> Result<(f64, f64, f64)> {
        if self.is_degenerate() {
            return Err(Error::DegenerateTriangle { area: self.area() });
        }
        let [a, b, c] = self.vertices;
        let det = self.doubled_signed_area();
        let v = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
        let w = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
        Ok((1.0 - v - w, v, w))
    }

    /// Axis-aligned bounding box as `(min, max)` corners.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        let [a, b, c] = self.vertices;
        let min = Point2::new(a.x.min(b.x).min(c.x), a.y.min(b.y).min(c.y));
        let max = Point2::new(a.x.max(b.x).max(c.x), a.y.max(b.y).max(c.y));
        (min, max)
    }
}
