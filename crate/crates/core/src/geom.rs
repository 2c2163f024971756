//! Planar primitives: points, angles, bounding boxes and the orientation
//! predicate everything else is built on.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance applied to the diameter of the working set.
pub const REL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from(a: [f64; 2]) -> Self {
        Point::new(a[0], a[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Unit vector at `angle` radians.
    pub fn polar(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Point::new(c, s)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Counterclockwise perpendicular.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    /// Direction angle in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        normalize_angle(self.y.atan2(self.x))
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }

    pub fn midpoint(self, o: Point) -> Point {
        self.lerp(o, 0.5)
    }

    /// Lexicographic comparison by `(x, y)`.
    pub fn lex_cmp(&self, o: &Point) -> std::cmp::Ordering {
        self.x.total_cmp(&o.x).then_with(|| self.y.total_cmp(&o.y))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Maps any angle into `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Counterclockwise angular distance from `from` to `to`, in `[0, 2π)`.
pub fn ccw_delta(from: f64, to: f64) -> f64 {
    normalize_angle(to - from)
}

/// A validated apex/inscribed angle in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Angle(f64);

impl Angle {
    /// Accepts angles in `(0, 2π]`, the valid range for cone apertures.
    pub fn aperture(radians: f64) -> Result<Self> {
        if radians.is_finite() && radians > 0.0 && radians <= TAU + 1e-15 {
            Ok(Angle(radians.min(TAU)))
        } else {
            Err(Error::InvalidAngle(radians))
        }
    }

    /// Clamps/normalizes into `[0, 2π]` without validation.
    pub fn from_radians(radians: f64) -> Self {
        if radians >= TAU {
            Angle(TAU)
        } else {
            Angle(normalize_angle(radians))
        }
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    pub fn is_below_pi(self) -> bool {
        self.0 < PI
    }
}

/// Which side of a directed line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// Sign multiplier: `+1` for left, `-1` for right.
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }
}

/// Orientation of the triple: positive if `a, b, c` turn counterclockwise,
/// negative if clockwise, zero if collinear. The sign is exact.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    )
}

/// Exact side test of `p` against the directed line `a -> b`.
pub fn side_of(a: Point, b: Point, p: Point) -> Option<Side> {
    let o = orient(a, b, p);
    if o > 0.0 {
        Some(Side::Left)
    } else if o < 0.0 {
        Some(Side::Right)
    } else {
        None
    }
}

/// Unsigned angle `∠lpr` in `[0, π]`.
pub fn angle_at(p: Point, l: Point, r: Point) -> Result<f64> {
    if p == l || p == r {
        return Err(Error::CoincidentPoints(p));
    }
    let u = l - p;
    let v = r - p;
    Ok(u.cross(v).abs().atan2(u.dot(v)))
}

/// Counterclockwise angle swept from direction `p->a` to direction `p->b`,
/// in `[0, 2π)`.
pub fn ccw_angle_at(p: Point, a: Point, b: Point) -> f64 {
    let u = a - p;
    let v = b - p;
    normalize_angle(u.cross(v).atan2(u.dot(v)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn new(min: Point, max: Point) -> Self {
        BBox { min, max }
    }

    pub fn empty() -> Self {
        BBox {
            min: Point::new(f64::INFINITY, f64::INFINITY),
            max: Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn of_points<'a>(pts: impl IntoIterator<Item = &'a Point>) -> Self {
        let mut b = BBox::empty();
        for p in pts {
            b.include(*p);
        }
        b
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y
    }

    pub fn include(&mut self, p: Point) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn union(&self, o: &BBox) -> BBox {
        let mut b = *self;
        if !o.is_empty() {
            b.include(o.min);
            b.include(o.max);
        }
        b
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diameter(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            (self.max - self.min).norm()
        }
    }

    pub fn center(&self) -> Point {
        self.min.midpoint(self.max)
    }

    pub fn expand(&self, margin: f64) -> BBox {
        BBox::new(
            self.min - Point::new(margin, margin),
            self.max + Point::new(margin, margin),
        )
    }

    /// Scales about the center so that each side grows by `factor`.
    pub fn scaled(&self, factor: f64) -> BBox {
        let c = self.center();
        let h = (self.max - self.min) * (0.5 * factor);
        BBox::new(c - h, c + h)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn overlaps(&self, o: &BBox) -> bool {
        self.min.x <= o.max.x
            && o.min.x <= self.max.x
            && self.min.y <= o.max.y
            && o.min.y <= self.max.y
    }

    /// Corners in counterclockwise order starting at `min`.
    pub fn corners(&self) -> [Point; 4] {
        [
            self.min,
            Point::new(self.max.x, self.min.y),
            self.max,
            Point::new(self.min.x, self.max.y),
        ]
    }
}

/// Distance from `p` to the closed segment `a b`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    p.dist(a + d * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn angle_at_examples() {
        let l = Point::new(0.0, 0.0);
        let r = Point::new(1.0, 0.0);
        let eq = angle_at(Point::new(0.5, 3f64.sqrt() / 2.0), l, r).unwrap();
        assert!((eq - PI / 3.0).abs() < 1e-12);
        let thales = angle_at(Point::new(0.5, 0.5), l, r).unwrap();
        assert!((thales - FRAC_PI_2).abs() < 1e-12);
        let straight = angle_at(Point::new(0.3, 0.0), l, r).unwrap();
        assert!((straight - PI).abs() < 1e-12);
        assert!(angle_at(l, l, r).is_err());
    }

    #[test]
    fn orientation_sign_is_exact_for_nearly_collinear() {
        let a = Point::new(0.5, 0.5);
        let b = Point::new(12.0, 12.0);
        let c = Point::new(24.0, 24.0);
        assert_eq!(orient(a, b, c), 0.0);
        let c2 = Point::new(24.0, 24.000000000000004);
        assert!(orient(a, b, c2) > 0.0);
    }

    #[test]
    fn aperture_validation() {
        assert!(Angle::aperture(0.0).is_err());
        assert!(Angle::aperture(f64::NAN).is_err());
        assert!(Angle::aperture(7.0).is_err());
        assert_eq!(Angle::aperture(TAU).unwrap().radians(), TAU);
    }

    #[test]
    fn ccw_angle_wraps() {
        let p = Point::new(0.0, 0.0);
        let a = Point::new(1.0, 0.0);
        let b = Point::new(0.0, -1.0);
        assert!((ccw_angle_at(p, a, b) - 1.5 * PI).abs() < 1e-12);
        assert!((ccw_delta(1.5 * PI, 0.25) - (0.5 * PI + 0.25)).abs() < 1e-12);
    }
}
