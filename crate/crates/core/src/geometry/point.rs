use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

pub const MAX_DIM: usize = 3;

/// A point of ℝᵈ with d ∈ {1, 2, 3}. Unused trailing coordinates are kept at zero.
#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    dim: u8,
    c: [f64; MAX_DIM],
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let dim = coords.len();
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(invalid(format!("point dimension {dim} not in 1..=3")));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(invalid("point coordinates must be finite"));
        }
        let mut c = [0.0; MAX_DIM];
        c[..dim].copy_from_slice(coords);
        Ok(Self { dim: dim as u8, c })
    }

    /// Panics on an invalid dimension; meant for literals in code and tests.
    pub fn from_slice(coords: &[f64]) -> Self {
        Self::new(coords).expect("valid point literal")
    }

    pub fn d1(x: f64) -> Self {
        Self { dim: 1, c: [x, 0.0, 0.0] }
    }

    pub fn d2(x: f64, y: f64) -> Self {
        Self { dim: 2, c: [x, y, 0.0] }
    }

    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} not in 1..=3");
        Self { dim: dim as u8, c: [0.0; MAX_DIM] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim as usize]
    }

    #[inline]
    pub fn get(&self, axis: usize) -> f64 {
        self.c[axis]
    }

    #[inline]
    pub fn dot(&self, other: &Point) -> f64 {
        self.c[0] * other.c[0] + self.c[1] * other.c[1] + self.c[2] * other.c[2]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (*self - *other).norm()
    }

    pub fn linf_dist(&self, other: &Point) -> f64 {
        (0..self.dim())
            .map(|i| (self.c[i] - other.c[i]).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0.0)
    }

    /// Lexicographic order on coordinates; the canonical order of point lists.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        for i in 0..self.dim().max(other.dim()) {
            match self.c[i].total_cmp(&other.c[i]) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.dim.cmp(&other.dim)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: dim, got: self.dim() })
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords()).finish()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        debug_assert_eq!(self.dim, rhs.dim);
        Point {
            dim: self.dim,
            c: [self.c[0] + rhs.c[0], self.c[1] + rhs.c[1], self.c[2] + rhs.c[2]],
        }
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        debug_assert_eq!(self.dim, rhs.dim);
        Point {
            dim: self.dim,
            c: [self.c[0] - rhs.c[0], self.c[1] - rhs.c[1], self.c[2] - rhs.c[2]],
        }
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        // keep +0.0 for unused coordinates
        let mut c = [0.0; MAX_DIM];
        for (i, v) in c.iter_mut().enumerate().take(self.dim()) {
            *v = -self.c[i];
        }
        Point { dim: self.dim, c }
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, s: f64) -> Point {
        let mut c = [0.0; MAX_DIM];
        for (i, v) in c.iter_mut().enumerate().take(self.dim()) {
            *v = self.c[i] * s;
        }
        Point { dim: self.dim, c }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Point::new(&v).map_err(serde::de::Error::custom)
    }
}

/// Axis-aligned closed box ∏[loᵢ, hiᵢ] with loᵢ < hiᵢ.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CuboidRepr", into = "CuboidRepr")]
pub struct Cuboid {
    lo: Point,
    hi: Point,
}

#[derive(Serialize, Deserialize)]
struct CuboidRepr {
    lo: Point,
    hi: Point,
}

impl TryFrom<CuboidRepr> for Cuboid {
    type Error = Error;
    fn try_from(r: CuboidRepr) -> Result<Self> {
        Cuboid::new(r.lo, r.hi)
    }
}

impl From<Cuboid> for CuboidRepr {
    fn from(c: Cuboid) -> Self {
        CuboidRepr { lo: c.lo, hi: c.hi }
    }
}

impl Cuboid {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        lo.check_dim(hi.dim())?;
        for i in 0..lo.dim() {
            if !(lo.get(i) < hi.get(i)) {
                return Err(invalid(format!(
                    "box axis {i}: lo {} must be < hi {}",
                    lo.get(i),
                    hi.get(i)
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn from_bounds(lo: &[f64], hi: &[f64]) -> Result<Self> {
        Self::new(Point::new(lo)?, Point::new(hi)?)
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Point::d1(lo), Point::d1(hi))
    }

    /// [−h, h]ᵈ.
    pub fn centered(dim: usize, half: f64) -> Result<Self> {
        Self::cube(dim, -half, half)
    }

    /// [lo, hi]ᵈ.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        let lo = Point::new(&vec![lo; dim])?;
        let hi = Point::new(&vec![hi; dim])?;
        Self::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn lo(&self) -> Point {
        self.lo
    }

    pub fn hi(&self) -> Point {
        self.hi
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.hi.get(axis) - self.lo.get(axis)
    }

    pub fn sides(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.side(i)).collect()
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.side(i)).product()
    }

    pub fn diameter(&self) -> f64 {
        self.lo.dist(&self.hi)
    }

    pub fn center(&self) -> Point {
        (self.lo + self.hi) * 0.5
    }

    /// Closed containment with an absolute slack `tol` on every face.
    #[inline]
    pub fn contains_tol(&self, p: &Point, tol: f64) -> bool {
        (0..self.dim()).all(|i| {
            let x = p.get(i);
            x >= self.lo.get(i) - tol && x <= self.hi.get(i) + tol
        })
    }

    #[inline]
    pub fn contains(&self, p: &Point) -> bool {
        self.contains_tol(p, 0.0)
    }

    pub fn contains_box(&self, other: &Cuboid) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }

    pub fn translate(&self, v: &Point) -> Cuboid {
        Cuboid { lo: self.lo + *v, hi: self.hi + *v }
    }

    /// Image under x ↦ c·x; a negative factor flips the bounds.
    pub fn scale(&self, c: f64) -> Result<Cuboid> {
        if c == 0.0 || !c.is_finite() {
            return Err(invalid("scale factor must be finite and nonzero"));
        }
        let a = self.lo * c;
        let b = self.hi * c;
        let lo: Vec<f64> = (0..self.dim()).map(|i| a.get(i).min(b.get(i))).collect();
        let hi: Vec<f64> = (0..self.dim()).map(|i| a.get(i).max(b.get(i))).collect();
        Cuboid::from_bounds(&lo, &hi)
    }

    /// Moves every face inward by `margin`; `None` once the box collapses.
    pub fn shrink(&self, margin: f64) -> Option<Cuboid> {
        let lo: Vec<f64> = self.lo.coords().iter().map(|x| x + margin).collect();
        let hi: Vec<f64> = self.hi.coords().iter().map(|x| x - margin).collect();
        Cuboid::from_bounds(&lo, &hi).ok()
    }

    pub fn grow(&self, margin: f64) -> Cuboid {
        self.shrink(-margin).expect("growing keeps the box valid")
    }

    /// Minkowski difference {x − y : x ∈ self, y ∈ other}.
    pub fn minkowski_diff(&self, other: &Cuboid) -> Cuboid {
        Cuboid { lo: self.lo - other.hi, hi: self.hi - other.lo }
    }

    pub fn intersect(&self, other: &Cuboid) -> Option<Cuboid> {
        let lo: Vec<f64> = (0..self.dim()).map(|i| self.lo.get(i).max(other.lo.get(i))).collect();
        let hi: Vec<f64> = (0..self.dim()).map(|i| self.hi.get(i).min(other.hi.get(i))).collect();
        Cuboid::from_bounds(&lo, &hi).ok()
    }

    /// Smallest box holding all points, padded by `pad` on every face (pad > 0 keeps
    /// single-point sets valid).
    pub fn bounding<'a>(points: impl IntoIterator<Item = &'a Point>, pad: f64) -> Option<Cuboid> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let mut lo = first;
        let mut hi = first;
        for p in it {
            for i in 0..first.dim() {
                lo.c[i] = lo.c[i].min(p.c[i]);
                hi.c[i] = hi.c[i].max(p.c[i]);
            }
        }
        let pad = Point::new(&vec![pad; first.dim()]).ok()?;
        Cuboid::new(lo - pad, hi + pad).ok()
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        self.lo.check_dim(dim)
    }
}

impl fmt::Debug for Cuboid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cuboid{:?}..{:?}", self.lo, self.hi)
    }
}

/// A one-dimensional interval with independent open/closed ends. Degenerate
/// closed intervals [a, a] are allowed (internal windows of model sets).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "yes")]
    pub lo_closed: bool,
    #[serde(default = "yes")]
    pub hi_closed: bool,
}

fn yes() -> bool {
    true
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: true }
    }

    /// [lo, hi)
    pub fn half_open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: false }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn len(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// `contains`, with values within `slack` of an end snapped onto that end,
    /// so rounding cannot flip the open/closed convention.
    pub fn contains_snapped(&self, x: f64, slack: f64) -> bool {
        if (x - self.lo).abs() <= slack {
            return self.lo_closed && (self.lo < self.hi || self.hi_closed);
        }
        if (x - self.hi).abs() <= slack {
            return self.hi_closed;
        }
        self.lo < x && x < self.hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_rejects_inverted_axis() {
        assert!(Cuboid::interval(1.0, 1.0).is_err());
        assert!(Cuboid::from_bounds(&[0.0, 2.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn negative_scale_flips_bounds() {
        let b = Cuboid::interval(1.0, 3.0).unwrap().scale(-2.0).unwrap();
        assert_eq!(b.lo().get(0), -6.0);
        assert_eq!(b.hi().get(0), -2.0);
    }

    #[test]
    fn shrink_collapses_to_none() {
        let b = Cuboid::centered(2, 1.0).unwrap();
        assert!(b.shrink(0.5).is_some());
        assert!(b.shrink(1.0).is_none());
    }

    #[test]
    fn half_open_interval_membership() {
        let w = Interval::half_open(-1.0, 0.5);
        assert!(w.contains(-1.0));
        assert!(!w.contains(0.5));
        assert!(Interval::closed(0.0, 0.0).contains(0.0));
        assert!(Interval::half_open(0.0, 0.0).is_empty());
    }

    #[test]
    fn point_json_is_a_plain_array() {
        let p = Point::d2(1.5, -2.0);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1.5,-2.0]");
        let back: Point = serde_json::from_str("[1.5,-2.0]").unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Point>("[1,2,3,4]").is_err());
    }
}
