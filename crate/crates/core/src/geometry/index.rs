//! Spatial hashing used for point identity (merge at tolerance) and for
//! nearest-point queries.

use std::ops::Index;

use rustc_hash::FxHashMap;

use super::point::{Cuboid, Point, MAX_DIM};

type CellKey = [i64; MAX_DIM];

/// Hash grid with cell side `tol`. Two points are identified when their
/// L∞ distance is at most `tol`; such points always sit in the same or in
/// face/corner-adjacent cells, and each cell holds at most one representative.
#[derive(Clone)]
pub(crate) struct MergeIndex {
    dim: usize,
    tol: f64,
    cells: FxHashMap<CellKey, usize>,
}

impl MergeIndex {
    pub fn new(dim: usize, tol: f64) -> Self {
        assert!(tol > 0.0, "merge tolerance must be positive");
        Self { dim, tol, cells: FxHashMap::default() }
    }

    pub fn with_capacity(dim: usize, tol: f64, cap: usize) -> Self {
        let mut idx = Self::new(dim, tol);
        idx.cells.reserve(cap);
        idx
    }

    #[inline]
    fn key(&self, p: &Point) -> CellKey {
        let mut k = [0i64; MAX_DIM];
        for (i, slot) in k.iter_mut().enumerate().take(self.dim) {
            *slot = (p.get(i) / self.tol).floor() as i64;
        }
        k
    }

    /// Index of the stored point identified with `p`, if any.
    pub fn find<S: Index<usize, Output = Point> + ?Sized>(&self, p: &Point, stored: &S) -> Option<usize> {
        let home = self.key(p);
        if let Some(&i) = self.cells.get(&home) {
            return Some(i);
        }
        let span = |axis: usize| if axis < self.dim { -1..=1 } else { 0..=0 };
        for a in span(0) {
            for b in span(1) {
                for c in span(2) {
                    if a == 0 && b == 0 && c == 0 {
                        continue;
                    }
                    let k = [home[0] + a, home[1] + b, home[2] + c];
                    if let Some(&i) = self.cells.get(&k) {
                        if stored[i].linf_dist(p) <= self.tol {
                            return Some(i);
                        }
                    }
                }
            }
        }
        None
    }

    pub fn insert(&mut self, p: &Point, index: usize) {
        let k = self.key(p);
        self.cells.insert(k, index);
    }
}

/// Merges points closer than `tol` (L∞), keeping the first occurrence, and
/// returns them in lexicographic order.
pub(crate) fn merge_points(dim: usize, points: impl IntoIterator<Item = Point>, tol: f64) -> Vec<Point> {
    let mut index = MergeIndex::new(dim, tol);
    let mut out: Vec<Point> = Vec::new();
    for p in points {
        if index.find(&p, &out).is_none() {
            index.insert(&p, out.len());
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.lex_cmp(b));
    out
}

/// Uniform bucket grid over the bounding box of a point list, answering
/// nearest-neighbour distance queries by expanding Chebyshev rings of cells.
pub(crate) struct NearestGrid<'a> {
    points: &'a [Point],
    dim: usize,
    origin: [f64; MAX_DIM],
    cell: f64,
    shape: [i64; MAX_DIM],
    buckets: Vec<Vec<u32>>,
}

impl<'a> NearestGrid<'a> {
    pub fn new(points: &'a [Point]) -> Option<Self> {
        let dim = points.first()?.dim();
        let bbox = Cuboid::bounding(points, 0.5)?;
        let n = points.len() as f64;
        let cell = (bbox.volume() / n).powf(1.0 / dim as f64).max(1e-12);
        let mut shape = [1i64; MAX_DIM];
        let mut origin = [0.0; MAX_DIM];
        for i in 0..dim {
            origin[i] = bbox.lo().get(i);
            shape[i] = ((bbox.side(i) / cell).ceil() as i64).max(1);
        }
        let total = (shape[0] * shape[1] * shape[2]) as usize;
        let mut buckets = vec![Vec::new(); total];
        let mut grid = Self { points, dim, origin, cell, shape, buckets: Vec::new() };
        for (i, p) in points.iter().enumerate() {
            let c = grid.clamp(grid.cell_of(p));
            buckets[grid.flat(&c)].push(i as u32);
        }
        grid.buckets = buckets;
        Some(grid)
    }

    fn cell_of(&self, p: &Point) -> [i64; MAX_DIM] {
        let mut c = [0i64; MAX_DIM];
        for (i, slot) in c.iter_mut().enumerate().take(self.dim) {
            *slot = ((p.get(i) - self.origin[i]) / self.cell).floor() as i64;
        }
        c
    }

    fn clamp(&self, mut c: [i64; MAX_DIM]) -> [i64; MAX_DIM] {
        for (i, v) in c.iter_mut().enumerate() {
            *v = (*v).clamp(0, self.shape[i] - 1);
        }
        c
    }

    fn flat(&self, c: &[i64; MAX_DIM]) -> usize {
        ((c[2] * self.shape[1] + c[1]) * self.shape[0] + c[0]) as usize
    }

    /// Euclidean distance from `q` to the nearest stored point.
    pub fn nearest_dist(&self, q: &Point) -> f64 {
        let home = self.cell_of(q);
        // rings beyond this index cannot contain cells of the grid
        let mut max_ring = 0i64;
        for (h, s) in home.iter().zip(&self.shape).take(self.dim) {
            max_ring = max_ring.max(h.abs()).max((s - 1 - h).abs());
        }
        let mut best = f64::INFINITY;
        for r in 0..=max_ring {
            // every cell of ring r+1 lies at distance ≥ r·cell from q
            if best <= (r as f64 - 1.0).max(0.0) * self.cell && r > 0 {
                break;
            }
            self.visit_ring(&home, r, |idx| {
                for &j in &self.buckets[idx] {
                    let d = self.points[j as usize].dist(q);
                    if d < best {
                        best = d;
                    }
                }
            });
        }
        best
    }

    fn visit_ring(&self, home: &[i64; MAX_DIM], r: i64, mut f: impl FnMut(usize)) {
        let range = |axis: usize| -> (i64, i64) {
            if axis >= self.dim {
                return (0, 0);
            }
            let lo = (home[axis] - r).max(0);
            let hi = (home[axis] + r).min(self.shape[axis] - 1);
            (lo, hi)
        };
        let (x0, x1) = range(0);
        let (y0, y1) = range(1);
        let (z0, z1) = range(2);
        for z in z0..=z1 {
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let c = [x, y, z];
                    let cheb = (0..self.dim).map(|i| (c[i] - home[i]).abs()).max().unwrap_or(0);
                    if cheb == r {
                        f(self.flat(&c));
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_identifies_points_across_cell_boundaries() {
        let tol = 1e-6;
        let pts = vec![Point::d1(0.9999995e-6), Point::d1(1.0000001e-6), Point::d1(5.0)];
        let merged = merge_points(1, pts, tol);
        assert_eq!(merged.len(), 2);
    }

    #[test]
    fn nearest_matches_brute_force() {
        let pts: Vec<Point> = (0..40)
            .map(|i| {
                let t = i as f64;
                Point::d2((t * 0.731).sin() * 7.0, (t * 1.37).cos() * 3.0)
            })
            .collect();
        let grid = NearestGrid::new(&pts).unwrap();
        for i in 0..50 {
            let t = i as f64 * 0.37;
            let q = Point::d2(t.cos() * 12.0 - 1.0, (t * 0.5).sin() * 9.0);
            let brute = pts.iter().map(|p| p.dist(&q)).fold(f64::INFINITY, f64::min);
            assert!((grid.nearest_dist(&q) - brute).abs() < 1e-12);
        }
    }
}
