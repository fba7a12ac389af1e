//! Discreteness and denseness predicates evaluated on windowed realizations.

use rayon::prelude::*;

use super::index::NearestGrid;
use super::point::{Cuboid, Point};
use super::pointset::{merge_tolerance, Generator, PointSet};
use crate::error::{invalid, Error, Result};

/// Default budget for pairwise scans (number of ordered pairs).
pub const DEFAULT_PAIR_BUDGET: u128 = 100_000_000;

const SAMPLE_LIMIT: u128 = 100_000_000;

/// Minimum pairwise Euclidean distance.
pub fn min_gap(ps: &PointSet) -> Result<f64> {
    let pts = ps.points();
    if pts.len() < 2 {
        return Err(Error::InsufficientPoints { needed: 2, got: pts.len() });
    }
    // points are sorted by the first coordinate
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for q in &pts[i + 1..] {
            if q.get(0) - pts[i].get(0) >= best {
                break;
            }
            best = best.min(pts[i].dist(q));
        }
    }
    Ok(best)
}

/// Sup over a regular grid (spacing ≤ 1/sample_density) of the distance to the
/// nearest point. The grid is restricted to the window shrunk by the current
/// estimate, repeated until the estimate settles; points beyond the window
/// would otherwise be missing near its faces. Returns +∞ for an empty set.
pub fn covering_radius(ps: &PointSet, sample_density: f64) -> Result<f64> {
    if !(sample_density > 0.0) {
        return Err(invalid("sample density must be positive"));
    }
    let Some(grid) = NearestGrid::new(ps.points()) else {
        return Ok(f64::INFINITY);
    };
    let (mut estimate, mut spacing) = grid_sup(&grid, ps.window(), sample_density)?;
    for _ in 0..8 {
        let Some(inner) = ps.window().shrink(estimate) else { break };
        let (next, h) = grid_sup(&grid, &inner, sample_density)?;
        let settled = (next - estimate).abs() <= spacing.max(h);
        estimate = next;
        spacing = h;
        if settled {
            break;
        }
    }
    Ok(estimate)
}

/// Grid spacing covering_radius uses on a given window.
pub fn covering_grid_spacing(window: &Cuboid, sample_density: f64) -> f64 {
    (0..window.dim())
        .map(|i| {
            let n = (window.side(i) * sample_density).ceil().max(1.0);
            window.side(i) / n
        })
        .fold(0.0, f64::max)
}

fn grid_sup(grid: &NearestGrid<'_>, region: &Cuboid, density: f64) -> Result<(f64, f64)> {
    let dim = region.dim();
    let mut counts = [1usize; 3];
    let mut steps = [0.0; 3];
    let mut total: u128 = 1;
    for i in 0..dim {
        let n = (region.side(i) * density).ceil().max(1.0) as usize;
        counts[i] = n + 1;
        steps[i] = region.side(i) / n as f64;
        total = total.saturating_mul(counts[i] as u128);
    }
    if total > SAMPLE_LIMIT {
        return Err(invalid(format!("{total} covering samples exceed the limit; lower the density")));
    }
    let lo = region.lo();
    let sup = (0..counts[0])
        .into_par_iter()
        .map(|a| {
            let mut best: f64 = 0.0;
            let mut c = [lo.get(0) + a as f64 * steps[0], 0.0, 0.0];
            for b in 0..counts[1] {
                if dim > 1 {
                    c[1] = lo.get(1) + b as f64 * steps[1];
                }
                for z in 0..counts[2] {
                    if dim > 2 {
                        c[2] = lo.get(2) + z as f64 * steps[2];
                    }
                    let q = Point::new(&c[..dim]).expect("finite sample");
                    best = best.max(grid.nearest_dist(&q));
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    let h = steps[..dim].iter().copied().fold(0.0, f64::max);
    Ok((sup, h))
}

/// max over translates t of #((t + k_box) ∩ ps).
///
/// The maximum is attained by a translate whose lower faces touch points of
/// the set, so only those anchored translates are scanned; the result is the
/// exact supremum over all real translates.
pub fn weak_ud_count(ps: &PointSet, k_box: &Cuboid) -> Result<usize> {
    let weights = vec![1.0; ps.len()];
    let mass = max_box_mass(ps.points(), &weights, k_box, ps.tol())?;
    Ok(mass.round() as usize)
}

/// max over translates of Σ weights of points inside t + k_box (weights ≥ 0).
pub(crate) fn max_box_mass(points: &[Point], weights: &[f64], k_box: &Cuboid, tol: f64) -> Result<f64> {
    if !(k_box.volume() > 0.0) {
        return Err(invalid("k_box must have positive volume"));
    }
    if points.is_empty() {
        return Ok(0.0);
    }
    let dim = k_box.dim();
    points[0].check_dim(dim)?;
    let sides = k_box.sides();
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a].get(0).total_cmp(&points[b].get(0)));
    let sorted: Vec<(Point, f64)> = idx.iter().map(|&i| (points[i], weights[i])).collect();
    let best = (0..sorted.len())
        .into_par_iter()
        .map(|i| {
            let x0 = sorted[i].0.get(0);
            let slab: Vec<(Point, f64)> = sorted[i..]
                .iter()
                .take_while(|(p, _)| p.get(0) <= x0 + sides[0] + tol)
                .copied()
                .collect();
            anchored_mass(&slab, &sides, 1, tol)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Max mass over boxes anchored along `axis` and beyond, for points already
/// confined in the earlier axes.
fn anchored_mass(slab: &[(Point, f64)], sides: &[f64], axis: usize, tol: f64) -> f64 {
    if axis == sides.len() {
        return slab.iter().map(|(_, w)| w).sum();
    }
    let mut pts = slab.to_vec();
    pts.sort_by(|a, b| a.0.get(axis).total_cmp(&b.0.get(axis)));
    let mut best: f64 = 0.0;
    for i in 0..pts.len() {
        let lo = pts[i].0.get(axis);
        let inner: Vec<(Point, f64)> = pts[i..]
            .iter()
            .take_while(|(p, _)| p.get(axis) <= lo + sides[axis] + tol)
            .copied()
            .collect();
        best = best.max(anchored_mass(&inner, sides, axis + 1, tol));
    }
    best
}

/// {x − y : x, y ∈ ps} ∩ out_window, merged at the output window's δ_merge.
pub fn difference_set(ps: &PointSet, out_window: &Cuboid) -> Result<PointSet> {
    difference_set_with_budget(ps, out_window, DEFAULT_PAIR_BUDGET)
}

pub fn difference_set_with_budget(ps: &PointSet, out_window: &Cuboid, budget: u128) -> Result<PointSet> {
    out_window.check_dim(ps.dim())?;
    let pts = ps.points();
    let pairs = (pts.len() as u128).pow(2);
    if pairs > budget {
        return Err(Error::BudgetExceeded { pairs, budget });
    }
    let tol = merge_tolerance(out_window);
    let (lo0, hi0) = (out_window.lo().get(0), out_window.hi().get(0));
    let mut diffs = Vec::new();
    for x in pts {
        // x − y ∈ [lo0, hi0] ⇔ y ∈ [x − hi0, x − lo0]; points are sorted by first coordinate
        let start = pts.partition_point(|y| y.get(0) < x.get(0) - hi0 - tol);
        for y in &pts[start..] {
            if y.get(0) > x.get(0) - lo0 + tol {
                break;
            }
            let z = *x - *y;
            if out_window.contains_tol(&z, tol) {
                diffs.push(z);
            }
        }
    }
    PointSet::clipped(*out_window, diffs, Generator::Explicit)
}
