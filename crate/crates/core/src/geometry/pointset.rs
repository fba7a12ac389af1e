use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::index::merge_points;
use super::point::{Cuboid, Interval, Point};
use crate::error::{invalid, Error, Result};

/// Relative factor for the point-identity tolerance: δ_merge = factor × window diameter.
pub const MERGE_FACTOR: f64 = 1e-9;

/// Upper bound on the number of integer coefficient vectors a generator may scan.
const ENUMERATION_LIMIT: u128 = 200_000_000;

pub fn merge_tolerance(window: &Cuboid) -> f64 {
    (MERGE_FACTOR * window.diameter()).max(1e-15)
}

/// The golden ratio τ.
pub fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// How a point set was produced. Structured generators can be realized on
/// any window; `Explicit` lists only exist on the window they were given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// {B·m : m ∈ ℤᵈ}; `basis` lists the basis vectors (the columns of B).
    Lattice { basis: Vec<Vec<f64>> },
    /// 1+1 cut-and-project set; `embedding` lists the two generators of the
    /// lattice in ℝ × ℝ as (physical, internal) pairs.
    ModelSet { embedding: [[f64; 2]; 2], internal_window: Interval },
    Union { parts: Vec<Generator> },
    Translate { shift: Point, inner: Box<Generator> },
    Scale { factor: f64, inner: Box<Generator> },
    Explicit,
}

impl Generator {
    /// The Fibonacci chain: generators (1, 1) and (τ, −1/τ), window [−1, τ−1).
    pub fn fibonacci() -> Self {
        let tau = golden_ratio();
        Generator::ModelSet {
            embedding: [[1.0, 1.0], [tau, -1.0 / tau]],
            internal_window: Interval::half_open(-1.0, tau - 1.0),
        }
    }

    pub fn integer_lattice(dim: usize) -> Self {
        let basis = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Generator::Lattice { basis }
    }

    pub fn scaled_integers(c: f64) -> Self {
        Generator::Lattice { basis: vec![vec![c]] }
    }

    pub fn is_realizable(&self) -> bool {
        match self {
            Generator::Explicit => false,
            Generator::Union { parts } => parts.iter().all(Generator::is_realizable),
            Generator::Translate { inner, .. } | Generator::Scale { inner, .. } => inner.is_realizable(),
            _ => true,
        }
    }

    /// The points of the generated set inside `window` (unmerged, unordered).
    pub fn realize(&self, window: &Cuboid) -> Result<Vec<Point>> {
        let tol = merge_tolerance(window);
        match self {
            Generator::Lattice { basis } => lattice_points(basis, window, tol),
            Generator::ModelSet { embedding, internal_window } => {
                window.check_dim(1)?;
                model_set_points(embedding, internal_window, window, tol)
            }
            Generator::Union { parts } => {
                let mut out = Vec::new();
                for g in parts {
                    out.extend(g.realize(window)?);
                }
                Ok(out)
            }
            Generator::Translate { shift, inner } => {
                shift.check_dim(window.dim())?;
                let pre = window.translate(&-*shift);
                Ok(inner.realize(&pre)?.into_iter().map(|p| p + *shift).collect())
            }
            Generator::Scale { factor, inner } => {
                let pre = window.scale(1.0 / factor)?;
                Ok(inner.realize(&pre)?.into_iter().map(|p| p * *factor).collect())
            }
            Generator::Explicit => Err(Error::NotRealizable("explicit point list".into())),
        }
    }
}

/// A finite realization of a point set of ℝᵈ inside a box window.
///
/// Points are kept merged at δ_merge = 10⁻⁹ × window diameter and sorted
/// lexicographically, so equal inputs give identical point lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointSetRepr", into = "PointSetRepr")]
pub struct PointSet {
    points: Vec<Point>,
    window: Cuboid,
    generator: Generator,
}

#[derive(Serialize, Deserialize)]
struct PointSetRepr {
    dim: usize,
    points: Vec<Point>,
    window: Cuboid,
    generator: Generator,
}

impl TryFrom<PointSetRepr> for PointSet {
    type Error = Error;
    fn try_from(r: PointSetRepr) -> Result<Self> {
        r.window.check_dim(r.dim)?;
        PointSet::new(r.window, r.points, r.generator)
    }
}

impl From<PointSet> for PointSetRepr {
    fn from(ps: PointSet) -> Self {
        PointSetRepr { dim: ps.dim(), points: ps.points, window: ps.window, generator: ps.generator }
    }
}

impl PointSet {
    /// Builds a set from points that must lie in `window` (up to δ_merge).
    pub fn new(window: Cuboid, points: Vec<Point>, generator: Generator) -> Result<Self> {
        let tol = merge_tolerance(&window);
        for p in &points {
            p.check_dim(window.dim())?;
            if !window.contains_tol(p, tol) {
                return Err(invalid(format!("point {p} lies outside window {window:?}")));
            }
        }
        let points = merge_points(window.dim(), points, tol);
        Ok(Self { points, window, generator })
    }

    /// Keeps the points inside `window`, dropping the rest.
    pub fn clipped(window: Cuboid, points: impl IntoIterator<Item = Point>, generator: Generator) -> Result<Self> {
        let tol = merge_tolerance(&window);
        let kept: Vec<Point> = points.into_iter().filter(|p| window.contains_tol(p, tol)).collect();
        Self::new(window, kept, generator)
    }

    pub fn explicit(window: Cuboid, points: Vec<Point>) -> Result<Self> {
        Self::new(window, points, Generator::Explicit)
    }

    pub fn empty(window: Cuboid) -> Self {
        Self { points: Vec::new(), window, generator: Generator::Explicit }
    }

    pub fn from_generator(generator: Generator, window: Cuboid) -> Result<Self> {
        let pts = generator.realize(&window)?;
        Self::clipped(window, pts, generator)
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn window(&self) -> &Cuboid {
        &self.window
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn tol(&self) -> f64 {
        merge_tolerance(&self.window)
    }

    /// Membership at δ_merge.
    pub fn contains(&self, x: &Point) -> bool {
        let tol = self.tol();
        // points are sorted by first coordinate, so a binary search narrows the scan
        let start = self.points.partition_point(|p| p.get(0) < x.get(0) - tol);
        self.points[start..]
            .iter()
            .take_while(|p| p.get(0) <= x.get(0) + tol)
            .any(|p| p.linf_dist(x) <= tol)
    }

    /// The same set seen through a smaller window: regenerated when the generator
    /// allows it, cropped otherwise.
    pub fn on_window(&self, window: &Cuboid) -> Result<PointSet> {
        if self.generator.is_realizable() {
            PointSet::from_generator(self.generator.clone(), *window)
        } else {
            PointSet::clipped(*window, self.points.iter().copied(), Generator::Explicit)
        }
    }

    pub fn with_generator(mut self, generator: Generator) -> Self {
        self.generator = generator;
        self
    }
}

/// Set-level composition operations.
#[derive(Clone, Debug, PartialEq)]
pub enum Compose {
    Union,
    Translate(Point),
    Scale(f64),
}

/// Applies a composition. `Union` takes any number of inputs; the other two
/// act on exactly one set.
pub fn compose(op: &Compose, inputs: &[&PointSet]) -> Result<PointSet> {
    let first = inputs.first().ok_or_else(|| invalid("compose needs at least one input"))?;
    let dim = first.dim();
    for ps in inputs {
        if ps.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: ps.dim() });
        }
    }
    match op {
        Compose::Union => {
            let window = inputs[1..].iter().fold(*first.window(), |acc, ps| hull(&acc, ps.window()));
            let points = inputs.iter().flat_map(|ps| ps.points().iter().copied()).collect();
            let generator = Generator::Union { parts: inputs.iter().map(|ps| ps.generator.clone()).collect() };
            PointSet::new(window, points, generator)
        }
        Compose::Translate(v) => {
            single(inputs)?;
            v.check_dim(dim)?;
            let window = first.window().translate(v);
            let points = first.points().iter().map(|p| *p + *v).collect();
            let generator = Generator::Translate { shift: *v, inner: Box::new(first.generator.clone()) };
            PointSet::new(window, points, generator)
        }
        Compose::Scale(c) => {
            single(inputs)?;
            let window = first.window().scale(*c)?;
            let points = first.points().iter().map(|p| *p * *c).collect();
            let generator = Generator::Scale { factor: *c, inner: Box::new(first.generator.clone()) };
            PointSet::new(window, points, generator)
        }
    }
}

fn single(inputs: &[&PointSet]) -> Result<()> {
    if inputs.len() == 1 {
        Ok(())
    } else {
        Err(invalid(format!("operation takes one input, got {}", inputs.len())))
    }
}

fn hull(a: &Cuboid, b: &Cuboid) -> Cuboid {
    let lo: Vec<f64> = (0..a.dim()).map(|i| a.lo().get(i).min(b.lo().get(i))).collect();
    let hi: Vec<f64> = (0..a.dim()).map(|i| a.hi().get(i).max(b.hi().get(i))).collect();
    Cuboid::from_bounds(&lo, &hi).expect("hull of valid boxes")
}

/// Returns exactly {B·m : m ∈ ℤᵈ} ∩ window.
pub fn generate_lattice(basis: &[Vec<f64>], window: &Cuboid) -> Result<PointSet> {
    let generator = Generator::Lattice { basis: basis.to_vec() };
    PointSet::from_generator(generator, *window)
}

/// Returns {p(x) : x ∈ E·ℤ², p*(x) ∈ internal window, p(x) ∈ physical window}.
pub fn generate_model_set(
    embedding: [[f64; 2]; 2],
    internal_window: Interval,
    physical_window: &Cuboid,
) -> Result<PointSet> {
    let generator = Generator::ModelSet { embedding, internal_window };
    PointSet::from_generator(generator, *physical_window)
}

/// Basis matrix with the given vectors as columns, after checking |det B| > 10⁻¹²·∏‖bᵢ‖.
pub(crate) fn basis_matrix(basis: &[Vec<f64>], dim: usize) -> Result<DMatrix<f64>> {
    if basis.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: basis.len() });
    }
    for v in basis {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(invalid("basis entries must be finite"));
        }
    }
    let b = DMatrix::from_fn(dim, dim, |i, j| basis[j][i]);
    let scale: f64 = basis.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).product();
    let det = b.determinant();
    let threshold = 1e-12 * scale.max(f64::MIN_POSITIVE);
    if !(det.abs() > threshold) {
        return Err(Error::DegenerateLattice { det, threshold });
    }
    Ok(b)
}

/// Integer ranges of B⁻¹x over the box, per coordinate.
fn coefficient_ranges(inv: &DMatrix<f64>, lo: &[f64], hi: &[f64]) -> Result<Vec<(i64, i64)>> {
    let dim = lo.len();
    let mut ranges = Vec::with_capacity(dim);
    let mut total: u128 = 1;
    for i in 0..dim {
        let (mut a, mut b) = (0.0, 0.0);
        for j in 0..dim {
            let (u, v) = (inv[(i, j)] * lo[j], inv[(i, j)] * hi[j]);
            a += u.min(v);
            b += u.max(v);
        }
        let slack = 1e-9 * (1.0 + a.abs().max(b.abs()));
        let r = ((a - slack).floor() as i64, (b + slack).ceil() as i64);
        total = total.saturating_mul((r.1 - r.0 + 1) as u128);
        ranges.push(r);
    }
    if total > ENUMERATION_LIMIT {
        return Err(invalid(format!("window requires scanning {total} coefficient vectors; shrink it")));
    }
    Ok(ranges)
}

fn for_each_coefficient(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    let mut m: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    if ranges.iter().any(|r| r.0 > r.1) {
        return;
    }
    loop {
        f(&m);
        let mut axis = 0;
        loop {
            if axis == m.len() {
                return;
            }
            if m[axis] < ranges[axis].1 {
                m[axis] += 1;
                break;
            }
            m[axis] = ranges[axis].0;
            axis += 1;
        }
    }
}

fn lattice_points(basis: &[Vec<f64>], window: &Cuboid, tol: f64) -> Result<Vec<Point>> {
    let dim = window.dim();
    let b = basis_matrix(basis, dim)?;
    let inv = b.clone().try_inverse().ok_or(Error::DegenerateLattice { det: 0.0, threshold: 0.0 })?;
    let ranges = coefficient_ranges(&inv, window.lo().coords(), window.hi().coords())?;
    let mut out = Vec::new();
    let mut x = vec![0.0; dim];
    for_each_coefficient(&ranges, |m| {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = (0..dim).map(|j| b[(i, j)] * m[j] as f64).sum();
        }
        let p = Point::new(&x).expect("finite lattice point");
        if window.contains_tol(&p, tol) {
            out.push(p);
        }
    });
    Ok(out)
}

fn model_set_points(
    embedding: &[[f64; 2]; 2],
    internal: &Interval,
    physical: &Cuboid,
    tol: f64,
) -> Result<Vec<Point>> {
    let basis: Vec<Vec<f64>> = embedding.iter().map(|v| v.to_vec()).collect();
    let e = basis_matrix(&basis, 2)?;
    if internal.is_empty() {
        return Ok(Vec::new());
    }
    let inv = e.clone().try_inverse().ok_or(Error::DegenerateLattice { det: 0.0, threshold: 0.0 })?;
    // scan an enlarged physical strip so no boundary point is missed
    let enlarge = e.norm();
    let lo = [physical.lo().get(0) - enlarge, internal.lo];
    let hi = [physical.hi().get(0) + enlarge, internal.hi];
    let ranges = coefficient_ranges(&inv, &lo, &hi)?;
    let mut out = Vec::new();
    for_each_coefficient(&ranges, |m| {
        let (m1, m2) = (m[0] as f64, m[1] as f64);
        let phys = m1 * embedding[0][0] + m2 * embedding[1][0];
        let int = m1 * embedding[0][1] + m2 * embedding[1][1];
        // rounding in the internal coordinate grows with the coefficients
        let slack = 1e-12 * (1.0 + (m1 * embedding[0][1]).abs() + (m2 * embedding[1][1]).abs());
        let p = Point::d1(phys);
        if internal.contains_snapped(int, slack) && physical.contains_tol(&p, tol) {
            out.push(p);
        }
    });
    Ok(out)
}
