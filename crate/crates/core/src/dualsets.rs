//! ε-dual sets on sampled grids.
//!
//! For Σ ⊂ ℝᵈ, Σ^ε = {k : |e^{2πi k·x} − 1| < ε for all x ∈ Σ}, and the same
//! formula read the other way defines the back-dual of a set of frequencies.
//! Regions are sampled on grid nodes and summarized by one representative
//! per connected component.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffraction::{estimate_diffraction, BraggPeak};
use crate::error::{invalid, Error, Result};
use crate::geometry::{Cuboid, Generator, Point, PointSet, VanHoveFamily};
use crate::measure::unit_comb;
use crate::report::Verdict;

/// "< ε" is tested as "≤ ε − STRICT_SLACK".
pub const STRICT_SLACK: f64 = 1e-12;

const MAX_NODES: usize = 50_000_000;

/// |e^{2πi t} − 1| = 2|sin(πt)|.
#[inline]
fn chord(t: f64) -> f64 {
    let r = t - t.round();
    2.0 * (std::f64::consts::PI * r).sin().abs()
}

/// Boolean indicator on the grid nodes lo + i·h of a box, with face-adjacent
/// components and one representative node per component.
#[derive(Clone, Debug)]
pub struct GridRegion {
    domain: Cuboid,
    spacing: f64,
    shape: Vec<usize>,
    cells: Vec<bool>,
    representatives: Vec<Point>,
    /// representatives of components that do not touch the domain boundary
    interior: Vec<Point>,
    components: usize,
    truncated: usize,
}

/// Run-length form of a region: per grid row along the first axis, the
/// [start, length] runs of true nodes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionExport {
    pub domain: Cuboid,
    pub spacing: f64,
    pub shape: Vec<usize>,
    pub rows: Vec<Vec<[usize; 2]>>,
    pub representatives: PointSet,
}

impl GridRegion {
    /// Evaluates `inside` on every node.
    pub fn sample(domain: &Cuboid, spacing: f64, inside: impl Fn(&Point) -> bool + Sync) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(invalid("grid spacing must be positive"));
        }
        let dim = domain.dim();
        let shape: Vec<usize> = (0..dim).map(|i| (domain.side(i) / spacing + 1e-9).floor() as usize + 1).collect();
        let total = shape.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s)).unwrap_or(usize::MAX);
        if total > MAX_NODES {
            return Err(invalid(format!("{total} grid nodes exceed the limit {MAX_NODES}; raise the spacing")));
        }
        let mut region = Self {
            domain: *domain,
            spacing,
            shape,
            cells: Vec::new(),
            representatives: Vec::new(),
            interior: Vec::new(),
            components: 0,
            truncated: 0,
        };
        region.cells = (0..total).into_par_iter().map(|f| inside(&region.node(f))).collect();
        region.cluster();
        Ok(region)
    }

    fn index(&self, flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        let mut r = flat;
        for (i, s) in self.shape.iter().enumerate() {
            idx[i] = r % s;
            r /= s;
        }
        idx
    }

    /// Coordinates of node `flat`.
    pub fn node(&self, flat: usize) -> Point {
        let idx = self.index(flat);
        let c: Vec<f64> = (0..self.dim()).map(|i| self.domain.lo().get(i) + idx[i] as f64 * self.spacing).collect();
        Point::from_slice(&c)
    }

    fn cluster(&mut self) {
        let dim = self.dim();
        let strides: Vec<usize> = (0..dim).map(|i| self.shape[..i].iter().product()).collect();
        let mut label = vec![usize::MAX; self.cells.len()];
        let mut reps = Vec::new();
        let mut interior = Vec::new();
        let mut truncated = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.cells.len() {
            if !self.cells[start] || label[start] != usize::MAX {
                continue;
            }
            let id = reps.len();
            label[start] = id;
            queue.push_back(start);
            let mut members = Vec::new();
            let mut centroid = vec![0.0; dim];
            let mut touches = false;
            while let Some(f) = queue.pop_front() {
                members.push(f);
                let p = self.node(f);
                let at = self.index(f);
                touches |= (0..dim).any(|i| at[i] == 0 || at[i] + 1 == self.shape[i]);
                for (i, c) in centroid.iter_mut().enumerate() {
                    *c += p.get(i);
                }
                let idx = self.index(f);
                for i in 0..dim {
                    let mut push = |g: usize| {
                        if self.cells[g] && label[g] == usize::MAX {
                            label[g] = id;
                            queue.push_back(g);
                        }
                    };
                    if idx[i] > 0 {
                        push(f - strides[i]);
                    }
                    if idx[i] + 1 < self.shape[i] {
                        push(f + strides[i]);
                    }
                }
            }
            let n = members.len() as f64;
            let c = Point::from_slice(&centroid.iter().map(|v| v / n).collect::<Vec<_>>());
            // the true node nearest the centroid, so representatives always lie in the region
            let best = members
                .iter()
                .map(|&f| (self.node(f).dist(&c), f))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .expect("nonempty component")
                .1;
            reps.push(self.node(best));
            if touches {
                truncated += 1;
            } else {
                interior.push(self.node(best));
            }
        }
        reps.sort_by(|a, b| a.lex_cmp(b));
        interior.sort_by(|a, b| a.lex_cmp(b));
        self.interior = interior;
        self.truncated = truncated;
        self.components = reps.len();
        self.representatives = reps;
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &Cuboid {
        &self.domain
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn true_count(&self) -> usize {
        self.cells.iter().filter(|c| **c).count()
    }

    pub fn is_empty(&self) -> bool {
        self.true_count() == 0
    }

    pub fn is_full(&self) -> bool {
        self.cells.iter().all(|c| *c)
    }

    pub fn representatives(&self) -> &[Point] {
        &self.representatives
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    /// Components touching the domain boundary; their representatives are
    /// biased toward the interior.
    pub fn truncated_count(&self) -> usize {
        self.truncated
    }

    /// Representatives of untruncated components, or all of them when every
    /// component is truncated. Dropping biased points only enlarges a dual.
    pub fn anchors(&self) -> &[Point] {
        if self.interior.is_empty() {
            &self.representatives
        } else {
            &self.interior
        }
    }

    /// True when some true node lies within one spacing (L∞) of x.
    pub fn contains_near(&self, x: &Point) -> bool {
        let dim = self.dim();
        let mut lo = [0usize; 3];
        let mut hi = [0usize; 3];
        for i in 0..dim {
            let t = (x.get(i) - self.domain.lo().get(i)) / self.spacing;
            if t < -1.0 || t > self.shape[i] as f64 {
                return false;
            }
            lo[i] = (t.floor() - 1.0).max(0.0) as usize;
            hi[i] = ((t.ceil() + 1.0) as usize).min(self.shape[i] - 1);
        }
        let strides: Vec<usize> = (0..dim).map(|i| self.shape[..i].iter().product()).collect();
        let mut stack = vec![(0usize, 0usize)];
        while let Some((axis, base)) = stack.pop() {
            if axis == dim {
                if self.cells[base] && self.node(base).linf_dist(x) <= self.spacing * (1.0 + 1e-9) {
                    return true;
                }
                continue;
            }
            for j in lo[axis]..=hi[axis] {
                stack.push((axis + 1, base + j * strides[axis]));
            }
        }
        false
    }

    /// Cellwise inclusion on identical grids.
    pub fn is_subset_of(&self, other: &GridRegion) -> Result<bool> {
        if self.shape != other.shape || self.domain != other.domain || self.spacing != other.spacing {
            return Err(invalid("regions live on different grids"));
        }
        Ok(self.cells.iter().zip(&other.cells).all(|(a, b)| !a || *b))
    }

    pub fn export(&self) -> Result<RegionExport> {
        let width = self.shape[0];
        let rows = self
            .cells
            .chunks(width)
            .map(|row| {
                let mut runs = Vec::new();
                let mut i = 0;
                while i < row.len() {
                    if row[i] {
                        let start = i;
                        while i < row.len() && row[i] {
                            i += 1;
                        }
                        runs.push([start, i - start]);
                    } else {
                        i += 1;
                    }
                }
                runs
            })
            .collect();
        Ok(RegionExport {
            domain: self.domain,
            spacing: self.spacing,
            shape: self.shape.clone(),
            rows,
            representatives: self.representative_set()?,
        })
    }

    /// The representatives as a point set on the region's domain.
    pub fn representative_set(&self) -> Result<PointSet> {
        PointSet::clipped(self.domain, self.representatives.iter().copied(), Generator::Explicit)
    }

    /// The anchors as a point set on the region's domain.
    pub fn anchor_set(&self) -> Result<PointSet> {
        PointSet::clipped(self.domain, self.anchors().iter().copied(), Generator::Explicit)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 2.0 {
        Ok(())
    } else {
        Err(invalid(format!("ε = {eps} must lie in (0, 2)")))
    }
}

fn dual_of(points: &[Point], eps: f64, domain: &Cuboid, spacing: f64) -> Result<GridRegion> {
    check_eps(eps)?;
    if let Some(p) = points.first() {
        p.check_dim(domain.dim())?;
    }
    let bound = eps - STRICT_SLACK;
    GridRegion::sample(domain, spacing, |k| points.iter().all(|x| chord(k.dot(x)) <= bound))
}

/// Σ^ε sampled on the dual grid: node k is true when |e^{2πi k·x} − 1| < ε for all x ∈ ps.
pub fn eps_dual(ps: &PointSet, eps: f64, dual_domain: &Cuboid, spacing: f64) -> Result<GridRegion> {
    if ps.is_empty() {
        return Err(Error::InsufficientPoints { needed: 1, got: 0 });
    }
    dual_of(ps.points(), eps, dual_domain, spacing)
}

/// Ξ^ε for a dual region Ξ, evaluated through its anchors.
pub fn eps_dual_back(region: &GridRegion, eps: f64, phys_domain: &Cuboid, spacing: f64) -> Result<GridRegion> {
    if region.representatives().is_empty() {
        return Err(Error::DegenerateRegion("back-dual of an empty region".into()));
    }
    dual_of(region.anchors(), eps, phys_domain, spacing)
}

/// Dual and physical grids used by the double-dual construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualGrids {
    pub dual_domain: Cuboid,
    pub dual_spacing: f64,
    pub phys_domain: Cuboid,
    pub phys_spacing: f64,
}

impl DualGrids {
    /// [−10, 10]ᵈ on both sides at spacing 10⁻³.
    pub fn standard(dim: usize) -> Result<Self> {
        let d = Cuboid::centered(dim, 10.0)?;
        Ok(Self { dual_domain: d, dual_spacing: 1e-3, phys_domain: d, phys_spacing: 1e-3 })
    }
}

#[derive(Clone, Debug)]
pub struct DoubleDual {
    pub first: GridRegion,
    pub second: GridRegion,
    /// anchors of the second region
    pub points: PointSet,
    /// one of the regions filled its whole domain
    pub degenerate: bool,
    /// every input point lies within one spacing of the second region
    pub contains_input: bool,
}

/// Λ′ = (Λ^{ε′/2})^{ε′/2}.
pub fn double_dual(ps: &PointSet, eps_prime: f64, grids: &DualGrids) -> Result<DoubleDual> {
    if !(eps_prime > 0.0 && eps_prime < 1.0) {
        return Err(invalid(format!("ε′ = {eps_prime} must lie in (0, 1)")));
    }
    let half = eps_prime / 2.0;
    let first = eps_dual(ps, half, &grids.dual_domain, grids.dual_spacing)?;
    let second = eps_dual_back(&first, half, &grids.phys_domain, grids.phys_spacing)?;
    let points = second.anchor_set()?;
    let contains_input =
        ps.points().iter().filter(|x| grids.phys_domain.contains(x)).all(|x| second.contains_near(x));
    Ok(DoubleDual { degenerate: first.is_full() || second.is_full(), first, second, points, contains_input })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntensityCheck {
    pub y: Point,
    pub intensity: f64,
    pub stderr: f64,
    /// ε·γ̂({0}) − 2·(stderr(y) + stderr(0))
    pub required: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Theorem2Report {
    pub eps: f64,
    pub eps_prime: f64,
    pub lambda_prime: PointSet,
    pub gamma: PointSet,
    /// Λ ⊆ Λ′ within one grid spacing
    pub lambda_in_lambda_prime: bool,
    /// every Λ′ representative lies in Γ^{ε′/2}, evaluated at the point
    pub lambda_prime_in_gamma_dual: bool,
    pub gamma0: BraggPeak,
    pub checks: Vec<IntensityCheck>,
    pub meyer_hypothesis_checked: bool,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

/// Settings for the ε-dual characterization pipeline.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Theorem2Options {
    pub grids: DualGrids,
    /// family for Γ's diffraction; boxes must fit in the dual domain
    pub family: VanHoveFamily,
    /// y ∈ Λ inside this box are tested
    pub check_window: Cuboid,
}

impl Theorem2Options {
    pub fn standard(dim: usize) -> Result<Self> {
        Ok(Self {
            grids: DualGrids::standard(dim)?,
            family: VanHoveFamily::new(dim, vec![2.5, 5.0, 10.0])?,
            check_window: Cuboid::centered(dim, 10.0)?,
        })
    }
}

/// With ε′ = 1 − ε, builds Λ′ = (Λ^{ε′/2})^{ε′/2} and Γ = (Λ′)^{ε′/2}, then
/// checks γ̂_Γ({y}) ≥ ε·γ̂_Γ({0}) for every y ∈ Λ in the check window, up to a
/// guard of two stderr proxies.
///
/// `meyer_checked` records whether the caller verified that Λ is Meyer.
pub fn theorem2_verify(ps: &PointSet, eps: f64, opts: &Theorem2Options, meyer_checked: bool) -> Result<Theorem2Report> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("ε = {eps} must lie in (0, 1)")));
    }
    let eps_prime = 1.0 - eps;
    let half = eps_prime / 2.0;
    let grids = &opts.grids;
    let dd = double_dual(ps, eps_prime, grids)?;
    if dd.second.is_full() {
        return Err(Error::DegenerateRegion("Λ′ fills the physical domain; Λ is too sparse on this window".into()));
    }
    let gamma_region = eps_dual(&dd.points, half, &grids.dual_domain, grids.dual_spacing)?;
    if gamma_region.is_empty() || gamma_region.is_full() {
        return Err(Error::DegenerateRegion(format!(
            "Γ has {} of {} grid nodes",
            gamma_region.true_count(),
            gamma_region.cells().len()
        )));
    }
    let gamma = gamma_region.representative_set()?;
    let bound = half - STRICT_SLACK;
    let lambda_prime_in_gamma_dual = dd
        .points
        .points()
        .iter()
        .all(|x| gamma.points().iter().all(|k| crate::dualsets::chord(k.dot(x)) <= bound));

    let comb = unit_comb(&gamma);
    let targets: Vec<Point> = ps.points().iter().filter(|y| opts.check_window.contains(y)).copied().collect();
    let est = estimate_diffraction(&comb, &targets, &opts.family, &opts.check_window.grow(1.0))?;
    let gamma0 = est.zero.clone();
    let checks: Vec<IntensityCheck> = est
        .peaks
        .iter()
        .map(|p| {
            let required = eps * gamma0.intensity - 2.0 * (p.stderr + gamma0.stderr);
            IntensityCheck { y: p.k, intensity: p.intensity, stderr: p.stderr, required, ok: p.intensity >= required }
        })
        .collect();
    let mut notes = Vec::new();
    if !meyer_checked {
        notes.push("Meyer property of Λ not verified by the caller".into());
    }
    if !dd.contains_input {
        notes.push("some y ∈ Λ is not within one spacing of Λ′".into());
    }
    if !lambda_prime_in_gamma_dual {
        notes.push("a Λ′ representative falls outside Γ^{ε′/2} at grid resolution".into());
    }
    let verdict = if checks.is_empty() {
        notes.push("no point of Λ in the check window".into());
        Verdict::Inconclusive
    } else if checks.iter().all(|c| c.ok) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Theorem2Report {
        eps,
        eps_prime,
        lambda_prime: dd.points,
        gamma,
        lambda_in_lambda_prime: dd.contains_input,
        lambda_prime_in_gamma_dual,
        gamma0,
        checks,
        meyer_hypothesis_checked: meyer_checked,
        verdict,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generate_lattice;

    fn integers(half: f64) -> PointSet {
        generate_lattice(&[vec![1.0]], &Cuboid::centered(1, half).unwrap()).unwrap()
    }

    fn origin() -> PointSet {
        PointSet::explicit(Cuboid::centered(1, 1.0).unwrap(), vec![Point::d1(0.0)]).unwrap()
    }

    #[test]
    fn dual_of_origin_is_everything() {
        let r = eps_dual(&origin(), 0.3, &Cuboid::centered(1, 2.0).unwrap(), 0.01).unwrap();
        assert!(r.is_full());
        assert_eq!(r.component_count(), 1);
    }

    #[test]
    fn dual_of_integer_window() {
        let m = 5.0;
        let eps = 0.5;
        let r = eps_dual(&integers(m), eps, &Cuboid::centered(1, 3.5).unwrap(), 1e-4).unwrap();
        assert_eq!(r.component_count(), 7);
        assert_eq!(r.truncated_count(), 0);
        for (j, rep) in r.representatives().iter().enumerate() {
            assert!((rep.get(0) - (j as f64 - 3.0)).abs() <= 1e-4);
        }
        // width of each interval: 2·asin(ε/2)/(πM)
        let width = 2.0 * (eps / 2.0).asin() / (std::f64::consts::PI * m);
        let per = r.true_count() as f64 / 7.0 * 1e-4;
        assert!((per - width).abs() < 3e-4);
        assert!(r.contains_near(&Point::d1(0.0)));
        let exp = r.export().unwrap();
        assert_eq!(exp.rows.len(), 1);
        assert_eq!(exp.rows[0].len(), 7);
    }

    #[test]
    fn antitone_in_eps_and_in_the_set() {
        let d = Cuboid::centered(1, 2.0).unwrap();
        let small = eps_dual(&integers(3.0), 0.3, &d, 1e-3).unwrap();
        let big = eps_dual(&integers(3.0), 0.6, &d, 1e-3).unwrap();
        assert!(small.is_subset_of(&big).unwrap());
        let more = eps_dual(&integers(6.0), 0.3, &d, 1e-3).unwrap();
        assert!(more.is_subset_of(&small).unwrap());
        // symmetry k ↦ −k
        let c = small.cells();
        assert!(c.iter().zip(c.iter().rev()).all(|(a, b)| a == b));
    }

    #[test]
    fn double_dual_of_integers() {
        let grids = DualGrids::standard(1).unwrap();
        let dd = double_dual(&integers(10.0), 0.5, &grids).unwrap();
        assert!(dd.contains_input);
        assert!(!dd.degenerate);
        assert_eq!(dd.second.component_count(), 21);
        assert_eq!(dd.second.truncated_count(), 2);
        assert_eq!(dd.points.len(), 19);
        for p in dd.points.points() {
            assert!((p.get(0) - p.get(0).round()).abs() <= 1e-3);
        }
    }

    #[test]
    fn double_dual_of_origin_is_degenerate() {
        let grids = DualGrids {
            dual_domain: Cuboid::centered(1, 2.0).unwrap(),
            dual_spacing: 0.01,
            phys_domain: Cuboid::centered(1, 2.0).unwrap(),
            phys_spacing: 0.01,
        };
        let dd = double_dual(&origin(), 0.5, &grids).unwrap();
        assert!(dd.degenerate);
        assert!(dd.first.is_full());
    }

    #[test]
    fn bad_parameters() {
        let d = Cuboid::centered(1, 1.0).unwrap();
        assert!(eps_dual(&origin(), 0.0, &d, 0.1).is_err());
        assert!(eps_dual(&origin(), 2.0, &d, 0.1).is_err());
        assert!(eps_dual(&origin(), 0.5, &d, 0.0).is_err());
        assert!(eps_dual(&PointSet::empty(d), 0.5, &d, 0.1).is_err());
    }
}
