//! Atomic measures on ℝᵈ: Dirac combs and the measure calculus needed for
//! autocorrelations (reflection, convolution, weighting, total variation,
//! translation bounds and restriction to closed subgroups).

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{max_box_mass, merge_tolerance, Cuboid, MergeIndex, Point, PointSet, DEFAULT_PAIR_BUDGET};

/// Subgroup membership tolerance relative to the window diameter.
pub const SUBGROUP_FACTOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub x: Point,
    pub w: Complex64,
}

/// A finite sum Σ wⱼ·δ_{xⱼ} with locations distinct at the merge tolerance.
///
/// Locations closer than `tol` (L∞) are one atom; their weights add. Atoms are
/// kept in lexicographic order of location.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct AtomicMeasure {
    dim: usize,
    atoms: Vec<Atom>,
    tol: f64,
    window: Option<Cuboid>,
    provenance: Option<String>,
    index: MergeIndex,
}

#[derive(Serialize, Deserialize)]
struct AtomRepr {
    x: Point,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    dim: usize,
    atoms: Vec<AtomRepr>,
    tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    window: Option<Cuboid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
}

impl TryFrom<MeasureRepr> for AtomicMeasure {
    type Error = Error;
    fn try_from(r: MeasureRepr) -> Result<Self> {
        let atoms = r.atoms.into_iter().map(|a| Atom { x: a.x, w: Complex64::new(a.re, a.im) });
        let mut m = AtomicMeasure::from_atoms(r.dim, r.tol, atoms)?;
        if let Some(w) = r.window {
            w.check_dim(r.dim)?;
        }
        m.window = r.window;
        m.provenance = r.provenance;
        Ok(m)
    }
}

impl From<AtomicMeasure> for MeasureRepr {
    fn from(m: AtomicMeasure) -> Self {
        MeasureRepr {
            dim: m.dim,
            atoms: m.atoms.iter().map(|a| AtomRepr { x: a.x, re: a.w.re, im: a.w.im }).collect(),
            tol: m.tol,
            window: m.window,
            provenance: m.provenance,
        }
    }
}

impl fmt::Debug for AtomicMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AtomicMeasure")
            .field("dim", &self.dim)
            .field("atoms", &self.atoms)
            .field("tol", &self.tol)
            .field("window", &self.window)
            .finish()
    }
}

impl PartialEq for AtomicMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.atoms == other.atoms && self.tol == other.tol
    }
}

/// Accumulates weighted locations into merged atoms.
pub(crate) struct MeasureBuilder {
    dim: usize,
    tol: f64,
    locations: Vec<Point>,
    weights: Vec<Complex64>,
    index: MergeIndex,
}

impl MeasureBuilder {
    pub fn new(dim: usize, tol: f64) -> Self {
        Self::with_capacity(dim, tol, 0)
    }

    pub fn with_capacity(dim: usize, tol: f64, cap: usize) -> Self {
        Self {
            dim,
            tol,
            locations: Vec::with_capacity(cap),
            weights: Vec::with_capacity(cap),
            index: MergeIndex::with_capacity(dim, tol, cap),
        }
    }

    #[inline]
    pub fn add(&mut self, x: Point, w: Complex64) {
        match self.index.find(&x, &self.locations) {
            Some(i) => self.weights[i] += w,
            None => {
                self.index.insert(&x, self.locations.len());
                self.locations.push(x);
                self.weights.push(w);
            }
        }
    }

    pub fn finish(self) -> AtomicMeasure {
        let mut atoms: Vec<Atom> =
            self.locations.into_iter().zip(self.weights).map(|(x, w)| Atom { x, w }).collect();
        atoms.sort_by(|a, b| a.x.lex_cmp(&b.x));
        AtomicMeasure::from_sorted(self.dim, self.tol, atoms)
    }
}

impl AtomicMeasure {
    /// Builds a measure, adding the weights of coincident locations.
    pub fn from_atoms(dim: usize, tol: f64, atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(invalid(format!("dimension {dim} not in 1..=3")));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(invalid("merge tolerance must be positive"));
        }
        let mut b = MeasureBuilder::new(dim, tol);
        for a in atoms {
            a.x.check_dim(dim)?;
            if !(a.w.re.is_finite() && a.w.im.is_finite()) {
                return Err(invalid("atom weights must be finite"));
            }
            b.add(a.x, a.w);
        }
        Ok(b.finish())
    }

    fn from_sorted(dim: usize, tol: f64, atoms: Vec<Atom>) -> Self {
        let mut index = MergeIndex::with_capacity(dim, tol, atoms.len());
        for (i, a) in atoms.iter().enumerate() {
            index.insert(&a.x, i);
        }
        Self { dim, atoms, tol, window: None, provenance: None, index }
    }

    /// Same locations, new weights (one per atom, in order).
    fn map_weights(&self, f: impl Fn(&Atom) -> Complex64) -> Self {
        let mut m = self.clone();
        for a in &mut m.atoms {
            a.w = f(a);
        }
        m
    }

    pub fn zero(dim: usize, tol: f64) -> Self {
        Self::from_sorted(dim, tol, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn window(&self) -> Option<&Cuboid> {
        self.window.as_ref()
    }

    /// The declared window, or the padded bounding box of the atoms.
    pub fn extent(&self) -> Option<Cuboid> {
        self.window.or_else(|| Cuboid::bounding(self.atoms.iter().map(|a| &a.x), 0.5))
    }

    pub fn with_window(mut self, window: Cuboid) -> Self {
        self.window = Some(window);
        self
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    pub fn with_provenance(mut self, tag: impl Into<String>) -> Self {
        self.provenance = Some(tag.into());
        self
    }

    /// μ({x}): the weight of the atom at x, or 0.
    pub fn support_value(&self, x: &Point) -> Complex64 {
        match self.index.find(x, &self.locations_view()) {
            Some(i) => self.atoms[i].w,
            None => Complex64::new(0.0, 0.0),
        }
    }

    fn locations_view(&self) -> LocationView<'_> {
        LocationView(&self.atoms)
    }

    pub fn total_variation(&self) -> Self {
        self.map_weights(|a| Complex64::new(a.w.norm(), 0.0))
    }

    /// Atom (x, w) ↦ (−x, w̄).
    pub fn reflect(&self) -> Self {
        let atoms: Vec<Atom> = self.atoms.iter().rev().map(|a| Atom { x: -a.x, w: a.w.conj() }).collect();
        let mut m = Self::from_sorted(self.dim, self.tol, atoms);
        m.window = self.window.map(|w| w.scale(-1.0).expect("nonzero factor"));
        m
    }

    /// The measure h·μ.
    pub fn weight_by(&self, h: impl Fn(&Point) -> Complex64) -> Self {
        self.map_weights(|a| h(&a.x) * a.w)
    }

    /// Sum of two measures on the same space.
    pub fn add(&self, other: &AtomicMeasure) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut b = MeasureBuilder::new(self.dim, self.tol.max(other.tol));
        for a in self.atoms.iter().chain(&other.atoms) {
            b.add(a.x, a.w);
        }
        let mut m = b.finish();
        m.window = match (self.window, other.window) {
            (Some(a), Some(b)) => a.intersect(&b).or(Some(a)),
            (w, None) | (None, w) => w,
        };
        Ok(m)
    }

    /// The measure restricted to a box.
    pub fn restrict_to_box(&self, b: &Cuboid) -> Self {
        let atoms: Vec<Atom> = self.atoms.iter().filter(|a| b.contains_tol(&a.x, self.tol)).copied().collect();
        let mut m = Self::from_sorted(self.dim, self.tol, atoms);
        m.window = Some(*b);
        m.provenance = self.provenance.clone();
        m
    }

    /// True when every weight is real and nonnegative up to `slack`·max|w|.
    pub fn is_positive(&self, slack: f64) -> bool {
        let scale = self.atoms.iter().map(|a| a.w.norm()).fold(0.0, f64::max);
        let eps = slack * scale;
        self.atoms.iter().all(|a| a.w.im.abs() <= eps && a.w.re >= -eps)
    }

    /// max over translates of |μ|(t + k_box): the translation-boundedness constant.
    pub fn translation_bound(&self, k_box: &Cuboid) -> Result<f64> {
        let pts: Vec<Point> = self.atoms.iter().map(|a| a.x).collect();
        let w: Vec<f64> = self.atoms.iter().map(|a| a.w.norm()).collect();
        max_box_mass(&pts, &w, k_box, self.tol)
    }

    /// μ|_H: the atoms whose location lies in H.
    pub fn restrict(&self, h: &SubgroupSpec) -> Result<Self> {
        let tol = h.tol.max(self.tol);
        let member = h.membership(self.dim)?;
        let atoms: Vec<Atom> = self.atoms.iter().filter(|a| member(&a.x, tol)).copied().collect();
        let mut m = Self::from_sorted(self.dim, self.tol, atoms);
        m.window = self.window;
        Ok(m)
    }
}

/// Lets the merge index read atom locations without copying them out.
struct LocationView<'a>(&'a [Atom]);

impl std::ops::Index<usize> for LocationView<'_> {
    type Output = Point;
    fn index(&self, i: usize) -> &Point {
        &self.0[i].x
    }
}

/// Dirac comb Σ_{x ∈ ps} h(x)·δ_x.
pub fn dirac_comb(ps: &PointSet, h: impl Fn(&Point) -> Complex64) -> AtomicMeasure {
    let atoms: Vec<Atom> = ps.points().iter().map(|x| Atom { x: *x, w: h(x) }).collect();
    // point sets are already merged and sorted at the same tolerance
    let mut m = AtomicMeasure::from_sorted(ps.dim(), ps.tol(), atoms);
    m.window = Some(*ps.window());
    m
}

/// δ_Λ with unit weights.
pub fn unit_comb(ps: &PointSet) -> AtomicMeasure {
    dirac_comb(ps, |_| Complex64::new(1.0, 0.0))
}

/// μ ∗ ν clipped to `out_window`, with the default pair budget.
pub fn convolve(mu: &AtomicMeasure, nu: &AtomicMeasure, out_window: &Cuboid) -> Result<AtomicMeasure> {
    convolve_with_budget(mu, nu, out_window, DEFAULT_PAIR_BUDGET)
}

/// Atoms at x + y with weight w_x·w_y, accumulated in a fixed pair order.
pub fn convolve_with_budget(
    mu: &AtomicMeasure,
    nu: &AtomicMeasure,
    out_window: &Cuboid,
    budget: u128,
) -> Result<AtomicMeasure> {
    if mu.dim != nu.dim {
        return Err(Error::DimensionMismatch { expected: mu.dim, got: nu.dim });
    }
    out_window.check_dim(mu.dim)?;
    let pairs = mu.len() as u128 * nu.len() as u128;
    if pairs > budget {
        return Err(Error::BudgetExceeded { pairs, budget });
    }
    let tol = mu.tol.max(nu.tol).max(merge_tolerance(out_window));
    let mut b = MeasureBuilder::with_capacity(mu.dim, tol, mu.len() + nu.len());
    for a in &mu.atoms {
        for c in &nu.atoms {
            let z = a.x + c.x;
            if out_window.contains_tol(&z, tol) {
                b.add(z, a.w * c.w);
            }
        }
    }
    let mut m = b.finish();
    m.window = Some(*out_window);
    Ok(m)
}

/// Membership predicate (x, tolerance) of a subgroup.
pub type Membership = Box<dyn Fn(&Point, f64) -> bool>;

/// Closed subgroups of ℝᵈ used for restriction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubgroupKind {
    /// B·ℤᵏ for k ≤ d independent vectors (listed as `basis`).
    Lattice { basis: Vec<Vec<f64>> },
    /// {x : xᵢ = 0 for every axis i with mask[i] = false}.
    CoordinateSubspace { mask: Vec<bool> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgroupSpec {
    pub kind: SubgroupKind,
    /// membership tolerance τ_H
    pub tol: f64,
}

impl SubgroupSpec {
    pub fn lattice(basis: Vec<Vec<f64>>, tol: f64) -> Self {
        Self { kind: SubgroupKind::Lattice { basis }, tol }
    }

    pub fn subspace(mask: Vec<bool>, tol: f64) -> Self {
        Self { kind: SubgroupKind::CoordinateSubspace { mask }, tol }
    }

    /// τ_H = 10⁻⁸ × window diameter.
    pub fn default_tol(window: &Cuboid) -> f64 {
        SUBGROUP_FACTOR * window.diameter()
    }

    /// A membership predicate (x, tolerance) for points of ℝᵈ.
    pub fn membership(&self, dim: usize) -> Result<Membership> {
        match &self.kind {
            SubgroupKind::CoordinateSubspace { mask } => {
                if mask.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: mask.len() });
                }
                let mask = mask.clone();
                Ok(Box::new(move |x: &Point, tol: f64| {
                    mask.iter().enumerate().all(|(i, keep)| *keep || x.get(i).abs() <= tol)
                }))
            }
            SubgroupKind::Lattice { basis } => {
                let k = basis.len();
                if k == 0 {
                    return Ok(Box::new(|x: &Point, tol: f64| x.coords().iter().all(|c| c.abs() <= tol)));
                }
                if k > dim || basis.iter().any(|v| v.len() != dim) {
                    return Err(invalid(format!("lattice subgroup needs ≤ {dim} vectors of length {dim}")));
                }
                let b = DMatrix::from_fn(dim, k, |i, j| basis[j][i]);
                let gram = b.transpose() * &b;
                let gram_inv = gram
                    .try_inverse()
                    .ok_or(Error::DegenerateLattice { det: 0.0, threshold: 0.0 })?;
                let pinv = gram_inv * b.transpose();
                Ok(Box::new(move |x: &Point, tol: f64| {
                    // round the least-squares coefficients and check the residual
                    let xv = DMatrix::from_fn(dim, 1, |i, _| x.get(i));
                    let m = (&pinv * &xv).map(f64::round);
                    let r = &b * m - xv;
                    r.iter().all(|v| v.abs() <= tol)
                }))
            }
        }
    }
}

/// A sampled continuous density on a regular grid over a box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDensity {
    pub domain: Cuboid,
    pub spacing: f64,
    /// values at the grid nodes, first axis fastest
    pub values: Vec<f64>,
}

impl GridDensity {
    pub fn uniform(domain: Cuboid, spacing: f64, value: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(invalid("grid spacing must be positive"));
        }
        let n: usize = (0..domain.dim()).map(|i| (domain.side(i) / spacing).round() as usize + 1).product();
        Ok(Self { domain, spacing, values: vec![value; n] })
    }

    /// Rectangle-rule mass.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing.powi(self.domain.dim() as i32)
    }
}

/// A measure split into an atomic part and a grid-sampled continuous part.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampledMeasure {
    pub atomic: AtomicMeasure,
    pub density: Option<GridDensity>,
}

impl SampledMeasure {
    pub fn is_positive(&self) -> bool {
        self.atomic.is_positive(0.0) && self.density.as_ref().is_none_or(|d| d.values.iter().all(|v| *v >= 0.0))
    }
}

/// μ_pp: the atomic component.
pub fn pure_point_part(mu: &SampledMeasure) -> AtomicMeasure {
    mu.atomic.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{compose, generate_lattice, Compose};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn measure(atoms: &[(f64, Complex64)]) -> AtomicMeasure {
        AtomicMeasure::from_atoms(1, 1e-9, atoms.iter().map(|&(x, w)| Atom { x: Point::d1(x), w })).unwrap()
    }

    fn weights(m: &AtomicMeasure) -> Vec<(f64, Complex64)> {
        m.atoms().iter().map(|a| (a.x.get(0), a.w)).collect()
    }

    fn zpz(half: f64) -> AtomicMeasure {
        let w = Cuboid::interval(-half, half).unwrap();
        let z = unit_comb(&generate_lattice(&[vec![1.0]], &w).unwrap());
        let pz = unit_comb(&generate_lattice(&[vec![PI]], &w).unwrap());
        z.add(&pz).unwrap()
    }

    #[test]
    fn dirac_comb_of_integers() {
        let ps = generate_lattice(&[vec![1.0]], &Cuboid::interval(-2.0, 2.0).unwrap()).unwrap();
        let m = unit_comb(&ps);
        assert_eq!(weights(&m), (-2..=2).map(|x| (x as f64, c(1.0, 0.0))).collect::<Vec<_>>());
        let empty = unit_comb(&PointSet::empty(Cuboid::interval(0.0, 1.0).unwrap()));
        assert!(empty.is_empty());
    }

    #[test]
    fn measure_sum_versus_comb_of_union() {
        let mu = zpz(5.0);
        assert_eq!(mu.support_value(&Point::d1(0.0)), c(2.0, 0.0));
        assert_eq!(mu.support_value(&Point::d1(1.0)), c(1.0, 0.0));
        assert_eq!(mu.support_value(&Point::d1(0.5)), c(0.0, 0.0));
        let w = Cuboid::interval(-5.0, 5.0).unwrap();
        let union = compose(
            &Compose::Union,
            &[&generate_lattice(&[vec![1.0]], &w).unwrap(), &generate_lattice(&[vec![PI]], &w).unwrap()],
        )
        .unwrap();
        assert_eq!(unit_comb(&union).support_value(&Point::d1(0.0)), c(1.0, 0.0));
    }

    #[test]
    fn complex_support_value() {
        let m = measure(&[(0.0, c(3.0, -4.0))]);
        assert_eq!(m.support_value(&Point::d1(0.0)), c(3.0, -4.0));
        assert_eq!(weights(&m.total_variation()), vec![(0.0, c(5.0, 0.0))]);
    }

    #[test]
    fn total_variation_of_signed_comb() {
        let m = measure(&[(0.0, c(1.0, 0.0)), (1.0, c(-1.0, 0.0))]);
        assert_eq!(weights(&m.total_variation()), vec![(0.0, c(1.0, 0.0)), (1.0, c(1.0, 0.0))]);
    }

    #[test]
    fn reflect_examples() {
        let m = measure(&[(1.0, c(0.0, 1.0))]);
        assert_eq!(weights(&m.reflect()), vec![(-1.0, c(0.0, -1.0))]);
        let sym = measure(&[(-1.0, c(1.0, 0.0)), (1.0, c(1.0, 0.0))]);
        assert_eq!(sym.reflect(), sym);
        let any = measure(&[(-0.3, c(1.0, 2.0)), (2.0, c(-1.0, 0.5))]);
        assert_eq!(any.reflect().reflect(), any);
    }

    #[test]
    fn convolution_examples() {
        let big = Cuboid::interval(-10.0, 10.0).unwrap();
        let d = |a: f64| measure(&[(a, c(1.0, 0.0))]);
        assert_eq!(weights(&convolve(&d(0.25), &d(1.5), &big).unwrap()), vec![(1.75, c(1.0, 0.0))]);

        let pair = measure(&[(0.0, c(1.0, 0.0)), (1.0, c(1.0, 0.0))]);
        let got = weights(&convolve(&pair, &pair, &big).unwrap());
        assert_eq!(got, vec![(0.0, c(1.0, 0.0)), (1.0, c(2.0, 0.0)), (2.0, c(1.0, 0.0))]);

        let three = measure(&[(-1.0, c(1.0, 0.0)), (0.0, c(1.0, 0.0)), (1.0, c(1.0, 0.0))]);
        let got = weights(&convolve(&three, &three.reflect(), &big).unwrap());
        let want: Vec<(f64, Complex64)> =
            [(-2.0, 1.0), (-1.0, 2.0), (0.0, 3.0), (1.0, 2.0), (2.0, 1.0)].iter().map(|&(x, w)| (x, c(w, 0.0))).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn convolution_budget() {
        let m = measure(&[(0.0, c(1.0, 0.0)), (1.0, c(1.0, 0.0))]);
        let err = convolve_with_budget(&m, &m, &Cuboid::interval(-5.0, 5.0).unwrap(), 3).unwrap_err();
        assert!(err.to_string().contains("reduce the window"));
    }

    #[test]
    fn weighting() {
        let m = measure(&[(-1.0, c(1.0, 0.0)), (0.0, c(1.0, 0.0)), (1.0, c(1.0, 0.0))]);
        assert_eq!(m.weight_by(|_| c(1.0, 0.0)), m);
        let half = m.weight_by(|x| if x.get(0) >= 0.0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert_eq!(half.atoms()[0].w, c(0.0, 0.0));
        let k = 0.3;
        let phased = m.weight_by(|x| Complex64::from_polar(1.0, -2.0 * PI * k * x.get(0)));
        assert!(phased.atoms().iter().all(|a| (a.w.norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn translation_bounds() {
        let unit = Cuboid::interval(0.0, 1.0).unwrap();
        let z = unit_comb(&generate_lattice(&[vec![1.0]], &Cuboid::interval(-20.0, 20.0).unwrap()).unwrap());
        assert_eq!(z.translation_bound(&unit).unwrap(), 2.0);
        let c_zpz = zpz(20.0).translation_bound(&unit).unwrap();
        assert!((2.0..=4.0).contains(&c_zpz), "{c_zpz}");
        assert_eq!(AtomicMeasure::zero(1, 1e-9).translation_bound(&unit).unwrap(), 0.0);
    }

    #[test]
    fn restriction_to_the_integers() {
        let mu = zpz(10.0);
        let h = SubgroupSpec::lattice(vec![vec![1.0]], 1e-7);
        let r = mu.restrict(&h).unwrap();
        assert_eq!(r.len(), 21);
        assert_eq!(r.support_value(&Point::d1(0.0)), c(2.0, 0.0));
        assert!(r.atoms().iter().filter(|a| !a.x.is_zero()).all(|a| a.w == c(1.0, 0.0)));
        assert_eq!(r.restrict(&h).unwrap(), r);
    }

    #[test]
    fn restriction_to_an_axis() {
        let m = AtomicMeasure::from_atoms(
            2,
            1e-9,
            [(0.0, 0.0), (1.5, 0.0), (1.0, 1e-12), (2.0, 0.5)]
                .iter()
                .map(|&(x, y)| Atom { x: Point::d2(x, y), w: c(1.0, 0.0) }),
        )
        .unwrap();
        let r = m.restrict(&SubgroupSpec::subspace(vec![true, false], 1e-8)).unwrap();
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn rank_deficient_lattice_in_the_plane() {
        let m = AtomicMeasure::from_atoms(
            2,
            1e-9,
            [(1.0, 1.0), (2.0, 2.0), (1.0, 0.0), (0.5, 0.5)]
                .iter()
                .map(|&(x, y)| Atom { x: Point::d2(x, y), w: c(1.0, 0.0) }),
        )
        .unwrap();
        let r = m.restrict(&SubgroupSpec::lattice(vec![vec![1.0, 1.0]], 1e-8)).unwrap();
        let kept: Vec<(f64, f64)> = r.atoms().iter().map(|a| (a.x.get(0), a.x.get(1))).collect();
        assert_eq!(kept, vec![(1.0, 1.0), (2.0, 2.0)]);
    }

    #[test]
    fn pure_point_part_drops_density() {
        let atomic = measure(&[(0.0, c(1.0, 0.0))]);
        let density = GridDensity::uniform(Cuboid::interval(-1.0, 1.0).unwrap(), 0.1, 0.3).unwrap();
        let mu = SampledMeasure { atomic: atomic.clone(), density: Some(density) };
        assert!(mu.is_positive());
        assert_eq!(pure_point_part(&mu), atomic);
        let pure_density = SampledMeasure {
            atomic: AtomicMeasure::zero(1, 1e-9),
            density: Some(GridDensity::uniform(Cuboid::interval(-1.0, 1.0).unwrap(), 0.1, 0.3).unwrap()),
        };
        assert!(pure_point_part(&pure_density).is_empty());
    }

    #[test]
    fn json_layout() {
        let m = measure(&[(0.0, c(3.0, -4.0))]);
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(v["atoms"][0]["re"], 3.0);
        assert_eq!(v["atoms"][0]["im"], -4.0);
        assert_eq!(v["dim"], 1);
        let back: AtomicMeasure = serde_json::from_value(v).unwrap();
        assert_eq!(back.support_value(&Point::d1(0.0)), c(3.0, -4.0));
    }
}
