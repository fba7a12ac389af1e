//! Positive definiteness of discrete measures through their support function
//! f(x) = μ({x}): Gram-matrix refutation, Krein's inequality, the sparseness
//! threshold for high-mass atoms, and rigidity of positive definite combs.
//!
//! Finite evidence can refute positive definiteness but never prove it, so
//! every report separates `Refuted` from `ConsistentWithPd`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{difference_set, weak_ud_count, Cuboid, Generator, Point, PointSet};
use crate::measure::{unit_comb, AtomicMeasure};
use crate::report::Verdict;

/// Default ε_psd, relative to the max-row-sum norm of each Gram matrix.
pub const DEFAULT_EPS_PSD: f64 = 1e-9;

/// (√3 − 1): the sparseness threshold as a fraction of μ({0}).
pub fn sparseness_factor() -> f64 {
    3f64.sqrt() - 1.0
}

/// How Gram configurations are drawn.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigSampler {
    /// number of random configurations of each random kind
    pub count: usize,
    /// points per random configuration (≤ 64)
    pub size: usize,
    /// configurations are drawn inside this box
    pub region: Cuboid,
    pub seed: u64,
    /// candidate list size for the exhaustive tuples of size ≤ 3
    pub candidate_cap: usize,
}

impl ConfigSampler {
    pub fn new(region: Cuboid, seed: u64) -> Self {
        Self { count: 64, size: 12, region, seed, candidate_cap: 24 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdVerdict {
    ConsistentWithPd,
    Refuted,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HermitianWitness {
    pub x: Point,
    /// f(x) as [re, im]
    pub f_x: [f64; 2],
    /// f(−x) as [re, im]; Hermitian symmetry needs f(−x) = conj f(x)
    pub f_neg_x: [f64; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GramWitness {
    pub points: Vec<Point>,
    /// rows of [re, im] entries f(x_k − x_l)
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GramReport {
    pub configurations: usize,
    pub min_eigenvalue: f64,
    /// min eigenvalue relative to the matrix norm, over all configurations
    pub min_relative_eigenvalue: f64,
    pub hermitian_violation: Option<HermitianWitness>,
    pub witness: Option<GramWitness>,
    pub verdict: PdVerdict,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Candidate configuration points: 0 and the atoms of μ inside `region`
/// closest to the origin.
fn candidates(mu: &AtomicMeasure, region: &Cuboid, cap: usize) -> Vec<Point> {
    let zero = Point::zero(mu.dim());
    let mut pts: Vec<Point> = mu
        .atoms()
        .iter()
        .map(|a| a.x)
        .filter(|x| region.contains(x) && x.linf_dist(&zero) > mu.tol())
        .collect();
    pts.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.lex_cmp(b)));
    let mut out = Vec::with_capacity(cap.min(pts.len() + 1));
    if region.contains(&zero) {
        out.push(zero);
    }
    out.extend(pts.into_iter().take(cap.saturating_sub(out.len())));
    out
}

fn random_in(region: &Cuboid, rng: &mut ChaCha8Rng) -> Point {
    let c: Vec<f64> = (0..region.dim())
        .map(|i| region.lo().get(i) + rng.random::<f64>() * region.side(i))
        .collect();
    Point::new(&c).expect("finite sample")
}

/// All Gram configurations in a fixed order: exhaustive pairs and triples
/// from the candidate list, random subsets of atom locations, random tuples.
fn configurations(mu: &AtomicMeasure, s: &ConfigSampler) -> Vec<Vec<Point>> {
    let size = s.size.clamp(1, 64);
    let cand = candidates(mu, &s.region, s.candidate_cap);
    let mut out = Vec::new();
    for i in 0..cand.len() {
        for j in i + 1..cand.len() {
            out.push(vec![cand[i], cand[j]]);
            for k in j + 1..cand.len() {
                out.push(vec![cand[i], cand[j], cand[k]]);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let pool: Vec<Point> = mu.atoms().iter().map(|a| a.x).filter(|x| s.region.contains(x)).collect();
    if !pool.is_empty() {
        for _ in 0..s.count {
            let n = size.min(pool.len());
            let mut picked: Vec<usize> = Vec::with_capacity(n);
            while picked.len() < n {
                let i = rng.random_range(0..pool.len());
                if !picked.contains(&i) {
                    picked.push(i);
                }
            }
            out.push(picked.into_iter().map(|i| pool[i]).collect());
        }
    }
    for _ in 0..s.count {
        out.push((0..size).map(|_| random_in(&s.region, &mut rng)).collect());
    }
    out
}

/// Gram matrix (f(x_k − x_l))_{k,l}.
pub fn gram_matrix(mu: &AtomicMeasure, points: &[Point]) -> DMatrix<Complex64> {
    let n = points.len();
    DMatrix::from_fn(n, n, |k, l| mu.support_value(&(points[k] - points[l])))
}

/// Smallest eigenvalue of a Hermitian matrix and its max-row-sum norm.
fn min_eigenvalue(m: &DMatrix<Complex64>) -> (f64, f64) {
    let norm = m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    if norm == 0.0 {
        return (0.0, 0.0);
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigenvalues();
    (eig.iter().copied().fold(f64::INFINITY, f64::min), norm)
}

/// Hermitian symmetry f(−x) = conj f(x) over the atoms that can occur as a
/// difference of two points of `region`.
fn hermitian_violation(mu: &AtomicMeasure, region: &Cuboid, eps: f64) -> Option<HermitianWitness> {
    let diffs = region.minkowski_diff(region);
    let scale = mu.atoms().iter().map(|a| a.w.norm()).fold(0.0, f64::max);
    mu.atoms().iter().filter(|a| diffs.contains(&a.x)).find_map(|a| {
        let back = mu.support_value(&-a.x);
        ((back - a.w.conj()).norm() > eps * scale).then(|| HermitianWitness {
            x: a.x,
            f_x: pair(a.w),
            f_neg_x: pair(back),
        })
    })
}

/// Tests whether the support function of μ is positive definite on sampled
/// configurations: Hermitian symmetry, then eigenvalues ≥ −ε_psd·‖G‖.
pub fn gram_psd_check(mu: &AtomicMeasure, sampler: &ConfigSampler, eps_psd: f64) -> Result<GramReport> {
    sampler.region.check_dim(mu.dim())?;
    if !(eps_psd > 0.0) {
        return Err(invalid("ε_psd must be positive"));
    }
    let configs = configurations(mu, sampler);
    if let Some(h) = hermitian_violation(mu, &sampler.region, eps_psd) {
        return Ok(GramReport {
            configurations: 0,
            min_eigenvalue: f64::NAN,
            min_relative_eigenvalue: f64::NAN,
            hermitian_violation: Some(h),
            witness: None,
            verdict: PdVerdict::Refuted,
        });
    }
    let evals: Vec<(f64, f64)> = configs.par_iter().map(|pts| min_eigenvalue(&gram_matrix(mu, pts))).collect();
    let mut min_abs = f64::INFINITY;
    let mut worst: Option<(usize, f64)> = None;
    for (i, &(lambda, norm)) in evals.iter().enumerate() {
        min_abs = min_abs.min(lambda);
        if norm > 0.0 {
            let rel = lambda / norm;
            if worst.is_none_or(|(_, r)| rel < r) {
                worst = Some((i, rel));
            }
        }
    }
    let min_rel = worst.map_or(0.0, |(_, r)| r);
    let refuted = min_rel < -eps_psd;
    // report the smallest refuting configuration, the most negative among equals
    let smallest = evals
        .iter()
        .enumerate()
        .filter(|(_, (l, n))| *n > 0.0 && l / n < -eps_psd)
        .min_by(|(i, (li, ni)), (j, (lj, nj))| {
            configs[*i].len().cmp(&configs[*j].len()).then((li / ni).total_cmp(&(lj / nj)))
        });
    let witness = smallest.map(|(i, _)| {
        let pts = configs[i].clone();
        let m = gram_matrix(mu, &pts);
        GramWitness {
            matrix: m.row_iter().map(|r| r.iter().map(|z| pair(*z)).collect()).collect(),
            points: pts,
            min_eigenvalue: evals[i].0,
        }
    });
    Ok(GramReport {
        configurations: configs.len(),
        min_eigenvalue: if min_abs.is_finite() { min_abs } else { 0.0 },
        min_relative_eigenvalue: min_rel,
        hermitian_violation: None,
        witness,
        verdict: if refuted { PdVerdict::Refuted } else { PdVerdict::ConsistentWithPd },
    })
}

/// How (x, t) pairs for Krein's inequality are drawn.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairSampler {
    pub count: usize,
    pub region: Cuboid,
    pub seed: u64,
    pub candidate_cap: usize,
}

impl PairSampler {
    pub fn new(region: Cuboid, seed: u64) -> Self {
        Self { count: 2000, region, seed, candidate_cap: 48 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KreinStatus {
    Holds,
    Violated,
    /// μ({0}) is not a nonnegative real number
    NonPositiveAtOrigin,
    /// μ({0}) = 0 while some atom is nonzero: f(0) ≥ |f(x)| fails
    ZeroAtOrigin,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KreinReport {
    pub pairs_tested: usize,
    /// μ({0}) as [re, im]
    pub mu0: [f64; 2],
    /// max over pairs of |f(x+t) − f(x)|² − 2f(0)(f(0) − Re f(t))
    pub max_violation: f64,
    pub allowed: f64,
    pub worst_pair: Option<(Point, Point)>,
    pub status: KreinStatus,
    pub verdict: Verdict,
}

/// Krein's inequality |f(x+t) − f(x)|² ≤ 2f(0)(f(0) − Re f(t)) on sampled pairs;
/// passes when the largest violation is ≤ tol·f(0)².
pub fn krein_check(mu: &AtomicMeasure, sampler: &PairSampler, tol: f64) -> Result<KreinReport> {
    sampler.region.check_dim(mu.dim())?;
    let zero = Point::zero(mu.dim());
    let f0 = mu.support_value(&zero);
    let scale = mu.atoms().iter().map(|a| a.w.norm()).fold(0.0, f64::max);
    let early = |status| KreinReport {
        pairs_tested: 0,
        mu0: pair(f0),
        max_violation: f64::NAN,
        allowed: 0.0,
        worst_pair: None,
        status,
        verdict: if status == KreinStatus::Holds { Verdict::Pass } else { Verdict::Fail },
    };
    if scale == 0.0 {
        return Ok(early(KreinStatus::Holds));
    }
    if f0.im.abs() > 1e-12 * scale || f0.re < 0.0 {
        return Ok(early(KreinStatus::NonPositiveAtOrigin));
    }
    if f0.re == 0.0 {
        return Ok(early(KreinStatus::ZeroAtOrigin));
    }
    let f0 = f0.re;
    let cand = candidates(mu, &sampler.region, sampler.candidate_cap);
    let mut pairs: Vec<(Point, Point)> = Vec::new();
    for x in &cand {
        for t in &cand {
            pairs.push((*x, *t));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let pool: Vec<Point> = mu.atoms().iter().map(|a| a.x).filter(|x| sampler.region.contains(x)).collect();
    if !pool.is_empty() {
        for _ in 0..sampler.count {
            let x = pool[rng.random_range(0..pool.len())];
            let t = pool[rng.random_range(0..pool.len())];
            pairs.push((x, t));
            // x + t lands on an atom when t = y − x for atoms x, y
            let y = pool[rng.random_range(0..pool.len())];
            pairs.push((x, y - x));
        }
    }
    for _ in 0..sampler.count {
        pairs.push((random_in(&sampler.region, &mut rng), random_in(&sampler.region, &mut rng)));
    }
    let violations: Vec<f64> = pairs
        .par_iter()
        .map(|(x, t)| {
            let lhs = (mu.support_value(&(*x + *t)) - mu.support_value(x)).norm_sqr();
            lhs - 2.0 * f0 * (f0 - mu.support_value(t).re)
        })
        .collect();
    let (worst, max_violation) = violations
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let allowed = tol * f0 * f0;
    let holds = max_violation <= allowed;
    Ok(KreinReport {
        pairs_tested: pairs.len(),
        mu0: [f0, 0.0],
        max_violation,
        allowed,
        worst_pair: Some(pairs[worst]),
        status: if holds { KreinStatus::Holds } else { KreinStatus::Violated },
        verdict: if holds { Verdict::Pass } else { Verdict::Fail },
    })
}

/// b = a − √(2μ₀(μ₀ − a)); b > 0 exactly when a > (√3 − 1)μ₀.
pub fn sparse_threshold_b(a: f64, mu0: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(invalid("a must be positive"));
    }
    if a > mu0 {
        return Err(invalid(format!("a = {a} exceeds μ({{0}}) = {mu0}; Krein forces μ({{x}}) ≤ μ({{0}})")));
    }
    Ok(a - (2.0 * mu0 * (mu0 - a)).sqrt())
}

/// I = {x : μ({x}) ≥ a} for a positive measure, as a point set on the measure's extent.
pub fn high_intensity_set(mu: &AtomicMeasure, a: f64) -> Result<PointSet> {
    if !(a > 0.0) {
        return Err(invalid("a must be positive"));
    }
    if !mu.is_positive(1e-12) {
        return Err(crate::Error::NonPositiveMeasure("atom weights must be real and ≥ 0".into()));
    }
    let window = match mu.extent() {
        Some(w) => w,
        None => return Ok(PointSet::empty(Cuboid::centered(mu.dim(), 1.0)?)),
    };
    let pts: Vec<Point> = mu.atoms().iter().filter(|at| at.w.re >= a).map(|at| at.x).collect();
    PointSet::clipped(window, pts, Generator::Explicit)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SparsenessReport {
    pub a: f64,
    pub mu0: f64,
    /// (√3 − 1)·μ₀
    pub threshold: f64,
    pub hypothesis_met: bool,
    pub b: f64,
    pub i_set: PointSet,
    pub j_size: usize,
    /// C = sup_t μ(t + K)
    pub c_bound: f64,
    /// C / b, when b > 0
    pub count_bound: Option<f64>,
    pub measured_max_count: usize,
    /// differences of I inside the window whose mass is below b
    pub containment_violations: Vec<Point>,
    pub verdict: Verdict,
}

/// Checks that (I − I) ⊆ J = {μ ≥ b} inside the measure's window and that
/// I − I meets every translate of `k_box` in at most C/b points. Below the
/// threshold the report is informational and marked inconclusive.
pub fn sparseness_verify(mu: &AtomicMeasure, a: f64, k_box: &Cuboid) -> Result<SparsenessReport> {
    let zero = Point::zero(mu.dim());
    let mu0 = mu.support_value(&zero).re;
    let i_set = high_intensity_set(mu, a)?;
    let threshold = sparseness_factor() * mu0;
    let hypothesis_met = a > threshold + 1e-12 * mu0.max(1.0);
    let b = sparse_threshold_b(a, mu0)?;
    let window = *i_set.window();
    let diffs = difference_set(&i_set, &window)?;
    let measured_max_count = weak_ud_count(&diffs, k_box)?;
    let c_bound = mu.translation_bound(k_box)?;
    let slack = 1e-12 * mu0.max(1.0);
    let (j_size, containment_violations, count_bound) = if b > 0.0 {
        let j = high_intensity_set(mu, b)?;
        let bad: Vec<Point> =
            diffs.points().iter().filter(|z| mu.support_value(z).re < b - slack).copied().collect();
        (j.len(), bad, Some(c_bound / b))
    } else {
        (0, Vec::new(), None)
    };
    let verdict = if !hypothesis_met {
        Verdict::Inconclusive
    } else if containment_violations.is_empty() && count_bound.is_some_and(|cb| measured_max_count as f64 <= cb) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(SparsenessReport {
        a,
        mu0,
        threshold,
        hypothesis_met,
        b,
        i_set,
        j_size,
        c_bound,
        count_bound,
        measured_max_count,
        containment_violations,
        verdict,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubgroupTest {
    pub contains_zero: bool,
    pub closed_under_difference: bool,
    /// x, y ∈ Λ with x − y ∉ Λ
    pub witness: Option<(Point, Point)>,
    pub is_subgroup: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RigidityReport {
    /// configurations and subgroup pairs are confined to this box, so every
    /// difference stays inside the window
    pub safe_region: Cuboid,
    /// max #points of Λ in a translate of the unit box
    pub weak_ud_constant: usize,
    pub gram: GramReport,
    pub subgroup: SubgroupTest,
    pub agree: bool,
    pub verdict: Verdict,
}

/// Half of the largest origin-symmetric box inside the window.
fn safe_region(window: &Cuboid) -> Result<Cuboid> {
    let dim = window.dim();
    let mut half = f64::INFINITY;
    for i in 0..dim {
        half = half.min(-window.lo().get(i)).min(window.hi().get(i));
    }
    if !(half > 0.0) {
        return Err(invalid("rigidity needs a window with the origin in its interior"));
    }
    Cuboid::centered(dim, half / 2.0)
}

/// Windowed subgroup test: 0 ∈ Λ and x − y ∈ Λ for all x, y ∈ Λ ∩ region.
pub fn subgroup_test(ps: &PointSet, region: &Cuboid) -> SubgroupTest {
    let zero = Point::zero(ps.dim());
    let contains_zero = ps.contains(&zero);
    let inside: Vec<Point> = ps.points().iter().filter(|p| region.contains(p)).copied().collect();
    let mut witness = None;
    'outer: for x in &inside {
        for y in &inside {
            if !ps.contains(&(*x - *y)) {
                witness = Some((*x, *y));
                break 'outer;
            }
        }
    }
    let closed = witness.is_none();
    SubgroupTest { contains_zero, closed_under_difference: closed, witness, is_subgroup: contains_zero && closed }
}

/// δ_Λ is positive definite exactly when Λ is a subgroup: runs both tests on
/// the safe region and reports whether they agree.
///
/// Pass means both tests accept; a set both tests reject fails with
/// witnesses; disagreement is a defect and also fails.
pub fn rigidity_check(ps: &PointSet, seed: u64, candidate_cap: usize) -> Result<RigidityReport> {
    let region = safe_region(ps.window())?;
    let unit = Cuboid::cube(ps.dim(), 0.0, 1.0)?;
    let weak_ud_constant = weak_ud_count(ps, &unit)?;
    let comb = unit_comb(ps);
    let mut sampler = ConfigSampler::new(region, seed);
    sampler.candidate_cap = candidate_cap;
    let gram = gram_psd_check(&comb, &sampler, DEFAULT_EPS_PSD)?;
    let subgroup = subgroup_test(ps, &region);
    let gram_pd = gram.verdict == PdVerdict::ConsistentWithPd;
    let agree = gram_pd == subgroup.is_subgroup;
    let verdict = if agree && gram_pd { Verdict::Pass } else { Verdict::Fail };
    Ok(RigidityReport { safe_region: region, weak_ud_constant, gram, subgroup, agree, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{compose, generate_lattice, Compose};
    use crate::measure::Atom;
    use std::f64::consts::PI;

    fn line(x: &[f64], w: &[f64]) -> AtomicMeasure {
        AtomicMeasure::from_atoms(
            1,
            1e-9,
            x.iter().zip(w).map(|(&x, &w)| Atom { x: Point::d1(x), w: Complex64::new(w, 0.0) }),
        )
        .unwrap()
    }

    fn lattice(c: f64, half: f64) -> PointSet {
        generate_lattice(&[vec![c]], &Cuboid::centered(1, half).unwrap()).unwrap()
    }

    fn z_union_third(half: f64) -> PointSet {
        let z = lattice(1.0, half);
        let shifted = compose(&Compose::Translate(Point::d1(1.0 / 3.0)), &[&lattice(1.0, half)]).unwrap();
        let shifted = PointSet::clipped(*z.window(), shifted.points().iter().copied(), Generator::Explicit).unwrap();
        compose(&Compose::Union, &[&z, &shifted]).unwrap()
    }

    #[test]
    fn subgroup_indicator_is_consistent_with_pd() {
        let mu = unit_comb(&lattice(2.0, 20.0));
        let s = ConfigSampler::new(Cuboid::centered(1, 8.0).unwrap(), 1);
        let r = gram_psd_check(&mu, &s, DEFAULT_EPS_PSD).unwrap();
        assert_eq!(r.verdict, PdVerdict::ConsistentWithPd);
        assert!(r.configurations > 100);
    }

    #[test]
    fn shifted_union_has_a_hermitian_violation() {
        let mu = unit_comb(&z_union_third(10.0));
        let s = ConfigSampler::new(Cuboid::centered(1, 5.0).unwrap(), 1);
        let r = gram_psd_check(&mu, &s, DEFAULT_EPS_PSD).unwrap();
        assert_eq!(r.verdict, PdVerdict::Refuted);
        let h = r.hermitian_violation.unwrap();
        assert_eq!(h.f_x, [1.0, 0.0]);
        assert_eq!(h.f_neg_x, [0.0, 0.0]);
    }

    #[test]
    fn symmetric_non_subgroup_is_refuted_by_eigenvalue() {
        let mu = line(&[-3.0, -1.0, 0.0, 1.0, 3.0], &[1.0; 5]);
        let s = ConfigSampler::new(Cuboid::centered(1, 3.0).unwrap(), 1);
        let r = gram_psd_check(&mu, &s, DEFAULT_EPS_PSD).unwrap();
        assert_eq!(r.verdict, PdVerdict::Refuted);
        let w = r.witness.unwrap();
        assert!(w.min_eigenvalue < 0.0);
        assert!(w.points.len() <= 3);
    }

    #[test]
    fn krein_on_lattice_comb_is_tight() {
        let mu = unit_comb(&lattice(1.0, 50.0));
        let r = krein_check(&mu, &PairSampler::new(Cuboid::centered(1, 20.0).unwrap(), 3), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.max_violation <= 0.0);
    }

    #[test]
    fn krein_refutes_heavy_off_origin_atom() {
        let mu = line(&[0.0, 1.0], &[1.0, 2.0]);
        let r = krein_check(&mu, &PairSampler::new(Cuboid::centered(1, 2.0).unwrap(), 3), 1e-9).unwrap();
        assert_eq!(r.status, KreinStatus::Violated);
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn krein_flags_origin_problems() {
        let region = Cuboid::centered(1, 2.0).unwrap();
        let r = krein_check(&line(&[1.0], &[1.0]), &PairSampler::new(region, 0), 1e-9).unwrap();
        assert_eq!(r.status, KreinStatus::ZeroAtOrigin);
        let r = krein_check(&line(&[0.0], &[-1.0]), &PairSampler::new(region, 0), 1e-9).unwrap();
        assert_eq!(r.status, KreinStatus::NonPositiveAtOrigin);
        let r = krein_check(&AtomicMeasure::zero(1, 1e-9), &PairSampler::new(region, 0), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(sparse_threshold_b(1.0, 2.0).unwrap(), -1.0);
        assert!((sparse_threshold_b(1.5, 2.0).unwrap() - (1.5 - 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(sparse_threshold_b(2.0, 2.0).unwrap(), 2.0);
        assert!(sparse_threshold_b(2.5, 2.0).is_err());
        assert!(1.0 < sparseness_factor() * 2.0 && 1.5 > sparseness_factor() * 2.0);
    }

    fn zpz(half: f64) -> AtomicMeasure {
        unit_comb(&lattice(1.0, half)).add(&unit_comb(&lattice(PI, half))).unwrap()
    }

    #[test]
    fn high_intensity_sets_of_zpz() {
        let mu = zpz(20.0);
        let i = high_intensity_set(&mu, 1.2).unwrap();
        assert_eq!(i.points(), &[Point::d1(0.0)]);
        let i = high_intensity_set(&mu, 1.0).unwrap();
        assert_eq!(i.len(), 41 + 12);
        let all = high_intensity_set(&mu, f64::MIN_POSITIVE).unwrap();
        assert_eq!(all.len(), mu.len());
        let signed = line(&[0.0, 1.0], &[1.0, -0.5]);
        assert!(matches!(high_intensity_set(&signed, 0.1), Err(crate::Error::NonPositiveMeasure(_))));
    }

    #[test]
    fn sparseness_on_the_integers() {
        let mu = unit_comb(&lattice(1.0, 30.0));
        let r = sparseness_verify(&mu, 0.9, &Cuboid::interval(0.0, 1.0).unwrap()).unwrap();
        assert!(r.hypothesis_met);
        assert!((r.b - (0.9 - 0.2f64.sqrt())).abs() < 1e-15);
        assert_eq!(r.c_bound, 2.0);
        assert_eq!(r.measured_max_count, 2);
        assert!((r.count_bound.unwrap() - 2.0 / (0.9 - 0.2f64.sqrt())).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn sparseness_below_threshold_is_informational() {
        let r = sparseness_verify(&zpz(3.0 * PI), 1.0, &Cuboid::interval(0.0, 1.0).unwrap()).unwrap();
        assert!(!r.hypothesis_met);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.b < 0.0);
    }

    #[test]
    fn rigidity_examples() {
        let r = rigidity_check(&lattice(2f64.sqrt(), 20.0), 0, 40).unwrap();
        assert!(r.agree && r.subgroup.is_subgroup);
        assert_eq!(r.verdict, Verdict::Pass);

        let r = rigidity_check(&z_union_third(20.0), 0, 40).unwrap();
        assert!(r.agree && !r.subgroup.is_subgroup);
        assert!(r.subgroup.witness.is_some());
        assert_eq!(r.gram.verdict, PdVerdict::Refuted);
        assert_eq!(r.verdict, Verdict::Fail);

        let origin = PointSet::explicit(Cuboid::centered(1, 20.0).unwrap(), vec![Point::d1(0.0)]).unwrap();
        let r = rigidity_check(&origin, 0, 40).unwrap();
        assert!(r.agree && r.subgroup.is_subgroup);
    }

    #[test]
    fn rigidity_needs_origin_inside() {
        let ps = generate_lattice(&[vec![1.0]], &Cuboid::interval(0.0, 10.0).unwrap()).unwrap();
        assert!(rigidity_check(&ps, 0, 10).is_err());
    }
}
