//! Finite-volume autocorrelations γₙ = ω|Aₙ ∗ (ω|Aₙ)~ / |Aₙ| along a van Hove
//! family, Bragg intensity estimation by averaged exponential sums, a-visible
//! Bragg sets I(a) and the Meyer check on them.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{
    basis_matrix, generate_lattice, meyer_check, merge_points, Cuboid, Generator, MeyerOptions, MeyerReport, Point,
    PointSet, VanHoveFamily,
};
use crate::measure::{convolve, AtomicMeasure};
use crate::posdef::sparseness_factor;
use crate::report::Verdict;

/// γₙ = ω|A ∗ (ω|A)~ / |A|, with atoms at all differences x − y, x, y ∈ supp ω ∩ A.
pub fn autocorrelation(omega: &AtomicMeasure, a: &Cuboid) -> Result<AtomicMeasure> {
    a.check_dim(omega.dim())?;
    let part = omega.restrict_to_box(a);
    let out = a.minkowski_diff(a);
    let scale = Complex64::new(1.0 / a.volume(), 0.0);
    let gamma = convolve(&part, &part.reflect(), &out)?;
    Ok(gamma.weight_by(|_| scale).with_window(out))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomTrace {
    pub x: Point,
    /// γₙ({x}) along the family, as [re, im]
    pub values: Vec<[f64; 2]>,
    /// |γₙ₊₁({x}) − γₙ({x})| on the last step
    pub last_delta: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutocorrelationTrace {
    pub family: VanHoveFamily,
    pub measures: Vec<AtomicMeasure>,
    /// atoms of the last γₙ located in the smallest box of the family
    pub atoms: Vec<AtomTrace>,
    pub eps_atom: f64,
}

impl AutocorrelationTrace {
    pub fn all_converged(&self) -> bool {
        self.atoms.iter().all(|a| a.converged)
    }

    pub fn atom(&self, x: &Point) -> Option<&AtomTrace> {
        let tol = self.measures.last().map_or(0.0, |m| m.tol());
        self.atoms.iter().find(|a| a.x.linf_dist(x) <= tol)
    }
}

/// γₙ along the family with per-atom Cauchy evidence: an atom counts as
/// converged when its last step moved it by at most `eps_atom`.
pub fn autocorrelation_trace(omega: &AtomicMeasure, family: &VanHoveFamily, eps_atom: f64) -> Result<AutocorrelationTrace> {
    if family.len() < 3 {
        return Err(invalid(format!("autocorrelation trace needs at least 3 boxes, got {}", family.len())));
    }
    if !(eps_atom > 0.0) {
        return Err(invalid("ε_atom must be positive"));
    }
    let measures: Vec<AtomicMeasure> = family.boxes().map(|a| autocorrelation(omega, &a)).collect::<Result<_>>()?;
    let first = family.box_at(0);
    let last = measures.last().expect("nonempty family");
    let atoms = last
        .atoms()
        .iter()
        .filter(|at| first.contains(&at.x))
        .map(|at| {
            let vals: Vec<Complex64> = measures.iter().map(|m| m.support_value(&at.x)).collect();
            let n = vals.len();
            let last_delta = (vals[n - 1] - vals[n - 2]).norm();
            AtomTrace {
                x: at.x,
                values: vals.iter().map(|z| [z.re, z.im]).collect(),
                last_delta,
                converged: last_delta <= eps_atom,
            }
        })
        .collect();
    Ok(AutocorrelationTrace { family: family.clone(), measures, atoms, eps_atom })
}

/// e^{−2πi t}, reducing t mod 1 first so large arguments keep their accuracy.
#[inline]
fn character(t: f64) -> Complex64 {
    let r = t - t.round();
    let (s, c) = (2.0 * PI * r).sin_cos();
    Complex64::new(c, -s)
}

/// (1/|A|)·Σ_{x ∈ supp ω ∩ A} w(x)·e^{−2πi k·x}.
pub fn exp_sum(omega: &AtomicMeasure, k: &Point, a: &Cuboid) -> Complex64 {
    let tol = omega.tol();
    let s: Complex64 = omega
        .atoms()
        .iter()
        .filter(|at| a.contains_tol(&at.x, tol))
        .map(|at| at.w * character(k.dot(&at.x)))
        .sum();
    s / a.volume()
}

/// Exponential sums for every box of a nested family in one pass over the atoms.
pub fn exp_sums(omega: &AtomicMeasure, k: &Point, family: &VanHoveFamily) -> Vec<Complex64> {
    let tol = omega.tol();
    let boxes: Vec<Cuboid> = family.boxes().collect();
    let mut shells = vec![Complex64::new(0.0, 0.0); boxes.len()];
    for at in omega.atoms() {
        if let Some(n) = boxes.iter().position(|b| b.contains_tol(&at.x, tol)) {
            shells[n] += at.w * character(k.dot(&at.x));
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    shells
        .iter()
        .zip(&boxes)
        .map(|(s, b)| {
            acc += s;
            acc / b.volume()
        })
        .collect()
}

/// Estimated γ̂({k}) with its trace along the family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BraggPeak {
    pub k: Point,
    pub intensity: f64,
    pub trace: Vec<f64>,
    /// |Iₙ − Iₙ₋₁| on the last family step
    pub stderr: f64,
}

impl BraggPeak {
    pub fn converged(&self, eps_atom: f64) -> bool {
        self.stderr <= eps_atom
    }
}

/// |exp_sum(ω, k, Aₙ)|² on the largest box, with the trace over the family.
pub fn bragg_intensity(omega: &AtomicMeasure, k: &Point, family: &VanHoveFamily) -> Result<BraggPeak> {
    if family.len() < 2 {
        return Err(invalid("bragg intensity needs at least 2 boxes"));
    }
    k.check_dim(omega.dim())?;
    Ok(peak_from_sums(*k, &exp_sums(omega, k, family)))
}

fn peak_from_sums(k: Point, sums: &[Complex64]) -> BraggPeak {
    let trace: Vec<f64> = sums.iter().map(|s| s.norm_sqr()).collect();
    let n = trace.len();
    BraggPeak { k, intensity: trace[n - 1], stderr: (trace[n - 1] - trace[n - 2]).abs(), trace }
}

/// Relative difference between |A|·|exp_sum(ω, k, A)|² and Σ_z γ_A({z})·e^{−2πi k·z},
/// measured against Σ_z |γ_A({z})|.
pub fn autocorr_ft_identity_check(omega: &AtomicMeasure, k: &Point, a: &Cuboid) -> Result<f64> {
    let gamma = autocorrelation(omega, a)?;
    let lhs = a.volume() * exp_sum(omega, k, a).norm_sqr();
    let rhs: Complex64 = gamma.atoms().iter().map(|at| at.w * character(k.dot(&at.x))).sum();
    let scale: f64 = gamma.atoms().iter().map(|at| at.w.norm()).sum();
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((Complex64::new(lhs, 0.0) - rhs).norm() / scale)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateOptions {
    /// grid spacing of the generic scan
    pub grid_res: f64,
    /// peaks below floor·γ̂({0}) are not searched for
    pub floor: f64,
    pub refine_iters: usize,
}

impl Default for CandidateOptions {
    fn default() -> Self {
        Self { grid_res: 0.01, floor: 0.05, refine_iters: 40 }
    }
}

const MAX_CANDIDATES: usize = 5_000_000;

/// Frequencies that may carry Bragg peaks inside `dual_window`.
///
/// Structured generators give exact lists: dual lattices (Bᵀ)⁻¹ℤᵈ, projected
/// dual lattices of model sets down to the floor, and compositions of these.
/// Explicit sets fall back to a grid scan of the finite-n intensity with
/// golden-section refinement of the local maxima above the floor.
pub fn candidate_frequencies(
    omega: &AtomicMeasure,
    generator: &Generator,
    family: &VanHoveFamily,
    dual_window: &Cuboid,
    opts: &CandidateOptions,
) -> Result<Vec<Point>> {
    if !(opts.grid_res > 0.0) {
        return Err(invalid("grid resolution must be positive"));
    }
    if !(opts.floor > 0.0 && opts.floor <= 1.0) {
        return Err(invalid("floor must lie in (0, 1]"));
    }
    dual_window.check_dim(omega.dim())?;
    let mut out = match structured_candidates(generator, dual_window, opts.floor)? {
        Some(c) => c,
        None => scan_candidates(omega, family, dual_window, opts)?,
    };
    if !out.iter().any(Point::is_zero) && dual_window.contains(&Point::zero(omega.dim())) {
        out.push(Point::zero(omega.dim()));
    }
    let tol = crate::geometry::merge_tolerance(dual_window);
    Ok(merge_points(omega.dim(), out.into_iter().filter(|k| dual_window.contains(k)), tol))
}

fn structured_candidates(g: &Generator, window: &Cuboid, floor: f64) -> Result<Option<Vec<Point>>> {
    Ok(match g {
        Generator::Lattice { basis } => {
            let dim = window.dim();
            let b = basis_matrix(basis, dim)?;
            let dual = b.transpose().try_inverse().ok_or_else(|| invalid("singular basis"))?;
            let cols: Vec<Vec<f64>> = (0..dim).map(|j| dual.column(j).iter().copied().collect()).collect();
            Some(generate_lattice(&cols, window)?.points().to_vec())
        }
        Generator::ModelSet { embedding, internal_window } => {
            window.check_dim(1)?;
            let e = DMatrix::from_fn(2, 2, |i, j| embedding[j][i]);
            let dual = e.transpose().try_inverse().ok_or_else(|| invalid("singular embedding"))?;
            // |∫_W e^{2πiκy} dy| ≤ 1/(π|κ|), so peaks above floor·γ̂({0}) have |κ| ≤ 1/(π|W|√floor)
            let kappa = 1.0 / (PI * internal_window.len() * floor.sqrt());
            let region = Cuboid::from_bounds(&[window.lo().get(0), -kappa], &[window.hi().get(0), kappa])?;
            let cols: Vec<Vec<f64>> = (0..2).map(|j| dual.column(j).iter().copied().collect()).collect();
            let pts = generate_lattice(&cols, &region)?;
            if pts.len() > MAX_CANDIDATES {
                return Err(invalid("too many model-set candidates; raise the floor"));
            }
            Some(pts.points().iter().map(|p| Point::d1(p.get(0))).collect())
        }
        Generator::Union { parts } => {
            let mut all = Vec::new();
            for p in parts {
                match structured_candidates(p, window, floor)? {
                    Some(c) => all.extend(c),
                    None => return Ok(None),
                }
            }
            Some(all)
        }
        // a translate only changes phases, so its peaks sit where the inner set's do
        Generator::Translate { inner, .. } => structured_candidates(inner, window, floor)?,
        Generator::Scale { factor, inner } => structured_candidates(inner, &window.scale(*factor)?, floor)?
            .map(|c| c.into_iter().map(|k| k * (1.0 / factor)).collect()),
        Generator::Explicit => None,
    })
}

fn scan_candidates(
    omega: &AtomicMeasure,
    family: &VanHoveFamily,
    window: &Cuboid,
    opts: &CandidateOptions,
) -> Result<Vec<Point>> {
    let dim = window.dim();
    let h = opts.grid_res;
    let shape: Vec<usize> = (0..dim).map(|i| (window.side(i) / h).floor() as usize + 1).collect();
    let total: usize = shape.iter().product();
    if total > MAX_CANDIDATES {
        return Err(invalid(format!("grid scan of {total} nodes is too fine; raise the grid resolution")));
    }
    let a = family.largest();
    let node = |flat: usize| -> Point {
        let mut r = flat;
        let mut c = [0.0; 3];
        for i in 0..dim {
            c[i] = window.lo().get(i) + (r % shape[i]) as f64 * h;
            r /= shape[i];
        }
        Point::from_slice(&c[..dim])
    };
    let intensity = |k: &Point| exp_sum(omega, k, &a).norm_sqr();
    let values: Vec<f64> = (0..total).into_par_iter().map(|f| intensity(&node(f))).collect();
    let floor = opts.floor * intensity(&Point::zero(dim));
    let strides: Vec<usize> = (0..dim).map(|i| shape[..i].iter().product()).collect();
    let is_local_max = |flat: usize| -> bool {
        let v = values[flat];
        let mut idx = [0usize; 3];
        let mut r = flat;
        for i in 0..dim {
            idx[i] = r % shape[i];
            r /= shape[i];
        }
        let offsets = 3usize.pow(dim as u32);
        (0..offsets).all(|o| {
            let mut q = 0usize;
            let mut rem = o;
            for i in 0..dim {
                let step = (rem % 3) as i64 - 1;
                rem /= 3;
                let j = idx[i] as i64 + step;
                if j < 0 || j >= shape[i] as i64 {
                    return true;
                }
                q += j as usize * strides[i];
            }
            q == flat || values[q] <= v
        })
    };
    let seeds: Vec<usize> = (0..total).filter(|&f| values[f] >= floor && is_local_max(f)).collect();
    let refined: Vec<Point> = seeds
        .par_iter()
        .map(|&f| refine_peak(&node(f), h, opts.refine_iters, &intensity))
        .collect();
    Ok(refined)
}

/// Coordinate-wise golden-section ascent within ±h of the seed.
fn refine_peak(seed: &Point, h: f64, iters: usize, f: &impl Fn(&Point) -> f64) -> Point {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut p = *seed;
    for axis in 0..p.dim() {
        let at = |t: f64| {
            let mut c = p.coords().to_vec();
            c[axis] = t;
            Point::from_slice(&c)
        };
        let (mut lo, mut hi) = (p.get(axis) - h, p.get(axis) + h);
        let mut x1 = hi - ratio * (hi - lo);
        let mut x2 = lo + ratio * (hi - lo);
        let (mut f1, mut f2) = (f(&at(x1)), f(&at(x2)));
        for _ in 0..iters {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + ratio * (hi - lo);
                f2 = f(&at(x2));
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - ratio * (hi - lo);
                f1 = f(&at(x1));
            }
        }
        let best = 0.5 * (lo + hi);
        if f(&at(best)) >= f(&p) {
            p = at(best);
        }
    }
    p
}

/// Bragg intensity estimates on a candidate list.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiffractionEstimate {
    /// sorted by frequency
    pub peaks: Vec<BraggPeak>,
    pub zero: BraggPeak,
    pub family: VanHoveFamily,
    pub dual_window: Cuboid,
    /// the window of the input comb, when it declares one
    pub window: Option<Cuboid>,
}

impl DiffractionEstimate {
    pub fn gamma0(&self) -> f64 {
        self.zero.intensity
    }

    /// I(a) = {k : γ̂({k}) ≥ a}; empty once a exceeds γ̂({0}), which bounds
    /// every atom.
    pub fn visible(&self, a: f64) -> Result<PointSet> {
        if !(a > 0.0) {
            return Err(invalid("a must be positive"));
        }
        let pts: Vec<Point> = if a > self.gamma0() {
            Vec::new()
        } else {
            self.peaks.iter().filter(|p| p.intensity >= a).map(|p| p.k).collect()
        };
        PointSet::clipped(self.dual_window, pts, Generator::Explicit)
    }

    /// max over peaks of γ̂({k}) − γ̂({0}) − 2·(stderr(k) + stderr(0)): positive values break Krein.
    pub fn krein_excess(&self) -> f64 {
        self.peaks
            .iter()
            .map(|p| p.intensity - self.gamma0() - 2.0 * (p.stderr + self.zero.stderr))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Estimates γ̂ at every candidate (in parallel; output order is the sorted
/// candidate order).
pub fn estimate_diffraction(
    omega: &AtomicMeasure,
    candidates: &[Point],
    family: &VanHoveFamily,
    dual_window: &Cuboid,
) -> Result<DiffractionEstimate> {
    if family.len() < 2 {
        return Err(invalid("diffraction needs at least 2 boxes"));
    }
    family.largest().check_dim(omega.dim())?;
    dual_window.check_dim(omega.dim())?;
    if let Some(w) = omega.window() {
        if !w.grow(omega.tol()).contains_box(&family.largest()) {
            return Err(invalid("the largest family box must lie inside the comb's window"));
        }
    }
    let mut ks: Vec<Point> = candidates.to_vec();
    ks.sort_by(|a, b| a.lex_cmp(b));
    ks.dedup();
    let peaks: Vec<BraggPeak> = ks.par_iter().map(|k| peak_from_sums(*k, &exp_sums(omega, k, family))).collect();
    let zero_k = Point::zero(omega.dim());
    let zero = peak_from_sums(zero_k, &exp_sums(omega, &zero_k, family));
    Ok(DiffractionEstimate { peaks, zero, family: family.clone(), dual_window: *dual_window, window: omega.window().copied() })
}

/// I(a) for the comb ω over the candidate list.
pub fn visible_bragg_set(
    omega: &AtomicMeasure,
    a: f64,
    candidates: &[Point],
    family: &VanHoveFamily,
    dual_window: &Cuboid,
) -> Result<PointSet> {
    estimate_diffraction(omega, candidates, family, dual_window)?.visible(a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    Met,
    /// within the guard band of the threshold
    Borderline,
    Unmet,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NestingCheck {
    pub b: f64,
    pub size_b: usize,
    pub nested: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub a: f64,
    pub gamma0: f64,
    pub gamma0_stderr: f64,
    /// (√3 − 1)·γ̂({0})
    pub threshold: f64,
    pub guard: f64,
    pub hypothesis: Hypothesis,
    pub visible_count: usize,
    pub meyer: MeyerReport,
    pub nesting: Vec<NestingCheck>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

/// Settings for the visible-set Meyer check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Theorem1Options {
    pub candidates: CandidateOptions,
    pub meyer: MeyerOptions,
    /// values of b tested for I(a) ⊆ I(b)
    pub nesting_steps: usize,
}

impl Default for Theorem1Options {
    fn default() -> Self {
        Self { candidates: CandidateOptions::default(), meyer: MeyerOptions::default(), nesting_steps: 5 }
    }
}

/// If I(a) is relatively dense for a > (√3 − 1)γ̂({0}), it must be a Meyer set,
/// and so must every I(b) with threshold < b ≤ a.
///
/// I(a) is estimated once on the largest dual window and cut down to each
/// scale. The threshold uses the estimated γ̂({0}) with guard
/// 10⁻⁶ + (√3 − 1)·stderr; inside the band the result is inconclusive.
/// Below the threshold the Meyer evidence is still reported.
pub fn theorem1_check(
    omega: &AtomicMeasure,
    generator: &Generator,
    a: f64,
    family: &VanHoveFamily,
    dual_windows: &[Cuboid],
    k_box: &Cuboid,
    opts: &Theorem1Options,
) -> Result<Theorem1Report> {
    if !omega.is_positive(1e-12) {
        return Err(Error::NonPositiveMeasure("comb weights must be real and ≥ 0".into()));
    }
    if !(a > 0.0) {
        return Err(invalid("a must be positive"));
    }
    let largest = dual_windows
        .iter()
        .max_by(|x, y| x.volume().total_cmp(&y.volume()))
        .ok_or_else(|| invalid("need dual windows"))?;
    if let Some(w) = dual_windows.iter().find(|w| !largest.contains_box(w)) {
        return Err(invalid(format!("dual window {w:?} is not inside the largest one")));
    }
    let cands = candidate_frequencies(omega, generator, family, largest, &opts.candidates)?;
    let est = estimate_diffraction(omega, &cands, family, largest)?;
    let gamma0 = est.gamma0();
    let stderr = est.zero.stderr;
    let factor = sparseness_factor();
    let threshold = factor * gamma0;
    let guard = 1e-6 + factor * stderr;
    let hypothesis = if a > threshold + guard {
        Hypothesis::Met
    } else if a > threshold - guard {
        Hypothesis::Borderline
    } else {
        Hypothesis::Unmet
    };
    let visible = est.visible(a)?;
    let meyer = meyer_check(
        |w| PointSet::clipped(*w, visible.points().iter().copied(), Generator::Explicit),
        dual_windows,
        k_box,
        &opts.meyer,
    )?;

    let mut notes = Vec::new();
    let mut nesting = Vec::new();
    let upper = a.min(gamma0);
    if upper > threshold && opts.nesting_steps > 0 {
        for j in 1..=opts.nesting_steps {
            let b = threshold + (upper - threshold) * j as f64 / opts.nesting_steps as f64;
            let ib = est.visible(b)?;
            let nested = visible.points().iter().all(|k| ib.contains(k));
            nesting.push(NestingCheck { b, size_b: ib.len(), nested });
        }
    }
    let nested = nesting.iter().all(|n| n.nested);
    if a > gamma0 {
        notes.push(format!("a = {a} exceeds γ̂({{0}}) = {gamma0}; I(a) is empty"));
    }
    let verdict = match hypothesis {
        Hypothesis::Unmet => {
            notes.push(format!("hypothesis unmet: a = {a} ≤ (√3−1)·γ̂({{0}}) = {threshold}"));
            Verdict::Inconclusive
        }
        Hypothesis::Borderline => {
            notes.push(format!("a = {a} is within {guard:e} of the threshold {threshold}"));
            Verdict::Inconclusive
        }
        Hypothesis::Met if !nested => Verdict::Fail,
        Hypothesis::Met if !meyer.relatively_dense => {
            notes.push("I(a) is not relatively dense on these windows; the theorem makes no claim".into());
            Verdict::Inconclusive
        }
        Hypothesis::Met => meyer.verdict,
    };
    Ok(Theorem1Report {
        a,
        gamma0,
        gamma0_stderr: stderr,
        threshold,
        guard,
        hypothesis,
        visible_count: visible.len(),
        meyer,
        nesting,
        verdict,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::golden_ratio;
    use crate::measure::{unit_comb, Atom};

    fn integers(half: f64) -> AtomicMeasure {
        unit_comb(&generate_lattice(&[vec![1.0]], &Cuboid::centered(1, half).unwrap()).unwrap())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn autocorrelation_of_three_integers() {
        let g = autocorrelation(&integers(5.0), &Cuboid::centered(1, 1.0).unwrap()).unwrap();
        let want = [(-2.0, 0.5), (-1.0, 1.0), (0.0, 1.5), (1.0, 1.0), (2.0, 0.5)];
        assert_eq!(g.len(), 5);
        for (x, w) in want {
            assert_eq!(g.support_value(&Point::d1(x)), Complex64::new(w, 0.0));
        }
    }

    #[test]
    fn autocorrelation_closed_form() {
        let n = 7.0;
        let g = autocorrelation(&integers(10.0), &Cuboid::centered(1, n).unwrap()).unwrap();
        for m in -5..=5 {
            let want = (2.0 * n + 1.0 - (m as f64).abs()) / (2.0 * n);
            assert!(close(g.support_value(&Point::d1(m as f64)).re, want, 1e-14));
        }
        let single = AtomicMeasure::from_atoms(1, 1e-9, [Atom { x: Point::d1(0.0), w: Complex64::new(3.0, 4.0) }]).unwrap();
        let g = autocorrelation(&single, &Cuboid::centered(1, 2.0).unwrap()).unwrap();
        assert_eq!(g.atoms().len(), 1);
        assert!(close(g.atoms()[0].w.re, 25.0 / 4.0, 1e-15));
    }

    #[test]
    fn trace_converges_on_integers() {
        let fam = VanHoveFamily::new(1, vec![100.0, 200.0, 400.0]).unwrap();
        let t = autocorrelation_trace(&integers(400.0), &fam, 0.02).unwrap();
        for m in -5..=5 {
            let a = t.atom(&Point::d1(m as f64)).unwrap();
            assert!(a.converged);
            assert!(close(a.values[2][0], 1.0, 0.02));
        }
        assert!(autocorrelation_trace(&integers(10.0), &VanHoveFamily::new(1, vec![1.0, 2.0]).unwrap(), 0.1).is_err());
    }

    #[test]
    fn exp_sum_on_integers() {
        let n = 6.0;
        let a = Cuboid::centered(1, n).unwrap();
        let om = integers(10.0);
        let s0 = exp_sum(&om, &Point::d1(0.0), &a);
        assert!(close(s0.re, (2.0 * n + 1.0) / (2.0 * n), 1e-14));
        let half = exp_sum(&om, &Point::d1(0.5), &a);
        assert!(close(half.norm(), 1.0 / (2.0 * n), 1e-14));
        let one = exp_sum(&om, &Point::d1(1.0), &a);
        assert!((one - s0).norm() < 1e-13);
    }

    #[test]
    fn bragg_on_integers() {
        let fam = VanHoveFamily::new(1, vec![50.0, 100.0, 200.0]).unwrap();
        let om = integers(200.0);
        let p = bragg_intensity(&om, &Point::d1(2.0), &fam).unwrap();
        assert!(close(p.intensity, (401.0f64 / 400.0).powi(2), 1e-12));
        assert_eq!(p.trace.len(), 3);
        let q = bragg_intensity(&om, &Point::d1(0.5), &fam).unwrap();
        assert!(q.intensity < 1e-4);
        let scaled = om.weight_by(|_| Complex64::new(0.0, 3.0));
        let r = bragg_intensity(&scaled, &Point::d1(2.0), &fam).unwrap();
        assert!(close(r.intensity, 9.0 * p.intensity, 1e-10));
    }

    #[test]
    fn identity_on_three_integers() {
        let om = integers(5.0);
        let a = Cuboid::centered(1, 1.0).unwrap();
        for k in [0.0, 0.13, 0.5, 2.71] {
            assert!(autocorr_ft_identity_check(&om, &Point::d1(k), &a).unwrap() < 1e-14);
            let want = (1.0 + 2.0 * (2.0 * PI * k).cos()).powi(2) / 2.0;
            assert!(close(a.volume() * exp_sum(&om, &Point::d1(k), &a).norm_sqr(), want, 1e-12));
        }
    }

    #[test]
    fn lattice_candidates() {
        let om = integers(10.0);
        let fam = VanHoveFamily::new(1, vec![5.0, 10.0]).unwrap();
        let w = Cuboid::centered(1, 2.0).unwrap();
        let c = candidate_frequencies(&om, &Generator::scaled_integers(2.0), &fam, &w, &Default::default()).unwrap();
        let want: Vec<Point> = (-4..=4).map(|i| Point::d1(i as f64 / 2.0)).collect();
        assert_eq!(c, want);
        let c = candidate_frequencies(&om, &Generator::integer_lattice(1), &fam, &w, &Default::default()).unwrap();
        assert_eq!(c.len(), 5);
    }

    #[test]
    fn fibonacci_candidates_match_a_grid_scan() {
        let tau = golden_ratio();
        let fam = VanHoveFamily::new(1, vec![100.0, 200.0, 400.0]).unwrap();
        let ps = PointSet::from_generator(Generator::fibonacci(), Cuboid::centered(1, 400.0).unwrap()).unwrap();
        let om = unit_comb(&ps);
        let w = Cuboid::centered(1, 3.0).unwrap();
        let opts = CandidateOptions::default();
        let structured = candidate_frequencies(&om, &Generator::fibonacci(), &fam, &w, &opts).unwrap();
        // dual points are (m + nτ)/(τ + 2) for the physical projection
        let on_module = |k: f64| {
            (-20..=20).any(|n| {
                let m = k * (tau + 2.0) - n as f64 * tau;
                (m - m.round()).abs() < 1e-9
            })
        };
        assert!(structured.iter().all(|k| on_module(k.get(0))));
        let scanned = candidate_frequencies(&om, &Generator::Explicit, &fam, &w, &opts).unwrap();
        let est = estimate_diffraction(&om, &scanned, &fam, &w).unwrap();
        let strong: Vec<&BraggPeak> = est.peaks.iter().filter(|p| p.intensity > 0.2 * est.gamma0()).collect();
        assert!(!strong.is_empty());
        for p in strong {
            let nearest = structured.iter().map(|k| (k.get(0) - p.k.get(0)).abs()).fold(f64::INFINITY, f64::min);
            assert!(nearest < 2e-3, "peak {:?} far from structured list", p.k);
        }
    }

    #[test]
    fn visible_sets_of_integers() {
        let fam = VanHoveFamily::new(1, vec![50.0, 100.0, 200.0]).unwrap();
        let om = integers(200.0);
        let w = Cuboid::centered(1, 3.0).unwrap();
        let cands: Vec<Point> = (-6..=6).map(|i| Point::d1(i as f64 / 2.0)).collect();
        let i = visible_bragg_set(&om, 0.5, &cands, &fam, &w).unwrap();
        assert_eq!(i.points(), (-3..=3).map(|i| Point::d1(i as f64)).collect::<Vec<_>>().as_slice());
        assert!(visible_bragg_set(&om, 1.5, &cands, &fam, &w).unwrap().is_empty());
        let est = estimate_diffraction(&om, &cands, &fam, &w).unwrap();
        assert!(est.visible(est.gamma0() * (1.0 + 1e-9)).unwrap().is_empty());
        assert!(est.krein_excess() <= 0.0);
    }

    #[test]
    fn theorem1_on_integers() {
        let fam = VanHoveFamily::new(1, vec![50.0, 100.0, 200.0]).unwrap();
        let om = integers(200.0);
        let windows: Vec<Cuboid> = [5.0, 10.0, 20.0].iter().map(|&h| Cuboid::centered(1, h).unwrap()).collect();
        let k = Cuboid::interval(0.0, 1.0).unwrap();
        let r = theorem1_check(&om, &Generator::integer_lattice(1), 0.9, &fam, &windows, &k, &Default::default()).unwrap();
        assert_eq!(r.hypothesis, Hypothesis::Met);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.visible_count, 41);
        assert_eq!(r.nesting.len(), 5);
        let r = theorem1_check(&om, &Generator::integer_lattice(1), 0.5, &fam, &windows, &k, &Default::default()).unwrap();
        assert_eq!(r.hypothesis, Hypothesis::Unmet);
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }
}
