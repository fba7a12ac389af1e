use serde::{Deserialize, Serialize};

use super::point::Cuboid;
use super::pointset::{Generator, PointSet};
use super::predicates::{covering_grid_spacing, covering_radius, difference_set, weak_ud_count};
use crate::error::{invalid, Result};
use crate::report::Verdict;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeyerOptions {
    /// Covering-radius grid density (samples per unit length).
    pub sample_density: f64,
}

impl Default for MeyerOptions {
    fn default() -> Self {
        Self { sample_density: 20.0 }
    }
}

/// Evidence gathered at one window scale.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScaleEvidence {
    pub window: Cuboid,
    pub points: usize,
    pub covering_radius: f64,
    pub grid_spacing: f64,
    /// max #((t + k_box) ∩ (Λ − Λ)) with Λ − Λ taken inside the same window
    pub diff_set_count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    /// no growth on the final scale step
    Stable,
    /// strict growth at every scale step
    Growing,
    Erratic,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeyerReport {
    pub scales: Vec<ScaleEvidence>,
    pub covering_trend: Trend,
    pub count_trend: Trend,
    pub relatively_dense: bool,
    pub diff_counts_bounded: bool,
    /// the plateau value of the difference-set count when bounded
    pub constant: Option<usize>,
    pub verdict: Verdict,
    pub witnesses: Vec<String>,
    /// finite windows can support but never prove the infinite-set predicates
    pub windowed_evidence_only: bool,
}

/// Relative denseness of Λ plus weak uniform discreteness of Λ − Λ, checked
/// across nested window scales. `source` produces the set on each window.
///
/// Pass needs a stable covering radius and an exact plateau of the
/// difference-set count after the first scale; monotone growth of either is a
/// failure; anything else is inconclusive.
pub fn meyer_check<F>(mut source: F, scales: &[Cuboid], k_box: &Cuboid, opts: &MeyerOptions) -> Result<MeyerReport>
where
    F: FnMut(&Cuboid) -> Result<PointSet>,
{
    if scales.len() < 3 {
        return Err(invalid(format!("meyer_check needs at least 3 scales, got {}", scales.len())));
    }
    let mut evidence = Vec::with_capacity(scales.len());
    for w in scales {
        let ps = source(w)?;
        let cr = covering_radius(&ps, opts.sample_density)?;
        let diffs = difference_set(&ps, w)?;
        let count = weak_ud_count(&diffs, k_box)?;
        evidence.push(ScaleEvidence {
            window: *w,
            points: ps.len(),
            covering_radius: cr,
            grid_spacing: covering_grid_spacing(w, opts.sample_density),
            diff_set_count: count,
        });
    }

    let covering_trend = covering_trend(&evidence);
    let counts: Vec<usize> = evidence.iter().map(|e| e.diff_set_count).collect();
    let count_trend = if counts[1..].windows(2).all(|w| w[0] == w[1]) {
        Trend::Stable
    } else if counts.windows(2).all(|w| w[1] > w[0]) {
        Trend::Growing
    } else {
        Trend::Erratic
    };

    let relatively_dense = covering_trend == Trend::Stable;
    let diff_counts_bounded = count_trend == Trend::Stable;
    let mut witnesses = Vec::new();
    match covering_trend {
        Trend::Growing => witnesses.push(format!(
            "covering radius grows with the window: {:?}",
            evidence.iter().map(|e| e.covering_radius).collect::<Vec<_>>()
        )),
        Trend::Erratic => witnesses.push("covering radius neither settles nor grows monotonically".into()),
        Trend::Stable => {}
    }
    match count_trend {
        Trend::Growing => witnesses.push(format!("difference-set count grows with the window: {counts:?}")),
        Trend::Erratic => witnesses.push(format!("difference-set counts show no plateau: {counts:?}")),
        Trend::Stable => {}
    }
    let verdict = if relatively_dense && diff_counts_bounded {
        Verdict::Pass
    } else if covering_trend == Trend::Growing || count_trend == Trend::Growing {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    Ok(MeyerReport {
        constant: diff_counts_bounded.then(|| counts[counts.len() - 1]),
        scales: evidence,
        covering_trend,
        count_trend,
        relatively_dense,
        diff_counts_bounded,
        verdict,
        witnesses,
        windowed_evidence_only: true,
    })
}

fn covering_trend(ev: &[ScaleEvidence]) -> Trend {
    if ev.iter().any(|e| !e.covering_radius.is_finite()) {
        return Trend::Growing;
    }
    let slack = |e: &ScaleEvidence| 2.0 * e.grid_spacing;
    let n = ev.len();
    if ev[n - 1].covering_radius <= ev[n - 2].covering_radius + slack(&ev[n - 1]) {
        Trend::Stable
    } else if ev.windows(2).all(|w| w[1].covering_radius > w[0].covering_radius + slack(&w[1])) {
        Trend::Growing
    } else {
        Trend::Erratic
    }
}

/// meyer_check on a structured generator, realized afresh on each window.
pub fn meyer_check_generator(
    generator: &Generator,
    scales: &[Cuboid],
    k_box: &Cuboid,
    opts: &MeyerOptions,
) -> Result<MeyerReport> {
    meyer_check(|w| PointSet::from_generator(generator.clone(), *w), scales, k_box, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point::Point;

    fn scales(halves: &[f64]) -> Vec<Cuboid> {
        halves.iter().map(|&h| Cuboid::centered(1, h).unwrap()).collect()
    }

    #[test]
    fn integers_are_meyer_with_constant_two() {
        let k = Cuboid::interval(0.0, 1.0).unwrap();
        let r = meyer_check_generator(&Generator::integer_lattice(1), &scales(&[5.0, 10.0, 20.0]), &k, &Default::default())
            .unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.constant, Some(2));
        assert!(r.windowed_evidence_only);
    }

    #[test]
    fn single_point_is_not_relatively_dense() {
        let k = Cuboid::interval(0.0, 1.0).unwrap();
        let r = meyer_check(
            |w| PointSet::explicit(*w, vec![Point::d1(0.0)]),
            &scales(&[5.0, 10.0, 20.0]),
            &k,
            &Default::default(),
        )
        .unwrap();
        assert_eq!(r.covering_trend, Trend::Growing);
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn needs_three_scales() {
        let k = Cuboid::interval(0.0, 1.0).unwrap();
        assert!(meyer_check_generator(&Generator::integer_lattice(1), &scales(&[5.0, 10.0]), &k, &Default::default())
            .is_err());
    }
}
