use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::point::Cuboid;
use crate::error::{invalid, Result};

/// Nested centred cubes Aₙ = [−sₙ, sₙ]ᵈ with strictly increasing sₙ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanHoveFamily {
    dim: usize,
    half_sides: Vec<f64>,
}

impl VanHoveFamily {
    pub fn new(dim: usize, half_sides: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(invalid(format!("dimension {dim} not in 1..=3")));
        }
        if half_sides.is_empty() {
            return Err(invalid("family needs at least one box"));
        }
        if half_sides.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(invalid("half sides must be positive and finite"));
        }
        if half_sides.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("half sides must be strictly increasing"));
        }
        Ok(Self { dim, half_sides })
    }

    /// sₘ = 2ᵐ·s₀ for m = 0..count.
    pub fn geometric(dim: usize, s0: f64, count: usize) -> Result<Self> {
        Self::new(dim, (0..count).map(|m| s0 * 2f64.powi(m as i32)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.half_sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.half_sides.is_empty()
    }

    pub fn half_sides(&self) -> &[f64] {
        &self.half_sides
    }

    pub fn box_at(&self, n: usize) -> Cuboid {
        Cuboid::centered(self.dim, self.half_sides[n]).expect("valid family box")
    }

    pub fn boxes(&self) -> impl Iterator<Item = Cuboid> + '_ {
        (0..self.len()).map(|n| self.box_at(n))
    }

    pub fn largest(&self) -> Cuboid {
        self.box_at(self.len() - 1)
    }
}

/// |∂ᴿAₙ| / |Aₙ| for the n-th box of the family.
pub fn van_hove_ratio(family: &VanHoveFamily, r: f64, n: usize) -> Result<f64> {
    if !(r > 0.0) {
        return Err(invalid("R must be positive"));
    }
    if n >= family.len() {
        return Err(invalid(format!("index {n} out of range 0..{}", family.len())));
    }
    Ok(boundary_ratio(&family.box_at(n), r))
}

/// |∂ᴿB| / |B| for a box B, where ∂ᴿB is the set of points within Euclidean
/// distance R of both B and its complement.
///
/// ∂ᴿB = (B ⊕ R·ball) \ int(B ⊖ R·ball). The outer parallel body has volume
/// Σₖ e_{d−k}(a)·ωₖ·Rᵏ (Steiner), with eⱼ the elementary symmetric polynomials
/// of the side lengths and ωₖ the volume of the unit k-ball; the inner body
/// is the box with sides max(0, aᵢ − 2R).
pub fn boundary_ratio(b: &Cuboid, r: f64) -> f64 {
    let sides = b.sides();
    let d = sides.len();
    let e = elementary_symmetric(&sides);
    let ball = [1.0, 2.0, PI, 4.0 * PI / 3.0];
    let outer: f64 = (0..=d).map(|k| e[d - k] * ball[k] * r.powi(k as i32)).sum();
    let inner: f64 = sides.iter().map(|a| (a - 2.0 * r).max(0.0)).product();
    (outer - inner) / e[d]
}

fn elementary_symmetric(x: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; x.len() + 1];
    e[0] = 1.0;
    for (i, &v) in x.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] += e[j - 1] * v;
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_shell() {
        let f = VanHoveFamily::new(1, vec![10.0]).unwrap();
        assert!((van_hove_ratio(&f, 1.0, 0).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn planar_shell_by_direct_area_count() {
        // B = [−10,10]², R = 1: outer rounded square minus inner [−9,9]²
        let outer = 400.0 + 4.0 * 20.0 + PI;
        let inner = 18.0 * 18.0;
        let b = Cuboid::centered(2, 10.0).unwrap();
        assert!((boundary_ratio(&b, 1.0) - (outer - inner) / 400.0).abs() < 1e-14);
    }

    #[test]
    fn family_validation() {
        assert!(VanHoveFamily::new(1, vec![2.0, 2.0]).is_err());
        assert!(VanHoveFamily::new(4, vec![1.0]).is_err());
        let f = VanHoveFamily::geometric(2, 1.5, 4).unwrap();
        assert_eq!(f.half_sides(), &[1.5, 3.0, 6.0, 12.0]);
        assert!(van_hove_ratio(&f, 0.0, 0).is_err());
        assert!(van_hove_ratio(&f, 1.0, 4).is_err());
    }

    #[test]
    fn thin_boxes_are_all_boundary() {
        let b = Cuboid::from_bounds(&[0.0, 0.0], &[1.0, 10.0]).unwrap();
        // inner body is empty, so the shell is the whole outer body
        let outer = 10.0 + 2.0 * 11.0 * 1.0 + PI;
        assert!((boundary_ratio(&b, 1.0) - outer / 10.0).abs() < 1e-13);
    }
}
