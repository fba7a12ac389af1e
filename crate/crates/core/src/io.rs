//! CSV and JSON output helpers. Floats use Rust's shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::diffraction::DiffractionEstimate;
use crate::error::Result;
use crate::geometry::PointSet;

/// Columns k1..kd, intensity, stderr_proxy, converged.
pub fn peaks_csv(est: &DiffractionEstimate, eps_atom: f64) -> String {
    let dim = est.dual_window.dim();
    let mut out = String::new();
    for i in 1..=dim {
        let _ = write!(out, "k{i},");
    }
    out.push_str("intensity,stderr_proxy,converged\n");
    for p in &est.peaks {
        for c in p.k.coords() {
            let _ = write!(out, "{c},");
        }
        let _ = writeln!(out, "{},{},{}", p.intensity, p.stderr, p.converged(eps_atom));
    }
    out
}

/// One point per row, columns x1..xd.
pub fn points_csv(ps: &PointSet) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=ps.dim()).map(|i| format!("x{i}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for p in ps.points() {
        let row: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}
