//! Registration report and transform files.

use std::path::Path;

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::geometry::Sim3Transform;
use crate::registration::Registration;

use super::csv::fmt_g6;

fn matrix_lines(t: &Sim3Transform) -> String {
    let m = t.to_matrix4();
    (0..4)
        .map(|r| {
            (0..4)
                .map(|c| format!("{:.17e}", m[(r, c)]))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Write a transform as a 4x4 row-major matrix, one row per line.
pub fn write_transform(path: &Path, t: &Sim3Transform) -> Result<()> {
    std::fs::write(path, format!("{}\n", matrix_lines(t)))?;
    Ok(())
}

/// Read a transform previously written by [`write_transform`]; the scale is
/// recovered from the rotation block's column norms.
pub fn read_transform(path: &Path) -> Result<Sim3Transform> {
    let text = std::fs::read_to_string(path)?;
    let numbers: Vec<f64> = text
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad transform token '{t}'")))
        })
        .collect::<Result<_>>()?;
    if numbers.len() != 16 {
        return Err(Error::InvalidArgument(format!(
            "transform file has {} numbers, expected 16",
            numbers.len()
        )));
    }
    let mut m = Matrix4::zeros();
    for (i, v) in numbers.iter().enumerate() {
        m[(i / 4, i % 4)] = *v;
    }
    Sim3Transform::from_matrix4(&m)
}

/// Structured text report for one registration run: recovered scales, the
/// per-camera bridge candidates, the final transform, and error metrics when
/// ground truth was available.
pub fn registration_report(reg: &Registration) -> String {
    let mut out = String::from("registration-report v1\n");
    out.push_str(&format!("scale-ac {}\n", fmt_g6(reg.s_ac)));
    out.push_str(&format!("scale-bc {}\n", fmt_g6(reg.s_bc)));
    for (label, candidates) in [("a", &reg.candidates_a), ("b", &reg.candidates_b)] {
        out.push_str(&format!("candidates-{label} {}\n", candidates.len()));
        for (i, c) in candidates.iter().enumerate() {
            let m = c.to_matrix4();
            let row: Vec<String> = (0..16).map(|k| fmt_g6(m[(k / 4, k % 4)])).collect();
            out.push_str(&format!("candidate-{label} {i} {}\n", row.join(" ")));
        }
    }
    for (label, t) in [("t-ac", &reg.t_ac), ("t-bc", &reg.t_bc), ("t-ba", &reg.t_ba)] {
        out.push_str(&format!("{label}\n{}\n", matrix_lines(t)));
    }
    out.push_str("image-digests");
    for d in &reg.image_digests {
        out.push_str(&format!(" {d:016x}"));
    }
    out.push('\n');
    if let Some(e) = &reg.error {
        out.push_str(&format!("r-err-deg {}\n", fmt_g6(e.r_err)));
        out.push_str(&format!("t-err {}\n", fmt_g6(e.t_err)));
        out.push_str(&format!("s-err {}\n", fmt_g6(e.s_err)));
    }
    out
}
