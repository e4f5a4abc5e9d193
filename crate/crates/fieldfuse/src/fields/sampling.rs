//! Two-pass ray sample proposal: a stratified coarse pass followed by
//! importance resampling proportional to the coarse termination probability.

use nalgebra::Vector3;
use rand::Rng;

use crate::error::{Error, Result};

use super::{RadianceField, RaySample};

/// Minimum spacing between proposal positions; closer ones are merged so
/// every interval keeps a strictly positive length.
const MIN_GAP: f64 = 1e-9;

/// Propose at most `budget` non-overlapping intervals covering `[near, far]`,
/// sorted by `t`, each carrying density and color queried at its midpoint.
///
/// The first `budget/2` positions come from uniform strata with jitter; the
/// rest are drawn proportionally to the coarse termination probabilities so
/// they cluster where the field is dense.
pub fn propose_samples(
    field: &dyn RadianceField,
    origin: &Vector3<f64>,
    direction: &Vector3<f64>,
    near: f64,
    far: f64,
    budget: usize,
    rng: &mut impl Rng,
) -> Result<Vec<RaySample>> {
    let norm = direction.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NonUnitDirection(norm));
    }
    if !(near < far) {
        return Err(Error::InvalidArgument(format!("near {near} must be below far {far}")));
    }
    if budget < 2 {
        return Err(Error::InvalidArgument("sample budget must be at least 2".into()));
    }

    let n_coarse = (budget / 2).max(1);
    let n_fine = budget - n_coarse;
    let stratum = (far - near) / n_coarse as f64;

    // Coarse pass: one jittered position per stratum, plus the coarse
    // termination mass of each stratum from its midpoint density.
    let mut positions = Vec::with_capacity(budget);
    let mut mass = Vec::with_capacity(n_coarse);
    let mut transmittance = 1.0;
    for i in 0..n_coarse {
        let lo = near + i as f64 * stratum;
        positions.push(lo + rng.gen::<f64>() * stratum);
        let mid = lo + 0.5 * stratum;
        let s = field.query(&(origin + mid * direction), direction);
        let alpha = 1.0 - (-s.density * stratum).exp();
        mass.push(transmittance * alpha);
        transmittance *= 1.0 - alpha;
    }

    // Importance pass: categorical draw over strata, uniform within.
    let total: f64 = mass.iter().sum();
    for _ in 0..n_fine {
        let idx = if total > 1e-12 {
            let mut u = rng.gen::<f64>() * total;
            let mut pick = n_coarse - 1;
            for (i, &m) in mass.iter().enumerate() {
                if u < m {
                    pick = i;
                    break;
                }
                u -= m;
            }
            pick
        } else {
            rng.gen_range(0..n_coarse)
        };
        let lo = near + idx as f64 * stratum;
        positions.push(lo + rng.gen::<f64>() * stratum);
    }

    positions.sort_by(|a, b| a.partial_cmp(b).unwrap());
    positions.dedup_by(|a, b| (*a - *b).abs() < MIN_GAP);

    // Interval boundaries at midpoints between consecutive positions; the
    // result partitions [near, far] exactly.
    let mut samples = Vec::with_capacity(positions.len());
    let mut start = near;
    for (i, _) in positions.iter().enumerate() {
        let end = if i + 1 < positions.len() {
            0.5 * (positions[i] + positions[i + 1])
        } else {
            far
        };
        let mid = 0.5 * (start + end);
        let s = field.query(&(origin + mid * direction), direction);
        samples.push(RaySample { t: start, delta: end - start, density: s.density, color: s.color });
        start = end;
    }
    Ok(samples)
}
