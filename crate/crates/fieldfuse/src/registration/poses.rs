//! Hemispheric query-pose sampling.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Se3Pose;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Hemispheric,
    Training,
    Mixed,
}

/// A set of query poses in the local frame of one field.
#[derive(Debug, Clone)]
pub struct PoseSampleSet {
    pub poses: Vec<Se3Pose>,
    pub provenance: Provenance,
}

/// Camera-to-world look-at pose: camera looks down -z toward `target`.
///
/// Falls back to the x axis as up when the view direction is parallel to the
/// world up vector.
pub fn look_at_pose(center: &Vector3<f64>, target: &Vector3<f64>) -> Result<Se3Pose> {
    let forward = (target - center).normalize();
    let up = Vector3::new(0.0, 0.0, 1.0);
    let up = if forward.cross(&up).norm() < 1e-8 { Vector3::new(1.0, 0.0, 0.0) } else { up };
    let right = forward.cross(&up).normalize();
    let true_up = right.cross(&forward);
    let rotation = Matrix3::from_columns(&[right, true_up, -forward]);
    Se3Pose::new(rotation, *center)
}

/// Sample `n` poses at distance `radius` from `look_at`, azimuths stratified
/// over [0, 360), elevations uniform in `[lo, hi]` degrees above the z = 0
/// plane through `look_at`, each oriented to look at `look_at`.
pub fn sample_hemisphere_poses(
    n: usize,
    radius: f64,
    elevation_deg: (f64, f64),
    look_at: &Vector3<f64>,
    seed: u64,
) -> Result<PoseSampleSet> {
    let (lo, hi) = elevation_deg;
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 poses".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    if !(0.0 <= lo && lo <= hi && hi <= 90.0) {
        return Err(Error::InvalidArgument(format!(
            "elevation range [{lo}, {hi}] must lie within [0, 90]"
        )));
    }
    let mut rng = crate::rng::stream_rng(seed, &[0x706f_7365]);
    let mut poses = Vec::with_capacity(n);
    for i in 0..n {
        let azimuth = (i as f64 + rng.gen::<f64>()) / n as f64 * std::f64::consts::TAU;
        let elevation = (lo + rng.gen::<f64>() * (hi - lo)).to_radians();
        let center = look_at
            + radius
                * Vector3::new(
                    elevation.cos() * azimuth.cos(),
                    elevation.cos() * azimuth.sin(),
                    elevation.sin(),
                );
        poses.push(look_at_pose(&center, look_at)?);
    }
    Ok(PoseSampleSet { poses, provenance: Provenance::Hemispheric })
}
