//! Median-based robust estimators for relative scale and transform recovery.

use nalgebra::{Matrix3, Vector3};
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::geometry::{project_to_rotation, Se3Pose, Sim3Transform};

/// Local-frame camera-center distance below which a pair is skipped.
const DEGENERATE_DIST: f64 = 1e-9;

/// All C(n,2) pairs are used up to this many recovered poses; beyond it a
/// seeded random subset of C(64,2) = 2016 pairs bounds the cost.
const PAIR_CAP_POSES: usize = 64;
const PAIR_SUBSET: usize = 2016;

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Estimate the local-to-gauge scale as the median over recovered pose pairs
/// of the gauge-frame to local-frame camera-center distance ratio.
pub fn recover_scale(
    local_poses: &[Se3Pose],
    gauge_poses: &[(usize, Se3Pose)],
) -> Result<f64> {
    if gauge_poses.len() < 2 {
        return Err(Error::NotEnoughPoses(format!(
            "scale recovery needs >= 2 recovered poses, got {}",
            gauge_poses.len()
        )));
    }
    let n = gauge_poses.len();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    if n <= PAIR_CAP_POSES {
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i, j));
            }
        }
    } else {
        let mut all: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        // Fixed internal stream keeps the estimator deterministic.
        let mut rng = crate::rng::stream_rng(0, &[0x7363_616c]);
        all.shuffle(&mut rng);
        pairs = all.into_iter().take(PAIR_SUBSET).collect();
    }

    let mut ratios = Vec::with_capacity(pairs.len());
    for (i, j) in pairs {
        let (ia, pa) = &gauge_poses[i];
        let (ib, pb) = &gauge_poses[j];
        let d_local = (local_poses[*ia].translation() - local_poses[*ib].translation()).norm();
        if d_local < DEGENERATE_DIST {
            continue;
        }
        let d_gauge = (pa.translation() - pb.translation()).norm();
        ratios.push(d_gauge / d_local);
    }
    if ratios.is_empty() {
        return Err(Error::DegenerateGeometry(
            "all recovered pose pairs have coincident local centers".into(),
        ));
    }
    Ok(median(&mut ratios))
}

/// Recover the local-to-gauge SIM(3) transform given the scale.
///
/// Each recovered camera yields a bridge candidate
/// `T = G^C * S * (G^local)^-1`; the result takes the element-wise median of
/// the candidates' rotation matrices and translations, re-projecting the
/// median rotation onto the closest orthonormal matrix with det +1. Also
/// returns the per-camera candidates for reporting.
pub fn recover_transform(
    local_poses: &[Se3Pose],
    gauge_poses: &[(usize, Se3Pose)],
    scale: f64,
) -> Result<(Sim3Transform, Vec<Sim3Transform>)> {
    if gauge_poses.is_empty() {
        return Err(Error::NotEnoughPoses("transform recovery needs >= 1 pose".into()));
    }
    let scale_t = Sim3Transform::from_scale(scale)?;
    let candidates: Vec<Sim3Transform> = gauge_poses
        .iter()
        .map(|(i, gauge)| {
            Sim3Transform::from_se3(gauge.clone())
                .compose(&scale_t)
                .compose(&Sim3Transform::from_se3(local_poses[*i].inverse()))
        })
        .collect();

    let mut rotation = Matrix3::zeros();
    for r in 0..3 {
        for c in 0..3 {
            let mut vals: Vec<f64> =
                candidates.iter().map(|t| t.rotation()[(r, c)]).collect();
            rotation[(r, c)] = median(&mut vals);
        }
    }
    let rotation = project_to_rotation(&rotation);
    let mut translation = Vector3::zeros();
    for c in 0..3 {
        let mut vals: Vec<f64> =
            candidates.iter().map(|t| t.translation()[c]).collect();
        translation[c] = median(&mut vals);
    }
    let result = Sim3Transform::new(Se3Pose::new(rotation, translation)?, scale)?;
    Ok((result, candidates))
}
