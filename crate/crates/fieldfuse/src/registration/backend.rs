//! Pose-recovery backends.
//!
//! The backend contract mirrors a structure-from-motion run over the union of
//! re-rendered images: every image pose comes back expressed in one arbitrary
//! gauge frame (orientation, position, and unit all unknown to the caller),
//! or as a failure marker. Two implementations are planned: the simulator
//! below, which makes verification exact, and a real-SfM adapter that would
//! consume the rendered pixels through the same request type.

use nalgebra::Vector3;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::{convert_query_pose, Se3Pose, Sim3Transform};
use crate::renderer::Image;

use super::poses::{look_at_pose, PoseSampleSet};

/// Input to one pose-recovery run: the union of both fields' rendered query
/// images, together with the local poses they were rendered from.
pub struct PoseRecoveryRequest<'a> {
    pub images_a: &'a [Image],
    pub images_b: &'a [Image],
    pub local_poses_a: &'a PoseSampleSet,
    pub local_poses_b: &'a PoseSampleSet,
}

/// Per-image recovered pose in the gauge frame, or `None` on failure.
#[derive(Debug, Clone)]
pub struct PoseRecoveryResult {
    pub poses_a: Vec<Option<Se3Pose>>,
    pub poses_b: Vec<Option<Se3Pose>>,
}

pub trait PoseRecoveryBackend {
    fn recover(&self, request: &PoseRecoveryRequest) -> Result<PoseRecoveryResult>;
}

/// Configuration of the SfM simulator.
///
/// The hidden gauges map each field's local frame into the common frame C,
/// including the per-field scale. Noise magnitudes are standard deviations;
/// the translation noise is a fraction of the gauge-frame scene radius.
#[derive(Debug, Clone)]
pub struct SfmSimulatorConfig {
    pub gauge_a: Sim3Transform,
    pub gauge_b: Sim3Transform,
    pub rotation_noise_deg: f64,
    pub translation_noise_frac: f64,
    pub outlier_frac: f64,
    pub dropout_frac: f64,
    pub seed: u64,
}

impl SfmSimulatorConfig {
    fn validate(&self) -> Result<()> {
        if self.rotation_noise_deg < 0.0 || self.translation_noise_frac < 0.0 {
            return Err(Error::InvalidArgument("noise std-devs must be >= 0".into()));
        }
        for f in [self.outlier_frac, self.dropout_frac] {
            if !(0.0..1.0).contains(&f) {
                return Err(Error::InvalidArgument(format!("fraction {f} must be in [0, 1)")));
            }
        }
        Ok(())
    }
}

/// Stand-in for a real SfM pipeline with controllable error characteristics.
///
/// Each local pose is re-expressed in the gauge frame as the SE(3) part of
/// `T_XC * G * S_XC^-1`, then perturbed. Outliers are replaced by uniformly
/// random poses inside the gauge-frame scene bounding sphere; dropouts become
/// failure markers. The rendered pixels are accepted but not inspected.
pub struct SfmSimulator {
    cfg: SfmSimulatorConfig,
}

impl SfmSimulator {
    pub fn new(cfg: SfmSimulatorConfig) -> Self {
        Self { cfg }
    }

    fn perturb(
        &self,
        poses: &[Se3Pose],
        gauge: &Sim3Transform,
        scene_center: &Vector3<f64>,
        scene_radius: f64,
        rng: &mut impl Rng,
    ) -> Result<Vec<Option<Se3Pose>>> {
        let n = poses.len();
        let n_outliers = (self.cfg.outlier_frac * n as f64).floor() as usize;
        let n_dropouts = (self.cfg.dropout_frac * n as f64).floor() as usize;
        let mut indices: Vec<usize> = (0..n).collect();
        indices.shuffle(rng);
        let outliers: Vec<usize> = indices[..n_outliers].to_vec();
        let dropouts: Vec<usize> = indices[n_outliers..n_outliers + n_dropouts].to_vec();

        let unit = Normal::new(0.0, 1.0).unwrap();
        let mut out = Vec::with_capacity(n);
        for (i, pose) in poses.iter().enumerate() {
            if dropouts.contains(&i) {
                out.push(None);
                continue;
            }
            if outliers.contains(&i) {
                // Uniform random pose in the scene bounding sphere.
                let dir = Vector3::new(
                    unit.sample(rng),
                    unit.sample(rng),
                    unit.sample(rng),
                )
                .normalize();
                let r = scene_radius * rng.gen::<f64>().cbrt();
                let center = scene_center + r * dir;
                let target = scene_center
                    + scene_radius
                        * Vector3::new(unit.sample(rng), unit.sample(rng), unit.sample(rng))
                            .normalize();
                out.push(Some(look_at_pose(&center, &target)?));
                continue;
            }
            let mapped = convert_query_pose(pose, gauge);
            let mut rotation = *mapped.rotation();
            if self.cfg.rotation_noise_deg > 0.0 {
                let axis = Vector3::new(unit.sample(rng), unit.sample(rng), unit.sample(rng))
                    .normalize();
                let angle: f64 =
                    (self.cfg.rotation_noise_deg * unit.sample(rng)).to_radians();
                rotation = *nalgebra::Rotation3::from_axis_angle(
                    &nalgebra::Unit::new_normalize(axis),
                    angle,
                )
                .matrix()
                    * rotation;
            }
            let mut translation = *mapped.translation();
            if self.cfg.translation_noise_frac > 0.0 {
                let sigma = self.cfg.translation_noise_frac * scene_radius;
                translation += sigma
                    * Vector3::new(unit.sample(rng), unit.sample(rng), unit.sample(rng));
            }
            out.push(Some(Se3Pose::new(rotation, translation)?));
        }
        Ok(out)
    }
}

impl PoseRecoveryBackend for SfmSimulator {
    fn recover(&self, request: &PoseRecoveryRequest) -> Result<PoseRecoveryResult> {
        self.cfg.validate()?;
        let mapped_centers: Vec<Vector3<f64>> = request
            .local_poses_a
            .poses
            .iter()
            .map(|p| *convert_query_pose(p, &self.cfg.gauge_a).translation())
            .chain(
                request
                    .local_poses_b
                    .poses
                    .iter()
                    .map(|p| *convert_query_pose(p, &self.cfg.gauge_b).translation()),
            )
            .collect();
        let centroid: Vector3<f64> =
            mapped_centers.iter().sum::<Vector3<f64>>() / mapped_centers.len() as f64;
        let scene_radius = mapped_centers
            .iter()
            .map(|c| (c - centroid).norm())
            .fold(0.0, f64::max)
            .max(1e-9);

        let mut rng = crate::rng::stream_rng(self.cfg.seed, &[0x7366_6d73]);
        let poses_a = self.perturb(
            &request.local_poses_a.poses,
            &self.cfg.gauge_a,
            &centroid,
            scene_radius,
            &mut rng,
        )?;
        let poses_b = self.perturb(
            &request.local_poses_b.poses,
            &self.cfg.gauge_b,
            &centroid,
            scene_radius,
            &mut rng,
        )?;
        if poses_a.iter().all(|p| p.is_none()) {
            return Err(Error::NotEnoughPoses("field A (all poses dropped)".into()));
        }
        if poses_b.iter().all(|p| p.is_none()) {
            return Err(Error::NotEnoughPoses("field B (all poses dropped)".into()));
        }
        Ok(PoseRecoveryResult { poses_a, poses_b })
    }
}
