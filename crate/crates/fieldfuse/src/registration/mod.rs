//! Registration from re-rendering.
//!
//! Pipeline: sample query poses around each field, render both image sets,
//! submit the union to a pose-recovery backend that expresses every image
//! pose in one gauge frame, then estimate the relative scale (median of
//! pairwise center-distance ratios) and the full SIM(3) transform
//! (per-camera bridge candidates, element-wise median, rotation re-projected
//! onto SO(3)).

mod backend;
mod estimators;
mod poses;

pub use backend::{PoseRecoveryBackend, PoseRecoveryRequest, PoseRecoveryResult, SfmSimulator, SfmSimulatorConfig};
pub use estimators::{recover_scale, recover_transform};
pub use poses::{look_at_pose, sample_hemisphere_poses, PoseSampleSet, Provenance};

use crate::error::Result;
use crate::fields::RadianceField;
use crate::geometry::{registration_error, RegistrationError, Sim3Transform};
use crate::renderer::{render, Camera, Image};
use nalgebra::Vector3;

/// Render settings for the re-rendered query images.
#[derive(Debug, Clone)]
pub struct RenderSettings {
    pub width: usize,
    pub height: usize,
    pub focal: f64,
    pub near: f64,
    pub far: f64,
    pub budget: usize,
}

impl Default for RenderSettings {
    fn default() -> Self {
        Self { width: 64, height: 64, focal: 60.0, near: 0.05, far: 8.0, budget: 16 }
    }
}

/// Pose sampler settings for one registration run.
#[derive(Debug, Clone)]
pub struct PoseSamplerSettings {
    pub count: usize,
    /// Camera distance as a multiple of the field's bounding radius.
    pub radius_scale: f64,
    pub elevation_deg: (f64, f64),
    pub seed: u64,
}

impl Default for PoseSamplerSettings {
    fn default() -> Self {
        Self { count: 32, radius_scale: 2.5, elevation_deg: (0.0, 30.0), seed: 0 }
    }
}

/// Outcome of one registration run.
#[derive(Debug, Clone)]
pub struct Registration {
    pub t_ba: Sim3Transform,
    pub t_ac: Sim3Transform,
    pub t_bc: Sim3Transform,
    pub s_ac: f64,
    pub s_bc: f64,
    pub candidates_a: Vec<Sim3Transform>,
    pub candidates_b: Vec<Sim3Transform>,
    /// FNV-1a digests of the rendered query images, in submission order.
    pub image_digests: Vec<u64>,
    /// Errors vs ground truth when the caller knows the true transform.
    pub error: Option<RegistrationError>,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn digest_image(img: &Image) -> u64 {
    let mut bytes = Vec::with_capacity(img.pixels.len() * 24);
    for p in &img.pixels {
        for c in p {
            bytes.extend_from_slice(&c.to_le_bytes());
        }
    }
    fnv1a(&bytes)
}

fn hemisphere_for_field(
    field: &dyn RadianceField,
    settings: &PoseSamplerSettings,
    seed_salt: u64,
) -> Result<PoseSampleSet> {
    let bounds = field.bounds();
    let look_at = bounds.center();
    let radius = 0.5 * bounds.size().norm() * settings.radius_scale;
    sample_hemisphere_poses(
        settings.count,
        radius,
        settings.elevation_deg,
        &look_at,
        crate::rng::derive_seed(settings.seed, &[seed_salt]),
    )
}

fn render_pose_set(
    field: &dyn RadianceField,
    poses: &PoseSampleSet,
    rs: &RenderSettings,
    seed: u64,
) -> Result<Vec<Image>> {
    poses
        .poses
        .iter()
        .enumerate()
        .map(|(i, pose)| {
            let camera = Camera {
                pose: pose.clone(),
                fx: rs.focal,
                fy: rs.focal,
                cx: rs.width as f64 / 2.0,
                cy: rs.height as f64 / 2.0,
                width: rs.width,
                height: rs.height,
                near: rs.near,
                far: rs.far,
            };
            Ok(render(field, &camera, rs.budget, crate::rng::derive_seed(seed, &[i as u64]))?.color)
        })
        .collect()
}

/// Run the full registration-from-re-rendering pipeline for two fields.
///
/// `ground_truth` is the known B-to-A transform when the caller constructed
/// the scene; it is only used for the error report.
pub fn register_fields(
    field_a: &dyn RadianceField,
    field_b: &dyn RadianceField,
    sampler: &PoseSamplerSettings,
    render_settings: &RenderSettings,
    backend: &dyn PoseRecoveryBackend,
    ground_truth: Option<&Sim3Transform>,
) -> Result<Registration> {
    let poses_a = hemisphere_for_field(field_a, sampler, 0xA)?;
    let poses_b = hemisphere_for_field(field_b, sampler, 0xB)?;

    let images_a = render_pose_set(field_a, &poses_a, render_settings, crate::rng::derive_seed(sampler.seed, &[0xA]))?;
    let images_b = render_pose_set(field_b, &poses_b, render_settings, crate::rng::derive_seed(sampler.seed, &[0xB]))?;

    let mut image_digests: Vec<u64> = Vec::with_capacity(images_a.len() + images_b.len());
    image_digests.extend(images_a.iter().map(digest_image));
    image_digests.extend(images_b.iter().map(digest_image));

    let request = PoseRecoveryRequest {
        images_a: &images_a,
        images_b: &images_b,
        local_poses_a: &poses_a,
        local_poses_b: &poses_b,
    };
    let recovered = backend.recover(&request)?;

    let gauge_a: Vec<_> = recovered
        .poses_a
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.clone().map(|p| (i, p)))
        .collect();
    let gauge_b: Vec<_> = recovered
        .poses_b
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.clone().map(|p| (i, p)))
        .collect();
    if gauge_a.len() < 2 {
        return Err(crate::Error::NotEnoughPoses("field A".into()));
    }
    if gauge_b.len() < 2 {
        return Err(crate::Error::NotEnoughPoses("field B".into()));
    }

    let s_ac = recover_scale(&poses_a.poses, &gauge_a)?;
    let s_bc = recover_scale(&poses_b.poses, &gauge_b)?;
    let (t_ac, candidates_a) = recover_transform(&poses_a.poses, &gauge_a, s_ac)?;
    let (t_bc, candidates_b) = recover_transform(&poses_b.poses, &gauge_b, s_bc)?;
    let t_ba = t_ac.inverse().compose(&t_bc);

    let error = ground_truth.map(|gt| registration_error(gt, &t_ba));

    Ok(Registration {
        t_ba,
        t_ac,
        t_bc,
        s_ac,
        s_bc,
        candidates_a,
        candidates_b,
        image_digests,
        error,
    })
}

/// Center of a field's bounds plus its bounding radius, the geometry used for
/// pose sampling.
pub fn field_anchor(field: &dyn RadianceField) -> (Vector3<f64>, f64) {
    let b = field.bounds();
    (b.center(), 0.5 * b.size().norm())
}
