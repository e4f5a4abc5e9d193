//! Volumetric rendering of a single field: termination probabilities,
//! accumulated color and opacity, and expected depth.
//!
//! Camera convention: right-handed, camera looks down -z, y up. Pixel (0,0)
//! is the top-left corner and rays go through pixel centers.

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{propose_samples, RadianceField, RaySample};
use crate::geometry::Se3Pose;

pub mod image_io;

/// Accumulation below which expected depth falls back to the far sentinel.
pub const EPS_ACC: f64 = 1e-4;

/// Pinhole camera with a camera-to-world pose.
#[derive(Debug, Clone)]
pub struct Camera {
    pub pose: Se3Pose,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    pub near: f64,
    pub far: f64,
}

impl Camera {
    pub fn validate(&self) -> Result<()> {
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(Error::InvalidCamera("focal lengths must be positive".into()));
        }
        if !(0.0 < self.near && self.near < self.far) {
            return Err(Error::InvalidCamera("need 0 < near < far".into()));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidCamera("image must be at least 1x1".into()));
        }
        Ok(())
    }

    pub fn center(&self) -> Vector3<f64> {
        *self.pose.translation()
    }
}

/// World-frame ray through the center of pixel `(px, py)`.
pub fn ray_for_pixel(camera: &Camera, px: usize, py: usize) -> Result<(Vector3<f64>, Vector3<f64>)> {
    if px >= camera.width || py >= camera.height {
        return Err(Error::PixelOutOfRange(px, py));
    }
    let x = (px as f64 + 0.5 - camera.cx) / camera.fx;
    let y = (camera.cy - (py as f64 + 0.5)) / camera.fy;
    let dir_cam = Vector3::new(x, y, -1.0).normalize();
    Ok((camera.center(), camera.pose.rotation() * dir_cam))
}

/// Floating-point RGB image, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[f64; 3]>,
}

impl Image {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self { width, height, pixels: vec![[0.0; 3]; width * height] }
    }

    pub fn pixel(&self, px: usize, py: usize) -> [f64; 3] {
        self.pixels[py * self.width + px]
    }
}

/// Full per-pixel render result.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderOutput {
    pub color: Image,
    /// Sum of termination probabilities per pixel, in [0, 1].
    pub accumulation: Vec<f64>,
    /// Expected termination distance; far sentinel where accumulation < eps.
    pub depth: Vec<f64>,
}

/// Result of compositing one ray's sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeOutput {
    pub color: [f64; 3],
    pub accumulation: f64,
    pub expected_depth: f64,
    /// Per-sample termination probabilities `p_k = T_k * alpha_k`.
    pub weights: Vec<f64>,
}

/// Alpha-composite an ordered sample set.
///
/// `alpha_k = 1 - exp(-sigma_k delta_k)`, `T_k = prod_{l<k}(1 - alpha_l)`,
/// `p_k = T_k alpha_k`; color is `sum p_k c_k` and expected depth is the
/// p-weighted mean of the sample `t` values, or `sentinel_depth` when the
/// accumulated mass is below [`EPS_ACC`].
pub fn composite(samples: &[RaySample], sentinel_depth: f64) -> Result<CompositeOutput> {
    let mut transmittance = 1.0;
    let mut weights = Vec::with_capacity(samples.len());
    let mut color = [0.0; 3];
    let mut acc = 0.0;
    let mut depth_sum = 0.0;
    for s in samples {
        if !s.density.is_finite() {
            return Err(Error::NonFiniteDensity);
        }
        let alpha = 1.0 - (-s.density * s.delta).exp();
        let p = transmittance * alpha;
        weights.push(p);
        for c in 0..3 {
            color[c] += p * s.color[c];
        }
        acc += p;
        depth_sum += p * s.t;
        transmittance *= 1.0 - alpha;
    }
    let expected_depth = if acc >= EPS_ACC { depth_sum / acc } else { sentinel_depth };
    Ok(CompositeOutput { color, accumulation: acc, expected_depth, weights })
}

/// Render a field through a camera with `budget` samples per ray.
///
/// Deterministic given `seed`: the stratified jitter for each pixel comes
/// from a counter-based stream keyed on `(seed, px, py)`, so the result does
/// not depend on the parallel schedule.
pub fn render(
    field: &dyn RadianceField,
    camera: &Camera,
    budget: usize,
    seed: u64,
) -> Result<RenderOutput> {
    camera.validate()?;
    let width = camera.width;
    let mut color = Image::zeros(width, camera.height);
    let mut accumulation = vec![0.0; width * camera.height];
    let mut depth = vec![0.0; width * camera.height];

    let rows: Vec<(usize, (&mut [[f64; 3]], (&mut [f64], &mut [f64])))> = color
        .pixels
        .chunks_mut(width)
        .zip(accumulation.chunks_mut(width).zip(depth.chunks_mut(width)))
        .enumerate()
        .collect();

    rows.into_par_iter().try_for_each(|(py, (row_c, (row_a, row_d)))| {
        for px in 0..width {
            let (o, d) = ray_for_pixel(camera, px, py)?;
            let mut rng = crate::rng::stream_rng(seed, &[px as u64, py as u64]);
            let samples =
                propose_samples(field, &o, &d, camera.near, camera.far, budget, &mut rng)?;
            let out = composite(&samples, camera.far)?;
            row_c[px] = out.color;
            row_a[px] = out.accumulation;
            row_d[px] = out.expected_depth;
        }
        Ok::<(), Error>(())
    })?;

    Ok(RenderOutput { color, accumulation, depth })
}
