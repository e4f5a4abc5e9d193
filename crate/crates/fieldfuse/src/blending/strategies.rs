//! The four registered blending strategies.

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::Result;
use crate::fields::propose_samples;
use crate::renderer::{composite, ray_for_pixel, render, Camera, Image, RenderOutput};

use super::merge::{merge_ray_samples, MassSample, MergedSampleSet};
use super::weights::idw_weights;
use super::{BlendConfig, BlendStrategy, RegisteredField};

fn field_distances(fields: &[&RegisteredField], point: &Vector3<f64>) -> Vec<f64> {
    fields.iter().map(|f| (f.origin - point).norm()).collect()
}

fn combine_outputs(
    renders: &[RenderOutput],
    camera: &Camera,
    mut weights_for_pixel: impl FnMut(usize) -> Vec<f64>,
) -> RenderOutput {
    let n_px = camera.width * camera.height;
    let mut color = Image::zeros(camera.width, camera.height);
    let mut accumulation = vec![0.0; n_px];
    let mut depth = vec![0.0; n_px];
    for idx in 0..n_px {
        let w = weights_for_pixel(idx);
        for (out, wi) in renders.iter().zip(&w) {
            for c in 0..3 {
                color.pixels[idx][c] += wi * out.color.pixels[idx][c];
            }
            accumulation[idx] += wi * out.accumulation[idx];
            depth[idx] += wi * out.depth[idx];
        }
    }
    RenderOutput { color, accumulation, depth }
}

/// Render only the field whose origin is closest to the camera center.
pub struct Nearest;

impl BlendStrategy for Nearest {
    fn name(&self) -> &'static str {
        "nearest"
    }

    fn render(
        &self,
        fields: &[&RegisteredField],
        camera: &Camera,
        cfg: &BlendConfig,
        seed: u64,
    ) -> Result<RenderOutput> {
        let d = field_distances(fields, &camera.center());
        let mut argmin = 0;
        for (i, di) in d.iter().enumerate() {
            if *di < d[argmin] {
                argmin = i;
            }
        }
        render(fields[argmin].wrapped.as_ref(), camera, cfg.budget, seed)
    }
}

/// Image-wise blend: one weight per field from the camera-to-origin
/// distances, applied uniformly to every pixel.
pub struct Idw2d;

impl BlendStrategy for Idw2d {
    fn name(&self) -> &'static str {
        "idw-2d"
    }

    fn render(
        &self,
        fields: &[&RegisteredField],
        camera: &Camera,
        cfg: &BlendConfig,
        seed: u64,
    ) -> Result<RenderOutput> {
        let renders: Vec<RenderOutput> = fields
            .iter()
            .map(|f| render(f.wrapped.as_ref(), camera, cfg.budget, seed))
            .collect::<Result<_>>()?;
        let w = idw_weights(&field_distances(fields, &camera.center()), cfg.gamma);
        Ok(combine_outputs(&renders, camera, |_| w.clone()))
    }
}

/// Pixel-wise blend: each field's expected-depth point along the pixel ray
/// (the far-plane point for empty pixels) sets that field's distance.
pub struct Idw3d;

impl BlendStrategy for Idw3d {
    fn name(&self) -> &'static str {
        "idw-3d"
    }

    fn render(
        &self,
        fields: &[&RegisteredField],
        camera: &Camera,
        cfg: &BlendConfig,
        seed: u64,
    ) -> Result<RenderOutput> {
        let renders: Vec<RenderOutput> = fields
            .iter()
            .map(|f| render(f.wrapped.as_ref(), camera, cfg.budget, seed))
            .collect::<Result<_>>()?;
        let rays: Vec<(Vector3<f64>, Vector3<f64>)> = (0..camera.height)
            .flat_map(|py| (0..camera.width).map(move |px| (px, py)))
            .map(|(px, py)| ray_for_pixel(camera, px, py))
            .collect::<Result<_>>()?;
        Ok(combine_outputs(&renders, camera, |idx| {
            let (o, dir) = rays[idx];
            let d: Vec<f64> = fields
                .iter()
                .zip(&renders)
                .map(|(f, out)| (f.origin - (o + out.depth[idx] * dir)).norm())
                .collect();
            idw_weights(&d, cfg.gamma)
        }))
    }
}

/// One blended pixel: color after both normalization steps, the
/// pre-normalization blended mass, and the mass-weighted depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlendedPixel {
    pub color: [f64; 3],
    pub mass: f64,
    pub depth: f64,
}

/// Blend one pixel from merged samples.
///
/// Per merged interval, field weights come from the distance of each field
/// origin to the interval midpoint (normalization step one: they sum to 1).
/// The weighted masses and colors accumulate over intervals; when the
/// accumulated mass reaches `eps_mass` the color is rescaled by the total
/// (step two), otherwise the pixel is empty and the depth falls back to
/// `sentinel_depth`.
pub fn blend_pixel_idw_sample(
    merged: &MergedSampleSet,
    origins: &[Vector3<f64>],
    ray_origin: &Vector3<f64>,
    ray_dir: &Vector3<f64>,
    gamma: f64,
    eps_mass: f64,
    sentinel_depth: f64,
) -> BlendedPixel {
    debug_assert_eq!(origins.len(), merged.num_fields());
    let mut total = 0.0;
    let mut color = [0.0; 3];
    let mut depth_sum = 0.0;
    for (k, (t, delta)) in merged.intervals.iter().enumerate() {
        let mid = ray_origin + (t + 0.5 * delta) * ray_dir;
        let d: Vec<f64> = origins.iter().map(|o| (o - mid).norm()).collect();
        let w = idw_weights(&d, gamma);
        for i in 0..merged.num_fields() {
            let wm = w[i] * merged.mass[i][k];
            if wm == 0.0 {
                continue;
            }
            total += wm;
            for c in 0..3 {
                color[c] += wm * merged.color[i][k][c];
            }
            depth_sum += wm * (t + 0.5 * delta);
        }
    }
    if total >= eps_mass {
        BlendedPixel {
            color: [color[0] / total, color[1] / total, color[2] / total],
            mass: total,
            depth: depth_sum / total,
        }
    } else {
        BlendedPixel { color: [0.0; 3], mass: 0.0, depth: sentinel_depth }
    }
}

/// Sample-wise blend on merged ray intervals.
pub struct IdwSample;

impl BlendStrategy for IdwSample {
    fn name(&self) -> &'static str {
        "idw-sample"
    }

    fn render(
        &self,
        fields: &[&RegisteredField],
        camera: &Camera,
        cfg: &BlendConfig,
        seed: u64,
    ) -> Result<RenderOutput> {
        let origins: Vec<Vector3<f64>> = fields.iter().map(|f| f.origin).collect();
        let width = camera.width;
        let pixels: Vec<BlendedPixel> = (0..width * camera.height)
            .into_par_iter()
            .map(|idx| {
                let (px, py) = (idx % width, idx / width);
                let (o, dir) = ray_for_pixel(camera, px, py)?;
                let per_field: Vec<Vec<MassSample>> = fields
                    .iter()
                    .map(|f| {
                        // Same stream for every field: co-located identical
                        // fields must propose identical samples.
                        let mut rng = crate::rng::stream_rng(seed, &[px as u64, py as u64]);
                        let samples = propose_samples(
                            f.wrapped.as_ref(),
                            &o,
                            &dir,
                            camera.near,
                            camera.far,
                            cfg.budget,
                            &mut rng,
                        )?;
                        let out = composite(&samples, camera.far)?;
                        Ok(samples
                            .iter()
                            .zip(&out.weights)
                            .map(|(s, p)| MassSample {
                                t: s.t,
                                delta: s.delta,
                                mass: *p,
                                color: s.color,
                            })
                            .collect())
                    })
                    .collect::<Result<_>>()?;
                let merged = merge_ray_samples(&per_field);
                Ok(blend_pixel_idw_sample(
                    &merged,
                    &origins,
                    &o,
                    &dir,
                    cfg.gamma,
                    cfg.eps_mass,
                    camera.far,
                ))
            })
            .collect::<Result<_>>()?;

        let mut color = Image::zeros(width, camera.height);
        let mut accumulation = Vec::with_capacity(pixels.len());
        let mut depth = Vec::with_capacity(pixels.len());
        for (idx, p) in pixels.iter().enumerate() {
            color.pixels[idx] = p.color;
            accumulation.push(p.mass.min(1.0));
            depth.push(p.depth);
        }
        Ok(RenderOutput { color, accumulation, depth })
    }
}
