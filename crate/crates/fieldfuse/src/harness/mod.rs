//! Experiment harness: scene configs, metrics, sweeps, and artifact output.

pub mod config;
pub mod csv;
pub mod metrics;
pub mod report;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::{Rotation3, Vector3};
use rand::Rng;

use crate::blending::{blend_render, strategy_names, BlendConfig, RegisteredFieldSet};
use crate::error::{Error, Result};
use crate::fields::{field_in_frame, CompositeField, RadianceField};
use crate::geometry::{Se3Pose, Sim3Transform};
use crate::registration::{
    register_fields, Registration, SfmSimulator, SfmSimulatorConfig,
};
use crate::renderer::image_io::{write_pgm16, write_ppm};
use crate::renderer::{render, Camera, RenderOutput};

use config::{RegistrationConfig, SceneConfig};
use csv::{fmt_g6, CsvTable};

/// Harness subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Render,
    Register,
    Blend,
    Evaluate,
    SweepGamma,
    SweepRho,
}

/// CLI flag overrides applied on top of the scene config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub strategy: Option<String>,
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
    pub budget: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Geometric grid from `lo` to `hi` inclusive with exact endpoints.
pub fn geometric_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == steps - 1 {
                hi
            } else {
                lo * (hi / lo).powf(i as f64 / (steps - 1) as f64)
            }
        })
        .collect()
}

/// Deterministic hidden gauge frame for the simulated backend.
fn random_gauge(seed: u64) -> Sim3Transform {
    let mut rng = crate::rng::stream_rng(seed, &[0x6761_7567]);
    let rotation = *Rotation3::from_euler_angles(
        rng.gen::<f64>() * std::f64::consts::TAU,
        rng.gen::<f64>() * std::f64::consts::TAU,
        rng.gen::<f64>() * std::f64::consts::TAU,
    )
    .matrix();
    let translation = Vector3::new(
        rng.gen::<f64>() * 2.0 - 1.0,
        rng.gen::<f64>() * 2.0 - 1.0,
        rng.gen::<f64>() * 2.0 - 1.0,
    );
    let scale = (2.0f64).powf(rng.gen::<f64>() * 2.0 - 1.0);
    Sim3Transform::new(
        Se3Pose::new(rotation, translation).expect("euler rotation is orthonormal"),
        scale,
    )
    .expect("scale in [0.5, 2]")
}

fn effective_blend(cfg: &SceneConfig, ov: &Overrides) -> Result<BlendConfig> {
    let mut b = cfg.blend.clone();
    if let Some(s) = &ov.strategy {
        crate::blending::strategy(s)?;
        b.strategy = s.clone();
    }
    if let Some(g) = ov.gamma {
        b.gamma = g;
    }
    if let Some(t) = ov.tau {
        b.tau = t;
    }
    if let Some(n) = ov.budget {
        b.budget = n;
    }
    b.validate()?;
    Ok(b)
}

/// All fields placed into the reference (scene) frame and combined.
fn scene_union(cfg: &SceneConfig) -> Result<Arc<dyn RadianceField>> {
    let parts: Vec<Arc<dyn RadianceField>> = cfg
        .fields
        .iter()
        .map(|f| Ok(field_in_frame(cfg.build_field(f)?, f.transform.clone())))
        .collect::<Result<_>>()?;
    if parts.is_empty() {
        return Err(Error::InvalidArgument("scene has no fields".into()));
    }
    Ok(Arc::new(CompositeField::new(parts)?))
}

fn registered_set(cfg: &SceneConfig) -> Result<RegisteredFieldSet> {
    let mut set = RegisteredFieldSet::new();
    for f in &cfg.fields {
        set.push(f.name.clone(), cfg.build_field(f)?, f.transform.clone(), f.origin);
    }
    Ok(set)
}

fn cameras(cfg: &SceneConfig) -> Result<Vec<(String, Camera)>> {
    if cfg.cameras.is_empty() {
        return Err(Error::InvalidArgument("scene has no cameras".into()));
    }
    cfg.cameras.iter().map(|c| Ok((c.name.clone(), c.to_camera()?))).collect()
}

fn write_render(
    out_dir: &Path,
    stem: &str,
    camera: &Camera,
    output: &RenderOutput,
    artifacts: &mut Vec<PathBuf>,
) -> Result<()> {
    let ppm = out_dir.join(format!("{stem}.ppm"));
    write_ppm(&ppm, &output.color)?;
    artifacts.push(ppm);
    let pgm = out_dir.join(format!("{stem}-depth.pgm"));
    write_pgm16(&pgm, camera.width, camera.height, &output.depth, camera.near, camera.far)?;
    artifacts.push(pgm);
    Ok(())
}

/// Run one registration under the config's noise model with `poses` query
/// poses, against the ground truth implied by the field placements.
fn run_registration(
    cfg: &SceneConfig,
    reg_cfg: &RegistrationConfig,
    poses: usize,
    seed: u64,
) -> Result<(Registration, Sim3Transform)> {
    let fa_cfg = cfg.field(&reg_cfg.field_a).expect("checked at parse time");
    let fb_cfg = cfg.field(&reg_cfg.field_b).expect("checked at parse time");
    let field_a = cfg.build_field(fa_cfg)?;
    let field_b = cfg.build_field(fb_cfg)?;
    let t_ba = fa_cfg.transform.inverse().compose(&fb_cfg.transform);
    let gauge_a = random_gauge(crate::rng::derive_seed(seed, &[1]));
    let gauge_b = gauge_a.compose(&t_ba);
    let backend = SfmSimulator::new(SfmSimulatorConfig {
        gauge_a,
        gauge_b,
        rotation_noise_deg: reg_cfg.rotation_noise_deg,
        translation_noise_frac: reg_cfg.translation_noise_frac,
        outlier_frac: reg_cfg.outlier_frac,
        dropout_frac: reg_cfg.dropout_frac,
        seed: crate::rng::derive_seed(seed, &[2]),
    });
    let mut sampler = reg_cfg.sampler(crate::rng::derive_seed(seed, &[3]));
    sampler.count = poses;
    let reg = register_fields(
        field_a.as_ref(),
        field_b.as_ref(),
        &sampler,
        &reg_cfg.render,
        &backend,
        Some(&t_ba),
    )?;
    Ok((reg, t_ba))
}

fn require_registration(cfg: &SceneConfig) -> Result<&RegistrationConfig> {
    cfg.registration
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("config has no 'registration' section".into()))
}

fn metrics_row(
    cfg: &SceneConfig,
    strategy: &str,
    blend: &BlendConfig,
    camera_name: &str,
    output: &RenderOutput,
    reference: &RenderOutput,
) -> Result<Vec<String>> {
    let psnr = metrics::psnr(&output.color, &reference.color)?;
    let ssim = if output.color.width >= 11 && output.color.height >= 11 {
        metrics::ssim(&output.color, &reference.color)?
    } else {
        f64::NAN
    };
    Ok(vec![
        cfg.name.clone(),
        strategy.to_string(),
        fmt_g6(blend.gamma),
        fmt_g6(blend.tau),
        camera_name.to_string(),
        fmt_g6(psnr),
        fmt_g6(ssim),
    ])
}

/// Execute one subcommand and return the artifact paths written.
pub fn run_experiment(
    cfg: &SceneConfig,
    command: Command,
    overrides: &Overrides,
) -> Result<Vec<PathBuf>> {
    let seed = overrides.seed.unwrap_or(cfg.seed);
    let out_dir = overrides.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out_dir)?;
    let mut artifacts = Vec::new();

    match command {
        Command::Render => {
            let blend = effective_blend(cfg, overrides)?;
            let union = scene_union(cfg)?;
            for (i, (name, camera)) in cameras(cfg)?.iter().enumerate() {
                let out = render(
                    union.as_ref(),
                    camera,
                    blend.budget,
                    crate::rng::derive_seed(seed, &[4, i as u64]),
                )?;
                write_render(&out_dir, &format!("render-{name}"), camera, &out, &mut artifacts)?;
            }
        }
        Command::Register => {
            let reg_cfg = require_registration(cfg)?;
            let (reg, _) = run_registration(cfg, reg_cfg, reg_cfg.poses, seed)?;
            let report_path = out_dir.join("registration-report.txt");
            std::fs::write(&report_path, report::registration_report(&reg))?;
            artifacts.push(report_path);
            let t_path = out_dir.join("t-ba.txt");
            report::write_transform(&t_path, &reg.t_ba)?;
            artifacts.push(t_path);
        }
        Command::Blend => {
            let blend = effective_blend(cfg, overrides)?;
            let set = registered_set(cfg)?;
            for (i, (name, camera)) in cameras(cfg)?.iter().enumerate() {
                let out = blend_render(
                    &set,
                    camera,
                    &blend,
                    crate::rng::derive_seed(seed, &[4, i as u64]),
                )?;
                write_render(
                    &out_dir,
                    &format!("blend-{}-{name}", blend.strategy),
                    camera,
                    &out,
                    &mut artifacts,
                )?;
            }
        }
        Command::Evaluate => {
            let blend = effective_blend(cfg, overrides)?;
            let set = registered_set(cfg)?;
            let union = scene_union(cfg)?;
            let cams = cameras(cfg)?;
            let mut table = CsvTable::new(&[
                "scene", "strategy", "gamma", "tau", "camera", "psnr_db", "ssim",
            ]);
            for name in strategy_names() {
                let mut b = blend.clone();
                b.strategy = name.to_string();
                for (i, (cam_name, camera)) in cams.iter().enumerate() {
                    let view_seed = crate::rng::derive_seed(seed, &[4, i as u64]);
                    let reference = render(union.as_ref(), camera, b.budget, view_seed)?;
                    let out = blend_render(&set, camera, &b, view_seed)?;
                    write_render(
                        &out_dir,
                        &format!("evaluate-{name}-{cam_name}"),
                        camera,
                        &out,
                        &mut artifacts,
                    )?;
                    table.push_row(metrics_row(cfg, name, &b, cam_name, &out, &reference)?)?;
                }
            }
            let csv_path = out_dir.join("metrics.csv");
            table.write(&csv_path)?;
            artifacts.push(csv_path);
        }
        Command::SweepGamma => {
            let blend = effective_blend(cfg, overrides)?;
            let set = registered_set(cfg)?;
            let union = scene_union(cfg)?;
            let cams = cameras(cfg)?;
            let (name, camera) = &cams[0];
            let view_seed = crate::rng::derive_seed(seed, &[4, 0]);
            let reference = render(union.as_ref(), camera, blend.budget, view_seed)?;
            let grid = geometric_grid(cfg.sweep.gamma_range.0, cfg.sweep.gamma_range.1, cfg.sweep.gamma_steps);
            let mut table = CsvTable::new(&[
                "scene", "strategy", "gamma", "tau", "camera", "psnr_db", "ssim",
            ]);
            for strat in ["idw-2d", "idw-3d", "idw-sample"] {
                for (gi, gamma) in grid.iter().enumerate() {
                    let mut b = blend.clone();
                    b.strategy = strat.to_string();
                    b.gamma = *gamma;
                    let out = blend_render(&set, camera, &b, view_seed)?;
                    write_render(
                        &out_dir,
                        &format!("sweep-gamma-{strat}-{gi:02}"),
                        camera,
                        &out,
                        &mut artifacts,
                    )?;
                    table.push_row(metrics_row(cfg, strat, &b, name, &out, &reference)?)?;
                }
            }
            let csv_path = out_dir.join("sweep-gamma.csv");
            table.write(&csv_path)?;
            artifacts.push(csv_path);
        }
        Command::SweepRho => {
            let reg_cfg = require_registration(cfg)?;
            let grid =
                geometric_grid(cfg.sweep.rho_range.0, cfg.sweep.rho_range.1, cfg.sweep.rho_steps);
            let mut table =
                CsvTable::new(&["scene", "rho", "poses", "r_err_deg", "t_err", "s_err"]);
            for (ri, rho) in grid.iter().enumerate() {
                let poses = ((rho * cfg.sweep.train_views as f64).round() as usize).max(2);
                let (reg, _) = run_registration(
                    cfg,
                    reg_cfg,
                    poses,
                    crate::rng::derive_seed(seed, &[5, ri as u64]),
                )?;
                let e = reg.error.expect("ground truth is always available from the config");
                table.push_row(vec![
                    cfg.name.clone(),
                    fmt_g6(*rho),
                    poses.to_string(),
                    fmt_g6(e.r_err),
                    fmt_g6(e.t_err),
                    fmt_g6(e.s_err),
                ])?;
            }
            let csv_path = out_dir.join("sweep-rho.csv");
            table.write(&csv_path)?;
            artifacts.push(csv_path);
        }
    }
    Ok(artifacts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_grid_hits_exact_endpoints() {
        let g = geometric_grid(0.01, 1000.0, 20);
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[19], 1000.0);
        for w in g.windows(2) {
            assert!(w[1] > w[0]);
        }
        // ratio between consecutive points is constant
        let r0 = g[2] / g[1];
        for w in g[1..19].windows(2) {
            assert!((w[1] / w[0] / r0 - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn random_gauge_is_deterministic_and_valid() {
        let a = random_gauge(3);
        let b = random_gauge(3);
        assert_eq!(a, b);
        assert_ne!(a, random_gauge(4));
        assert!(a.scale() >= 0.5 && a.scale() <= 2.0);
    }
}
