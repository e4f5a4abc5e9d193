//! End-to-end acceptance suite. Each test prints one PASS/FAIL line.

use std::sync::Arc;

use nalgebra::{Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fieldfuse::blending::{
    blend_render, idw_weights, merge_ray_samples, strategy, BlendConfig, MassSample,
    RegisteredFieldSet,
};
use fieldfuse::fields::{
    propose_samples, Aabb, CompositeField, RadianceField, RaySample, UniformBoxField,
    UniformSphereField, VoxelGridField,
};
use fieldfuse::geometry::{Se3Pose, Sim3Transform};
use fieldfuse::harness::metrics::psnr;
use fieldfuse::registration::{
    look_at_pose, register_fields, PoseSamplerSettings, RenderSettings, SfmSimulator,
    SfmSimulatorConfig,
};
use fieldfuse::renderer::{composite, ray_for_pixel, render, Camera, RenderOutput};

fn verdict(id: u32, what: &str, ok: bool) {
    println!("acceptance {id}: {} - {what}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "acceptance criterion {id} failed: {what}");
}

fn random_sim3(rng: &mut ChaCha8Rng, scale_lo: f64, scale_hi: f64) -> Sim3Transform {
    let axis = Unit::new_normalize(Vector3::new(
        rng.gen::<f64>() - 0.5,
        rng.gen::<f64>() - 0.5,
        rng.gen::<f64>() - 0.5,
    ));
    let angle = rng.gen::<f64>() * std::f64::consts::PI;
    let rotation = *Rotation3::from_axis_angle(&axis, angle).matrix();
    let translation = Vector3::new(
        rng.gen::<f64>() * 2.0 - 1.0,
        rng.gen::<f64>() * 2.0 - 1.0,
        rng.gen::<f64>() * 2.0 - 1.0,
    );
    let scale = scale_lo + rng.gen::<f64>() * (scale_hi - scale_lo);
    Sim3Transform::new(Se3Pose::new(rotation, translation).unwrap(), scale).unwrap()
}

fn simulator(t_ba: &Sim3Transform, gauge: Sim3Transform, noisy: bool, seed: u64) -> SfmSimulator {
    let gauge_b = gauge.compose(t_ba);
    SfmSimulator::new(SfmSimulatorConfig {
        gauge_a: gauge,
        gauge_b,
        rotation_noise_deg: if noisy { 0.2 } else { 0.0 },
        translation_noise_frac: if noisy { 0.005 } else { 0.0 },
        outlier_frac: if noisy { 0.10 } else { 0.0 },
        dropout_frac: 0.0,
        seed,
    })
}

/// Criterion 1: noiseless registration round-trip over 50 seeds.
#[test]
fn acceptance_1_noiseless_registration() {
    let field = UniformSphereField::new(Vector3::zeros(), 0.6, 8.0, [0.8, 0.3, 0.2]);
    let rs = RenderSettings { width: 64, height: 64, ..Default::default() };
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..50u64 {
        let start = std::time::Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let t_ba = random_sim3(&mut rng, 0.3, 3.0);
        let gauge = random_sim3(&mut rng, 0.5, 2.0);
        let backend = simulator(&t_ba, gauge, false, seed);
        let sampler = PoseSamplerSettings { count: 32, seed, ..Default::default() };
        let reg = register_fields(&field, &field, &sampler, &rs, &backend, Some(&t_ba)).unwrap();
        let e = reg.error.unwrap();
        worst = (worst.0.max(e.r_err), worst.1.max(e.t_err), worst.2.max(e.s_err));
        assert!(start.elapsed().as_secs_f64() < 60.0, "seed {seed} exceeded 1 min");
    }
    verdict(
        1,
        &format!(
            "noiseless round-trip over 50 seeds: worst r_err {:.2e} deg, t_err {:.2e}, s_err {:.2e}",
            worst.0, worst.1, worst.2
        ),
        worst.0 < 1e-6 && worst.1 < 1e-9 && worst.2 < 1e-9,
    );
}

/// Criterion 2: robust registration medians over 100 seeds with 10% outliers
/// and 0.2 deg / 0.5%-radius Gaussian noise.
#[test]
fn acceptance_2_robust_registration() {
    let field = UniformSphereField::new(Vector3::zeros(), 0.6, 8.0, [0.8, 0.3, 0.2]);
    // The simulated backend never reads the pixels, so the query renders can
    // stay small without changing the estimate.
    let rs = RenderSettings { width: 16, height: 16, budget: 4, ..Default::default() };
    let mut r_errs = Vec::new();
    let mut s_errs = Vec::new();
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
        let t_ba = random_sim3(&mut rng, 0.3, 3.0);
        let gauge = random_sim3(&mut rng, 0.5, 2.0);
        let backend = simulator(&t_ba, gauge, true, seed);
        let sampler = PoseSamplerSettings { count: 32, seed, ..Default::default() };
        let reg = register_fields(&field, &field, &sampler, &rs, &backend, Some(&t_ba)).unwrap();
        let e = reg.error.unwrap();
        r_errs.push(e.r_err);
        s_errs.push(e.s_err);
    }
    r_errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s_errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (r_med, s_med) = (r_errs[50], s_errs[50]);
    verdict(
        2,
        &format!("robust medians over 100 seeds: r_err {r_med:.4} deg, s_err {s_med:.5}"),
        r_med < 0.5 && s_med < 0.01,
    );
}

/// Criterion 3: compositing identity on random sample sets and the analytic
/// silhouette area of an opaque sphere at 256x256.
#[test]
fn acceptance_3_renderer_oracle() {
    // Part one: sum p_k = 1 - prod(1 - alpha_k) to 1e-12.
    let mut rng = ChaCha8Rng::seed_from_u64(3000);
    let mut worst_dev = 0.0f64;
    for _ in 0..2000 {
        let n = rng.gen_range(1..40);
        let mut t = 0.1;
        let samples: Vec<RaySample> = (0..n)
            .map(|_| {
                let delta = 0.01 + rng.gen::<f64>() * 0.3;
                let s = RaySample {
                    t,
                    delta,
                    density: rng.gen::<f64>() * 8.0,
                    color: [rng.gen(), rng.gen(), rng.gen()],
                };
                t += delta + rng.gen::<f64>() * 0.1;
                s
            })
            .collect();
        let out = composite(&samples, 10.0).unwrap();
        let prod: f64 = samples.iter().map(|s| (-s.density * s.delta).exp()).product();
        worst_dev = worst_dev.max((out.accumulation - (1.0 - prod)).abs());
    }

    // Part two: opaque sphere of radius 1 at distance 4, f = 300. The
    // silhouette is a disc of pixel radius f * r / sqrt(D^2 - r^2).
    let sphere = UniformSphereField::new(Vector3::zeros(), 1.0, 1e4, [0.9, 0.9, 0.9]);
    let camera = Camera {
        pose: look_at_pose(&Vector3::new(0.0, 0.0, 4.0), &Vector3::zeros()).unwrap(),
        fx: 300.0,
        fy: 300.0,
        cx: 128.0,
        cy: 128.0,
        width: 256,
        height: 256,
        near: 0.5,
        far: 8.0,
    };
    let out = render(&sphere, &camera, 128, 7).unwrap();
    let count = out.accumulation.iter().filter(|a| **a > 0.5).count() as f64;
    let expected = std::f64::consts::PI * (300.0f64 / 15.0f64.sqrt()).powi(2);
    let rel = (count - expected).abs() / expected;
    verdict(
        3,
        &format!(
            "composite identity dev {worst_dev:.2e}; silhouette {count} px vs {expected:.0} ({:.2}%)",
            rel * 100.0
        ),
        worst_dev < 1e-12 && rel < 0.02,
    );
}

/// Criterion 4: per-field mass conservation over 10^4 random interval-set
/// pairs; merged intervals sorted and non-overlapping.
#[test]
fn acceptance_4_merge_conservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(4000);
    let random_set = |rng: &mut ChaCha8Rng| {
        let n = rng.gen_range(1..25);
        let mut t = rng.gen::<f64>();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let delta = 0.005 + rng.gen::<f64>() * 0.4;
            out.push(MassSample {
                t,
                delta,
                mass: rng.gen::<f64>() * 0.08,
                color: [rng.gen(), rng.gen(), rng.gen()],
            });
            t += delta + if rng.gen_bool(0.4) { rng.gen::<f64>() * 0.3 } else { 0.0 };
        }
        out
    };
    let mut worst = 0.0f64;
    let mut structure_ok = true;
    for _ in 0..10_000 {
        let a = random_set(&mut rng);
        let b = random_set(&mut rng);
        let merged = merge_ray_samples(&[a.clone(), b.clone()]);
        let in_a: f64 = a.iter().map(|s| s.mass).sum();
        let in_b: f64 = b.iter().map(|s| s.mass).sum();
        worst = worst.max((merged.total_mass(0) - in_a).abs());
        worst = worst.max((merged.total_mass(1) - in_b).abs());
        for w in merged.intervals.windows(2) {
            if w[1].0 < w[0].0 + w[0].1 - 1e-15 {
                structure_ok = false;
            }
        }
    }
    verdict(
        4,
        &format!("mass conserved over 10^4 pairs (worst dev {worst:.2e}), intervals ordered"),
        worst < 1e-12 && structure_ok,
    );
}

// ---------------------------------------------------------------------------
// Shared two-sphere scene with asymmetric per-field quality.
//
// Reference content: two opaque spheres at x = -0.8 (red, "A side") and
// x = +0.8 (blue, "B side"), a voxelized green blob above the origin, and a
// dark backdrop wall behind everything. Field A reconstructs its own sphere
// sharply but has a noisy voxel copy of the far sphere, independent noise on
// the shared blob, and a bright ghost floater near the far sphere. Field B
// mirrors this. The camera sits on the perpendicular bisector of the two
// field origins.
// ---------------------------------------------------------------------------

const X_A: [f64; 3] = [-0.8, 0.0, 0.0];
const X_B: [f64; 3] = [0.8, 0.0, 0.0];

fn vec3(v: [f64; 3]) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

struct OrderingScene {
    gt: Arc<dyn RadianceField>,
    field_a: Arc<dyn RadianceField>,
    field_b: Arc<dyn RadianceField>,
    camera: Camera,
}

fn ordering_scene() -> OrderingScene {
    let s1 = UniformSphereField::new(vec3(X_A), 0.35, 60.0, [0.85, 0.25, 0.2]);
    let s2 = UniformSphereField::new(vec3(X_B), 0.35, 60.0, [0.2, 0.45, 0.9]);
    let backdrop = UniformBoxField::new(
        Aabb::new(Vector3::new(-3.2, 2.4, -3.2), Vector3::new(3.2, 2.7, 3.2)),
        60.0,
        [0.22, 0.22, 0.28],
    );
    let blob = UniformSphereField::new(Vector3::new(0.0, 0.4, 0.0), 0.3, 60.0, [0.35, 0.8, 0.3]);
    let blob_bounds = Aabb::new(Vector3::new(-0.35, 0.05, -0.35), Vector3::new(0.35, 0.75, 0.35));
    let blob_base = VoxelGridField::from_field(&blob, [24; 3], blob_bounds);
    let blob_a = Arc::new(blob_base.clone().with_noise(0.25, 0.08, 21));
    let blob_b = Arc::new(blob_base.clone().with_noise(0.25, 0.08, 22));

    let s2_bounds = Aabb::new(Vector3::new(0.35, -0.45, -0.45), Vector3::new(1.25, 0.45, 0.45));
    let s2_noisy_a = Arc::new(VoxelGridField::from_field(&s2, [24; 3], s2_bounds).with_noise(0.3, 0.1, 23));
    let s1_bounds = Aabb::new(Vector3::new(-1.25, -0.45, -0.45), Vector3::new(-0.35, 0.45, 0.45));
    let s1_noisy_b = Arc::new(VoxelGridField::from_field(&s1, [24; 3], s1_bounds).with_noise(0.3, 0.1, 24));

    let ghost_a = UniformSphereField::new(Vector3::new(0.75, -0.1, 0.75), 0.28, 60.0, [0.95, 0.8, 0.2]);
    let ghost_b = UniformSphereField::new(Vector3::new(-0.75, -0.1, -0.75), 0.28, 60.0, [0.9, 0.3, 0.75]);

    let s1 = Arc::new(s1);
    let s2 = Arc::new(s2);
    let backdrop = Arc::new(backdrop);
    let blob_base = Arc::new(blob_base);
    let gt: Arc<dyn RadianceField> = Arc::new(
        CompositeField::new(vec![s1.clone(), s2.clone(), blob_base, backdrop.clone()]).unwrap(),
    );
    let field_a: Arc<dyn RadianceField> = Arc::new(
        CompositeField::new(vec![
            s1.clone(),
            s2_noisy_a,
            blob_a,
            Arc::new(ghost_a),
            backdrop.clone(),
        ])
        .unwrap(),
    );
    let field_b: Arc<dyn RadianceField> = Arc::new(
        CompositeField::new(vec![s1_noisy_b, s2, blob_b, Arc::new(ghost_b), backdrop]).unwrap(),
    );

    let camera = Camera {
        pose: look_at_pose(&Vector3::new(0.0, -3.5, 0.0), &Vector3::zeros()).unwrap(),
        fx: 120.0,
        fy: 120.0,
        cx: 48.0,
        cy: 48.0,
        width: 96,
        height: 96,
        near: 0.5,
        far: 8.0,
    };
    OrderingScene { gt, field_a, field_b, camera }
}

fn two_field_set(scene: &OrderingScene) -> RegisteredFieldSet {
    let mut set = RegisteredFieldSet::new();
    set.push("a", scene.field_a.clone(), Sim3Transform::identity(), Some(vec3(X_A)));
    set.push("b", scene.field_b.clone(), Sim3Transform::identity(), Some(vec3(X_B)));
    set
}

fn blend_with(scene: &OrderingScene, set: &RegisteredFieldSet, name: &str, gamma: f64, seed: u64) -> RenderOutput {
    let cfg =
        BlendConfig { strategy: name.into(), gamma, tau: 1.8, budget: 64, eps_mass: 1e-4 };
    blend_render(set, &scene.camera, &cfg, seed).unwrap()
}

/// Per-field merged ray data recomputed exactly the way the sample-wise
/// strategy derives it (same per-pixel stream for every field).
fn merged_for_pixel(
    scene: &OrderingScene,
    px: usize,
    py: usize,
    budget: usize,
    seed: u64,
) -> (Vector3<f64>, Vector3<f64>, fieldfuse::blending::MergedSampleSet) {
    let (o, dir) = ray_for_pixel(&scene.camera, px, py).unwrap();
    let per_field: Vec<Vec<MassSample>> = [&scene.field_a, &scene.field_b]
        .iter()
        .map(|f| {
            let mut rng = fieldfuse::rng::stream_rng(seed, &[px as u64, py as u64]);
            let samples = propose_samples(
                f.as_ref(),
                &o,
                &dir,
                scene.camera.near,
                scene.camera.far,
                budget,
                &mut rng,
            )
            .unwrap();
            let out = composite(&samples, scene.camera.far).unwrap();
            samples
                .iter()
                .zip(&out.weights)
                .map(|(s, p)| MassSample { t: s.t, delta: s.delta, mass: *p, color: s.color })
                .collect()
        })
        .collect();
    (o, dir, merge_ray_samples(&per_field))
}

/// Criterion 5: after step (ii), the rescaled weights satisfy
/// sum_k sum_i w p_bar = 1 to 1e-9 on every pixel with enough mass.
#[test]
fn acceptance_5_normalization() {
    let scene = ordering_scene();
    let seed = 50;
    let origins = [vec3(X_A), vec3(X_B)];
    let gamma = 5.0;
    let eps_mass = 1e-4;
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for py in 0..scene.camera.height {
        for px in 0..scene.camera.width {
            let (o, dir, merged) = merged_for_pixel(&scene, px, py, 64, seed);
            // Pre-normalization blended mass (step (i) weights only).
            let mut total = 0.0;
            for (k, (t, delta)) in merged.intervals.iter().enumerate() {
                let mid = o + (t + 0.5 * delta) * dir;
                let w = idw_weights(&[(origins[0] - mid).norm(), (origins[1] - mid).norm()], gamma);
                for i in 0..2 {
                    total += w[i] * merged.mass[i][k];
                }
            }
            if total < eps_mass {
                continue;
            }
            // Step (ii) rescales every weight by 1/total; re-accumulate with
            // the rescaled weights, fields outer, and compare against 1.
            let mut rescaled_sum = 0.0;
            for i in 0..2 {
                for (k, (t, delta)) in merged.intervals.iter().enumerate() {
                    let mid = o + (t + 0.5 * delta) * dir;
                    let w = idw_weights(
                        &[(origins[0] - mid).norm(), (origins[1] - mid).norm()],
                        gamma,
                    );
                    rescaled_sum += w[i] / total * merged.mass[i][k];
                }
            }
            worst = worst.max((rescaled_sum - 1.0).abs());
            checked += 1;
        }
    }
    let coverage = checked as f64 / (scene.camera.width * scene.camera.height) as f64;
    verdict(
        5,
        &format!(
            "step-(ii) weight sum within {worst:.2e} of 1 on {checked} pixels ({:.0}% of image)",
            coverage * 100.0
        ),
        worst < 1e-9 && coverage > 0.9,
    );
}

/// Criterion 6: gamma = 0 makes the image-wise blend the per-pixel mean, and
/// gamma = 500 makes the sample-wise blend bitwise equal to hard per-sample
/// nearest assignment.
#[test]
fn acceptance_6_limit_equivalences() {
    let scene = ordering_scene();
    let set = two_field_set(&scene);
    let seed = 60;

    // gamma -> 0: image-wise blend equals the mean image to 1e-9.
    let blended = blend_with(&scene, &set, "idw-2d", 0.0, seed);
    let ra = render(scene.field_a.as_ref(), &scene.camera, 64, seed).unwrap();
    let rb = render(scene.field_b.as_ref(), &scene.camera, 64, seed).unwrap();
    let mut mean_dev = 0.0f64;
    for (idx, p) in blended.color.pixels.iter().enumerate() {
        for c in 0..3 {
            let mean = 0.5 * (ra.color.pixels[idx][c] + rb.color.pixels[idx][c]);
            mean_dev = mean_dev.max((p[c] - mean).abs());
        }
    }

    // gamma = 500: sample-wise blend equals an independently coded hard
    // nearest assignment, bitwise.
    let hard = blend_with(&scene, &set, "idw-sample", 500.0, seed);
    let origins = [vec3(X_A), vec3(X_B)];
    let mut bitwise = true;
    for py in 0..scene.camera.height {
        for px in 0..scene.camera.width {
            let (o, dir, merged) = merged_for_pixel(&scene, px, py, 64, seed);
            let mut total = 0.0;
            let mut color = [0.0f64; 3];
            let mut depth_sum = 0.0;
            for (k, (t, delta)) in merged.intervals.iter().enumerate() {
                let mid_t = t + 0.5 * delta;
                let mid = o + mid_t * dir;
                let d0 = (origins[0] - mid).norm();
                let d1 = (origins[1] - mid).norm();
                assert_ne!(d0, d1, "scene must be tie-free at ({px},{py})");
                let winner = if d1 < d0 { 1 } else { 0 };
                let wm = merged.mass[winner][k];
                if wm == 0.0 {
                    continue;
                }
                total += wm;
                for c in 0..3 {
                    color[c] += wm * merged.color[winner][k][c];
                }
                depth_sum += wm * mid_t;
            }
            let idx = py * scene.camera.width + px;
            let (exp_color, exp_acc, exp_depth) = if total >= 1e-4 {
                (
                    [color[0] / total, color[1] / total, color[2] / total],
                    total.min(1.0),
                    depth_sum / total,
                )
            } else {
                ([0.0; 3], 0.0, scene.camera.far)
            };
            if hard.color.pixels[idx] != exp_color
                || hard.accumulation[idx] != exp_acc
                || hard.depth[idx] != exp_depth
            {
                bitwise = false;
            }
        }
    }
    verdict(
        6,
        &format!("gamma=0 mean dev {mean_dev:.2e}; gamma=500 hard assignment bitwise: {bitwise}"),
        mean_dev < 1e-9 && bitwise,
    );
}

/// Criterion 7: PSNR ordering IDW-Sample > IDW-2D >= Nearest > IDW-3D on the
/// constructed scene, and an interior gamma beats both sweep endpoints.
#[test]
fn acceptance_7_ordering_and_gamma_sweep() {
    let scene = ordering_scene();
    let set = two_field_set(&scene);
    let seed = 70;
    let gt = render(scene.gt.as_ref(), &scene.camera, 64, seed).unwrap();

    let mut scores = std::collections::BTreeMap::new();
    for name in ["nearest", "idw-2d", "idw-3d", "idw-sample"] {
        let out = blend_with(&scene, &set, name, 5.0, seed);
        scores.insert(name, psnr(&out.color, &gt.color).unwrap());
    }
    let ordering_ok = scores["idw-sample"] > scores["idw-2d"]
        && scores["idw-2d"] >= scores["nearest"]
        && scores["nearest"] > scores["idw-3d"];

    let grid = fieldfuse::harness::geometric_grid(0.01, 1000.0, 20);
    let sweep: Vec<f64> = grid
        .iter()
        .map(|g| {
            let out = blend_with(&scene, &set, "idw-sample", *g, seed);
            psnr(&out.color, &gt.color).unwrap()
        })
        .collect();
    let interior_best = sweep[1..19].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sweep_ok = interior_best > sweep[0] && interior_best > sweep[19];

    verdict(
        7,
        &format!(
            "psnr sample {:.2} > 2d {:.2} >= nearest {:.2} > 3d {:.2}: {ordering_ok}; \
             gamma sweep interior {interior_best:.2} vs endpoints {:.2}/{:.2}: {sweep_ok}",
            scores["idw-sample"], scores["idw-2d"], scores["nearest"], scores["idw-3d"],
            sweep[0], sweep[19]
        ),
        ordering_ok && sweep_ok,
    );
}

/// Criterion 8: blending through the transform estimated under criterion-2
/// noise loses < 0.3 dB against blending with the ground-truth transform.
#[test]
fn acceptance_8_compound_pipeline() {
    let scene = ordering_scene();
    let seed = 80;

    // Criterion-8 field pair: both spheres and the blob are noisy voxel
    // reconstructions in both fields, so the comparison has the error budget
    // of a realistic reconstruction rather than an analytically perfect one.
    let s1 = UniformSphereField::new(vec3(X_A), 0.35, 60.0, [0.85, 0.25, 0.2]);
    let s2 = UniformSphereField::new(vec3(X_B), 0.35, 60.0, [0.2, 0.45, 0.9]);
    let blob = UniformSphereField::new(Vector3::new(0.0, 0.4, 0.0), 0.3, 60.0, [0.35, 0.8, 0.3]);
    let s1_bounds = Aabb::new(Vector3::new(-1.25, -0.45, -0.45), Vector3::new(-0.35, 0.45, 0.45));
    let s2_bounds = Aabb::new(Vector3::new(0.35, -0.45, -0.45), Vector3::new(1.25, 0.45, 0.45));
    let blob_bounds = Aabb::new(Vector3::new(-0.35, 0.05, -0.35), Vector3::new(0.35, 0.75, 0.35));
    let noisy = |field: &dyn RadianceField, bounds: Aabb, noise_seed: u64| -> Arc<dyn RadianceField> {
        Arc::new(VoxelGridField::from_field(field, [24; 3], bounds).with_noise(0.5, 0.18, noise_seed))
    };
    let field_a8: Arc<dyn RadianceField> = Arc::new(
        CompositeField::new(vec![
            noisy(&s1, s1_bounds, 81),
            noisy(&s2, s2_bounds, 82),
            noisy(&blob, blob_bounds, 83),
        ])
        .unwrap(),
    );
    let field_b8: Arc<dyn RadianceField> = Arc::new(
        CompositeField::new(vec![
            noisy(&s1, s1_bounds, 84),
            noisy(&s2, s2_bounds, 85),
            noisy(&blob, blob_bounds, 86),
        ])
        .unwrap(),
    );
    let gt8: Arc<dyn RadianceField> = Arc::new(
        CompositeField::new(vec![
            Arc::new(UniformSphereField::new(vec3(X_A), 0.35, 60.0, [0.85, 0.25, 0.2])),
            Arc::new(UniformSphereField::new(vec3(X_B), 0.35, 60.0, [0.2, 0.45, 0.9])),
            Arc::new(VoxelGridField::from_field(&blob, [24; 3], blob_bounds)),
        ])
        .unwrap(),
    );

    let axis = Unit::new_normalize(Vector3::new(0.3, 0.8, 0.5));
    let t_ba = Sim3Transform::new(
        Se3Pose::new(
            *Rotation3::from_axis_angle(&axis, 8.0f64.to_radians()).matrix(),
            Vector3::new(0.25, -0.15, 0.1),
        )
        .unwrap(),
        1.15,
    )
    .unwrap();
    // Field B's content expressed in B's own (misplaced) frame.
    let b_local = fieldfuse::fields::field_in_frame(field_b8.clone(), t_ba.inverse());

    let backend = simulator(&t_ba, random_sim3(&mut ChaCha8Rng::seed_from_u64(808), 0.5, 2.0), true, seed);
    let sampler = PoseSamplerSettings { count: 32, seed, ..Default::default() };
    let rs = RenderSettings { width: 32, height: 32, budget: 8, ..Default::default() };
    let reg = register_fields(
        field_a8.as_ref(),
        b_local.as_ref(),
        &sampler,
        &rs,
        &backend,
        Some(&t_ba),
    )
    .unwrap();
    let t_hat = reg.t_ba.clone();
    let reg_err = reg.error.unwrap();

    let x_b_local = t_ba.inverse().apply(&vec3(X_B));
    let mut set_gt = RegisteredFieldSet::new();
    set_gt.push("a", field_a8.clone(), Sim3Transform::identity(), Some(vec3(X_A)));
    set_gt.push("b", b_local.clone(), t_ba.clone(), Some(t_ba.apply(&x_b_local)));
    let mut set_est = RegisteredFieldSet::new();
    set_est.push("a", field_a8.clone(), Sim3Transform::identity(), Some(vec3(X_A)));
    set_est.push("b", b_local.clone(), t_hat.clone(), Some(t_hat.apply(&x_b_local)));

    let gt = render(gt8.as_ref(), &scene.camera, 64, seed).unwrap();
    let p_gt = psnr(&blend_with(&scene, &set_gt, "idw-sample", 5.0, seed).color, &gt.color).unwrap();
    let p_est =
        psnr(&blend_with(&scene, &set_est, "idw-sample", 5.0, seed).color, &gt.color).unwrap();
    let gap = p_gt - p_est;
    verdict(
        8,
        &format!(
            "estimated transform (r_err {:.3} deg, t_err {:.4}, s_err {:.4}) blend {p_est:.2} dB \
             vs ground-truth blend {p_gt:.2} dB, gap {gap:.3} dB",
            reg_err.r_err, reg_err.t_err, reg_err.s_err
        ),
        gap < 0.3,
    );
}

/// Criterion 9 lives in tests/cli.rs (byte-identical artifacts across reruns
/// of every CLI command); this placeholder keeps the numbering visible here.
#[test]
fn acceptance_9_see_cli_tests() {
    // Strategy lookup shared by the CLI is exercised here so the file stays
    // self-contained; the byte-identity check needs the compiled binary.
    for name in ["nearest", "idw-2d", "idw-3d", "idw-sample"] {
        assert!(strategy(name).is_ok());
    }
    println!("acceptance 9: see tests/cli.rs (cli_rerun_byte_identical)");
}
