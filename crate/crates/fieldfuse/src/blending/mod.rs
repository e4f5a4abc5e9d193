//! Novel-view synthesis from registered fields.
//!
//! Every weighting strategy lives behind the [`BlendStrategy`] trait and is
//! looked up by name in a static registry, so the CLI and scene config can
//! select variants at runtime:
//!
//! * `nearest`   - render only the field closest to the camera
//! * `idw-2d`    - image-wise inverse-distance weighting
//! * `idw-3d`    - pixel-wise weighting from each field's expected depth
//! * `idw-sample` - sample-wise weighting on the merged ray samples
//!
//! A per-image distance test decides whether blending is worthwhile at all;
//! when the second-closest field is too far, only the nearest one renders.

mod merge;
mod strategies;
mod weights;

pub use merge::{merge_ray_samples, MassSample, MergedSampleSet};
pub use strategies::{blend_pixel_idw_sample, BlendedPixel, IdwSample, Idw2d, Idw3d, Nearest};
pub use weights::{idw_weights, GAMMA_HARD_ASSIGN};

use std::sync::Arc;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::fields::{field_in_frame, RadianceField};
use crate::geometry::Sim3Transform;
use crate::renderer::{render, Camera, RenderOutput};

/// Strategy selector and blending parameters.
#[derive(Debug, Clone)]
pub struct BlendConfig {
    pub strategy: String,
    /// Blending rate; larger values concentrate weight on the nearest field.
    /// Zero is accepted as the mean-image limit.
    pub gamma: f64,
    /// Distance-test threshold, >= 1.
    pub tau: f64,
    /// Sample budget per field per ray.
    pub budget: usize,
    /// Pre-normalization mass below which a pixel renders as empty.
    pub eps_mass: f64,
}

impl Default for BlendConfig {
    fn default() -> Self {
        Self::indoor()
    }
}

impl BlendConfig {
    /// Object-centric indoor defaults: tau = 1.8, gamma = 5.
    pub fn indoor() -> Self {
        Self { strategy: "idw-sample".into(), gamma: 5.0, tau: 1.8, budget: 64, eps_mass: 1e-4 }
    }

    /// Street-scene defaults: tau = 1.2, gamma = 10.
    pub fn mission_bay() -> Self {
        Self { strategy: "idw-sample".into(), gamma: 10.0, tau: 1.2, budget: 64, eps_mass: 1e-4 }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "indoor" => Some(Self::indoor()),
            "mission-bay" => Some(Self::mission_bay()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma {} must be >= 0", self.gamma)));
        }
        if !(self.tau >= 1.0) {
            return Err(Error::InvalidArgument(format!("tau {} must be >= 1", self.tau)));
        }
        if self.budget < 2 {
            return Err(Error::InvalidArgument("budget must be >= 2".into()));
        }
        if !(self.eps_mass > 0.0) {
            return Err(Error::InvalidArgument("eps_mass must be positive".into()));
        }
        Ok(())
    }
}

/// One field registered into the reference frame.
pub struct RegisteredField {
    pub name: String,
    /// The field queried through its transform, in the reference frame.
    pub wrapped: Arc<dyn RadianceField>,
    pub to_reference: Sim3Transform,
    /// Field center `x_i` expressed in the reference frame.
    pub origin: Vector3<f64>,
}

/// Reference field A plus any number of fields registered into A's frame.
pub struct RegisteredFieldSet {
    pub fields: Vec<RegisteredField>,
}

impl RegisteredFieldSet {
    pub fn new() -> Self {
        Self { fields: Vec::new() }
    }

    pub fn push(
        &mut self,
        name: impl Into<String>,
        field: Arc<dyn RadianceField>,
        to_reference: Sim3Transform,
        origin_override: Option<Vector3<f64>>,
    ) {
        let wrapped = if to_reference == Sim3Transform::identity() {
            field.clone()
        } else {
            field_in_frame(field.clone(), to_reference.clone())
        };
        let origin = origin_override.unwrap_or_else(|| wrapped.origin());
        self.fields.push(RegisteredField { name: name.into(), wrapped, to_reference, origin });
    }

    pub fn origins(&self) -> Vec<Vector3<f64>> {
        self.fields.iter().map(|f| f.origin).collect()
    }
}

impl Default for RegisteredFieldSet {
    fn default() -> Self {
        Self::new()
    }
}

/// Outcome of the per-image distance test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceDecision {
    Blend,
    UseNearest(usize),
}

/// Ratio test on the two smallest camera-to-origin distances.
///
/// A camera coincident with an origin (d < 1e-12) trivially selects that
/// field. Argmin ties break toward the lowest field index.
pub fn distance_test(
    camera_center: &Vector3<f64>,
    origins: &[Vector3<f64>],
    tau: f64,
) -> DistanceDecision {
    debug_assert!(origins.len() >= 2);
    let d: Vec<f64> = origins.iter().map(|o| (o - camera_center).norm()).collect();
    let mut nearest = 0;
    for (i, di) in d.iter().enumerate() {
        if *di < d[nearest] {
            nearest = i;
        }
    }
    if d[nearest] < 1e-12 {
        return DistanceDecision::UseNearest(nearest);
    }
    let mut second = f64::INFINITY;
    for (i, di) in d.iter().enumerate() {
        if i != nearest && *di < second {
            second = *di;
        }
    }
    if second / d[nearest] > tau {
        DistanceDecision::UseNearest(nearest)
    } else {
        DistanceDecision::Blend
    }
}

/// Strategy interface; implementations receive the (already distance-test
/// filtered) fields participating in the blend.
pub trait BlendStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn render(
        &self,
        fields: &[&RegisteredField],
        camera: &Camera,
        cfg: &BlendConfig,
        seed: u64,
    ) -> Result<RenderOutput>;
}

static STRATEGIES: &[&dyn BlendStrategy] = &[&Nearest, &Idw2d, &Idw3d, &IdwSample];

/// Look up a strategy by its registered name.
pub fn strategy(name: &str) -> Result<&'static dyn BlendStrategy> {
    STRATEGIES
        .iter()
        .find(|s| s.name() == name)
        .copied()
        .ok_or_else(|| Error::UnknownStrategy(name.to_string()))
}

pub fn strategy_names() -> Vec<&'static str> {
    STRATEGIES.iter().map(|s| s.name()).collect()
}

/// Render a novel view from a registered field set.
///
/// A single registered field renders through the plain renderer (bitwise
/// identical to [`render`]). Otherwise the distance test either selects the
/// nearest field or dispatches to the configured strategy with every field
/// whose distance ratio to the nearest is within tau.
pub fn blend_render(
    set: &RegisteredFieldSet,
    camera: &Camera,
    cfg: &BlendConfig,
    seed: u64,
) -> Result<RenderOutput> {
    cfg.validate()?;
    camera.validate()?;
    if set.fields.is_empty() {
        return Err(Error::InvalidArgument("no registered fields".into()));
    }
    if set.fields.len() == 1 {
        return render(set.fields[0].wrapped.as_ref(), camera, cfg.budget, seed);
    }
    let origins = set.origins();
    let center = camera.center();
    match distance_test(&center, &origins, cfg.tau) {
        DistanceDecision::UseNearest(i) => {
            render(set.fields[i].wrapped.as_ref(), camera, cfg.budget, seed)
        }
        DistanceDecision::Blend => {
            let d: Vec<f64> = origins.iter().map(|o| (o - center).norm()).collect();
            let d_min = d.iter().cloned().fold(f64::INFINITY, f64::min);
            let participating: Vec<&RegisteredField> = set
                .fields
                .iter()
                .zip(&d)
                .filter(|(_, di)| **di / d_min <= cfg.tau)
                .map(|(f, _)| f)
                .collect();
            if participating.len() == 1 {
                return render(participating[0].wrapped.as_ref(), camera, cfg.budget, seed);
            }
            strategy(&cfg.strategy)?.render(&participating, camera, cfg, seed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_all_strategies() {
        let names = strategy_names();
        assert_eq!(names, vec!["nearest", "idw-2d", "idw-3d", "idw-sample"]);
        for n in names {
            assert_eq!(strategy(n).unwrap().name(), n);
        }
        assert!(matches!(strategy("bogus"), Err(Error::UnknownStrategy(_))));
    }

    #[test]
    fn distance_test_cases() {
        let o = [Vector3::new(1.0, 0.0, 0.0), Vector3::new(-1.0, 0.0, 0.0)];
        let c = Vector3::zeros();
        // equal distances -> blend for any tau >= 1
        assert_eq!(distance_test(&c, &o, 1.0), DistanceDecision::Blend);
        assert_eq!(distance_test(&c, &o, 5.0), DistanceDecision::Blend);
        // d = (1, 3), tau = 1.8 -> nearest wins
        let c2 = Vector3::new(2.0, 0.0, 0.0);
        assert_eq!(distance_test(&c2, &o, 1.8), DistanceDecision::UseNearest(0));
        // d = (1, 0.9), ratio 1.11, tau = 1.8 -> blend
        let o2 = [Vector3::new(1.0, 0.0, 0.0), Vector3::new(-0.9, 0.0, 0.0)];
        assert_eq!(distance_test(&Vector3::zeros(), &o2, 1.8), DistanceDecision::Blend);
        // camera on an origin -> that field trivially wins
        assert_eq!(
            distance_test(&o[1], &o, 1.8),
            DistanceDecision::UseNearest(1)
        );
    }

    #[test]
    fn config_validation() {
        let mut cfg = BlendConfig::indoor();
        assert!(cfg.validate().is_ok());
        cfg.tau = 0.5;
        assert!(cfg.validate().is_err());
        cfg = BlendConfig::indoor();
        cfg.gamma = -1.0;
        assert!(cfg.validate().is_err());
        cfg = BlendConfig::indoor();
        cfg.gamma = 0.0;
        assert!(cfg.validate().is_ok(), "gamma 0 is the mean-image limit");
    }

    #[test]
    fn presets_match_reported_defaults() {
        let indoor = BlendConfig::preset("indoor").unwrap();
        assert_eq!((indoor.tau, indoor.gamma), (1.8, 5.0));
        let mb = BlendConfig::preset("mission-bay").unwrap();
        assert_eq!((mb.tau, mb.gamma), (1.2, 10.0));
    }
}
