//! Pluggable radiance fields standing in for trained neural fields.
//!
//! A [`RadianceField`] maps a 3D point and view direction to density and
//! color. Implementations are immutable after construction and queryable from
//! many threads. All of them return zero density outside their bounds.

use nalgebra::Vector3;

mod analytic;
mod sampling;
mod transformed;
mod voxel;

pub use analytic::{CompositeField, GaussianBlobField, UniformBoxField, UniformSphereField};
pub use sampling::propose_samples;
pub use transformed::{field_in_frame, OriginOverride, TransformedField};
pub use voxel::{voxelize, VoxelGridField};

/// Density and color at one query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    /// Volume density, 1/world-unit, non-negative.
    pub density: f64,
    /// RGB, each channel in [0, 1].
    pub color: [f64; 3],
}

impl FieldSample {
    pub const EMPTY: FieldSample = FieldSample { density: 0.0, color: [0.0; 3] };
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl Aabb {
    pub fn new(min: Vector3<f64>, max: Vector3<f64>) -> Self {
        Self { min, max }
    }

    pub fn center(&self) -> Vector3<f64> {
        0.5 * (self.min + self.max)
    }

    pub fn size(&self) -> Vector3<f64> {
        self.max - self.min
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    pub fn corners(&self) -> [Vector3<f64>; 8] {
        let (a, b) = (self.min, self.max);
        [
            Vector3::new(a.x, a.y, a.z),
            Vector3::new(b.x, a.y, a.z),
            Vector3::new(a.x, b.y, a.z),
            Vector3::new(b.x, b.y, a.z),
            Vector3::new(a.x, a.y, b.z),
            Vector3::new(b.x, a.y, b.z),
            Vector3::new(a.x, b.y, b.z),
            Vector3::new(b.x, b.y, b.z),
        ]
    }
}

/// A queryable density + color function over a bounded domain.
///
/// `query` must be deterministic and return zero density outside `bounds`.
/// The direction argument is accepted so that view-dependent fields can be
/// added; the built-in analytic fields ignore it.
pub trait RadianceField: Send + Sync {
    fn query(&self, point: &Vector3<f64>, direction: &Vector3<f64>) -> FieldSample;

    fn bounds(&self) -> Aabb;

    /// The field's center `x_i`, used as the IDW distance reference.
    fn origin(&self) -> Vector3<f64> {
        self.bounds().center()
    }
}

/// One sampled interval along a ray.
///
/// Within a set, intervals are sorted by `t` and non-overlapping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySample {
    /// Distance of the interval start from the ray origin.
    pub t: f64,
    /// Interval length, > 0.
    pub delta: f64,
    pub density: f64,
    pub color: [f64; 3],
}

impl RaySample {
    pub fn midpoint(&self) -> f64 {
        self.t + 0.5 * self.delta
    }
}
