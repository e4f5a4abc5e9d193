//! Analytic field implementations with exactly known geometry.

use std::sync::Arc;

use nalgebra::Vector3;

use super::{Aabb, FieldSample, RadianceField};

/// Constant density and color inside a sphere, zero outside.
#[derive(Debug, Clone)]
pub struct UniformSphereField {
    pub center: Vector3<f64>,
    pub radius: f64,
    pub density: f64,
    pub color: [f64; 3],
}

impl UniformSphereField {
    pub fn new(center: Vector3<f64>, radius: f64, density: f64, color: [f64; 3]) -> Self {
        Self { center, radius, density, color }
    }
}

impl RadianceField for UniformSphereField {
    fn query(&self, point: &Vector3<f64>, _direction: &Vector3<f64>) -> FieldSample {
        if (point - self.center).norm_squared() <= self.radius * self.radius {
            FieldSample { density: self.density, color: self.color }
        } else {
            FieldSample::EMPTY
        }
    }

    fn bounds(&self) -> Aabb {
        let r = Vector3::repeat(self.radius);
        Aabb::new(self.center - r, self.center + r)
    }

    fn origin(&self) -> Vector3<f64> {
        self.center
    }
}

/// Constant density and color inside an axis-aligned box.
#[derive(Debug, Clone)]
pub struct UniformBoxField {
    pub bounds: Aabb,
    pub density: f64,
    pub color: [f64; 3],
}

impl UniformBoxField {
    pub fn new(bounds: Aabb, density: f64, color: [f64; 3]) -> Self {
        Self { bounds, density, color }
    }
}

impl RadianceField for UniformBoxField {
    fn query(&self, point: &Vector3<f64>, _direction: &Vector3<f64>) -> FieldSample {
        if self.bounds.contains(point) {
            FieldSample { density: self.density, color: self.color }
        } else {
            FieldSample::EMPTY
        }
    }

    fn bounds(&self) -> Aabb {
        self.bounds
    }
}

/// Isotropic Gaussian density bump, truncated at its bounds box (3 sigma) so
/// the zero-outside-bounds invariant holds.
#[derive(Debug, Clone)]
pub struct GaussianBlobField {
    pub center: Vector3<f64>,
    pub peak_density: f64,
    pub spread: f64,
    pub color: [f64; 3],
}

impl GaussianBlobField {
    pub fn new(center: Vector3<f64>, peak_density: f64, spread: f64, color: [f64; 3]) -> Self {
        Self { center, peak_density, spread, color }
    }
}

impl RadianceField for GaussianBlobField {
    fn query(&self, point: &Vector3<f64>, _direction: &Vector3<f64>) -> FieldSample {
        if !self.bounds().contains(point) {
            return FieldSample::EMPTY;
        }
        let d2 = (point - self.center).norm_squared();
        let density = self.peak_density * (-0.5 * d2 / (self.spread * self.spread)).exp();
        FieldSample { density, color: self.color }
    }

    fn bounds(&self) -> Aabb {
        let r = Vector3::repeat(3.0 * self.spread);
        Aabb::new(self.center - r, self.center + r)
    }

    fn origin(&self) -> Vector3<f64> {
        self.center
    }
}

/// Sum of member fields: densities add, colors are density-weighted.
#[derive(Clone)]
pub struct CompositeField {
    parts: Vec<Arc<dyn RadianceField>>,
    bounds: Aabb,
}

impl CompositeField {
    pub fn new(parts: Vec<Arc<dyn RadianceField>>) -> crate::Result<Self> {
        if parts.is_empty() {
            return Err(crate::Error::InvalidField(
                "composite field needs at least one part".into(),
            ));
        }
        let bounds = parts
            .iter()
            .map(|p| p.bounds())
            .reduce(|a, b| a.union(&b))
            .unwrap();
        Ok(Self { parts, bounds })
    }

    pub fn parts(&self) -> &[Arc<dyn RadianceField>] {
        &self.parts
    }
}

impl RadianceField for CompositeField {
    fn query(&self, point: &Vector3<f64>, direction: &Vector3<f64>) -> FieldSample {
        let mut density = 0.0;
        let mut color = [0.0; 3];
        for part in &self.parts {
            let s = part.query(point, direction);
            density += s.density;
            for c in 0..3 {
                color[c] += s.density * s.color[c];
            }
        }
        if density > 0.0 {
            for c in color.iter_mut() {
                *c /= density;
            }
        }
        FieldSample { density, color }
    }

    fn bounds(&self) -> Aabb {
        self.bounds
    }
}
