//! Querying a field through a SIM(3) transform without modifying it.

use std::sync::Arc;

use nalgebra::Vector3;

use crate::geometry::Sim3Transform;

use super::{Aabb, FieldSample, RadianceField};

/// A field placed into another frame by a SIM(3) transform.
///
/// `query(p, d)` evaluates the inner field at `T^-1 p` with the direction
/// rotated by `T^-1`. Density is rescaled by `1/scale` so that interval
/// opacities `sigma * delta` are invariant under the change of units.
pub struct TransformedField {
    inner: Arc<dyn RadianceField>,
    transform: Sim3Transform,
    inverse: Sim3Transform,
    bounds: Aabb,
    origin: Vector3<f64>,
}

impl TransformedField {
    pub fn new(inner: Arc<dyn RadianceField>, transform: Sim3Transform) -> Self {
        let inverse = transform.inverse();
        let corners = inner.bounds().corners();
        let mut min = transform.apply(&corners[0]);
        let mut max = min;
        for c in &corners[1..] {
            let p = transform.apply(c);
            min = min.inf(&p);
            max = max.sup(&p);
        }
        let origin = transform.apply(&inner.origin());
        Self { inner, transform, inverse, bounds: Aabb::new(min, max), origin }
    }

    pub fn transform(&self) -> &Sim3Transform {
        &self.transform
    }
}

impl RadianceField for TransformedField {
    fn query(&self, point: &Vector3<f64>, direction: &Vector3<f64>) -> FieldSample {
        let p = self.inverse.apply(point);
        let d = self.inverse.rotate(direction);
        let s = self.inner.query(&p, &d);
        FieldSample { density: s.density / self.transform.scale(), color: s.color }
    }

    fn bounds(&self) -> Aabb {
        self.bounds
    }

    fn origin(&self) -> Vector3<f64> {
        self.origin
    }
}

/// Wrap a field so it can be queried in another frame.
pub fn field_in_frame(
    field: Arc<dyn RadianceField>,
    transform: Sim3Transform,
) -> Arc<dyn RadianceField> {
    Arc::new(TransformedField::new(field, transform))
}

/// A field with its IDW reference center overridden.
pub struct OriginOverride {
    inner: Arc<dyn RadianceField>,
    origin: Vector3<f64>,
}

impl OriginOverride {
    pub fn new(inner: Arc<dyn RadianceField>, origin: Vector3<f64>) -> Self {
        Self { inner, origin }
    }
}

impl RadianceField for OriginOverride {
    fn query(&self, point: &Vector3<f64>, direction: &Vector3<f64>) -> FieldSample {
        self.inner.query(point, direction)
    }

    fn bounds(&self) -> Aabb {
        self.inner.bounds()
    }

    fn origin(&self) -> Vector3<f64> {
        self.origin
    }
}
