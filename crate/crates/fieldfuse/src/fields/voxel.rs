//! Voxel-grid field: trilinear density interpolation between cell centers,
//! nearest-cell color.
//!
//! Binary interchange format: little-endian header of 3 x u32 (resolution),
//! then `nx*ny*nz` records of 4 x f32 `(sigma, r, g, b)`, x-fastest.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use nalgebra::Vector3;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

use super::{Aabb, FieldSample, RadianceField};

#[derive(Clone)]
pub struct VoxelGridField {
    resolution: [usize; 3],
    bounds: Aabb,
    data: Vec<FieldSample>,
}

impl VoxelGridField {
    pub fn new(resolution: [usize; 3], bounds: Aabb, data: Vec<FieldSample>) -> Result<Self> {
        let n = resolution[0] * resolution[1] * resolution[2];
        if n == 0 {
            return Err(Error::InvalidField("voxel grid resolution must be positive".into()));
        }
        if data.len() != n {
            return Err(Error::InvalidField(format!(
                "voxel grid data length {} does not match resolution {:?}",
                data.len(),
                resolution
            )));
        }
        Ok(Self { resolution, bounds, data })
    }

    /// Build by sampling another field at cell centers.
    pub fn from_field(field: &dyn RadianceField, resolution: [usize; 3], bounds: Aabb) -> Self {
        let dir = Vector3::new(0.0, 0.0, -1.0);
        let size = bounds.size();
        let mut data = Vec::with_capacity(resolution[0] * resolution[1] * resolution[2]);
        for k in 0..resolution[2] {
            for j in 0..resolution[1] {
                for i in 0..resolution[0] {
                    let p = Vector3::new(
                        bounds.min.x + (i as f64 + 0.5) / resolution[0] as f64 * size.x,
                        bounds.min.y + (j as f64 + 0.5) / resolution[1] as f64 * size.y,
                        bounds.min.z + (k as f64 + 0.5) / resolution[2] as f64 * size.z,
                    );
                    data.push(field.query(&p, &dir));
                }
            }
        }
        Self { resolution, bounds, data }
    }

    /// Apply zero-mean Gaussian perturbation to occupied cells, mimicking
    /// reconstruction noise. Density noise is relative, color noise absolute;
    /// results are clamped to valid ranges.
    pub fn with_noise(mut self, density_rel_std: f64, color_std: f64, seed: u64) -> Self {
        let mut rng = crate::rng::stream_rng(seed, &[0x766f_7865]);
        let unit = Normal::new(0.0, 1.0).unwrap();
        for s in &mut self.data {
            if s.density <= 0.0 {
                continue;
            }
            let d: f64 = unit.sample(&mut rng);
            s.density = (s.density * (1.0 + density_rel_std * d)).max(0.0);
            for c in s.color.iter_mut() {
                let n: f64 = unit.sample(&mut rng);
                *c = (*c + color_std * n).clamp(0.0, 1.0);
            }
        }
        self
    }

    pub fn resolution(&self) -> [usize; 3] {
        self.resolution
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.resolution[1] + j) * self.resolution[0] + i
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        for r in self.resolution {
            w.write_all(&(r as u32).to_le_bytes())?;
        }
        for s in &self.data {
            w.write_all(&(s.density as f32).to_le_bytes())?;
            for c in s.color {
                w.write_all(&(c as f32).to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Load from the binary format; bounds are supplied by the caller (they
    /// live in the scene config, not the file).
    pub fn load(path: &Path, bounds: Aabb) -> Result<Self> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut u = [0u8; 4];
        let mut resolution = [0usize; 3];
        for res in resolution.iter_mut() {
            r.read_exact(&mut u)?;
            *res = u32::from_le_bytes(u) as usize;
        }
        let n = resolution[0] * resolution[1] * resolution[2];
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            let mut rec = [0f32; 4];
            for v in rec.iter_mut() {
                r.read_exact(&mut u)?;
                *v = f32::from_le_bytes(u);
            }
            data.push(FieldSample {
                density: rec[0] as f64,
                color: [rec[1] as f64, rec[2] as f64, rec[3] as f64],
            });
        }
        Self::new(resolution, bounds, data)
    }
}

impl RadianceField for VoxelGridField {
    fn query(&self, point: &Vector3<f64>, _direction: &Vector3<f64>) -> FieldSample {
        if !self.bounds.contains(point) {
            return FieldSample::EMPTY;
        }
        let size = self.bounds.size();
        // Continuous cell-center coordinates.
        let mut u = [0.0f64; 3];
        for a in 0..3 {
            u[a] = (point[a] - self.bounds.min[a]) / size[a] * self.resolution[a] as f64 - 0.5;
        }

        // Nearest cell for color.
        let ni = (0..3)
            .map(|a| (u[a].round().max(0.0) as usize).min(self.resolution[a] - 1))
            .collect::<Vec<_>>();
        let color = self.data[self.index(ni[0], ni[1], ni[2])].color;

        // Trilinear density, clamped to the edge cells.
        let mut i0 = [0usize; 3];
        let mut f = [0.0f64; 3];
        for a in 0..3 {
            let lo = u[a].floor().clamp(0.0, (self.resolution[a] - 1) as f64);
            i0[a] = lo as usize;
            f[a] = (u[a] - lo).clamp(0.0, 1.0);
        }
        let i1 = [
            (i0[0] + 1).min(self.resolution[0] - 1),
            (i0[1] + 1).min(self.resolution[1] - 1),
            (i0[2] + 1).min(self.resolution[2] - 1),
        ];
        let mut density = 0.0;
        for (dz, kz) in [(0, i0[2]), (1, i1[2])] {
            let wz = if dz == 0 { 1.0 - f[2] } else { f[2] };
            for (dy, ky) in [(0, i0[1]), (1, i1[1])] {
                let wy = if dy == 0 { 1.0 - f[1] } else { f[1] };
                for (dx, kx) in [(0, i0[0]), (1, i1[0])] {
                    let wx = if dx == 0 { 1.0 - f[0] } else { f[0] };
                    density += wx * wy * wz * self.data[self.index(kx, ky, kz)].density;
                }
            }
        }
        FieldSample { density, color }
    }

    fn bounds(&self) -> Aabb {
        self.bounds
    }
}

/// Convenience: voxelize an analytic field, optionally with noise.
pub fn voxelize(
    field: &dyn RadianceField,
    resolution: usize,
    bounds: Aabb,
) -> Arc<VoxelGridField> {
    Arc::new(VoxelGridField::from_field(field, [resolution; 3], bounds))
}
