//! Line-oriented scene-config format.
//!
//! Grammar (documented in the repository README):
//!
//! ```text
//! file     := (line NEWLINE)*
//! line     := blank | comment | open | close | entry
//! comment  := '#' ...
//! open     := name [label] '{'        ; starts a nested section
//! close    := '}'
//! entry    := key value*              ; whitespace-separated tokens
//! ```
//!
//! Sections nest arbitrarily; keys and section names are bare tokens. The
//! format round-trips: parse -> serialize -> parse yields an identical
//! structure. SIM(3) transforms embed as 16 row-major numbers with the scale
//! folded into the rotation block and recovered by column-norm extraction.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::{Matrix4, Vector3};

use crate::blending::{strategy, BlendConfig};
use crate::error::{Error, Result};
use crate::fields::{
    Aabb, CompositeField, GaussianBlobField, RadianceField, UniformBoxField, UniformSphereField,
    VoxelGridField,
};
use crate::geometry::Sim3Transform;
use crate::registration::{PoseSamplerSettings, RenderSettings};
use crate::renderer::Camera;

/// One `key value...` line inside a section.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub values: Vec<String>,
    pub line: usize,
}

/// A named section with optional label, entries, and nested sections.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub label: Option<String>,
    pub entries: Vec<Entry>,
    pub children: Vec<Section>,
    pub line: usize,
}

impl Section {
    fn new(name: &str, label: Option<&str>, line: usize) -> Self {
        Self {
            name: name.to_string(),
            label: label.map(str::to_string),
            entries: Vec::new(),
            children: Vec::new(),
            line,
        }
    }

    pub fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn child(&self, name: &str) -> Option<&Section> {
        self.children.iter().find(|c| c.name == name)
    }

    /// Copy with all line numbers cleared, for structural comparison.
    pub fn normalized(&self) -> Section {
        Section {
            name: self.name.clone(),
            label: self.label.clone(),
            entries: self
                .entries
                .iter()
                .map(|e| Entry { key: e.key.clone(), values: e.values.clone(), line: 0 })
                .collect(),
            children: self.children.iter().map(|c| c.normalized()).collect(),
            line: 0,
        }
    }
}

/// Parse the raw section tree.
pub fn parse_sections(text: &str) -> Result<Vec<Section>> {
    let mut top: Vec<Section> = Vec::new();
    let mut stack: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens == ["}"] {
            let done = stack
                .pop()
                .ok_or_else(|| Error::config(line, "unmatched '}'"))?;
            match stack.last_mut() {
                Some(parent) => parent.children.push(done),
                None => top.push(done),
            }
        } else if tokens.last() == Some(&"{") {
            let section = match tokens.len() {
                2 => Section::new(tokens[0], None, line),
                3 => Section::new(tokens[0], Some(tokens[1]), line),
                _ => {
                    return Err(Error::config(
                        line,
                        "section header must be 'name {' or 'name label {'",
                    ))
                }
            };
            stack.push(section);
        } else {
            let current = stack
                .last_mut()
                .ok_or_else(|| Error::config(line, "entry outside any section"))?;
            current.entries.push(Entry {
                key: tokens[0].to_string(),
                values: tokens[1..].iter().map(|t| t.to_string()).collect(),
                line,
            });
        }
    }
    if let Some(open) = stack.last() {
        return Err(Error::config(open.line, format!("unclosed section '{}'", open.name)));
    }
    Ok(top)
}

fn write_section(out: &mut String, section: &Section, depth: usize) {
    let pad = "  ".repeat(depth);
    match &section.label {
        Some(l) => out.push_str(&format!("{pad}{} {} {{\n", section.name, l)),
        None => out.push_str(&format!("{pad}{} {{\n", section.name)),
    }
    for e in &section.entries {
        out.push_str(&format!("{pad}  {}", e.key));
        for v in &e.values {
            out.push(' ');
            out.push_str(v);
        }
        out.push('\n');
    }
    for c in &section.children {
        write_section(out, c, depth + 1);
    }
    out.push_str(&format!("{pad}}}\n"));
}

/// Serialize a section tree back to the text format.
pub fn serialize_sections(sections: &[Section]) -> String {
    let mut out = String::new();
    for s in sections {
        write_section(&mut out, s, 0);
    }
    out
}

fn parse_f64(e: &Entry, idx: usize) -> Result<f64> {
    e.values
        .get(idx)
        .ok_or_else(|| Error::config(e.line, format!("'{}' needs {} value(s)", e.key, idx + 1)))?
        .parse::<f64>()
        .map_err(|_| Error::config(e.line, format!("'{}' value is not a number", e.key)))
}

fn parse_usize(e: &Entry, idx: usize) -> Result<usize> {
    let v = parse_f64(e, idx)?;
    if v < 0.0 || v.fract() != 0.0 {
        return Err(Error::config(e.line, format!("'{}' must be a non-negative integer", e.key)));
    }
    Ok(v as usize)
}

fn parse_vec3(e: &Entry) -> Result<Vector3<f64>> {
    Ok(Vector3::new(parse_f64(e, 0)?, parse_f64(e, 1)?, parse_f64(e, 2)?))
}

fn parse_color(e: &Entry) -> Result<[f64; 3]> {
    Ok([parse_f64(e, 0)?, parse_f64(e, 1)?, parse_f64(e, 2)?])
}

fn require<'a>(s: &'a Section, key: &str) -> Result<&'a Entry> {
    s.entry(key)
        .ok_or_else(|| Error::config(s.line, format!("section '{}' is missing '{key}'", s.name)))
}

fn parse_transform(e: &Entry) -> Result<Sim3Transform> {
    if e.values.len() != 16 {
        return Err(Error::config(e.line, "'transform' needs 16 row-major numbers"));
    }
    let mut m = Matrix4::zeros();
    for (i, v) in e.values.iter().enumerate() {
        m[(i / 4, i % 4)] = v
            .parse::<f64>()
            .map_err(|_| Error::config(e.line, "'transform' value is not a number"))?;
    }
    Sim3Transform::from_matrix4(&m)
        .map_err(|err| Error::config(e.line, format!("invalid transform: {err}")))
}

/// Serialize a transform as the 16-number `transform` entry payload.
pub fn transform_tokens(t: &Sim3Transform) -> Vec<String> {
    let m = t.to_matrix4();
    (0..16).map(|i| format!("{:.17e}", m[(i / 4, i % 4)])).collect()
}

/// One analytic or file-backed volume primitive.
#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Sphere { center: Vector3<f64>, radius: f64, density: f64, color: [f64; 3] },
    Box { min: Vector3<f64>, max: Vector3<f64>, density: f64, color: [f64; 3] },
    Blob { center: Vector3<f64>, spread: f64, density: f64, color: [f64; 3] },
    Voxel {
        path: PathBuf,
        min: Vector3<f64>,
        max: Vector3<f64>,
        /// (relative density std, color std, seed) applied after load.
        noise: Option<(f64, f64, u64)>,
    },
}

/// A named field: one or more primitives plus its placement in the reference
/// frame and an optional override of the IDW origin.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfig {
    pub name: String,
    pub transform: Sim3Transform,
    pub origin: Option<Vector3<f64>>,
    pub primitives: Vec<Primitive>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraConfig {
    pub name: String,
    pub position: Vector3<f64>,
    pub look_at: Vector3<f64>,
    pub focal: f64,
    pub width: usize,
    pub height: usize,
    pub near: f64,
    pub far: f64,
}

impl CameraConfig {
    pub fn to_camera(&self) -> Result<Camera> {
        let pose = crate::registration::look_at_pose(&self.position, &self.look_at)?;
        let camera = Camera {
            pose,
            fx: self.focal,
            fy: self.focal,
            cx: self.width as f64 / 2.0,
            cy: self.height as f64 / 2.0,
            width: self.width,
            height: self.height,
            near: self.near,
            far: self.far,
        };
        camera.validate()?;
        Ok(camera)
    }
}

/// Registration run settings: which fields, pose sampling, render quality,
/// and the simulated backend's noise model.
#[derive(Debug, Clone)]
pub struct RegistrationConfig {
    pub field_a: String,
    pub field_b: String,
    pub poses: usize,
    pub radius_scale: f64,
    pub elevation_deg: (f64, f64),
    pub render: RenderSettings,
    pub rotation_noise_deg: f64,
    pub translation_noise_frac: f64,
    pub outlier_frac: f64,
    pub dropout_frac: f64,
}

impl RegistrationConfig {
    pub fn sampler(&self, seed: u64) -> PoseSamplerSettings {
        PoseSamplerSettings {
            count: self.poses,
            radius_scale: self.radius_scale,
            elevation_deg: self.elevation_deg,
            seed,
        }
    }
}

/// Sweep grids.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub gamma_range: (f64, f64),
    pub gamma_steps: usize,
    pub rho_range: (f64, f64),
    pub rho_steps: usize,
    pub train_views: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            gamma_range: (0.01, 1000.0),
            gamma_steps: 20,
            rho_range: (0.167, 1.3),
            rho_steps: 8,
            train_views: 32,
        }
    }
}

/// Fully parsed scene configuration.
#[derive(Debug, Clone)]
pub struct SceneConfig {
    pub name: String,
    pub seed: u64,
    pub fields: Vec<FieldConfig>,
    pub cameras: Vec<CameraConfig>,
    pub registration: Option<RegistrationConfig>,
    pub blend: BlendConfig,
    pub sweep: SweepConfig,
    /// Directory voxel paths resolve against (the config file's directory).
    pub base_dir: PathBuf,
}

fn parse_primitive(s: &Section) -> Result<Option<Primitive>> {
    let p = match s.name.as_str() {
        "sphere" => Primitive::Sphere {
            center: parse_vec3(require(s, "center")?)?,
            radius: parse_f64(require(s, "radius")?, 0)?,
            density: parse_f64(require(s, "density")?, 0)?,
            color: parse_color(require(s, "color")?)?,
        },
        "box" => Primitive::Box {
            min: parse_vec3(require(s, "min")?)?,
            max: parse_vec3(require(s, "max")?)?,
            density: parse_f64(require(s, "density")?, 0)?,
            color: parse_color(require(s, "color")?)?,
        },
        "blob" => Primitive::Blob {
            center: parse_vec3(require(s, "center")?)?,
            spread: parse_f64(require(s, "spread")?, 0)?,
            density: parse_f64(require(s, "density")?, 0)?,
            color: parse_color(require(s, "color")?)?,
        },
        "voxel" => {
            let path = require(s, "path")?;
            let noise = match s.entry("noise") {
                Some(e) => Some((parse_f64(e, 0)?, parse_f64(e, 1)?, parse_usize(e, 2)? as u64)),
                None => None,
            };
            Primitive::Voxel {
                path: PathBuf::from(&path.values.first().cloned().unwrap_or_default()),
                min: parse_vec3(require(s, "min")?)?,
                max: parse_vec3(require(s, "max")?)?,
                noise,
            }
        }
        _ => return Ok(None),
    };
    Ok(Some(p))
}

fn parse_field(s: &Section) -> Result<FieldConfig> {
    let name = s
        .label
        .clone()
        .ok_or_else(|| Error::config(s.line, "'field' sections need a label"))?;
    let transform = match s.entry("transform") {
        Some(e) => parse_transform(e)?,
        None => Sim3Transform::identity(),
    };
    let origin = s.entry("origin").map(parse_vec3).transpose()?;
    let mut primitives = Vec::new();
    for child in &s.children {
        match parse_primitive(child)? {
            Some(p) => primitives.push(p),
            None => {
                return Err(Error::config(
                    child.line,
                    format!("unknown primitive kind '{}'", child.name),
                ))
            }
        }
    }
    if primitives.is_empty() {
        return Err(Error::config(s.line, format!("field '{name}' has no primitives")));
    }
    Ok(FieldConfig { name, transform, origin, primitives })
}

fn parse_camera(s: &Section) -> Result<CameraConfig> {
    let size = require(s, "size")?;
    Ok(CameraConfig {
        name: s.label.clone().unwrap_or_else(|| "camera".into()),
        position: parse_vec3(require(s, "position")?)?,
        look_at: parse_vec3(require(s, "look_at")?)?,
        focal: parse_f64(require(s, "focal")?, 0)?,
        width: parse_usize(size, 0)?,
        height: parse_usize(size, 1)?,
        near: parse_f64(require(s, "near")?, 0)?,
        far: parse_f64(require(s, "far")?, 0)?,
    })
}

fn parse_registration(s: &Section) -> Result<RegistrationConfig> {
    let mut render = RenderSettings::default();
    if let Some(e) = s.entry("render_size") {
        render.width = parse_usize(e, 0)?;
        render.height = parse_usize(e, 1)?;
    }
    if let Some(e) = s.entry("render_focal") {
        render.focal = parse_f64(e, 0)?;
    }
    if let Some(e) = s.entry("render_near") {
        render.near = parse_f64(e, 0)?;
    }
    if let Some(e) = s.entry("render_far") {
        render.far = parse_f64(e, 0)?;
    }
    if let Some(e) = s.entry("render_budget") {
        render.budget = parse_usize(e, 0)?;
    }
    let elevation_deg = match s.entry("elevation") {
        Some(e) => (parse_f64(e, 0)?, parse_f64(e, 1)?),
        None => (0.0, 30.0),
    };
    let get = |key: &str, default: f64| -> Result<f64> {
        match s.entry(key) {
            Some(e) => parse_f64(e, 0),
            None => Ok(default),
        }
    };
    Ok(RegistrationConfig {
        field_a: require(s, "field_a")?.values.first().cloned().unwrap_or_default(),
        field_b: require(s, "field_b")?.values.first().cloned().unwrap_or_default(),
        poses: match s.entry("poses") {
            Some(e) => parse_usize(e, 0)?,
            None => 32,
        },
        radius_scale: get("radius_scale", 2.5)?,
        elevation_deg,
        render,
        rotation_noise_deg: get("rotation_noise_deg", 0.0)?,
        translation_noise_frac: get("translation_noise_frac", 0.0)?,
        outlier_frac: get("outlier_frac", 0.0)?,
        dropout_frac: get("dropout_frac", 0.0)?,
    })
}

fn parse_blend(s: &Section) -> Result<BlendConfig> {
    let mut cfg = match s.entry("preset") {
        Some(e) => {
            let name = e.values.first().cloned().unwrap_or_default();
            BlendConfig::preset(&name)
                .ok_or_else(|| Error::config(e.line, format!("unknown preset '{name}'")))?
        }
        None => BlendConfig::default(),
    };
    if let Some(e) = s.entry("strategy") {
        cfg.strategy = e.values.first().cloned().unwrap_or_default();
        strategy(&cfg.strategy).map_err(|err| Error::config(e.line, err.to_string()))?;
    }
    if let Some(e) = s.entry("gamma") {
        cfg.gamma = parse_f64(e, 0)?;
    }
    if let Some(e) = s.entry("tau") {
        cfg.tau = parse_f64(e, 0)?;
    }
    if let Some(e) = s.entry("budget") {
        cfg.budget = parse_usize(e, 0)?;
    }
    if let Some(e) = s.entry("eps_mass") {
        cfg.eps_mass = parse_f64(e, 0)?;
    }
    Ok(cfg)
}

fn parse_sweep(s: &Section) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::default();
    if let Some(e) = s.entry("gamma_range") {
        cfg.gamma_range = (parse_f64(e, 0)?, parse_f64(e, 1)?);
    }
    if let Some(e) = s.entry("gamma_steps") {
        cfg.gamma_steps = parse_usize(e, 0)?;
    }
    if let Some(e) = s.entry("rho_range") {
        cfg.rho_range = (parse_f64(e, 0)?, parse_f64(e, 1)?);
    }
    if let Some(e) = s.entry("rho_steps") {
        cfg.rho_steps = parse_usize(e, 0)?;
    }
    if let Some(e) = s.entry("train_views") {
        cfg.train_views = parse_usize(e, 0)?;
    }
    Ok(cfg)
}

impl SceneConfig {
    pub fn from_text(text: &str, base_dir: &Path) -> Result<Self> {
        let sections = parse_sections(text)?;
        let mut cfg = SceneConfig {
            name: "scene".into(),
            seed: 0,
            fields: Vec::new(),
            cameras: Vec::new(),
            registration: None,
            blend: BlendConfig::default(),
            sweep: SweepConfig::default(),
            base_dir: base_dir.to_path_buf(),
        };
        for s in &sections {
            match s.name.as_str() {
                "scene" => {
                    if let Some(e) = s.entry("name") {
                        cfg.name = e.values.first().cloned().unwrap_or_default();
                    }
                    if let Some(e) = s.entry("seed") {
                        cfg.seed = parse_usize(e, 0)? as u64;
                    }
                }
                "field" => cfg.fields.push(parse_field(s)?),
                "camera" => cfg.cameras.push(parse_camera(s)?),
                "registration" => cfg.registration = Some(parse_registration(s)?),
                "blend" => cfg.blend = parse_blend(s)?,
                "sweep" => cfg.sweep = parse_sweep(s)?,
                other => {
                    return Err(Error::config(s.line, format!("unknown section '{other}'")))
                }
            }
        }
        cfg.check_names()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
        Self::from_text(&text, &base)
    }

    fn check_names(&self) -> Result<()> {
        for i in 0..self.fields.len() {
            for j in (i + 1)..self.fields.len() {
                if self.fields[i].name == self.fields[j].name {
                    return Err(Error::InvalidArgument(format!(
                        "duplicate field name '{}'",
                        self.fields[i].name
                    )));
                }
            }
        }
        if let Some(reg) = &self.registration {
            for name in [&reg.field_a, &reg.field_b] {
                if self.field(name).is_none() {
                    return Err(Error::InvalidArgument(format!(
                        "registration references unknown field '{name}'"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn field(&self, name: &str) -> Option<&FieldConfig> {
        self.fields.iter().find(|f| f.name == name)
    }

    /// Build a field in its local frame (placement transform not applied).
    pub fn build_field(&self, field: &FieldConfig) -> Result<Arc<dyn RadianceField>> {
        let mut parts: Vec<Arc<dyn RadianceField>> = Vec::new();
        for p in &field.primitives {
            parts.push(match p {
                Primitive::Sphere { center, radius, density, color } => {
                    Arc::new(UniformSphereField::new(*center, *radius, *density, *color))
                }
                Primitive::Box { min, max, density, color } => {
                    Arc::new(UniformBoxField::new(Aabb::new(*min, *max), *density, *color))
                }
                Primitive::Blob { center, spread, density, color } => {
                    Arc::new(GaussianBlobField::new(*center, *density, *spread, *color))
                }
                Primitive::Voxel { path, min, max, noise } => {
                    let full = if path.is_absolute() {
                        path.clone()
                    } else {
                        self.base_dir.join(path)
                    };
                    let grid = VoxelGridField::load(&full, Aabb::new(*min, *max))?;
                    let grid = match noise {
                        Some((d, c, seed)) => grid.with_noise(*d, *c, *seed),
                        None => grid,
                    };
                    Arc::new(grid)
                }
            });
        }
        if parts.len() == 1 {
            Ok(parts.pop().unwrap())
        } else {
            Ok(Arc::new(CompositeField::new(parts)?))
        }
    }
}
