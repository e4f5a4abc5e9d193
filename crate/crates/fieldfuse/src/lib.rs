//! Fusion of independently constructed volumetric radiance fields.
//!
//! The pipeline has two stages: *registration* recovers the relative SIM(3)
//! transform between two fields by re-rendering them from sampled poses and
//! recovering all image poses in a common gauge frame, and *blending*
//! synthesizes novel views from the registered fields with one of several
//! interchangeable weighting strategies (nearest, image-wise IDW, pixel-wise
//! IDW, sample-wise IDW).
//!
//! Fields are pluggable behind the [`fields::RadianceField`] trait; analytic
//! and voxel-grid implementations stand in for trained neural fields so that
//! every formula stays testable at desk scale.

pub mod blending;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod harness;
pub mod registration;
pub mod renderer;
pub mod rng;

pub use error::{Error, Result};
