//! Rigid and similarity transforms, their decomposition and composition, and
//! the registration error metrics.
//!
//! A [`Sim3Transform`] is stored as rotation matrix + translation + scalar
//! scale rather than a 4x4 matrix, so the group invariants are enforceable at
//! construction. It acts on points as `p -> s * R * p + t`, i.e. the scale is
//! applied first, then the rigid part. 4x4 import/export is provided for
//! interchange, with the scale folded into the upper-left block as `R * s`.

use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::error::{Error, Result};

/// Frobenius tolerance for orthonormality checks at construction.
pub const ROTATION_TOL: f64 = 1e-9;

/// An SE(3) pose: orthonormal rotation (det +1) plus translation.
#[derive(Debug, Clone, PartialEq)]
pub struct Se3Pose {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl Se3Pose {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        let gram = rotation.transpose() * rotation;
        let dev = (gram - Matrix3::identity()).norm();
        if !dev.is_finite() || dev > 1e-6 {
            return Err(Error::InvalidRotation(format!(
                "|R^T R - I| = {dev:.3e}"
            )));
        }
        if rotation.determinant() < 0.0 {
            return Err(Error::InvalidRotation("determinant is negative".into()));
        }
        if !translation.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidRotation("non-finite translation".into()));
        }
        // Re-orthonormalize when drift is above the strict tolerance so that
        // long composition chains stay valid.
        let rotation = if dev > ROTATION_TOL {
            project_to_rotation(&rotation)
        } else {
            rotation
        };
        Ok(Self { rotation, translation })
    }

    pub fn identity() -> Self {
        Self { rotation: Matrix3::identity(), translation: Vector3::zeros() }
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    pub fn compose(&self, other: &Se3Pose) -> Se3Pose {
        Se3Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Se3Pose {
        let rt = self.rotation.transpose();
        Se3Pose { rotation: rt, translation: -(rt * self.translation) }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn to_matrix4(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }
}

/// A SIM(3) transform: uniform scale followed by a rigid pose.
///
/// `apply(p) = s * R * p + t`; one unit of the source frame equals `s` units
/// of the target frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Sim3Transform {
    pose: Se3Pose,
    scale: f64,
}

impl Sim3Transform {
    pub fn new(pose: Se3Pose, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidScale(scale));
        }
        Ok(Self { pose, scale })
    }

    pub fn identity() -> Self {
        Self { pose: Se3Pose::identity(), scale: 1.0 }
    }

    pub fn from_se3(pose: Se3Pose) -> Self {
        Self { pose, scale: 1.0 }
    }

    pub fn from_scale(scale: f64) -> Result<Self> {
        Self::new(Se3Pose::identity(), scale)
    }

    pub fn pose(&self) -> &Se3Pose {
        &self.pose
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        self.pose.rotation()
    }

    pub fn translation(&self) -> &Vector3<f64> {
        self.pose.translation()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.pose.rotation() * (self.scale * p) + self.pose.translation()
    }

    /// Rotate a direction vector (no scale, no translation).
    pub fn rotate(&self, d: &Vector3<f64>) -> Vector3<f64> {
        self.pose.rotation() * d
    }

    pub fn compose(&self, other: &Sim3Transform) -> Sim3Transform {
        // (R1,t1,s1) o (R2,t2,s2): p -> s1 R1 (s2 R2 p + t2) + t1
        let rotation = self.pose.rotation * other.pose.rotation;
        let translation =
            self.scale * (self.pose.rotation * other.pose.translation) + self.pose.translation;
        Sim3Transform {
            pose: Se3Pose { rotation, translation },
            scale: self.scale * other.scale,
        }
    }

    pub fn inverse(&self) -> Sim3Transform {
        let rt = self.pose.rotation.transpose();
        let s_inv = 1.0 / self.scale;
        Sim3Transform {
            pose: Se3Pose { rotation: rt, translation: -s_inv * (rt * self.pose.translation) },
            scale: s_inv,
        }
    }

    /// Export as a 4x4 row-major-compatible matrix with the scale folded into
    /// the upper-left block as `R * s`.
    pub fn to_matrix4(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&(self.pose.rotation * self.scale));
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.pose.translation);
        m
    }

    /// Import from a 4x4 matrix; the uniform scale is recovered by column-norm
    /// extraction from the upper-left block.
    pub fn from_matrix4(m: &Matrix4<f64>) -> Result<Self> {
        let block: Matrix3<f64> = m.fixed_view::<3, 3>(0, 0).into_owned();
        let s0 = block.column(0).norm();
        let s1 = block.column(1).norm();
        let s2 = block.column(2).norm();
        let scale = (s0 + s1 + s2) / 3.0;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidScale(scale));
        }
        let rotation = block / scale;
        let translation: Vector3<f64> = m.fixed_view::<3, 1>(0, 3).into_owned();
        Ok(Sim3Transform { pose: Se3Pose::new(rotation, translation)?, scale })
    }
}

/// Split a SIM(3) transform into its rigid pose and scalar scale.
///
/// For a valid uniform-scale transform this equals the determinant-based
/// extraction `|S|^(1/3)`; the scalar is stored directly so the split is
/// exact.
pub fn decompose_sim3(t: &Sim3Transform) -> (Se3Pose, f64) {
    (t.pose.clone(), t.scale)
}

/// Re-express a query pose from frame B in frame A through `t_ba`.
///
/// Computes `T_BA * G_B * S_BA^-1`: the scale factors cancel in the rotation
/// block, and the translation is converted into frame A's units.
pub fn convert_query_pose(g_b: &Se3Pose, t_ba: &Sim3Transform) -> Se3Pose {
    let rotation = t_ba.pose.rotation * g_b.rotation;
    let translation =
        t_ba.scale * (t_ba.pose.rotation * g_b.translation) + t_ba.pose.translation;
    Se3Pose { rotation, translation }
}

/// Rotation angle of an orthonormal matrix in degrees.
///
/// Uses `atan2(|skew part|, (tr - 1)/2)`, which stays accurate near the
/// identity where the arccos-of-trace form loses half the significant digits.
pub fn rotation_angle_deg(r: &Matrix3<f64>) -> f64 {
    let c = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let v = Vector3::new(
        r[(2, 1)] - r[(1, 2)],
        r[(0, 2)] - r[(2, 0)],
        r[(1, 0)] - r[(0, 1)],
    );
    let s = 0.5 * v.norm();
    s.atan2(c).to_degrees()
}

/// Frobenius-nearest rotation matrix with det +1 (polar projection via SVD).
pub fn project_to_rotation(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd u");
    let vt = svd.v_t.expect("svd v_t");
    let mut r = u * vt;
    if r.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(2).neg_mut();
        r = u * vt;
    }
    r
}

/// Registration error between an estimated and a true SIM(3) transform.
///
/// `r_err` is in degrees, `t_err` in the reference field's world units, and
/// `s_err` is the absolute natural-log scale error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegistrationError {
    pub r_err: f64,
    pub t_err: f64,
    pub s_err: f64,
}

/// Compute `dT = t_est * t_true^-1`, split it into rigid and scale parts, and
/// report the rotation angle, translation norm, and |log ds|.
pub fn registration_error(t_true: &Sim3Transform, t_est: &Sim3Transform) -> RegistrationError {
    let delta = t_est.compose(&t_true.inverse());
    let (pose, scale) = decompose_sim3(&delta);
    RegistrationError {
        r_err: rotation_angle_deg(pose.rotation()),
        t_err: pose.translation().norm(),
        s_err: scale.ln().abs(),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    pub(crate) fn random_rotation(rng: &mut impl Rng) -> Matrix3<f64> {
        let axis = Vector3::new(
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
        )
        .normalize();
        let angle = rng.gen::<f64>() * std::f64::consts::TAU;
        *nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle)
            .matrix()
    }

    pub(crate) fn random_sim3(rng: &mut impl Rng) -> Sim3Transform {
        let r = random_rotation(rng);
        let t = Vector3::new(
            rng.gen::<f64>() * 4.0 - 2.0,
            rng.gen::<f64>() * 4.0 - 2.0,
            rng.gen::<f64>() * 4.0 - 2.0,
        );
        let s = 0.3 + rng.gen::<f64>() * 2.7;
        Sim3Transform::new(Se3Pose::new(r, t).unwrap(), s).unwrap()
    }

    #[test]
    fn decompose_identity() {
        let (pose, s) = decompose_sim3(&Sim3Transform::identity());
        assert_eq!(pose, Se3Pose::identity());
        assert_eq!(s, 1.0);
    }

    #[test]
    fn decompose_pure_scale() {
        let t = Sim3Transform::from_scale(2.0).unwrap();
        let (pose, s) = decompose_sim3(&t);
        assert_eq!(pose, Se3Pose::identity());
        assert_eq!(s, 2.0);
    }

    #[test]
    fn decompose_compose_round_trip() {
        let mut rng = crate::rng::stream_rng(7, &[0]);
        for _ in 0..1000 {
            let t = random_sim3(&mut rng);
            let (pose, s) = decompose_sim3(&t);
            let rebuilt = Sim3Transform::new(pose, s).unwrap();
            assert!((rebuilt.to_matrix4() - t.to_matrix4()).norm() <= 1e-12);
        }
    }

    #[test]
    fn inverse_is_inverse() {
        let mut rng = crate::rng::stream_rng(8, &[0]);
        for _ in 0..200 {
            let t = random_sim3(&mut rng);
            let id = t.compose(&t.inverse());
            assert!((id.to_matrix4() - Matrix4::identity()).norm() <= 1e-9);
        }
    }

    #[test]
    fn matrix4_round_trip_extracts_scale() {
        let mut rng = crate::rng::stream_rng(9, &[0]);
        for _ in 0..200 {
            let t = random_sim3(&mut rng);
            let back = Sim3Transform::from_matrix4(&t.to_matrix4()).unwrap();
            assert_abs_diff_eq!(back.scale(), t.scale(), epsilon = 1e-12);
            assert!((back.to_matrix4() - t.to_matrix4()).norm() <= 1e-12);
        }
    }

    #[test]
    fn convert_query_pose_identity() {
        let mut rng = crate::rng::stream_rng(10, &[0]);
        let g = Se3Pose::new(
            random_rotation(&mut rng),
            Vector3::new(0.3, -0.2, 1.0),
        )
        .unwrap();
        let out = convert_query_pose(&g, &Sim3Transform::identity());
        assert_eq!(out, g);
    }

    #[test]
    fn convert_query_pose_pure_scale_scales_translation() {
        let mut rng = crate::rng::stream_rng(11, &[0]);
        let g = Se3Pose::new(random_rotation(&mut rng), Vector3::new(1.0, 2.0, 3.0)).unwrap();
        let t = Sim3Transform::from_scale(2.0).unwrap();
        let out = convert_query_pose(&g, &t);
        assert_abs_diff_eq!((out.rotation() - g.rotation()).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            (out.translation() - 2.0 * g.translation()).norm(),
            0.0,
            epsilon = 1e-12
        );
    }

    /// A point in camera coordinates must reach the same world point whether
    /// routed through frame B then T_BA, or through G_A directly. Points in
    /// camera coordinates carry B's units, so the direct route rescales them.
    #[test]
    fn convert_query_pose_point_consistency() {
        let mut rng = crate::rng::stream_rng(12, &[0]);
        for _ in 0..200 {
            let g_b = Se3Pose::new(
                random_rotation(&mut rng),
                Vector3::new(rng.gen(), rng.gen(), rng.gen()),
            )
            .unwrap();
            let t_ba = random_sim3(&mut rng);
            let g_a = convert_query_pose(&g_b, &t_ba);
            let p_cam = Vector3::new(rng.gen(), rng.gen(), rng.gen());
            let via_b = t_ba.apply(&g_b.transform_point(&p_cam));
            let via_a = g_a.transform_point(&(t_ba.scale() * p_cam));
            assert!((via_b - via_a).norm() <= 1e-9);
        }
    }

    #[test]
    fn registration_error_identity() {
        let mut rng = crate::rng::stream_rng(13, &[0]);
        for _ in 0..100 {
            let t = random_sim3(&mut rng);
            let e = registration_error(&t, &t);
            assert!(e.r_err <= 1e-9 && e.t_err <= 1e-9 && e.s_err <= 1e-9);
        }
    }

    #[test]
    fn registration_error_rotation_only() {
        let rz = *nalgebra::Rotation3::from_axis_angle(
            &Vector3::z_axis(),
            std::f64::consts::FRAC_PI_2,
        )
        .matrix();
        let t_true = Sim3Transform::identity();
        let t_est = Sim3Transform::from_se3(Se3Pose::new(rz, Vector3::zeros()).unwrap());
        let e = registration_error(&t_true, &t_est);
        assert_abs_diff_eq!(e.r_err, 90.0, epsilon = 1e-9);
        assert_abs_diff_eq!(e.t_err, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.s_err, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn registration_error_scale_only() {
        let e = registration_error(
            &Sim3Transform::identity(),
            &Sim3Transform::from_scale(2.0).unwrap(),
        );
        assert_abs_diff_eq!(e.s_err, std::f64::consts::LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(e.r_err, 0.0, epsilon = 1e-9);
    }

    /// Determinant route for the scale of dT agrees with the stored scalar.
    #[test]
    fn scale_matches_determinant_route() {
        let mut rng = crate::rng::stream_rng(14, &[0]);
        for _ in 0..100 {
            let t = random_sim3(&mut rng);
            let det = t.to_matrix4().fixed_view::<3, 3>(0, 0).determinant();
            assert_abs_diff_eq!(det.abs().cbrt(), t.scale(), epsilon = 1e-9);
        }
    }

    #[test]
    fn r_err_invariant_under_left_composition() {
        let mut rng = crate::rng::stream_rng(15, &[0]);
        for _ in 0..100 {
            let a = random_sim3(&mut rng);
            let b = random_sim3(&mut rng);
            let c = random_sim3(&mut rng);
            let e0 = registration_error(&a, &b);
            let e1 = registration_error(&c.compose(&a), &c.compose(&b));
            assert_abs_diff_eq!(e0.r_err, e1.r_err, epsilon = 1e-7);
            assert_abs_diff_eq!(e0.s_err, e1.s_err, epsilon = 1e-9);
        }
    }

    #[test]
    fn rejects_non_orthonormal_rotation() {
        let m = Matrix3::new(1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0);
        assert!(Se3Pose::new(m, Vector3::zeros()).is_err());
    }

    #[test]
    fn rejects_non_positive_scale() {
        assert!(Sim3Transform::from_scale(0.0).is_err());
        assert!(Sim3Transform::from_scale(-1.0).is_err());
        assert!(Sim3Transform::from_scale(f64::NAN).is_err());
    }
}
