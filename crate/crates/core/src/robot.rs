//! Serial-arm kinematics for a tray end effector.
//!
//! The model is a standard-DH chain of revolute joints with a rigid tray
//! transform after the last joint. Everything the constraint side needs —
//! tray pose, normal, linear velocity, and the specific force at a point
//! rigidly attached to the tray — comes out of one outward propagation of
//! velocities and accelerations along the chain.

use nalgebra::{DMatrix, DVector, Matrix3, Rotation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{Mat3, Scalar, Vec3};

#[derive(Debug, Error)]
pub enum RobotError {
    #[error("expected {expected} joint values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid robot model: {0}")]
    InvalidModel(String),
}

#[derive(Debug, Error)]
pub enum IkError {
    #[error("inverse kinematics did not converge (residual {residual:.3e})")]
    Unreachable { residual: f64 },
    #[error("configuration near-singular (manipulability {sigma_min:.3e})")]
    NearSingular { sigma_min: f64 },
    #[error(transparent)]
    Robot(#[from] RobotError),
}

/// One standard Denavit-Hartenberg row (revolute joint).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DhRow {
    pub a: f64,
    pub d: f64,
    pub alpha: f64,
    pub theta_offset: f64,
}

/// Per-joint limits. `pos` is an interval, the rest are symmetric bounds.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct JointLimit {
    pub pos: (f64, f64),
    pub vel: f64,
    pub acc: f64,
    pub jerk: f64,
}

/// Rigid pose: orthonormal rotation plus translation, world units in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Level pose (identity rotation) at a target point.
    pub fn level_at(translation: Vector3<f64>) -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation,
        }
    }

    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.translation + self.rotation * other.translation,
        }
    }

    /// ‖RᵀR − I‖ and det checks; tolerance 1e-9 per model invariants.
    pub fn rotation_is_orthonormal(&self) -> bool {
        let r = &self.rotation;
        let err = (r.transpose() * r - Matrix3::identity()).norm();
        err < 1e-9 && (r.determinant() - 1.0).abs() < 1e-9
    }
}

/// Wire form of a pose: unit quaternion (w, x, y, z) plus translation.
#[derive(Serialize, Deserialize)]
struct PoseWire {
    rotation: [f64; 4],
    translation: [f64; 3],
}

impl Serialize for Pose {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let q = UnitQuaternion::from_matrix(&self.rotation);
        PoseWire {
            rotation: [q.w, q.i, q.j, q.k],
            translation: [self.translation.x, self.translation.y, self.translation.z],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pose {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = PoseWire::deserialize(d)?;
        let q = UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(
            w.rotation[0],
            w.rotation[1],
            w.rotation[2],
            w.rotation[3],
        ));
        Ok(Pose {
            rotation: q.to_rotation_matrix().into_inner(),
            translation: Vector3::new(w.translation[0], w.translation[1], w.translation[2]),
        })
    }
}

/// Kinematic and limit description of the arm plus its tray mount.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RobotModel {
    pub dh_rows: Vec<DhRow>,
    pub joint_limits: Vec<JointLimit>,
    pub tray_transform: Pose,
    #[serde(default = "default_gravity")]
    pub gravity: Vector3<f64>,
}

fn default_gravity() -> Vector3<f64> {
    Vector3::new(0.0, 0.0, -9.81)
}

impl RobotModel {
    pub fn dof(&self) -> usize {
        self.dh_rows.len()
    }

    pub fn validate(&self) -> Result<(), RobotError> {
        if self.dh_rows.len() != self.joint_limits.len() {
            return Err(RobotError::InvalidModel(format!(
                "{} DH rows but {} joint limit entries",
                self.dh_rows.len(),
                self.joint_limits.len()
            )));
        }
        for (i, l) in self.joint_limits.iter().enumerate() {
            if l.pos.0 >= l.pos.1 || l.vel <= 0.0 || l.acc <= 0.0 || l.jerk <= 0.0 {
                return Err(RobotError::InvalidModel(format!(
                    "joint {i} has an empty limit interval"
                )));
            }
        }
        if !self.tray_transform.rotation_is_orthonormal() {
            return Err(RobotError::InvalidModel(
                "tray_transform rotation is not orthonormal".into(),
            ));
        }
        Ok(())
    }

    pub fn from_json(json: &str) -> Result<Self, RobotError> {
        let model: RobotModel = serde_json::from_str(json)
            .map_err(|e| RobotError::InvalidModel(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    /// The bundled six-joint arm (see `assets/default_6r.json`).
    pub fn default_6r() -> Self {
        Self::from_json(include_str!("../assets/default_6r.json"))
            .expect("bundled model is valid")
    }

    fn check_dim(&self, got: usize) -> Result<(), RobotError> {
        if got != self.dof() {
            return Err(RobotError::DimensionMismatch {
                expected: self.dof(),
                got,
            });
        }
        Ok(())
    }
}

/// A level-tray configuration of the bundled model, used as the default IK
/// seed for collection and evaluation motions.
pub fn default_level_seed() -> DVector<f64> {
    DVector::from_vec(crate::DEFAULT_LEVEL_SEED.to_vec())
}

/// One waypoint of joint positions, velocities and accelerations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JointState {
    pub q: DVector<f64>,
    pub qd: DVector<f64>,
    pub qdd: DVector<f64>,
}

impl JointState {
    pub fn zeros(n: usize) -> Self {
        Self {
            q: DVector::zeros(n),
            qd: DVector::zeros(n),
            qdd: DVector::zeros(n),
        }
    }

    pub fn stationary(q: DVector<f64>) -> Self {
        let n = q.len();
        Self {
            q,
            qd: DVector::zeros(n),
            qdd: DVector::zeros(n),
        }
    }
}

/// Full kinematic state of the tray frame, generic over the scalar type.
pub(crate) struct TrayKin<S> {
    pub rot: Mat3<S>,
    pub pos: Vec3<S>,
    pub omega: Vec3<S>,
    pub ang_acc: Vec3<S>,
    pub vel: Vec3<S>,
    pub acc: Vec3<S>,
}

/// Outward propagation along the chain: joint axes are the z columns of the
/// running rotation, and each DH segment is rigid in its distal link.
pub(crate) fn tray_kinematics<S: Scalar>(
    model: &RobotModel,
    q: &[S],
    qd: &[S],
    qdd: &[S],
) -> TrayKin<S> {
    let mut rot = Mat3::<S>::identity();
    let mut pos = Vec3::<S>::zero();
    let mut omega = Vec3::<S>::zero();
    let mut ang_acc = Vec3::<S>::zero();
    let mut vel = Vec3::<S>::zero();
    let mut acc = Vec3::<S>::zero();

    for (i, row) in model.dh_rows.iter().enumerate() {
        let axis = rot.cols[2];
        let spin = axis.scale(qd[i]);
        ang_acc = ang_acc.add(&axis.scale(qdd[i])).add(&omega.cross(&spin));
        omega = omega.add(&spin);

        let theta = q[i] + S::constant(row.theta_offset);
        let (st, ct) = (theta.sin(), theta.cos());
        let (sa, ca) = (
            S::constant(row.alpha.sin()),
            S::constant(row.alpha.cos()),
        );
        let a = S::constant(row.a);
        let d = S::constant(row.d);

        // Segment from this joint's origin to the next, fixed in the distal link.
        let seg = rot.mul_vec(&Vec3::new(a * ct, a * st, d));
        pos = pos.add(&seg);
        vel = vel.add(&omega.cross(&seg));
        acc = acc
            .add(&ang_acc.cross(&seg))
            .add(&omega.cross(&omega.cross(&seg)));

        // Rz(theta) * Rx(alpha)
        let z = S::constant(0.0);
        let local = Mat3 {
            cols: [
                Vec3::new(ct, st, z),
                Vec3::new(-(st * ca), ct * ca, sa),
                Vec3::new(st * sa, -(ct * sa), ca),
            ],
        };
        rot = rot.mul_mat(&local);
    }

    // Tray mount, rigid in the last link.
    let seg = rot.mul_vec(&Vec3::from_f64(&model.tray_transform.translation));
    pos = pos.add(&seg);
    vel = vel.add(&omega.cross(&seg));
    acc = acc
        .add(&ang_acc.cross(&seg))
        .add(&omega.cross(&omega.cross(&seg)));
    rot = rot.mul_mat(&Mat3::from_f64(&model.tray_transform.rotation));

    TrayKin {
        rot,
        pos,
        omega,
        ang_acc,
        vel,
        acc,
    }
}

fn slices_from_state(state: &JointState) -> (&[f64], &[f64], &[f64]) {
    (
        state.q.as_slice(),
        state.qd.as_slice(),
        state.qdd.as_slice(),
    )
}

/// World pose of the tray frame.
pub fn forward_kinematics(model: &RobotModel, q: &DVector<f64>) -> Result<Pose, RobotError> {
    model.check_dim(q.len())?;
    let zeros = vec![0.0; q.len()];
    let kin = tray_kinematics(model, q.as_slice(), &zeros, &zeros);
    Ok(Pose {
        rotation: kin.rot.value(),
        translation: kin.pos.value(),
    })
}

/// World-frame unit normal of the tray contact surface (tray-frame +z).
pub fn tray_normal(model: &RobotModel, q: &DVector<f64>) -> Result<Vector3<f64>, RobotError> {
    Ok(forward_kinematics(model, q)?.rotation.column(2).into())
}

/// World-frame linear velocity of the tray origin.
pub fn ee_linear_velocity(
    model: &RobotModel,
    q: &DVector<f64>,
    qd: &DVector<f64>,
) -> Result<Vector3<f64>, RobotError> {
    model.check_dim(q.len())?;
    model.check_dim(qd.len())?;
    let zeros = vec![0.0; q.len()];
    let kin = tray_kinematics(model, q.as_slice(), qd.as_slice(), &zeros);
    Ok(kin.vel.value())
}

/// Specific force the tray must impart on a point rigidly attached at
/// `offset` (tray frame): world acceleration of that point minus gravity.
/// For a stationary level tray this is (0, 0, +9.81).
pub fn centroid_acceleration(
    model: &RobotModel,
    state: &JointState,
    offset: &Vector3<f64>,
) -> Result<Vector3<f64>, RobotError> {
    model.check_dim(state.q.len())?;
    model.check_dim(state.qd.len())?;
    model.check_dim(state.qdd.len())?;
    let (q, qd, qdd) = slices_from_state(state);
    let kin = tray_kinematics(model, q, qd, qdd);
    Ok(centroid_acceleration_from_kin(&kin, offset, &model.gravity).value())
}

/// Same computation on an already-propagated chain state; shared with the
/// dual-number margin path and the simulator.
pub(crate) fn centroid_acceleration_from_kin<S: Scalar>(
    kin: &TrayKin<S>,
    offset: &Vector3<f64>,
    gravity: &Vector3<f64>,
) -> Vec3<S> {
    let r = kin.rot.mul_vec(&Vec3::from_f64(offset));
    kin.acc
        .add(&kin.ang_acc.cross(&r))
        .add(&kin.omega.cross(&kin.omega.cross(&r)))
        .sub(&Vec3::from_f64(gravity))
}

/// Geometric Jacobian of the tray origin: linear rows on top, angular below.
pub fn geometric_jacobian(model: &RobotModel, q: &DVector<f64>) -> Result<DMatrix<f64>, RobotError> {
    model.check_dim(q.len())?;
    let n = model.dof();
    // Joint origins and axes from a plain forward pass.
    let mut rot = Matrix3::<f64>::identity();
    let mut pos = Vector3::<f64>::zeros();
    let mut axes = Vec::with_capacity(n);
    let mut origins = Vec::with_capacity(n);
    for (i, row) in model.dh_rows.iter().enumerate() {
        axes.push(Vector3::from(rot.column(2)));
        origins.push(pos);
        let theta = q[i] + row.theta_offset;
        let (st, ct) = theta.sin_cos();
        let (sa, ca) = row.alpha.sin_cos();
        pos += rot * Vector3::new(row.a * ct, row.a * st, row.d);
        rot *= Matrix3::new(ct, -st * ca, st * sa, st, ct * ca, -ct * sa, 0.0, sa, ca);
    }
    pos += rot * model.tray_transform.translation;

    let mut jac = DMatrix::zeros(6, n);
    for i in 0..n {
        let lin = axes[i].cross(&(pos - origins[i]));
        for r in 0..3 {
            jac[(r, i)] = lin[r];
            jac[(r + 3, i)] = axes[i][r];
        }
    }
    Ok(jac)
}

/// Options for damped-least-squares inverse kinematics.
#[derive(Clone, Copy, Debug)]
pub struct IkParams {
    pub damping: f64,
    pub max_iters: usize,
    pub tolerance: f64,
    /// Reject configurations whose smallest Jacobian singular value drops
    /// below this (near-singular guard).
    pub min_singular_value: f64,
}

impl Default for IkParams {
    fn default() -> Self {
        Self {
            damping: 1e-3,
            max_iters: 200,
            tolerance: 1e-10,
            min_singular_value: 5e-3,
        }
    }
}

fn rotation_error(target: &Matrix3<f64>, current: &Matrix3<f64>) -> Vector3<f64> {
    let delta = target * current.transpose();
    Rotation3::from_matrix_unchecked(delta).scaled_axis()
}

/// Damped least squares IK seeded from `seed`.
pub fn inverse_kinematics(
    model: &RobotModel,
    target: &Pose,
    seed: &DVector<f64>,
    params: &IkParams,
) -> Result<DVector<f64>, IkError> {
    model.check_dim(seed.len())?;
    let mut q = seed.clone();
    let mut last_err = f64::INFINITY;
    for _ in 0..params.max_iters {
        let pose = forward_kinematics(model, &q)?;
        let e_pos = target.translation - pose.translation;
        let e_rot = rotation_error(&target.rotation, &pose.rotation);
        let mut err = DVector::zeros(6);
        for k in 0..3 {
            err[k] = e_pos[k];
            err[k + 3] = e_rot[k];
        }
        last_err = err.norm();
        if last_err < params.tolerance {
            let jac = geometric_jacobian(model, &q)?;
            let sigma_min = jac
                .svd(false, false)
                .singular_values
                .iter()
                .fold(f64::INFINITY, |m, &s| m.min(s));
            if sigma_min < params.min_singular_value {
                return Err(IkError::NearSingular { sigma_min });
            }
            return Ok(q);
        }
        let jac = geometric_jacobian(model, &q)?;
        let jjt = &jac * jac.transpose()
            + DMatrix::identity(6, 6) * (params.damping * params.damping);
        let sol = jjt
            .lu()
            .solve(&err)
            .ok_or(IkError::Unreachable { residual: last_err })?;
        q += jac.transpose() * sol;
    }
    Err(IkError::Unreachable { residual: last_err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn single_joint_model(a: f64) -> RobotModel {
        RobotModel {
            dh_rows: vec![DhRow {
                a,
                d: 0.0,
                alpha: 0.0,
                theta_offset: 0.0,
            }],
            joint_limits: vec![JointLimit {
                pos: (-10.0, 10.0),
                vel: 10.0,
                acc: 100.0,
                jerk: 1000.0,
            }],
            tray_transform: Pose::identity(),
            gravity: Vector3::new(0.0, 0.0, -9.81),
        }
    }

    fn dh_matrix(row: &DhRow, q: f64) -> nalgebra::Matrix4<f64> {
        let theta = q + row.theta_offset;
        let (st, ct) = theta.sin_cos();
        let (sa, ca) = row.alpha.sin_cos();
        nalgebra::Matrix4::new(
            ct, -st * ca, st * sa, row.a * ct,
            st, ct * ca, -ct * sa, row.a * st,
            0.0, sa, ca, row.d,
            0.0, 0.0, 0.0, 1.0,
        )
    }

    #[test]
    fn fk_single_revolute_at_zero() {
        let model = single_joint_model(1.0);
        let pose = forward_kinematics(&model, &DVector::from_vec(vec![0.0])).unwrap();
        assert_relative_eq!(pose.translation, Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-15);
        assert_relative_eq!(pose.rotation, Matrix3::identity(), epsilon = 1e-15);
    }

    #[test]
    fn fk_matches_dense_dh_product() {
        // Independent oracle: homogeneous 4x4 products, including the tray mount.
        let model = RobotModel::default_6r();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let q = DVector::from_fn(6, |_, _| rng.random_range(-2.0..2.0));
            let mut t = nalgebra::Matrix4::identity();
            for (row, &qi) in model.dh_rows.iter().zip(q.iter()) {
                t *= dh_matrix(row, qi);
            }
            let mut mount = nalgebra::Matrix4::identity();
            mount
                .fixed_view_mut::<3, 3>(0, 0)
                .copy_from(&model.tray_transform.rotation);
            mount
                .fixed_view_mut::<3, 1>(0, 3)
                .copy_from(&model.tray_transform.translation);
            t *= mount;

            let pose = forward_kinematics(&model, &q).unwrap();
            assert_relative_eq!(
                pose.translation,
                Vector3::from(t.fixed_view::<3, 1>(0, 3)),
                epsilon = 1e-12
            );
            assert_relative_eq!(
                pose.rotation,
                Matrix3::from(t.fixed_view::<3, 3>(0, 0)),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn fk_is_deterministic() {
        let model = RobotModel::default_6r();
        let q = DVector::from_vec(vec![0.3, -1.1, 0.7, 0.2, -0.4, 1.9]);
        let a = forward_kinematics(&model, &q).unwrap();
        let b = forward_kinematics(&model, &q).unwrap();
        assert_eq!(a.translation, b.translation);
        assert_eq!(a.rotation, b.rotation);
    }

    #[test]
    fn fk_rotation_is_orthonormal_for_random_q() {
        let model = RobotModel::default_6r();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let q = DVector::from_fn(6, |_, _| rng.random_range(-3.0..3.0));
            let pose = forward_kinematics(&model, &q).unwrap();
            assert!(pose.rotation_is_orthonormal());
        }
    }

    #[test]
    fn tray_normal_level_and_rolled() {
        let model = single_joint_model(1.0);
        let n = tray_normal(&model, &DVector::from_vec(vec![0.4])).unwrap();
        assert_relative_eq!(n, Vector3::new(0.0, 0.0, 1.0), epsilon = 1e-9);

        // Roll the tray about world x by phi via the mount rotation.
        let phi = 0.3;
        let mut rolled = single_joint_model(1.0);
        rolled.tray_transform.rotation = Rotation3::from_axis_angle(&Vector3::x_axis(), phi)
            .into_inner();
        let n = tray_normal(&rolled, &DVector::from_vec(vec![0.0])).unwrap();
        assert_relative_eq!(n, Vector3::new(0.0, -phi.sin(), phi.cos()), epsilon = 1e-12);
    }

    #[test]
    fn tray_normal_unit_for_random_q() {
        let model = RobotModel::default_6r();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let q = DVector::from_fn(6, |_, _| rng.random_range(-3.1..3.1));
            let n = tray_normal(&model, &q).unwrap();
            assert!((n.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tray_normal_ignores_rates() {
        let model = RobotModel::default_6r();
        let q = DVector::from_vec(vec![0.5, -0.9, 1.1, 0.0, 0.7, -0.2]);
        let n = tray_normal(&model, &q).unwrap();
        // Depends on q only by construction; re-check against the full state path.
        let state = JointState {
            q: q.clone(),
            qd: DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0, -1.0, 0.4]),
            qdd: DVector::from_vec(vec![5.0, 1.0, -2.0, 0.0, 2.0, -3.0]),
        };
        let kin = tray_kinematics(
            &model,
            state.q.as_slice(),
            state.qd.as_slice(),
            state.qdd.as_slice(),
        );
        assert_relative_eq!(Vector3::from(kin.rot.value().column(2)), n, epsilon = 1e-15);
    }

    #[test]
    fn velocity_zero_when_stationary() {
        let model = RobotModel::default_6r();
        let q = DVector::from_vec(vec![0.1, -0.5, 0.9, 0.3, 0.2, -0.8]);
        let v = ee_linear_velocity(&model, &q, &DVector::zeros(6)).unwrap();
        assert_relative_eq!(v, Vector3::zeros(), epsilon = 1e-15);
    }

    #[test]
    fn velocity_single_joint_tangential() {
        let model = single_joint_model(1.0);
        let v = ee_linear_velocity(
            &model,
            &DVector::from_vec(vec![0.0]),
            &DVector::from_vec(vec![1.0]),
        )
        .unwrap();
        assert_relative_eq!(v, Vector3::new(0.0, 1.0, 0.0), epsilon = 1e-14);
    }

    /// Smooth joint path used by the finite-difference oracles.
    fn smooth_q(t: f64, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |i, _| {
            0.8 * ((1.0 + 0.3 * i as f64) * t + 0.5 * i as f64).sin()
        })
    }

    fn smooth_qd(t: f64, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |i, _| {
            let w = 1.0 + 0.3 * i as f64;
            0.8 * w * (w * t + 0.5 * i as f64).cos()
        })
    }

    fn smooth_qdd(t: f64, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |i, _| {
            let w = 1.0 + 0.3 * i as f64;
            -0.8 * w * w * (w * t + 0.5 * i as f64).sin()
        })
    }

    #[test]
    fn velocity_matches_fk_finite_difference() {
        let model = RobotModel::default_6r();
        let h = 1e-5;
        for k in 0..20 {
            let t = 0.1 + 0.11 * k as f64;
            let v = ee_linear_velocity(&model, &smooth_q(t, 6), &smooth_qd(t, 6)).unwrap();
            let p_plus = forward_kinematics(&model, &smooth_q(t + h, 6)).unwrap().translation;
            let p_minus = forward_kinematics(&model, &smooth_q(t - h, 6)).unwrap().translation;
            let fd = (p_plus - p_minus) / (2.0 * h);
            assert_relative_eq!(v, fd, max_relative = 1e-4, epsilon = 1e-8);
        }
    }

    #[test]
    fn acceleration_stationary_is_gravity_reaction() {
        let model = RobotModel::default_6r();
        let state = JointState::stationary(DVector::from_vec(vec![0.2, -1.0, 0.8, 0.1, 0.5, 0.0]));
        let a = centroid_acceleration(&model, &state, &Vector3::new(0.05, -0.02, 0.01)).unwrap();
        assert_relative_eq!(a, Vector3::new(0.0, 0.0, 9.81), epsilon = 1e-9);
    }

    #[test]
    fn acceleration_constant_spin_is_centripetal() {
        // Single revolute joint spinning at constant omega, centroid at radius r.
        let model = single_joint_model(1.0);
        let omega = 1.7;
        let state = JointState {
            q: DVector::from_vec(vec![0.0]),
            qd: DVector::from_vec(vec![omega]),
            qdd: DVector::from_vec(vec![0.0]),
        };
        let a = centroid_acceleration(&model, &state, &Vector3::zeros()).unwrap();
        // Radial component omega^2 * r toward the axis, vertical +g.
        assert_relative_eq!(
            a,
            Vector3::new(-omega * omega, 0.0, 9.81),
            epsilon = 1e-12
        );
        // Offset grows the radius.
        let a = centroid_acceleration(&model, &state, &Vector3::new(0.25, 0.0, 0.0)).unwrap();
        assert_relative_eq!(
            a,
            Vector3::new(-omega * omega * 1.25, 0.0, 9.81),
            epsilon = 1e-12
        );
    }

    #[test]
    fn acceleration_matches_second_finite_difference() {
        let model = RobotModel::default_6r();
        let offset = Vector3::new(0.03, -0.04, 0.02);
        let h = 1e-4;
        let point = |t: f64| {
            let pose = forward_kinematics(&model, &smooth_q(t, 6)).unwrap();
            pose.translation + pose.rotation * offset
        };
        for k in 0..20 {
            let t = 0.1 + 0.13 * k as f64;
            let state = JointState {
                q: smooth_q(t, 6),
                qd: smooth_qd(t, 6),
                qdd: smooth_qdd(t, 6),
            };
            let a = centroid_acceleration(&model, &state, &offset).unwrap();
            let fd = (point(t + h) - 2.0 * point(t) + point(t - h)) / (h * h);
            let expected = fd - model.gravity;
            assert_relative_eq!(a, expected, max_relative = 1e-3, epsilon = 1e-6);
        }
    }

    #[test]
    fn jacobian_matches_velocity_propagation() {
        let model = RobotModel::default_6r();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..20 {
            let q = DVector::from_fn(6, |_, _| rng.random_range(-2.5..2.5));
            let qd = DVector::from_fn(6, |_, _| rng.random_range(-1.5..1.5));
            let jac = geometric_jacobian(&model, &q).unwrap();
            let v = ee_linear_velocity(&model, &q, &qd).unwrap();
            let jv = &jac * &qd;
            assert_relative_eq!(v, Vector3::new(jv[0], jv[1], jv[2]), epsilon = 1e-12);
        }
    }

    #[test]
    fn ik_round_trips_fk() {
        let model = RobotModel::default_6r();
        let seed = default_level_seed();
        let target_q =
            &seed + DVector::from_vec(vec![0.2, -0.15, 0.1, 0.25, -0.1, 0.3]);
        let target = forward_kinematics(&model, &target_q).unwrap();
        let q = inverse_kinematics(&model, &target, &seed, &IkParams::default()).unwrap();
        let reached = forward_kinematics(&model, &q).unwrap();
        assert_relative_eq!(reached.translation, target.translation, epsilon = 1e-8);
        assert!((reached.rotation - target.rotation).norm() < 1e-8);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let model = RobotModel::default_6r();
        let err = forward_kinematics(&model, &DVector::zeros(4)).unwrap_err();
        assert!(matches!(err, RobotError::DimensionMismatch { expected: 6, got: 4 }));
    }
}
