//! Small scalar-generic linear algebra used by the kinematics core.
//!
//! The chain propagation and friction margins are written once, generically
//! over [`Scalar`], and evaluated either with plain `f64` or with
//! forward-mode dual numbers ([`Dual`]) when constraint Jacobians are needed.

use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::{Matrix3, Vector3};

/// Arithmetic required by the kinematic chain and margin functions.
pub trait Scalar:
    Copy
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(v: f64) -> Self;
    /// Real part (the value carried alongside any derivative payload).
    fn value(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn constant(v: f64) -> Self {
        v
    }
    #[inline]
    fn value(self) -> f64 {
        self
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// Number of derivative lanes carried by [`Dual`]; covers (q, q̇, q̈) of a
/// 6-joint arm. Models with more joints fall back to `f64` paths.
pub const MAX_DIFF_VARS: usize = 18;

/// Forward-mode dual number with a fixed-width gradient.
#[derive(Clone, Copy, Debug)]
pub struct Dual {
    pub re: f64,
    pub eps: [f64; MAX_DIFF_VARS],
}

impl Dual {
    #[inline]
    pub fn constant(v: f64) -> Self {
        Self {
            re: v,
            eps: [0.0; MAX_DIFF_VARS],
        }
    }

    /// A variable seeded to differentiate with respect to lane `index`.
    #[inline]
    pub fn variable(v: f64, index: usize) -> Self {
        let mut eps = [0.0; MAX_DIFF_VARS];
        eps[index] = 1.0;
        Self { re: v, eps }
    }
}

impl Add for Dual {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let mut eps = self.eps;
        for (e, r) in eps.iter_mut().zip(rhs.eps.iter()) {
            *e += r;
        }
        Self {
            re: self.re + rhs.re,
            eps,
        }
    }
}

impl Sub for Dual {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        let mut eps = self.eps;
        for (e, r) in eps.iter_mut().zip(rhs.eps.iter()) {
            *e -= r;
        }
        Self {
            re: self.re - rhs.re,
            eps,
        }
    }
}

impl Mul for Dual {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut eps = [0.0; MAX_DIFF_VARS];
        for i in 0..MAX_DIFF_VARS {
            eps[i] = self.eps[i] * rhs.re + rhs.eps[i] * self.re;
        }
        Self {
            re: self.re * rhs.re,
            eps,
        }
    }
}

impl Div for Dual {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let inv = 1.0 / rhs.re;
        let re = self.re * inv;
        let mut eps = [0.0; MAX_DIFF_VARS];
        for i in 0..MAX_DIFF_VARS {
            eps[i] = (self.eps[i] - re * rhs.eps[i]) * inv;
        }
        Self { re, eps }
    }
}

impl Neg for Dual {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        let mut eps = self.eps;
        for e in eps.iter_mut() {
            *e = -*e;
        }
        Self { re: -self.re, eps }
    }
}

impl Scalar for Dual {
    #[inline]
    fn constant(v: f64) -> Self {
        Dual::constant(v)
    }
    #[inline]
    fn value(self) -> f64 {
        self.re
    }
    #[inline]
    fn sin(self) -> Self {
        let (s, c) = self.re.sin_cos();
        let mut eps = self.eps;
        for e in eps.iter_mut() {
            *e *= c;
        }
        Self { re: s, eps }
    }
    #[inline]
    fn cos(self) -> Self {
        let (s, c) = self.re.sin_cos();
        let mut eps = self.eps;
        for e in eps.iter_mut() {
            *e *= -s;
        }
        Self { re: c, eps }
    }
    #[inline]
    fn sqrt(self) -> Self {
        let r = self.re.sqrt();
        let half_inv = 0.5 / r;
        let mut eps = self.eps;
        for e in eps.iter_mut() {
            *e *= half_inv;
        }
        Self { re: r, eps }
    }
}

/// 3-vector over any [`Scalar`].
#[derive(Clone, Copy, Debug)]
pub struct Vec3<S> {
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Scalar> Vec3<S> {
    #[inline]
    pub fn new(x: S, y: S, z: S) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        let z = S::constant(0.0);
        Self { x: z, y: z, z }
    }

    #[inline]
    pub fn from_f64(v: &Vector3<f64>) -> Self {
        Self {
            x: S::constant(v.x),
            y: S::constant(v.y),
            z: S::constant(v.z),
        }
    }

    #[inline]
    pub fn value(&self) -> Vector3<f64> {
        Vector3::new(self.x.value(), self.y.value(), self.z.value())
    }

    #[inline]
    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    #[inline]
    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    #[inline]
    pub fn scale(&self, s: S) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    #[inline]
    pub fn dot(&self, o: &Self) -> S {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(&self, o: &Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    /// `sqrt(‖v‖² + eps²)`: differentiable at the origin.
    #[inline]
    pub fn smooth_norm(&self, eps: f64) -> S {
        let e = S::constant(eps);
        (self.dot(self) + e * e).sqrt()
    }
}

/// Column-major 3×3 matrix over any [`Scalar`].
#[derive(Clone, Copy, Debug)]
pub struct Mat3<S> {
    pub cols: [Vec3<S>; 3],
}

impl<S: Scalar> Mat3<S> {
    #[inline]
    pub fn identity() -> Self {
        let o = S::constant(1.0);
        let z = S::constant(0.0);
        Self {
            cols: [
                Vec3::new(o, z, z),
                Vec3::new(z, o, z),
                Vec3::new(z, z, o),
            ],
        }
    }

    #[inline]
    pub fn from_f64(m: &Matrix3<f64>) -> Self {
        Self {
            cols: [
                Vec3::from_f64(&m.column(0).into()),
                Vec3::from_f64(&m.column(1).into()),
                Vec3::from_f64(&m.column(2).into()),
            ],
        }
    }

    #[inline]
    pub fn value(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[
            self.cols[0].value(),
            self.cols[1].value(),
            self.cols[2].value(),
        ])
    }

    #[inline]
    pub fn mul_vec(&self, v: &Vec3<S>) -> Vec3<S> {
        self.cols[0]
            .scale(v.x)
            .add(&self.cols[1].scale(v.y))
            .add(&self.cols[2].scale(v.z))
    }

    #[inline]
    pub fn mul_mat(&self, o: &Self) -> Self {
        Self {
            cols: [
                self.mul_vec(&o.cols[0]),
                self.mul_vec(&o.cols[1]),
                self.mul_vec(&o.cols[2]),
            ],
        }
    }
}
