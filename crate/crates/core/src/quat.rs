//! Quaternion algebra on `(w, v)` pairs and the unit-sphere types built on it.
//!
//! Conventions are Hamilton's: `ij = k`, `jk = i`, `ki = j`, `i² = j² = k² = -1`.
//! A point `p` on S² is carried as the pure unit quaternion `(0, p)`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Vector3;

use crate::error::{InterpError, Result};

pub type Vec3 = Vector3<f64>;

/// Tolerance for the unit-norm invariant.
pub const UNIT_TOL: f64 = 1e-12;
/// Tolerance for the zero-scalar-part invariant.
pub const PURE_TOL: f64 = 1e-12;

/// Below this vector norm the exp/log maps switch to their Taylor limits.
const SMALL_ANGLE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub v: Vec3,
}

impl Quaternion {
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self {
            w,
            v: Vector3::new(x, y, z),
        }
    }

    pub const fn from_parts(w: f64, v: Vec3) -> Self {
        Self { w, v }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub const fn pure(v: Vec3) -> Self {
        Self { w: 0.0, v }
    }

    pub fn norm_squared(&self) -> f64 {
        self.w * self.w + self.v.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Four-dimensional Euclidean inner product.
    pub fn dot(&self, other: &Self) -> f64 {
        self.w * other.w + self.v.dot(&other.v)
    }

    pub fn conjugate(&self) -> Self {
        Self::from_parts(self.w, -self.v)
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.v.iter().all(|c| c.is_finite())
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOL
    }

    pub fn is_pure(&self) -> bool {
        self.w.abs() <= PURE_TOL
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_parts(self.w * s, self.v * s)
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n <= 1e-300 {
            return Err(InterpError::ZeroNorm);
        }
        Ok(self.scale(1.0 / n))
    }

    /// `(a, -u) / (a² + |u|²)`.
    pub fn inverse(&self) -> Result<Self> {
        let n2 = self.norm_squared();
        if n2.sqrt() <= 1e-300 {
            return Err(InterpError::ZeroNorm);
        }
        Ok(self.conjugate().scale(1.0 / n2))
    }

    /// `exp(a) (cos|u|, sin|u|/|u| u)`.
    pub fn exp(&self) -> Self {
        let r = self.v.norm();
        let sinc = if r < SMALL_ANGLE {
            1.0 - r * r / 6.0
        } else {
            r.sin() / r
        };
        let ea = self.w.exp();
        Self::from_parts(ea * r.cos(), self.v * (ea * sinc))
    }

    /// `(ln|q|, arccos(a/|q|)/|u| u)`.
    ///
    /// The angle is taken from `atan2(|u|, a)`, which equals the arccos form but
    /// keeps full precision near `|u| = 0`. When `u = 0` the vector part is zero,
    /// including the `a < 0` case where the axis is undefined.
    pub fn ln(&self) -> Result<Self> {
        let n = self.norm();
        if n <= 1e-300 {
            return Err(InterpError::ZeroNorm);
        }
        let r = self.v.norm();
        let scale = if r == 0.0 {
            0.0
        } else if r < SMALL_ANGLE * n && self.w > 0.0 {
            // atan2(r, a)/r = (1/a)(1 - (r/a)²/3 + ...)
            let x = r / self.w;
            (1.0 - x * x / 3.0) / self.w
        } else {
            r.atan2(self.w) / r
        };
        Ok(Self::from_parts(n.ln(), self.v * scale))
    }

    /// `exp(exponent · ln q)`.
    pub fn powf(&self, exponent: f64) -> Result<Self> {
        Ok(self.ln()?.scale(exponent).exp())
    }

    /// Projects back onto the unit 3-sphere when the norm has drifted by more than
    /// [`UNIT_TOL`].
    pub(crate) fn renormalized(self) -> Self {
        let n = self.norm();
        if (n - 1.0).abs() > UNIT_TOL && n > 0.0 {
            self.scale(1.0 / n)
        } else {
            self
        }
    }

    pub(crate) fn renormalized_or(self, fallback: Quaternion) -> Self {
        let n = self.norm();
        if n > 1e-300 {
            self.scale(1.0 / n)
        } else {
            fallback
        }
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    /// Hamilton product `(a1a2 - u1·u2, a1u2 + a2u1 + u1×u2)`.
    fn mul(self, rhs: Quaternion) -> Quaternion {
        Quaternion::from_parts(
            self.w * rhs.w - self.v.dot(&rhs.v),
            rhs.v * self.w + self.v * rhs.w + self.v.cross(&rhs.v),
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;

    fn mul(self, rhs: f64) -> Quaternion {
        self.scale(rhs)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion::from_parts(self.w + rhs.w, self.v + rhs.v)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;

    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion::from_parts(self.w - rhs.w, self.v - rhs.v)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        Quaternion::from_parts(-self.w, -self.v)
    }
}

/// A unit vector on S².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint(Vec3);

impl SpherePoint {
    /// Accepts `p` only if it is already unit to [`UNIT_TOL`].
    pub fn new(p: Vec3) -> Result<Self> {
        if !p.iter().all(|c| c.is_finite()) {
            return Err(InterpError::NonFinite);
        }
        let n = p.norm();
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(InterpError::NotUnit { norm: n });
        }
        Ok(Self(p))
    }

    pub fn from_xyz(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vec3::new(x, y, z))
    }

    /// Normalizes any finite nonzero vector onto the sphere.
    pub fn normalize(p: Vec3) -> Result<Self> {
        if !p.iter().all(|c| c.is_finite()) {
            return Err(InterpError::NonFinite);
        }
        let n = p.norm();
        if n <= 1e-300 {
            return Err(InterpError::ZeroNorm);
        }
        Ok(Self(p / n))
    }

    /// Vector part of a (nearly) pure unit quaternion, renormalized.
    pub(crate) fn from_quaternion_unchecked(q: &Quaternion) -> Self {
        let n = q.v.norm();
        if (n - 1.0).abs() > UNIT_TOL && n > 0.0 {
            Self(q.v / n)
        } else {
            Self(q.v)
        }
    }

    pub fn from_quaternion(q: &Quaternion) -> Result<Self> {
        if !q.is_pure() {
            return Err(InterpError::Impurity { w: q.w });
        }
        Self::new(q.v)
    }

    pub fn vector(&self) -> Vec3 {
        self.0
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }

    pub fn y(&self) -> f64 {
        self.0.y
    }

    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn to_quaternion(&self) -> Quaternion {
        Quaternion::pure(self.0)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.dot(&other.0)
    }

    /// Great-circle angle in `[0, π]`.
    pub fn angle_to(&self, other: &Self) -> f64 {
        self.0.cross(&other.0).norm().atan2(self.0.dot(&other.0))
    }

    pub fn antipode(&self) -> Self {
        Self(-self.0)
    }
}

impl From<SpherePoint> for Quaternion {
    fn from(p: SpherePoint) -> Self {
        p.to_quaternion()
    }
}

/// Unit quaternion `(cos θ/2, sin θ/2 · axis)` acting by conjugation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationQuaternion {
    q: Quaternion,
}

impl RotationQuaternion {
    /// Rotation by `angle` about `axis`. A zero angle pins the axis to `+z`.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Self> {
        if angle == 0.0 {
            return Ok(Self {
                q: Quaternion::identity(),
            });
        }
        let n = axis.norm();
        if n <= 1e-300 {
            return Err(InterpError::ZeroNorm);
        }
        let half = 0.5 * angle;
        Ok(Self {
            q: Quaternion::from_parts(half.cos(), axis * (half.sin() / n)),
        })
    }

    pub fn from_quaternion(q: Quaternion) -> Result<Self> {
        let norm = q.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(InterpError::NonUnitRotation { norm });
        }
        Ok(Self {
            q: q.renormalized(),
        })
    }

    /// The rotation carrying `a` onto `b` about `a × b / sin θ`.
    pub fn between(a: &SpherePoint, b: &SpherePoint) -> Result<Self> {
        let angle = a.angle_to(b);
        if angle >= std::f64::consts::PI - 1e-9 {
            return Err(InterpError::AntipodalPoints { angle });
        }
        let axis = a.vector().cross(&b.vector());
        if axis.norm() <= 1e-300 {
            return Self::from_axis_angle(Vec3::z(), 0.0);
        }
        Self::from_axis_angle(axis, angle)
    }

    pub fn quaternion(&self) -> Quaternion {
        self.q
    }

    pub fn angle(&self) -> f64 {
        2.0 * self.q.v.norm().atan2(self.q.w)
    }

    pub fn axis(&self) -> Vec3 {
        let n = self.q.v.norm();
        if n <= 1e-300 {
            Vec3::z()
        } else {
            self.q.v / n
        }
    }
}

/// `r (0, p) r⁻¹`, renormalized.
pub fn rotate(p: &SpherePoint, r: &RotationQuaternion) -> SpherePoint {
    let q = r.q * p.to_quaternion() * r.q.conjugate();
    SpherePoint::from_quaternion_unchecked(&q)
}
