//! Complex and quaternion arithmetic, unit directions on S¹ and S², and rotors.
//!
//! The quaternion convention is Hamilton's with a right-handed basis:
//! `i² = j² = k² = ijk = −1`, hence `ij = k`, `jk = i`, `ki = j`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for closed-form identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Tolerance for validating unit-norm inputs.
pub const UNIT_NORM_TOL: f64 = 1e-9;

/// Shared surface of the two generator codomains.
pub trait Hypercomplex: Copy + fmt::Debug + Mul<Output = Self> + Neg<Output = Self> + Send + Sync {
    /// Real (scalar) part.
    fn scalar_part(&self) -> f64;
    /// Imaginary/vector parts negated.
    fn conjugate(&self) -> Self;
    /// Euclidean norm.
    fn norm(&self) -> f64;
    fn scale(self, factor: f64) -> Self;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ONE: Complex = Complex { re: 1.0, im: 0.0 };
    pub const I: Complex = Complex { re: 0.0, im: 1.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    /// `e^{iφ}`.
    pub fn from_phase(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self { re: c, im: s }
    }

    /// Embeds `re + im·i` as `re + im·k`, the (1, k) plane of the quaternions.
    pub fn to_quaternion_k(self) -> Quaternion {
        Quaternion::new(self.re, 0.0, 0.0, self.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, rhs: Complex) -> Complex {
        Complex { re: self.re * rhs.re - self.im * rhs.im, im: self.re * rhs.im + self.im * rhs.re }
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

impl Hypercomplex for Complex {
    fn scalar_part(&self) -> f64 {
        self.re
    }
    fn conjugate(&self) -> Self {
        Complex::new(self.re, -self.im)
    }
    fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }
    fn scale(self, factor: f64) -> Self {
        Complex::new(self.re * factor, self.im * factor)
    }
}

/// `w + x·i + y·j + z·k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// Pure quaternion `u_x i + u_y j + u_z k`.
    pub fn pure(v: [f64; 3]) -> Self {
        Self::new(0.0, v[0], v[1], v[2])
    }

    pub fn vector(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn max_abs_diff(&self, other: &Quaternion) -> f64 {
        (self.w - other.w)
            .abs()
            .max((self.x - other.x).abs())
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

/// Hamilton product.
pub fn qmul(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion {
        w: p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        x: p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        y: p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        z: p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        qmul(self, rhs)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Hypercomplex for Quaternion {
    fn scalar_part(&self) -> f64 {
        self.w
    }
    fn conjugate(&self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }
    fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
    fn scale(self, factor: f64) -> Self {
        Quaternion::new(self.w * factor, self.x * factor, self.y * factor, self.z * factor)
    }
}

/// `e^{θu} = cos θ + u sin θ` for a unit axis `u`.
pub fn rotor(theta: f64, axis: Direction3) -> Quaternion {
    let (s, c) = theta.sin_cos();
    Quaternion::new(c, axis.x * s, axis.y * s, axis.z * s)
}

/// [`rotor`] over an unchecked axis; rejects axes whose norm is off by more than [`UNIT_NORM_TOL`].
pub fn try_rotor(theta: f64, axis: [f64; 3]) -> Result<Quaternion> {
    Ok(rotor(theta, Direction3::new(axis[0], axis[1], axis[2])?))
}

/// A direction on S¹, stored as its angle in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction2 {
    theta: f64,
}

impl Direction2 {
    pub fn new(theta: f64) -> Self {
        let mut t = theta.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs.
        if t >= TAU {
            t = 0.0;
        }
        Self { theta: t }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn rotated(&self, by: f64) -> Self {
        Self::new(self.theta + by)
    }

    pub fn to_vector(&self) -> [f64; 2] {
        let (s, c) = self.theta.sin_cos();
        [c, s]
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_signed(angle: f64) -> f64 {
    let t = (angle + PI).rem_euclid(TAU) - PI;
    if t <= -PI {
        t + TAU
    } else {
        t
    }
}

/// A direction on S².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction3 {
    x: f64,
    y: f64,
    z: f64,
}

impl Direction3 {
    pub const X: Direction3 = Direction3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Direction3 = Direction3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Direction3 = Direction3 { x: 0.0, y: 0.0, z: 1.0 };

    /// Accepts an already-unit vector.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidAxis { norm });
        }
        Ok(Self { x, y, z })
    }

    /// Rescales a nonzero vector onto the sphere.
    pub fn normalize(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !norm.is_finite() || norm < UNIT_NORM_TOL {
            return Err(Error::InvalidAxis { norm });
        }
        Ok(Self { x: v[0] / norm, y: v[1] / norm, z: v[2] / norm })
    }

    /// Direction at angle `theta` from x̂ in the x–y plane.
    pub fn in_plane(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: c, y: s, z: 0.0 }
    }

    /// Spherical coordinates: polar angle from ẑ, azimuth from x̂.
    pub fn from_spherical(polar: f64, azimuth: f64) -> Self {
        let (sp, cp) = polar.sin_cos();
        let (sa, ca) = azimuth.sin_cos();
        Self { x: sp * ca, y: sp * sa, z: cp }
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Direction3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Direction3) -> [f64; 3] {
        cross(self.to_array(), other.to_array())
    }

    pub fn flipped(&self) -> Self {
        Self { x: -self.x, y: -self.y, z: -self.z }
    }

    /// Some unit vector orthogonal to `self`, chosen deterministically.
    pub fn any_orthogonal(&self) -> Self {
        // Cross with the basis vector least aligned with self.
        let (ax, ay, az) = (self.x.abs(), self.y.abs(), self.z.abs());
        let basis = if ax <= ay && ax <= az {
            Direction3::X
        } else if ay <= az {
            Direction3::Y
        } else {
            Direction3::Z
        };
        Direction3::normalize(self.cross(&basis)).expect("least-aligned basis vector is never parallel")
    }
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Angle between two directions of the same dimension.
pub trait AngleBetween {
    /// 2d: the signed difference `θ_self − θ_other` wrapped to `(−π, π]`.
    /// 3d: the unsigned angle `arccos(self·other)` in `[0, π]`.
    fn angle_between(&self, other: &Self) -> f64;
}

impl AngleBetween for Direction2 {
    fn angle_between(&self, other: &Self) -> f64 {
        wrap_signed(self.theta - other.theta)
    }
}

impl AngleBetween for Direction3 {
    fn angle_between(&self, other: &Self) -> f64 {
        // atan2 of |a×b| and a·b stays accurate near 0 and π.
        let c = self.cross(other);
        let s = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        s.atan2(self.dot(other))
    }
}

pub fn angle_between<D: AngleBetween>(a: &D, b: &D) -> f64 {
    a.angle_between(b)
}

/// Normalized `r × a`; fails when the two are (anti)parallel.
pub fn rotation_axis(r: &Direction3, a: &Direction3) -> Result<Direction3> {
    let c = r.cross(a);
    let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    if n < UNIT_NORM_TOL {
        return Err(Error::DegenerateParallel);
    }
    Ok(Direction3 { x: c[0] / n, y: c[1] / n, z: c[2] / n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn basis_identities() {
        let minus_one = Quaternion::new(-1.0, 0.0, 0.0, 0.0);
        assert_eq!(Quaternion::I * Quaternion::I, minus_one);
        assert_eq!(Quaternion::J * Quaternion::J, minus_one);
        assert_eq!(Quaternion::K * Quaternion::K, minus_one);
        assert_eq!(Quaternion::I * Quaternion::J * Quaternion::K, minus_one);
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        assert_eq!(Quaternion::J * Quaternion::I, -Quaternion::K);
    }

    #[test]
    fn identity_element() {
        let q = Quaternion::new(0.3, -1.2, 2.5, 0.7);
        assert_eq!(Quaternion::ONE * q, q);
        assert_eq!(q * Quaternion::ONE, q);
    }

    #[test]
    fn rotor_examples() {
        assert_eq!(rotor(0.0, Direction3::Y), Quaternion::ONE);
        let q = rotor(FRAC_PI_2, Direction3::X);
        assert!(q.max_abs_diff(&Quaternion::I) < IDENTITY_TOL);
        let q = rotor(FRAC_PI_3, Direction3::Z);
        assert_abs_diff_eq!(q.w, 0.5, epsilon = IDENTITY_TOL);
        assert_abs_diff_eq!(q.z, 3f64.sqrt() / 2.0, epsilon = IDENTITY_TOL);
        assert_eq!((q.x, q.y), (0.0, 0.0));
    }

    #[test]
    fn rotor_rejects_non_unit_axis() {
        assert!(matches!(try_rotor(0.1, [1.0, 1.0, 0.0]), Err(Error::InvalidAxis { .. })));
        assert!(try_rotor(0.1, [1.0 + 1e-10, 0.0, 0.0]).is_ok());
    }

    #[test]
    fn scalar_parts() {
        let theta = 0.37;
        let axis = Direction3::normalize([1.0, 2.0, -0.5]).unwrap();
        assert_abs_diff_eq!(rotor(theta, axis).scalar_part(), theta.cos(), epsilon = IDENTITY_TOL);
        assert_eq!(Quaternion::pure(axis.to_array()).scalar_part(), 0.0);
        assert_abs_diff_eq!(Complex::from_phase(2.0 * theta).scalar_part(), (2.0 * theta).cos());
    }

    #[test]
    fn conjugates() {
        let t = 0.81;
        let e = Complex::from_phase(2.0 * t).conjugate();
        let expected = Complex::from_phase(-2.0 * t);
        assert_abs_diff_eq!(e.re, expected.re, epsilon = IDENTITY_TOL);
        assert_abs_diff_eq!(e.im, expected.im, epsilon = IDENTITY_TOL);
        assert_eq!(Complex::ONE.conjugate(), Complex::ONE);
        assert_eq!(Quaternion::ONE.conjugate(), Quaternion::ONE);
        let u = Direction3::normalize([0.2, -0.4, 0.9]).unwrap();
        let diff = rotor(t, u).conjugate().max_abs_diff(&rotor(-t, u));
        assert!(diff < IDENTITY_TOL);
    }

    #[test]
    fn angles() {
        let a = Direction2::new(FRAC_PI_2);
        let b = Direction2::new(FRAC_PI_4);
        assert_abs_diff_eq!(a.angle_between(&b), FRAC_PI_4, epsilon = IDENTITY_TOL);
        assert_abs_diff_eq!(b.angle_between(&a), -FRAC_PI_4, epsilon = IDENTITY_TOL);
        assert_eq!(a.angle_between(&a), 0.0);
        assert_abs_diff_eq!(Direction3::X.angle_between(&Direction3::Z), FRAC_PI_2);
        assert_eq!(Direction3::Y.angle_between(&Direction3::Y), 0.0);
    }

    #[test]
    fn direction2_canonical_range() {
        for t in [-1e-300, -TAU, -0.5, 7.0, 4.0 * TAU] {
            let d = Direction2::new(t);
            assert!((0.0..TAU).contains(&d.theta()), "{t} -> {}", d.theta());
        }
    }

    #[test]
    fn rotation_axes() {
        assert_eq!(rotation_axis(&Direction3::X, &Direction3::Y).unwrap(), Direction3::Z);
        assert_eq!(rotation_axis(&Direction3::X, &Direction3::Z).unwrap(), Direction3::Y.flipped());
        assert_eq!(rotation_axis(&Direction3::X, &Direction3::X), Err(Error::DegenerateParallel));
        assert_eq!(rotation_axis(&Direction3::X, &Direction3::X.flipped()), Err(Error::DegenerateParallel));
    }

    #[test]
    fn orthogonal_fallback() {
        for d in [Direction3::X, Direction3::Y, Direction3::Z, Direction3::normalize([1.0, 1.0, 1.0]).unwrap()] {
            let o = d.any_orthogonal();
            assert!(d.dot(&o).abs() < IDENTITY_TOL);
        }
    }

    #[test]
    fn direction3_validation() {
        assert!(Direction3::new(1.0, 0.0, 0.0).is_ok());
        assert!(matches!(Direction3::new(0.5, 0.0, 0.0), Err(Error::InvalidAxis { .. })));
        assert!(Direction3::normalize([0.0, 0.0, 0.0]).is_err());
    }
}
