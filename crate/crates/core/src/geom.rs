//! Exact small-dimension geometry kernel.
//!
//! 3-vectors, quaternions, rotations about arbitrary axes, and the
//! closed-form eigenproblem for 2×2 Hermitian matrices. Rotations are stored
//! as unit quaternions: composition stays exact up to rounding and
//! renormalization is cheap, which matters because flow iterates compose many
//! rotations. ℝ³ is identified with the imaginary quaternions, so the kernel
//! also hosts the conjugation map `q ↦ q̄ i q` used by the two-frame module.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use thiserror::Error;

/// Errors from kernel constructors with contract violations.
#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    /// A rotation axis must be a unit vector.
    #[error("rotation axis must have unit norm, got |axis| = {norm}")]
    NonUnitAxis { norm: f64 },
}

// ---------------------------------------------------------------------------
// Vec3
// ---------------------------------------------------------------------------

/// Vector in ℝ³.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const ZERO: Vec3 = Vec3 {
    x: 0.0,
    y: 0.0,
    z: 0.0,
};
pub const E1: Vec3 = Vec3 {
    x: 1.0,
    y: 0.0,
    z: 0.0,
};
pub const E2: Vec3 = Vec3 {
    x: 0.0,
    y: 1.0,
    z: 0.0,
};
pub const E3: Vec3 = Vec3 {
    x: 0.0,
    y: 0.0,
    z: 1.0,
};

/// The standard basis, in order.
pub const BASIS: [Vec3; 3] = [E1, E2, E3];

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Self) -> Self {
        Self {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    /// `self / |self|`; returns `None` for vectors shorter than `eps`.
    pub fn normalized(self, eps: f64) -> Option<Self> {
        let n = self.norm();
        (n > eps).then(|| self * (1.0 / n))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// A deterministic unit vector orthogonal to `self` (which must be
    /// nonzero): cross with the least-aligned basis vector.
    pub fn any_unit_normal(self) -> Self {
        let a = [self.x.abs(), self.y.abs(), self.z.abs()];
        let i = (0..3).min_by(|&p, &q| a[p].total_cmp(&a[q])).unwrap();
        self.cross(BASIS[i]).normalized(0.0).expect("nonzero input")
    }
}

impl Add for Vec3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for Vec3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Scalar triple product `⟨a, b × c⟩ = det(a, b, c)`.
pub fn det3(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    a.dot(b.cross(c))
}

// ---------------------------------------------------------------------------
// Quaternion
// ---------------------------------------------------------------------------

/// Quaternion `re + i·i + j·j + k·k` over the reals.
///
/// Multiplication follows the Hamilton convention (`ij = k`). A complex pair
/// `(z, w)` embeds as `z + jw`, matching the identification ℍ = ℂ ⊕ jℂ.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub re: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

impl Quaternion {
    pub const fn new(re: f64, i: f64, j: f64, k: f64) -> Self {
        Self { re, i, j, k }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    /// Purely imaginary quaternion with vector part `v`.
    pub const fn pure(v: Vec3) -> Self {
        Self::new(0.0, v.x, v.y, v.z)
    }

    /// Embed the complex pair `(z, w)` as `z + wj`.
    ///
    /// Since `jc = c̄j` this is the splitting ℍ = ℂ ⊕ jℂ with the second
    /// summand written `w ↦ w̄j`; it is the embedding under which
    /// `q̄ i q = i(|z|² − |w|² + 2z̄wj)` holds in the Hamilton convention.
    pub fn from_complex_pair(z: Complex64, w: Complex64) -> Self {
        Self::new(z.re, z.im, w.re, w.im)
    }

    /// Vector (imaginary) part in the `(i, j, k)` basis.
    pub fn imag(self) -> Vec3 {
        Vec3::new(self.i, self.j, self.k)
    }

    pub fn conjugate(self) -> Self {
        Self::new(self.re, -self.i, -self.j, -self.k)
    }

    pub fn norm_sq(self) -> f64 {
        self.re * self.re + self.i * self.i + self.j * self.j + self.k * self.k
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(self, s: f64) -> Self {
        Self::new(self.re * s, self.i * s, self.j * s, self.k * s)
    }

    pub fn normalized(self) -> Self {
        self.scaled(1.0 / self.norm())
    }

    /// Inverse; for unit quaternions this is the conjugate.
    pub fn inverse(self) -> Self {
        self.conjugate().scaled(1.0 / self.norm_sq())
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let Quaternion {
            re: a,
            i: b,
            j: c,
            k: d,
        } = self;
        let Quaternion {
            re: e,
            i: f,
            j: g,
            k: h,
        } = o;
        Self {
            re: a * e - b * f - c * g - d * h,
            i: a * f + b * e + c * h - d * g,
            j: a * g - b * h + c * e + d * f,
            k: a * h + b * g - c * f + d * e,
        }
    }
}

// ---------------------------------------------------------------------------
// Rotation
// ---------------------------------------------------------------------------

/// Rotation of ℝ³, stored as a unit quaternion.
///
/// `from_axis_angle(axis, t)` is the right-handed rotation of angle `t`
/// around `axis`; the generator of `t ↦ R(axis, t)·v` at `t = 0` is
/// `axis × v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    q: Quaternion,
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        q: Quaternion::new(1.0, 0.0, 0.0, 0.0),
    };

    /// Rotation of `angle` radians about the unit vector `axis`.
    ///
    /// Errors when `axis` is not unit within the kernel tolerance.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Self, GeomError> {
        let norm = axis.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(GeomError::NonUnitAxis { norm });
        }
        Ok(Self::about_axis_unchecked(axis * (1.0 / norm), angle))
    }

    /// Same as [`Rotation::from_axis_angle`] but normalizes the axis itself.
    /// The axis must be nonzero.
    pub fn about_axis_unchecked(axis: Vec3, angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        let v = axis * (s / axis.norm());
        Self {
            q: Quaternion::new(c, v.x, v.y, v.z),
        }
    }

    /// Rotation from a unit quaternion (renormalized defensively).
    pub fn from_unit_quaternion(q: Quaternion) -> Self {
        Self { q: q.normalized() }
    }

    /// The shortest rotation taking unit vector `a` to unit vector `b`.
    pub fn from_arc(a: Vec3, b: Vec3) -> Self {
        let d = a.dot(b);
        if d < -1.0 + 1e-12 {
            // Antipodal pair: rotate by π about any normal of `a`.
            return Self::about_axis_unchecked(a.any_unit_normal(), std::f64::consts::PI);
        }
        let v = a.cross(b);
        Self {
            q: Quaternion::new(1.0 + d, v.x, v.y, v.z).normalized(),
        }
    }

    pub fn quaternion(self) -> Quaternion {
        self.q
    }

    /// Apply the rotation: `v ↦ q v q⁻¹`.
    pub fn apply(self, v: Vec3) -> Vec3 {
        (self.q * Quaternion::pure(v) * self.q.conjugate()).imag()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: Self) -> Self {
        Self {
            q: (self.q * other.q).normalized(),
        }
    }

    pub fn inverse(self) -> Self {
        Self {
            q: self.q.conjugate(),
        }
    }
}

/// Rotate `v` by `r`.
pub fn rotate(r: Rotation, v: Vec3) -> Vec3 {
    r.apply(v)
}

// ---------------------------------------------------------------------------
// 2×2 Hermitian eigenproblem
// ---------------------------------------------------------------------------

/// Eigenvalues `(λ1, λ2)`, `λ1 ≥ λ2`, of the Hermitian matrix
/// `[[g11, g12], [conj(g12), g22]]`, in closed form.
pub fn herm2_eigs(g11: f64, g22: f64, g12: Complex64) -> (f64, f64) {
    let mid = 0.5 * (g11 + g22);
    let radius = f64::hypot(0.5 * (g11 - g22), g12.norm());
    (mid + radius, mid - radius)
}

/// Conjugation map ℍ → Iℍ, `q ↦ q̄ i q`, expressed on the complex pair
/// `q = z + jw`. In `(i, j, k)` coordinates:
/// `(|z|² − |w|², −2 Im(z̄w), 2 Re(z̄w))`.
pub fn conj_i(z: Complex64, w: Complex64) -> Vec3 {
    let t = z.conj() * w;
    Vec3::new(z.norm_sqr() - w.norm_sqr(), -2.0 * t.im, 2.0 * t.re)
}
