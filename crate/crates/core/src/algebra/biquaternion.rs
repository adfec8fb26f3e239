use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{principal_sqrt, AlgebraError, BiquatMatrix, Complex, Quaternion};

/// Biquaternion `w + x·i + y·j + z·k` with complex coefficients.
///
/// The same eight reals can be read as a pair of real quaternions,
/// `q = q_r + q_i·I`, where `q_r` collects the real parts of the coefficients
/// and `q_i` the imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Biquaternion {
    pub w: Complex,
    pub x: Complex,
    pub y: Complex,
    pub z: Complex,
}

const fn c(re: f64, im: f64) -> Complex {
    Complex { re, im }
}

impl Biquaternion {
    pub const ZERO: Self = Self::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
    pub const ONE: Self = Self::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
    pub const I: Self = Self::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
    pub const J: Self = Self::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
    pub const K: Self = Self::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
    /// The complex unit, as a scalar biquaternion.
    pub const COMPLEX_UNIT: Self =
        Self::new(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));

    pub const fn new(w: Complex, x: Complex, y: Complex, z: Complex) -> Self {
        Self { w, x, y, z }
    }

    /// Builds `q_r + q_i·I`.
    pub fn from_parts(real: Quaternion, imaginary: Quaternion) -> Self {
        Self::new(
            c(real.w, imaginary.w),
            c(real.x, imaginary.x),
            c(real.y, imaginary.y),
            c(real.z, imaginary.z),
        )
    }

    /// Reads eight reals in `w_r, w_i, x_r, x_i, y_r, y_i, z_r, z_i` order.
    pub fn from_reals(r: [f64; 8]) -> Self {
        Self::new(c(r[0], r[1]), c(r[2], r[3]), c(r[4], r[5]), c(r[6], r[7]))
    }

    /// Inverse of [`Biquaternion::from_reals`].
    pub fn to_reals(self) -> [f64; 8] {
        [
            self.w.re, self.w.im, self.x.re, self.x.im, self.y.re, self.y.im, self.z.re,
            self.z.im,
        ]
    }

    pub fn real_part(self) -> Quaternion {
        Quaternion::new(self.w.re, self.x.re, self.y.re, self.z.re)
    }

    pub fn imaginary_part(self) -> Quaternion {
        Quaternion::new(self.w.im, self.x.im, self.y.im, self.z.im)
    }

    /// The coefficient vector `[w, x, y, z]`.
    pub fn vector_rep(self) -> [Complex; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_vector_rep(v: [Complex; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn scalar(self) -> Complex {
        self.w
    }

    pub fn vector(self) -> Self {
        Self::new(Complex::new(0.0, 0.0), self.x, self.y, self.z)
    }

    /// `w - x·i - y·j - z·k`.
    pub fn conjugate(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Complex-conjugates each coefficient.
    pub fn complex_conjugate(self) -> Self {
        Self::new(self.w.conj(), self.x.conj(), self.y.conj(), self.z.conj())
    }

    pub fn scale(self, s: Complex) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// `w² + x² + y² + z²`, computed with complex arithmetic (no conjugation).
    pub fn norm_squared(self) -> Complex {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Principal square root of [`Biquaternion::norm_squared`].
    ///
    /// This is complex in general and vanishes on nonzero null elements such
    /// as `1 + I·i`.
    pub fn norm(self) -> Complex {
        principal_sqrt(self.norm_squared())
    }

    /// `q / norm(q)`.
    pub fn normalized(self) -> Result<Self, AlgebraError> {
        let n = self.norm();
        if n.norm() == 0.0 {
            return Err(AlgebraError::ZeroNorm);
        }
        Ok(self.scale(n.inv()))
    }

    pub fn matrix_rep(self) -> BiquatMatrix {
        BiquatMatrix::from_biquaternion(self)
    }

    /// Largest absolute difference over the eight real components.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        self.to_reals()
            .iter()
            .zip(other.to_reals())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Add for Biquaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Biquaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Biquaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Biquaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self, o);
        Self::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities() {
        let q = Biquaternion::from_reals([0.3, -1.0, 2.0, 0.5, -0.25, 4.0, 1.5, -2.5]);
        assert_eq!(q + Biquaternion::ZERO, q);
        assert_eq!(Biquaternion::ONE * q, q);
        assert_eq!(q * Biquaternion::ONE, q);
        assert_eq!(q.conjugate().conjugate(), q);
        assert_eq!(q.complex_conjugate().complex_conjugate(), q);
    }

    #[test]
    fn coefficientwise_addition() {
        let a = Biquaternion::new(c(1.0, 2.0), c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let b = Biquaternion::I;
        let expected = Biquaternion::new(c(1.0, 2.0), c(4.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(a + b, expected);
    }

    #[test]
    fn unit_multiplication_table() {
        use Biquaternion as B;
        assert_eq!(B::I * B::J, B::K);
        assert_eq!(B::J * B::I, -B::K);
        assert_eq!(B::J * B::K, B::I);
        assert_eq!(B::K * B::J, -B::I);
        assert_eq!(B::K * B::I, B::J);
        assert_eq!(B::I * B::K, -B::J);
        assert_eq!(B::I * B::I, -B::ONE);
        assert_eq!(B::COMPLEX_UNIT * B::COMPLEX_UNIT, -B::ONE);
        assert_eq!(B::COMPLEX_UNIT * B::I, B::I * B::COMPLEX_UNIT);
    }

    #[test]
    fn null_element_has_zero_norm() {
        let q = Biquaternion::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_ne!(q, Biquaternion::ZERO);
        assert_eq!(q.norm(), c(0.0, 0.0));
        assert_eq!(q.normalized(), Err(AlgebraError::ZeroNorm));
        assert_eq!(Biquaternion::ONE.norm(), c(1.0, 0.0));
    }

    #[test]
    fn parts_view_matches_coefficient_view() {
        let r = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];
        let q = Biquaternion::from_reals(r);
        assert_eq!(q.real_part(), Quaternion::new(0.1, 0.3, 0.5, 0.7));
        assert_eq!(q.imaginary_part(), Quaternion::new(0.2, 0.4, 0.6, 0.8));
        assert_eq!(Biquaternion::from_parts(q.real_part(), q.imaginary_part()), q);
        assert_eq!(q.to_reals(), r);
        assert_eq!(q.vector_rep(), [q.w, q.x, q.y, q.z]);
    }

    #[test]
    fn normalized_has_unit_norm() {
        let q = Biquaternion::from_reals([1.0, 0.5, -0.3, 0.2, 0.7, -1.1, 0.05, 0.4]);
        let n = q.normalized().unwrap().norm();
        assert!((n - c(1.0, 0.0)).norm() < 1e-14);
    }
}
