//! Exact biquaternion and quaternion algebra.
//!
//! A biquaternion is `w + x·i + y·j + z·k` with complex coefficients. The
//! complex unit is written `I` and commutes with `i`, `j`, `k`. Every value
//! here is a plain `Copy` type; all operations are pure functions.

mod biquaternion;
mod factorize;
mod matrix;
mod quaternion;

pub use biquaternion::Biquaternion;
pub use factorize::{
    factorize, factorize_right, hyperbolic_matrix, Degeneracy, Factorization, Side,
    UNIT_TOLERANCE,
};
pub use matrix::BiquatMatrix;
pub use quaternion::Quaternion;

pub use num_complex::Complex64 as Complex;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("biquaternion is not unit: |norm - 1| = {deviation:e} exceeds {tolerance:e}")]
    NotUnit { deviation: f64, tolerance: f64 },
    #[error("biquaternion has zero norm and cannot be normalized")]
    ZeroNorm,
}

/// Principal square root of a complex number.
///
/// The result has a non-negative real part; when the real part is zero the
/// imaginary part is non-negative. Signed zeros in the input do not change
/// the branch.
pub fn principal_sqrt(c: Complex) -> Complex {
    // Clear negative zero so the branch cut is taken from above.
    let c = Complex::new(c.re + 0.0, c.im + 0.0);
    let mut r = c.sqrt();
    if r.re == 0.0 && r.im < 0.0 {
        r.im = -r.im;
    }
    if r.re < 0.0 {
        r = -r;
    }
    r
}
