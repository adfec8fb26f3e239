//! Splitting a unit biquaternion into a circular and a hyperbolic rotation.
//!
//! For a unit biquaternion `q = q_r + q_i·I` the real quaternions satisfy
//! `‖q_r‖² − ‖q_i‖² = 1` and `q̄_r·q_i` is pure, so with
//!
//! ```text
//! u  = q_r / ‖q_r‖
//! h  = ‖q_r‖ + I·(a·i + b·j + c·k)·‖q_i‖,   a·i + b·j + c·k = q̄_r·q_i / (‖q_r‖‖q_i‖)
//! h' = ‖q_r‖ + I·(a'·i + b'·j + c'·k)·‖q_i‖, a'·i + b'·j + c'·k = q_i·q̄_r / (‖q_r‖‖q_i‖)
//! ```
//!
//! we get `q = u·h = h'·u`, hence `M(q) = M(h)·M(u) = M(u)·M(h')`. `M(u)` is a
//! rotation by the real angle `θ = acos(w_r/‖q_r‖)` and `M(h)` a rotation by
//! the imaginary angle `I·φ` with `φ = acosh ‖q_r‖`.

use serde::{Deserialize, Serialize};

use super::{AlgebraError, BiquatMatrix, Biquaternion, Complex, Quaternion};

/// Largest accepted `|norm(q) − 1|` for a unit biquaternion.
pub const UNIT_TOLERANCE: f64 = 1e-8;

/// Which product the hyperbolic factor appears on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `M(q) = M(h)·M(u)`, i.e. `q = u·h`.
    Left,
    /// `M(q) = M(u)·M(h')`, i.e. `q = h'·u`.
    Right,
}

/// Degenerate inputs for which part of the factorization is not unique.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    /// `q_i = 0`: there is no hyperbolic part, `h = 1` and the axis is zero.
    NoHyperbolicPart,
    /// `v(q_r) = 0`: `u = ±1` and the circular axis is undefined.
    NoCircularAxis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    pub side: Side,
    /// Hyperbolic factor `h` (or `h'`).
    pub h: Biquaternion,
    /// Circular factor, a unit quaternion.
    pub u: Quaternion,
    /// Circular rotation angle in `[0, π]`.
    pub theta: f64,
    /// Hyperbolic rotation angle, `≥ 0`.
    pub phi: f64,
    /// Unit axis `(a, b, c)` of the hyperbolic rotation, zero when degenerate.
    pub axis: [f64; 3],
    pub degeneracy: Option<Degeneracy>,
}

impl Factorization {
    pub fn hyperbolic_matrix(&self) -> BiquatMatrix {
        self.h.matrix_rep()
    }

    pub fn circular_matrix(&self) -> BiquatMatrix {
        self.u.to_biquaternion().matrix_rep()
    }

    /// Product of the two factor matrices in the order given by `side`.
    pub fn reconstruct(&self) -> BiquatMatrix {
        match self.side {
            Side::Left => self.hyperbolic_matrix() * self.circular_matrix(),
            Side::Right => self.circular_matrix() * self.hyperbolic_matrix(),
        }
    }

    /// Unit axis of the circular rotation, `v(u)/‖v(u)‖`, or zero.
    pub fn circular_axis(&self) -> [f64; 3] {
        let n = self.u.vector_norm();
        if n == 0.0 {
            [0.0; 3]
        } else {
            [self.u.x / n, self.u.y / n, self.u.z / n]
        }
    }
}

/// Factorizes a unit biquaternion as `M(q) = M(h)·M(u)`.
pub fn factorize(q: Biquaternion) -> Result<Factorization, AlgebraError> {
    factorize_on(q, Side::Left)
}

/// Factorizes a unit biquaternion as `M(q) = M(u)·M(h')`.
pub fn factorize_right(q: Biquaternion) -> Result<Factorization, AlgebraError> {
    factorize_on(q, Side::Right)
}

fn factorize_on(q: Biquaternion, side: Side) -> Result<Factorization, AlgebraError> {
    let deviation = (q.norm() - Complex::new(1.0, 0.0)).norm();
    if !(deviation <= UNIT_TOLERANCE) {
        return Err(AlgebraError::NotUnit { deviation, tolerance: UNIT_TOLERANCE });
    }

    let qr = q.real_part();
    let qi = q.imaginary_part();
    let nr = qr.norm();
    let ni = qi.norm();

    // nr ≥ 1 for any unit input, so u is always defined.
    let u = qr.scale(1.0 / nr);
    let theta = (qr.w / nr).clamp(-1.0, 1.0).acos();
    let phi = nr.max(1.0).acosh();

    let mut degeneracy = None;
    if qr.vector_norm() == 0.0 {
        degeneracy = Some(Degeneracy::NoCircularAxis);
    }

    let (h, axis) = if ni == 0.0 {
        degeneracy = Some(Degeneracy::NoHyperbolicPart);
        (Biquaternion::ONE, [0.0; 3])
    } else {
        let pure = match side {
            Side::Left => qr.conjugate() * qi,
            Side::Right => qi * qr.conjugate(),
        }
        .scale(1.0 / (nr * ni));
        // s(pure) vanishes for unit inputs; only the vector part enters h.
        let axis = [pure.x, pure.y, pure.z];
        let h = Biquaternion::from_parts(
            Quaternion::new(nr, 0.0, 0.0, 0.0),
            Quaternion::new(0.0, pure.x * ni, pure.y * ni, pure.z * ni),
        );
        (h, axis)
    };

    Ok(Factorization { side, h, u, theta, phi, axis, degeneracy })
}

/// Builds the hyperbolic rotation matrix directly from `φ` and a unit axis:
/// `cosh φ` on the diagonal and `±a·I·sinh φ` (etc.) off it.
pub fn hyperbolic_matrix(phi: f64, axis: [f64; 3]) -> BiquatMatrix {
    let ch = Complex::new(phi.cosh(), 0.0);
    let s = Complex::new(0.0, phi.sinh());
    let [a, b, c] = axis.map(|v| s * v);
    BiquatMatrix([
        [ch, -a, -b, -c],
        [a, ch, c, -b],
        [b, -c, ch, a],
        [c, b, -a, ch],
    ])
}
