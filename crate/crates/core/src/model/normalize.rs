//! Rotation normalization variants.
//!
//! * [`Normalization::RealVector`] divides each slot by the Euclidean norm of
//!   its eight reals.
//! * [`Normalization::Biquaternion`] writes a slot as `q1 + q2·I`, removes the
//!   component of `q1` along `q2` and rescales to `√2·q1'/‖q1'‖` and
//!   `q2/‖q2‖`, which makes the slot a unit biquaternion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Biquaternion, Quaternion};

use super::vector::{set_slot, slot, BiquatVector};

/// Slots with a norm below this are left untouched.
pub const DEGENERATE_NORM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    RealVector,
    Biquaternion,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("slot {slot} cannot be normalized: norm {norm:e} is below {DEGENERATE_NORM:e}")]
pub struct DegenerateSlot {
    pub slot: usize,
    pub norm: f64,
}

fn q8(a: [f64; 4]) -> Quaternion {
    Quaternion::new(a[0], a[1], a[2], a[3])
}

/// Normalizes one biquaternion; `Err` carries the offending norm.
pub fn normalize_slot(q: Biquaternion, variant: Normalization) -> Result<Biquaternion, f64> {
    match variant {
        Normalization::RealVector => {
            let r = q.to_reals();
            let n = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n < DEGENERATE_NORM {
                return Err(n);
            }
            Ok(Biquaternion::from_reals(r.map(|v| v / n)))
        }
        Normalization::Biquaternion => {
            let (q1, q2) = (q.real_part(), q.imaginary_part());
            let n2 = q2.norm();
            if n2 < DEGENERATE_NORM {
                return Err(n2);
            }
            let q1p = q1 - q2.scale(q1.dot(q2) / (n2 * n2));
            let n1 = q1p.norm();
            if n1 < DEGENERATE_NORM {
                return Err(n1);
            }
            Ok(Biquaternion::from_parts(
                q1p.scale(std::f64::consts::SQRT_2 / n1),
                q2.scale(1.0 / n2),
            ))
        }
    }
}

/// Normalizes every slot, failing on the first degenerate one.
pub fn normalize_rotation(
    v: &BiquatVector,
    variant: Normalization,
) -> Result<BiquatVector, DegenerateSlot> {
    let slots = v
        .slots()
        .enumerate()
        .map(|(j, q)| normalize_slot(q, variant).map_err(|norm| DegenerateSlot { slot: j, norm }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BiquatVector::from_slots(&slots))
}

/// Normalizes a raw row in place of `out`; degenerate slots are copied
/// unchanged and counted.
pub(crate) fn normalize_row_lenient(
    row: &[f64],
    k: usize,
    variant: Normalization,
    out: &mut [f64],
) -> usize {
    let mut degenerate = 0;
    for j in 0..k {
        let q = slot(row, k, j);
        let n = normalize_slot(q, variant).unwrap_or_else(|_| {
            degenerate += 1;
            q
        });
        set_slot(out, k, j, n);
    }
    degenerate
}

/// Gradient of `y/‖y‖·scale` with respect to `y`, given `g = ∂L/∂out`.
fn unit_backward(y: [f64; 4], norm: f64, scale: f64, g: [f64; 4]) -> [f64; 4] {
    let n = y.map(|v| v / norm);
    let gn: f64 = (0..4).map(|i| g[i] * n[i]).sum();
    std::array::from_fn(|i| scale / norm * (g[i] - gn * n[i]))
}

/// Back-propagates `grad_out` (gradient w.r.t. the normalized slot reals)
/// to the raw slot reals. Degenerate slots pass the gradient through.
pub(crate) fn normalize_slot_backward(
    q: Biquaternion,
    variant: Normalization,
    grad_out: [f64; 8],
) -> [f64; 8] {
    if normalize_slot(q, variant).is_err() {
        return grad_out;
    }
    match variant {
        Normalization::RealVector => {
            let r = q.to_reals();
            let n = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            let x = r.map(|v| v / n);
            let gx: f64 = (0..8).map(|i| grad_out[i] * x[i]).sum();
            std::array::from_fn(|i| (grad_out[i] - gx * x[i]) / n)
        }
        Normalization::Biquaternion => {
            let (q1, q2) = (q.real_part(), q.imaginary_part());
            let g = Biquaternion::from_reals(grad_out);
            let (g1, g2) = (g.real_part().to_array(), g.imaginary_part().to_array());

            let n2 = q2.norm();
            let n2sq = n2 * n2;
            let c = q1.dot(q2) / n2sq;
            let q1p = q1 - q2.scale(c);
            let n1 = q1p.norm();

            // q̃1 = √2·q1'/‖q1'‖, q1' = q1 − c·q2, c = ⟨q1,q2⟩/‖q2‖²
            let gp = q8(unit_backward(q1p.to_array(), n1, std::f64::consts::SQRT_2, g1));
            let gp_q2 = gp.dot(q2);
            let d_q1 = gp - q2.scale(gp_q2 / n2sq);
            // ∂c/∂q2 = q1/‖q2‖² − 2⟨q1,q2⟩·q2/‖q2‖⁴
            let dc_dq2 = q1.scale(1.0 / n2sq) - q2.scale(2.0 * q1.dot(q2) / (n2sq * n2sq));
            let d_q2 = gp.scale(-c) - dc_dq2.scale(gp_q2)
                + q8(unit_backward(q2.to_array(), n2, 1.0, g2));
            Biquaternion::from_parts(d_q1, d_q2).to_reals()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Complex;

    fn sample() -> BiquatVector {
        BiquatVector::from_slots(&[
            Biquaternion::from_reals([0.3, -0.2, 0.5, 0.9, -0.4, 0.1, 0.7, -0.6]),
            Biquaternion::from_reals([-1.2, 0.4, 0.05, -0.3, 0.8, 0.6, -0.1, 0.2]),
        ])
    }

    #[test]
    fn real_vector_gives_unit_slots() {
        let n = normalize_rotation(&sample(), Normalization::RealVector).unwrap();
        for q in n.slots() {
            let s: f64 = q.to_reals().iter().map(|v| v * v).sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn biquaternion_gives_unit_biquaternions() {
        let n = normalize_rotation(&sample(), Normalization::Biquaternion).unwrap();
        for q in n.slots() {
            let (a, b) = (q.real_part(), q.imaginary_part());
            assert!((a.norm_squared() - b.norm_squared() - 1.0).abs() < 1e-10);
            assert!(a.dot(b).abs() < 1e-10);
            assert!((q.norm() - Complex::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn scale_free() {
        let v = sample();
        let scaled = BiquatVector::from_data(2, v.as_slice().iter().map(|x| x * 3.5).collect())
            .unwrap();
        for variant in [Normalization::RealVector, Normalization::Biquaternion] {
            let a = normalize_rotation(&v, variant).unwrap();
            let b = normalize_rotation(&scaled, variant).unwrap();
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn degenerate_slots() {
        let real = Biquaternion::from_reals([1.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let v = BiquatVector::from_slots(&[Biquaternion::ONE, real]);
        let err = normalize_rotation(&v, Normalization::Biquaternion).unwrap_err();
        assert_eq!(err.slot, 0);
        // q1 parallel to q2
        let par = Biquaternion::from_reals([1.0, 2.0, 1.0, 2.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(normalize_slot(par, Normalization::Biquaternion).is_err());
        assert!(normalize_slot(Biquaternion::ZERO, Normalization::RealVector).is_err());

        let mut out = vec![0.0; 16];
        let n = normalize_row_lenient(v.as_slice(), 2, Normalization::Biquaternion, &mut out);
        assert_eq!(n, 2);
        assert_eq!(out, v.as_slice());
    }

    #[test]
    fn backward_matches_finite_differences() {
        let q = Biquaternion::from_reals([0.3, -0.2, 0.5, 0.9, -0.4, 0.1, 0.7, -0.6]);
        let w = [0.7, -1.1, 0.25, 0.4, -0.9, 1.3, 0.05, -0.5];
        let loss = |r: [f64; 8], v: Normalization| {
            let n = normalize_slot(Biquaternion::from_reals(r), v).unwrap().to_reals();
            (0..8).map(|i| n[i] * w[i]).sum::<f64>()
        };
        for v in [Normalization::RealVector, Normalization::Biquaternion] {
            let g = normalize_slot_backward(q, v, w);
            for i in 0..8 {
                let (mut p, mut m) = (q.to_reals(), q.to_reals());
                p[i] += 1e-6;
                m[i] -= 1e-6;
                let fd = (loss(p, v) - loss(m, v)) / 2e-6;
                assert!((fd - g[i]).abs() < 1e-7, "{v:?} coord {i}: {fd} vs {}", g[i]);
            }
        }
    }
}
