use std::ops::Mul;

use super::{Biquaternion, Complex};

/// 4×4 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiquatMatrix(pub [[Complex; 4]; 4]);

impl BiquatMatrix {
    pub fn zero() -> Self {
        Self([[Complex::new(0.0, 0.0); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for (i, row) in m.0.iter_mut().enumerate() {
            row[i] = Complex::new(1.0, 0.0);
        }
        m
    }

    /// Matrix representation of `q`; acting on the coefficient vector of `p`
    /// it yields the coefficients of the product `p·q`.
    pub fn from_biquaternion(q: Biquaternion) -> Self {
        let Biquaternion { w, x, y, z } = q;
        Self([
            [w, -x, -y, -z],
            [x, w, z, -y],
            [y, -z, w, x],
            [z, y, -x, w],
        ])
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                t.0[j][i] = self.0[i][j];
            }
        }
        t
    }

    /// Elementwise complex conjugate.
    pub fn conj(&self) -> Self {
        let mut t = *self;
        t.0.iter_mut().flatten().for_each(|e| *e = e.conj());
        t
    }

    pub fn mul_vec(&self, v: [Complex; 4]) -> [Complex; 4] {
        let mut out = [Complex::new(0.0, 0.0); 4];
        for (o, row) in out.iter_mut().zip(&self.0) {
            *o = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Determinant by Laplace expansion along the first two rows.
    pub fn det(&self) -> Complex {
        let m = &self.0;
        let minor = |r0: usize, r1: usize, c0: usize, c1: usize| {
            m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
        };
        // Column pairs and their complements, with the sign of the pairing.
        const PAIRS: [((usize, usize), (usize, usize), f64); 6] = [
            ((0, 1), (2, 3), 1.0),
            ((0, 2), (1, 3), -1.0),
            ((0, 3), (1, 2), 1.0),
            ((1, 2), (0, 3), 1.0),
            ((1, 3), (0, 2), -1.0),
            ((2, 3), (0, 1), 1.0),
        ];
        PAIRS
            .iter()
            .map(|&((a, b), (c, d), s)| minor(0, 1, a, b) * minor(2, 3, c, d) * s)
            .sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|e| e.norm()).fold(0.0, f64::max)
    }
}

impl Mul for BiquatMatrix {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = (0..4).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        out
    }
}
