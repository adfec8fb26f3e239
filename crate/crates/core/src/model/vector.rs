use crate::algebra::Biquaternion;

use super::ModelError;

/// Number of reals per biquaternion.
pub const PARTS: usize = 8;

/// One of the eight real component arrays of a [`BiquatVector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(usize)]
pub enum Part {
    WRe = 0,
    WIm = 1,
    XRe = 2,
    XIm = 3,
    YRe = 4,
    YIm = 5,
    ZRe = 6,
    ZIm = 7,
}

impl Part {
    pub const ALL: [Part; PARTS] =
        [Part::WRe, Part::WIm, Part::XRe, Part::XIm, Part::YRe, Part::YIm, Part::ZRe, Part::ZIm];

    pub fn is_imaginary(self) -> bool {
        (self as usize) % 2 == 1
    }
}

/// `k` biquaternions stored as eight contiguous real arrays of length `k`,
/// in `w_r, w_i, x_r, x_i, y_r, y_i, z_r, z_i` order.
#[derive(Debug, Clone, PartialEq)]
pub struct BiquatVector {
    k: usize,
    data: Vec<f64>,
}

impl BiquatVector {
    pub fn zeros(k: usize) -> Self {
        Self { k, data: vec![0.0; PARTS * k] }
    }

    /// Every slot set to the biquaternion `1`.
    pub fn ones(k: usize) -> Self {
        Self::from_slots(&vec![Biquaternion::ONE; k])
    }

    pub fn from_slots(slots: &[Biquaternion]) -> Self {
        let mut v = Self::zeros(slots.len());
        for (j, q) in slots.iter().enumerate() {
            v.set_slot(j, *q);
        }
        v
    }

    pub fn from_data(k: usize, data: Vec<f64>) -> Result<Self, ModelError> {
        if data.len() != PARTS * k {
            return Err(ModelError::ShapeMismatch { expected: PARTS * k, found: data.len() });
        }
        Ok(Self { k, data })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn part(&self, p: Part) -> &[f64] {
        let s = p as usize * self.k;
        &self.data[s..s + self.k]
    }

    pub fn part_mut(&mut self, p: Part) -> &mut [f64] {
        let s = p as usize * self.k;
        &mut self.data[s..s + self.k]
    }

    pub fn slot(&self, j: usize) -> Biquaternion {
        slot(&self.data, self.k, j)
    }

    pub fn set_slot(&mut self, j: usize, q: Biquaternion) {
        set_slot(&mut self.data, self.k, j, q)
    }

    pub fn slots(&self) -> impl Iterator<Item = Biquaternion> + '_ {
        (0..self.k).map(|j| self.slot(j))
    }

    fn check(&self, other: &Self) -> Result<(), ModelError> {
        if self.k != other.k {
            return Err(ModelError::ShapeMismatch { expected: self.k, found: other.k });
        }
        Ok(())
    }

    /// Slotwise biquaternion addition (relation translation).
    pub fn translate(&self, translation: &Self) -> Result<Self, ModelError> {
        self.check(translation)?;
        let data = self.data.iter().zip(&translation.data).map(|(a, b)| a + b).collect();
        Ok(Self { k: self.k, data })
    }

    /// Slotwise Hamilton product `self ⊛ rotation`.
    pub fn hamilton(&self, rotation: &Self) -> Result<Self, ModelError> {
        self.check(rotation)?;
        let mut out = Self::zeros(self.k);
        hamilton_into(&self.data, &rotation.data, self.k, &mut out.data);
        Ok(out)
    }

    /// Real dot product over all `8k` components.
    pub fn dot(&self, other: &Self) -> Result<f64, ModelError> {
        self.check(other)?;
        Ok(dot(&self.data, &other.data))
    }
}

#[inline]
pub(crate) fn slot(row: &[f64], k: usize, j: usize) -> Biquaternion {
    let mut r = [0.0; PARTS];
    for (p, v) in r.iter_mut().enumerate() {
        *v = row[p * k + j];
    }
    Biquaternion::from_reals(r)
}

#[inline]
pub(crate) fn set_slot(row: &mut [f64], k: usize, j: usize, q: Biquaternion) {
    for (p, v) in q.to_reals().into_iter().enumerate() {
        row[p * k + j] = v;
    }
}

pub(crate) fn hamilton_into(left: &[f64], right: &[f64], k: usize, out: &mut [f64]) {
    for j in 0..k {
        set_slot(out, k, j, slot(left, k, j) * slot(right, k, j));
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
