use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::vector::{BiquatVector, Part, PARTS};
use super::{Mode, ModelError};

/// A table of `rows` biquaternion vectors of width `k`, stored row-major with
/// each row laid out like a [`BiquatVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    k: usize,
    rows: usize,
    data: Vec<f64>,
}

impl EmbeddingTable {
    pub fn zeros(rows: usize, k: usize) -> Self {
        Self { k, rows, data: vec![0.0; rows * PARTS * k] }
    }

    pub fn from_data(rows: usize, k: usize, data: Vec<f64>) -> Result<Self, ModelError> {
        let expected = rows * PARTS * k;
        if data.len() != expected {
            return Err(ModelError::ShapeMismatch { expected, found: data.len() });
        }
        Ok(Self { k, rows, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Reals per row, `8k`.
    pub fn width(&self) -> usize {
        PARTS * self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.width();
        &self.data[i * w..(i + 1) * w]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let w = self.width();
        &mut self.data[i * w..(i + 1) * w]
    }

    pub fn vector(&self, i: usize) -> BiquatVector {
        BiquatVector::from_data(self.k, self.row(i).to_vec()).expect("row width is 8k")
    }

    pub fn set_vector(&mut self, i: usize, v: &BiquatVector) -> Result<(), ModelError> {
        if v.k() != self.k {
            return Err(ModelError::ShapeMismatch { expected: self.k, found: v.k() });
        }
        self.row_mut(i).copy_from_slice(v.as_slice());
        Ok(())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub(crate) fn zero_imaginary(&mut self) {
        let k = self.k;
        for row in self.data.chunks_mut(PARTS * k) {
            zero_imaginary_row(row, k);
        }
    }
}

pub(crate) fn zero_imaginary_row(row: &mut [f64], k: usize) {
    for p in Part::ALL.into_iter().filter(|p| p.is_imaginary()) {
        let s = p as usize * k;
        row[s..s + k].fill(0.0);
    }
}

/// Entity table plus the two relation tables (translation and rotation).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParameters {
    pub mode: Mode,
    /// Seed the parameters were initialized from.
    pub seed: u64,
    pub entities: EmbeddingTable,
    pub rel_translate: EmbeddingTable,
    pub rel_rotate: EmbeddingTable,
}

impl ModelParameters {
    /// Draws every real i.i.d. from `U[−1/√(8k), 1/√(8k)]` with a seeded
    /// ChaCha8 stream (entities, then translations, then rotations), then
    /// applies the zero constraints of `mode`.
    pub fn init(n_entities: usize, n_relations: usize, k: usize, mode: Mode, seed: u64) -> Self {
        let bound = 1.0 / ((PARTS * k) as f64).sqrt();
        let dist = Uniform::new_inclusive(-bound, bound);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = |rows: usize| {
            let data = (0..rows * PARTS * k).map(|_| dist.sample(&mut rng)).collect();
            EmbeddingTable { k, rows, data }
        };
        let entities = table(n_entities);
        let rel_translate = table(n_relations);
        let rel_rotate = table(n_relations);
        let mut params = Self { mode, seed, entities, rel_translate, rel_rotate };
        params.apply_constraints();
        params
    }

    pub fn zeros(n_entities: usize, n_relations: usize, k: usize, mode: Mode) -> Self {
        Self {
            mode,
            seed: 0,
            entities: EmbeddingTable::zeros(n_entities, k),
            rel_translate: EmbeddingTable::zeros(n_relations, k),
            rel_rotate: EmbeddingTable::zeros(n_relations, k),
        }
    }

    pub fn k(&self) -> usize {
        self.entities.k()
    }

    pub fn n_entities(&self) -> usize {
        self.entities.rows()
    }

    pub fn n_relations(&self) -> usize {
        self.rel_rotate.rows()
    }

    /// Forces the zero constraints of the current mode.
    pub fn apply_constraints(&mut self) {
        if self.mode == Mode::QuaternionOnly {
            self.entities.zero_imaginary();
            self.rel_translate.zero_imaginary();
            self.rel_rotate.zero_imaginary();
        }
        if self.mode == Mode::NoTranslation {
            self.rel_translate.as_mut_slice().fill(0.0);
        }
    }

    pub(crate) fn check_ids(&self, h: u32, r: u32, t: u32) -> Result<(), ModelError> {
        let (ne, nr) = (self.n_entities() as u32, self.n_relations() as u32);
        if h >= ne || t >= ne || r >= nr {
            return Err(ModelError::InvalidId { head: h, relation: r, tail: t });
        }
        Ok(())
    }

    pub fn tables(&self) -> [&EmbeddingTable; 3] {
        [&self.entities, &self.rel_translate, &self.rel_rotate]
    }

    pub fn tables_mut(&mut self) -> [&mut EmbeddingTable; 3] {
        [&mut self.entities, &mut self.rel_translate, &mut self.rel_rotate]
    }
}
