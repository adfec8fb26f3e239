//! The embedding model.
//!
//! A triple `(h, r, t)` is scored by translating the head, applying the
//! relation's rotation with a slotwise Hamilton product and taking a real dot
//! product with the tail:
//!
//! ```text
//! f(h, r, t) = ((Q_h + Q_r⁺) ⊛ Q_r×) · Q_t
//! ```
//!
//! The dot product runs over all `8k` reals with no conjugation, so `f` is
//! real. Gradients are closed-form; see [`loss_and_grad`].

mod loss;
mod normalize;
mod params;
mod vector;

pub use loss::{
    loss_and_grad, loss_and_grad_into, score, score_all_tails, transformed_head, Gradients,
    Regularization, TableGrad,
};
pub use normalize::{
    normalize_rotation, normalize_slot, DegenerateSlot, Normalization, DEGENERATE_NORM,
};
pub use params::{EmbeddingTable, ModelParameters};
pub use vector::{BiquatVector, Part, PARTS};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("id out of range in triple ({head}, {relation}, {tail})")]
    InvalidId { head: u32, relation: u32, tail: u32 },
    #[error("empty batch")]
    EmptyBatch,
    #[error("non-finite {what}")]
    NonFinite { what: &'static str },
}

/// Model variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Translation plus unconstrained biquaternion rotation.
    #[default]
    Full,
    /// All imaginary parts pinned to zero: real quaternion embeddings.
    QuaternionOnly,
    /// Relation translations pinned to zero.
    NoTranslation,
    /// Rotation slots divided by their real 8-vector norm before use.
    NormReal,
    /// Rotation slots mapped to unit biquaternions before use.
    NormBiquat,
}

impl Mode {
    pub const ALL: [Mode; 5] =
        [Mode::Full, Mode::QuaternionOnly, Mode::NoTranslation, Mode::NormReal, Mode::NormBiquat];

    pub fn normalization(self) -> Option<Normalization> {
        match self {
            Mode::NormReal => Some(Normalization::RealVector),
            Mode::NormBiquat => Some(Normalization::Biquaternion),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::QuaternionOnly => "quaternion_only",
            Mode::NoTranslation => "no_translation",
            Mode::NormReal => "norm_real",
            Mode::NormBiquat => "norm_biquat",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.replace('-', "_");
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == norm)
            .ok_or_else(|| format!("unknown mode `{s}`"))
    }
}
