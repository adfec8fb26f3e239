use serde::{Deserialize, Serialize};

use crate::model::{Mode, Regularization};

use super::TrainError;

/// Hyperparameters of one training run. [`Default`] is the WN18RR setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    /// Biquaternions per embedding.
    pub k: usize,
    pub lambda: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub seed: u64,
    /// Validate every this many epochs; 0 disables validation.
    pub eval_every: usize,
    pub mode: Mode,
    pub adagrad_eps: f64,
    /// Workers for validation ranking.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Preset::Wn18rr.config()
    }
}

impl TrainConfig {
    pub fn regularization(&self) -> Regularization {
        Regularization::new(self.lambda, self.lambda1, self.lambda2)
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |msg: &str| Err(TrainError::InvalidConfig(msg.to_owned()));
        if !(self.lr >= 0.0) || !self.lr.is_finite() {
            return bad("lr must be non-negative");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        for (name, v) in [("lambda", self.lambda), ("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(&format!("{name} must be non-negative"));
            }
        }
        if !(self.adagrad_eps >= 0.0) {
            return bad("adagrad_eps must be non-negative");
        }
        Ok(())
    }
}

/// Tuned settings for the standard benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Wn18rr,
    Fb15k237,
    Yago3_10,
    Cn100k,
    Atomic,
}

impl Preset {
    pub const ALL: [Preset; 5] =
        [Preset::Wn18rr, Preset::Fb15k237, Preset::Yago3_10, Preset::Cn100k, Preset::Atomic];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Wn18rr => "wn18rr",
            Preset::Fb15k237 => "fb15k-237",
            Preset::Yago3_10 => "yago3-10",
            Preset::Cn100k => "cn-100k",
            Preset::Atomic => "atomic",
        }
    }

    pub fn config(self) -> TrainConfig {
        let (epochs, batch_size, lambda) = match self {
            Preset::Wn18rr => (200, 300, 0.15),
            Preset::Fb15k237 => (300, 500, 7e-2),
            Preset::Yago3_10 => (200, 1000, 5e-3),
            Preset::Cn100k => (200, 5000, 1e-1),
            Preset::Atomic => (200, 5000, 5e-3),
        };
        TrainConfig {
            epochs,
            lr: 0.1,
            batch_size,
            k: 128,
            lambda,
            lambda1: 2.0,
            lambda2: 0.5,
            seed: 0,
            eval_every: 10,
            mode: Mode::Full,
            adagrad_eps: 1e-10,
            threads: 1,
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str() == key || p.as_str().replace('-', "") == key)
            .ok_or_else(|| format!("unknown preset `{s}`"))
    }
}
