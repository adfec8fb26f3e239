//! Mini-batch training with sparse Adagrad and validation-driven model
//! selection.

mod adagrad;
mod checkpoint;
mod config;

pub use adagrad::{adagrad_step, AdagradState};
pub use checkpoint::{
    from_bytes, load_checkpoint, save_checkpoint, to_bytes, CheckpointError, CheckpointHeader,
    FORMAT_VERSION,
};
pub use config::{Preset, TrainConfig};

use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::data::{FilterIndex, KnowledgeGraph, Split, Triple};
use crate::eval::{evaluate_parallel, EvalError};
use crate::model::{loss_and_grad_into, Gradients, ModelError, ModelParameters};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("training split is empty")]
    EmptyTrainSplit,
    #[error("epoch {epoch}, batch {batch}: {source}")]
    Model { epoch: usize, batch: usize, source: ModelError },
    #[error("non-finite {what}{}", context(*.epoch, *.batch))]
    NonFinite { epoch: Option<usize>, batch: Option<usize>, what: &'static str },
    #[error("optimizer state has {found} entries, parameters have {expected}")]
    StateShape { expected: usize, found: usize },
    #[error("validation: {0}")]
    Eval(#[from] EvalError),
    #[error("writing training log: {0}")]
    Log(#[from] std::io::Error),
}

fn context(epoch: Option<usize>, batch: Option<usize>) -> String {
    match (epoch, batch) {
        (Some(e), Some(b)) => format!(" at epoch {e}, batch {b}"),
        _ => String::new(),
    }
}

/// One line of the training log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub mean_batch_loss: f64,
    pub wallclock_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valid_mrr: Option<f64>,
}

impl EpochRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters with the best validation MRR, or the final ones when no
    /// validation ran.
    pub best: ModelParameters,
    /// Parameters after the last epoch.
    pub last: ModelParameters,
    pub best_epoch: Option<usize>,
    pub best_valid_mrr: Option<f64>,
    pub log: Vec<EpochRecord>,
}

/// Trains on `kg.train` and returns the selected parameters and the log.
pub fn train(kg: &KnowledgeGraph, config: &TrainConfig) -> Result<TrainOutcome, TrainError> {
    train_with(kg, config, |_| Ok(()))
}

/// [`train`] writing each epoch's record as a JSON line to `log`.
pub fn train_logged<W: Write>(
    kg: &KnowledgeGraph,
    config: &TrainConfig,
    mut log: W,
) -> Result<TrainOutcome, TrainError> {
    train_with(kg, config, |r| writeln!(log, "{}", r.to_json_line()))
}

/// [`train`] calling `on_epoch` after every epoch.
pub fn train_with<F>(
    kg: &KnowledgeGraph,
    config: &TrainConfig,
    mut on_epoch: F,
) -> Result<TrainOutcome, TrainError>
where
    F: FnMut(&EpochRecord) -> std::io::Result<()>,
{
    config.validate()?;
    if kg.train.is_empty() {
        return Err(TrainError::EmptyTrainSplit);
    }
    let start = Instant::now();
    let reg = config.regularization();
    let mut params =
        ModelParameters::init(kg.n_entities(), kg.n_relations(), config.k, config.mode, config.seed);
    let mut state = AdagradState::new(&params);
    let mut grads = Gradients::for_params(&params);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);

    let validate = config.eval_every > 0 && !kg.valid.is_empty();
    let filter = validate.then(|| FilterIndex::build(kg));
    let mut best: Option<(usize, f64, ModelParameters)> = None;

    let mut order: Vec<Triple> = kg.train.clone();
    let mut log = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        let mut n_batches = 0;
        for (b, batch) in order.chunks(config.batch_size).enumerate() {
            let loss = loss_and_grad_into(&params, batch, reg, &mut grads).map_err(|source| match source {
                ModelError::NonFinite { what } => {
                    TrainError::NonFinite { epoch: Some(epoch), batch: Some(b), what }
                }
                source => TrainError::Model { epoch, batch: b, source },
            })?;
            adagrad_step(&mut params, &grads, &mut state, config.lr, config.adagrad_eps).map_err(|e| match e {
                TrainError::NonFinite { what, .. } => {
                    TrainError::NonFinite { epoch: Some(epoch), batch: Some(b), what }
                }
                e => e,
            })?;
            total += loss;
            n_batches += 1;
        }

        let mut valid_mrr = None;
        if let Some(filter) = &filter {
            if epoch % config.eval_every == 0 || epoch == config.epochs {
                let report = evaluate_parallel(&params, kg, Split::Valid, filter, config.threads)?;
                valid_mrr = Some(report.mrr);
                if best.as_ref().map_or(true, |(_, m, _)| report.mrr > *m) {
                    best = Some((epoch, report.mrr, params.clone()));
                }
            }
        }

        let record = EpochRecord {
            epoch,
            mean_batch_loss: total / n_batches as f64,
            wallclock_ms: start.elapsed().as_millis() as u64,
            valid_mrr,
        };
        log::debug!("epoch {epoch}: loss {:.6}", record.mean_batch_loss);
        on_epoch(&record)?;
        log.push(record);
    }

    let (best_epoch, best_valid_mrr, best_params) = match best {
        Some((e, m, p)) => (Some(e), Some(m), p),
        None => (None, None, params.clone()),
    };
    Ok(TrainOutcome { best: best_params, last: params, best_epoch, best_valid_mrr, log })
}
