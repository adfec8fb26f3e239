//! Central finite-difference check of the analytic loss gradient.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::Triple;
use crate::model::{loss_and_grad, Mode, ModelError, ModelParameters, Regularization, PARTS};

/// Coordinates whose analytic and numeric gradients are both at most this
/// large in magnitude are not compared.
pub const MIN_GRADIENT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Table {
    Entities,
    RelTranslate,
    RelRotate,
}

impl Table {
    const ALL: [Table; 3] = [Table::Entities, Table::RelTranslate, Table::RelRotate];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Coordinate {
    pub table: Table,
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Worst {
    pub coordinate: Coordinate,
    pub analytic: f64,
    pub numeric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub worst: Option<Worst>,
    /// Coordinates compared.
    pub checked: usize,
}

impl GradCheckReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_rel_error < tolerance
    }
}

/// A small random problem: parameters, a batch and penalty weights.
#[derive(Debug, Clone)]
pub struct Instance {
    pub params: ModelParameters,
    pub batch: Vec<Triple>,
    pub reg: Regularization,
}

/// Draws a tiny instance (`N_e ≤ 6`, `N_r ≤ 4`, `k ≤ 3`) with parameters on
/// `[−1, 1]` and strictly positive penalty weights.
pub fn random_instance(seed: u64, mode: Mode) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ne = rng.gen_range(2..=6);
    let nr = rng.gen_range(1..=4);
    let k = rng.gen_range(1..=3);
    let mut params = ModelParameters::zeros(ne, nr, k, mode);
    for table in params.tables_mut() {
        table.as_mut_slice().iter_mut().for_each(|v| *v = rng.gen_range(-1.0..=1.0));
    }
    params.apply_constraints();
    let batch = (0..rng.gen_range(1..=4))
        .map(|_| {
            Triple::new(
                rng.gen_range(0..ne as u32),
                rng.gen_range(0..nr as u32),
                rng.gen_range(0..ne as u32),
            )
        })
        .collect();
    let reg = Regularization::new(
        rng.gen_range(0.01..0.5),
        rng.gen_range(0.5..2.0),
        rng.gen_range(0.5..2.0),
    );
    Instance { params, batch, reg }
}

fn is_free(mode: Mode, table: Table, col: usize, k: usize) -> bool {
    match mode {
        Mode::NoTranslation => table != Table::RelTranslate,
        Mode::QuaternionOnly => (col / k) % 2 == 0,
        _ => true,
    }
}

fn table_mut(params: &mut ModelParameters, t: Table) -> &mut [f64] {
    match t {
        Table::Entities => params.entities.as_mut_slice(),
        Table::RelTranslate => params.rel_translate.as_mut_slice(),
        Table::RelRotate => params.rel_rotate.as_mut_slice(),
    }
}

/// Compares the analytic gradient with central differences of step `step`
/// on every free coordinate. `corrupt` adds `0.1·(1 + |g|)` to one analytic
/// entry, for testing that the check can fail.
pub fn check_gradients(
    instance: &Instance,
    step: f64,
    corrupt: Option<Coordinate>,
) -> Result<GradCheckReport, ModelError> {
    let Instance { params, batch, reg } = instance;
    let (_, grads) = loss_and_grad(params, batch, *reg)?;
    let k = params.k();
    let width = PARTS * k;
    let mut probe = params.clone();
    let mut report = GradCheckReport { max_rel_error: 0.0, worst: None, checked: 0 };

    for (table, tgrad) in Table::ALL.into_iter().zip(grads.tables()) {
        let n = table_mut(&mut probe, table).len();
        for idx in 0..n {
            let (row, col) = (idx / width, idx % width);
            if !is_free(params.mode, table, col, k) {
                continue;
            }
            let coordinate = Coordinate { table, row, col };
            let mut analytic = tgrad.row(row).map_or(0.0, |g| g[col]);
            if corrupt == Some(coordinate) {
                analytic += 0.1 * (1.0 + analytic.abs());
            }

            let orig = table_mut(&mut probe, table)[idx];
            table_mut(&mut probe, table)[idx] = orig + step;
            let (plus, _) = loss_and_grad(&probe, batch, *reg)?;
            table_mut(&mut probe, table)[idx] = orig - step;
            let (minus, _) = loss_and_grad(&probe, batch, *reg)?;
            table_mut(&mut probe, table)[idx] = orig;
            let numeric = (plus - minus) / (2.0 * step);

            let scale = analytic.abs().max(numeric.abs());
            if scale <= MIN_GRADIENT {
                continue;
            }
            report.checked += 1;
            let rel = (analytic - numeric).abs() / scale;
            if rel > report.max_rel_error || report.worst.is_none() {
                report.max_rel_error = rel;
                report.worst = Some(Worst { coordinate, analytic, numeric });
            }
        }
    }
    Ok(report)
}
