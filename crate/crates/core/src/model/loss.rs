use serde::{Deserialize, Serialize};

use crate::algebra::Biquaternion;
use crate::data::Triple;

use super::normalize::{normalize_row_lenient, normalize_slot_backward};
use super::params::{zero_imaginary_row, EmbeddingTable, ModelParameters};
use super::vector::{dot, hamilton_into, set_slot, slot, BiquatVector, PARTS};
use super::{Mode, ModelError};

/// N3 penalty weights: `λ·(λ1·(‖Q_h‖₃³ + ‖Q_t‖₃³) + λ2·(‖Q_r⁺‖₃³ + ‖Q_r×‖₃³))`
/// per training example.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Regularization {
    pub lambda: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Regularization {
    pub const NONE: Self = Self { lambda: 0.0, lambda1: 0.0, lambda2: 0.0 };

    pub fn new(lambda: f64, lambda1: f64, lambda2: f64) -> Self {
        Self { lambda, lambda1, lambda2 }
    }
}

/// Gradient rows for one table. Only rows marked as touched hold data.
#[derive(Debug, Clone, PartialEq)]
pub struct TableGrad {
    width: usize,
    data: Vec<f64>,
    touched: Vec<bool>,
    touched_rows: Vec<usize>,
}

impl TableGrad {
    pub fn new(rows: usize, width: usize) -> Self {
        Self { width, data: vec![0.0; rows * width], touched: vec![false; rows], touched_rows: vec![] }
    }

    pub fn clear(&mut self) {
        for &r in &self.touched_rows {
            self.data[r * self.width..(r + 1) * self.width].fill(0.0);
            self.touched[r] = false;
        }
        self.touched_rows.clear();
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        if !self.touched[r] {
            self.touched[r] = true;
            self.touched_rows.push(r);
        }
        &mut self.data[r * self.width..(r + 1) * self.width]
    }

    /// Gradient of row `r`, or `None` if the batch did not touch it.
    pub fn row(&self, r: usize) -> Option<&[f64]> {
        self.touched[r].then(|| &self.data[r * self.width..(r + 1) * self.width])
    }

    /// Touched rows in first-touch order.
    pub fn touched_rows(&self) -> &[usize] {
        &self.touched_rows
    }

    fn add_scaled(&mut self, r: usize, scale: f64, v: &[f64]) {
        for (g, x) in self.row_mut(r).iter_mut().zip(v) {
            *g += scale * x;
        }
    }

    fn all_finite(&self) -> bool {
        self.touched_rows
            .iter()
            .all(|&r| self.data[r * self.width..(r + 1) * self.width].iter().all(|v| v.is_finite()))
    }
}

/// Gradient buffer shaped like [`ModelParameters`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub entities: TableGrad,
    pub rel_translate: TableGrad,
    pub rel_rotate: TableGrad,
}

impl Gradients {
    pub fn for_params(params: &ModelParameters) -> Self {
        let g = |t: &EmbeddingTable| TableGrad::new(t.rows(), t.width());
        Self {
            entities: g(&params.entities),
            rel_translate: g(&params.rel_translate),
            rel_rotate: g(&params.rel_rotate),
        }
    }

    pub fn clear(&mut self) {
        self.entities.clear();
        self.rel_translate.clear();
        self.rel_rotate.clear();
    }

    pub fn tables(&self) -> [&TableGrad; 3] {
        [&self.entities, &self.rel_translate, &self.rel_rotate]
    }

    pub fn tables_mut(&mut self) -> [&mut TableGrad; 3] {
        [&mut self.entities, &mut self.rel_translate, &mut self.rel_rotate]
    }
}

/// Rotation row actually used for scoring, after the mode's normalization.
fn effective_rotation(params: &ModelParameters, r: usize) -> Vec<f64> {
    let raw = params.rel_rotate.row(r);
    match params.mode.normalization() {
        None => raw.to_vec(),
        Some(v) => {
            let mut out = vec![0.0; raw.len()];
            let bad = normalize_row_lenient(raw, params.k(), v, &mut out);
            if bad > 0 {
                log::warn!("relation {r}: {bad} rotation slot(s) too small to normalize");
            }
            out
        }
    }
}

/// `(Q_h + Q_r⁺)` and its product with the effective rotation.
fn forward(params: &ModelParameters, h: usize, r: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let k = params.k();
    let translated: Vec<f64> = params
        .entities
        .row(h)
        .iter()
        .zip(params.rel_translate.row(r))
        .map(|(a, b)| a + b)
        .collect();
    let rotation = effective_rotation(params, r);
    let mut out = vec![0.0; PARTS * k];
    hamilton_into(&translated, &rotation, k, &mut out);
    (translated, rotation, out)
}

/// `(Q_h + Q_r⁺) ⊛ Q_r×` for the given head and relation.
pub fn transformed_head(params: &ModelParameters, h: u32, r: u32) -> Result<BiquatVector, ModelError> {
    params.check_ids(h, r, 0)?;
    let (_, _, out) = forward(params, h as usize, r as usize);
    BiquatVector::from_data(params.k(), out)
}

pub fn score(params: &ModelParameters, h: u32, r: u32, t: u32) -> Result<f64, ModelError> {
    params.check_ids(h, r, t)?;
    let (_, _, hat) = forward(params, h as usize, r as usize);
    Ok(dot(&hat, params.entities.row(t as usize)))
}

/// Scores of `(h, r, t')` for every entity `t'`, from one transformed head.
pub fn score_all_tails(params: &ModelParameters, h: u32, r: u32) -> Result<Vec<f64>, ModelError> {
    params.check_ids(h, r, 0)?;
    let (_, _, hat) = forward(params, h as usize, r as usize);
    Ok((0..params.n_entities()).map(|e| dot(&hat, params.entities.row(e))).collect())
}

/// `log(1 + exp(x))` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Sum of `|x|³`.
fn n3(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs().powi(3)).sum()
}

/// Adds `scale · ∂n3/∂v = scale · 3|x|x` to `grad`.
fn add_n3_grad(grad: &mut [f64], v: &[f64], scale: f64) {
    for (g, x) in grad.iter_mut().zip(v) {
        *g += scale * 3.0 * x.abs() * x;
    }
}

/// `conj(q̄)`: the adjoint of multiplication by `q` under the real inner
/// product on the eight components.
fn adjoint(q: Biquaternion) -> Biquaternion {
    q.conjugate().complex_conjugate()
}

/// Cross-entropy over all candidate tails plus the N3 penalty, with its
/// gradient.
///
/// ```text
/// L = Σ_(h,r,t) Σ_t' log(1 + exp(y·f(h,r,t'))) + Ω,   y = −1 if t' = t else +1
/// ```
pub fn loss_and_grad(
    params: &ModelParameters,
    batch: &[Triple],
    reg: Regularization,
) -> Result<(f64, Gradients), ModelError> {
    let mut grads = Gradients::for_params(params);
    let loss = loss_and_grad_into(params, batch, reg, &mut grads)?;
    Ok((loss, grads))
}

/// [`loss_and_grad`] writing into a reusable buffer, which is cleared first.
pub fn loss_and_grad_into(
    params: &ModelParameters,
    batch: &[Triple],
    reg: Regularization,
    grads: &mut Gradients,
) -> Result<f64, ModelError> {
    if batch.is_empty() {
        return Err(ModelError::EmptyBatch);
    }
    grads.clear();
    let k = params.k();
    let width = PARTS * k;
    let n_entities = params.n_entities();
    let mut loss = 0.0;
    let mut grad_hat = vec![0.0; width];
    let mut grad_p = vec![0.0; width];
    let mut grad_rot = vec![0.0; width];

    for &Triple { head, relation, tail } in batch {
        params.check_ids(head, relation, tail)?;
        let (h, r, t) = (head as usize, relation as usize, tail as usize);
        let (translated, rotation, hat) = forward(params, h, r);

        grad_hat.fill(0.0);
        for e in 0..n_entities {
            let row = params.entities.row(e);
            let s = dot(&hat, row);
            let y = if e == t { -1.0 } else { 1.0 };
            loss += softplus(y * s);
            let g = y * sigmoid(y * s);
            for (gh, x) in grad_hat.iter_mut().zip(row) {
                *gh += g * x;
            }
            grads.entities.add_scaled(e, g, &hat);
        }

        // Back through the slotwise Hamilton product hat = p ⊛ R.
        for j in 0..k {
            let gh = slot(&grad_hat, k, j);
            let p = slot(&translated, k, j);
            let rot = slot(&rotation, k, j);
            set_slot(&mut grad_p, k, j, gh * adjoint(rot));
            set_slot(&mut grad_rot, k, j, adjoint(p) * gh);
        }
        if let Some(variant) = params.mode.normalization() {
            let raw = params.rel_rotate.row(r);
            for j in 0..k {
                let g = normalize_slot_backward(slot(raw, k, j), variant, slot(&grad_rot, k, j).to_reals());
                set_slot(&mut grad_rot, k, j, Biquaternion::from_reals(g));
            }
        }
        grads.entities.add_scaled(h, 1.0, &grad_p);
        if params.mode != Mode::NoTranslation {
            grads.rel_translate.add_scaled(r, 1.0, &grad_p);
        }
        grads.rel_rotate.add_scaled(r, 1.0, &grad_rot);

        if reg.lambda != 0.0 {
            let (ent, tr, rot) = (&params.entities, &params.rel_translate, &params.rel_rotate);
            let we = reg.lambda * reg.lambda1;
            let wr = reg.lambda * reg.lambda2;
            loss += we * (n3(ent.row(h)) + n3(ent.row(t))) + wr * (n3(tr.row(r)) + n3(rot.row(r)));
            add_n3_grad(grads.entities.row_mut(h), ent.row(h), we);
            add_n3_grad(grads.entities.row_mut(t), ent.row(t), we);
            if params.mode != Mode::NoTranslation {
                add_n3_grad(grads.rel_translate.row_mut(r), tr.row(r), wr);
            }
            add_n3_grad(grads.rel_rotate.row_mut(r), rot.row(r), wr);
        }
    }

    if params.mode == Mode::QuaternionOnly {
        for tg in grads.tables_mut() {
            let rows = tg.touched_rows().to_vec();
            for row in rows {
                zero_imaginary_row(tg.row_mut(row), k);
            }
        }
    }

    if !loss.is_finite() {
        return Err(ModelError::NonFinite { what: "loss" });
    }
    if !grads.tables().iter().all(|g| g.all_finite()) {
        return Err(ModelError::NonFinite { what: "gradient" });
    }
    Ok(loss)
}
