use crate::model::{Gradients, ModelParameters};

use super::TrainError;

/// Squared-gradient accumulators, one per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdagradState {
    acc: [Vec<f64>; 3],
}

impl AdagradState {
    pub fn new(params: &ModelParameters) -> Self {
        Self { acc: params.tables().map(|t| vec![0.0; t.as_slice().len()]) }
    }

    /// Accumulators for the entity, translation and rotation tables.
    pub fn accumulators(&self) -> [&[f64]; 3] {
        [&self.acc[0], &self.acc[1], &self.acc[2]]
    }
}

/// One sparse Adagrad update over the rows `grads` touched:
///
/// ```text
/// acc ← acc + g²
/// θ   ← θ − lr·g / (√acc + eps)
/// ```
///
/// Coordinates with `g = 0` are skipped, so untouched and pinned
/// coordinates never move.
pub fn adagrad_step(
    params: &mut ModelParameters,
    grads: &Gradients,
    state: &mut AdagradState,
    lr: f64,
    eps: f64,
) -> Result<(), TrainError> {
    for ((table, grad), acc) in params.tables_mut().into_iter().zip(grads.tables()).zip(&mut state.acc) {
        let width = table.width();
        if acc.len() != table.as_slice().len() {
            return Err(TrainError::StateShape { expected: table.as_slice().len(), found: acc.len() });
        }
        for &r in grad.touched_rows() {
            let g_row = grad.row(r).expect("touched row");
            let p_row = table.row_mut(r);
            let a_row = &mut acc[r * width..(r + 1) * width];
            for ((p, a), &g) in p_row.iter_mut().zip(a_row).zip(g_row) {
                if g == 0.0 {
                    continue;
                }
                *a += g * g;
                *p -= lr * (g / (a.sqrt() + eps));
                if !p.is_finite() || !a.is_finite() {
                    return Err(TrainError::NonFinite { epoch: None, batch: None, what: "parameter" });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Triple;
    use crate::model::{loss_and_grad, Mode, Regularization};

    fn scalar_setup(g: f64) -> (ModelParameters, Gradients) {
        let params = ModelParameters::zeros(1, 1, 1, Mode::Full);
        let mut grads = Gradients::for_params(&params);
        grads.entities.row_mut(0)[0] = g;
        (params, grads)
    }

    #[test]
    fn first_step_moves_by_lr() {
        let (mut p, grads) = scalar_setup(3.0);
        let mut s = AdagradState::new(&p);
        adagrad_step(&mut p, &grads, &mut s, 0.1, 0.0).unwrap();
        assert_eq!(p.entities.row(0)[0], -0.1);
        assert_eq!(s.accumulators()[0][0], 9.0);
    }

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut p = ModelParameters::init(3, 2, 2, Mode::Full, 1);
        let before = p.clone();
        let (_, mut grads) = loss_and_grad(&p, &[Triple::new(0, 0, 1)], Regularization::NONE).unwrap();
        for t in grads.tables_mut() {
            for r in t.touched_rows().to_vec() {
                t.row_mut(r).fill(0.0);
            }
        }
        let mut s = AdagradState::new(&p);
        adagrad_step(&mut p, &grads, &mut s, 0.1, 1e-10).unwrap();
        assert_eq!(p, before);
        assert!(s.accumulators().iter().all(|a| a.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn two_steps_follow_the_recursion() {
        let (lr, eps) = (0.5, 1e-10);
        let (mut p, mut grads) = scalar_setup(2.0);
        let mut s = AdagradState::new(&p);
        adagrad_step(&mut p, &grads, &mut s, lr, eps).unwrap();
        grads.entities.row_mut(0)[0] = -1.0;
        adagrad_step(&mut p, &grads, &mut s, lr, eps).unwrap();

        let theta1 = 0.0 - lr * (2.0 / (4f64.sqrt() + eps));
        let theta2 = theta1 - lr * (-1.0 / (5f64.sqrt() + eps));
        assert_eq!(s.accumulators()[0][0], 5.0);
        assert!((p.entities.row(0)[0] - theta2).abs() < 1e-15);
    }

    #[test]
    fn non_finite_update_is_an_error() {
        let (mut p, grads) = scalar_setup(f64::INFINITY);
        let mut s = AdagradState::new(&p);
        assert!(matches!(
            adagrad_step(&mut p, &grads, &mut s, 0.1, 0.0),
            Err(TrainError::NonFinite { .. })
        ));
    }
}
