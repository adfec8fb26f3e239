//! Hyperbolic rotation of a biquaternion in the `(w, x)` plane.
//!
//! Right-multiplying `q = w + x·i` by `h = cosh φ + I·sinh φ·i` mixes the
//! real and imaginary parts of the two coefficients. The points
//! `(w_r, x_r)` and `(w_i, x_i)` move along hyperbolas:
//!
//! ```text
//! real point      (w_r cosh φ + x_i sinh φ,  x_r cosh φ − w_i sinh φ)
//! imaginary point (w_i cosh φ − x_r sinh φ,  x_i cosh φ + w_r sinh φ)
//! ```

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RotateError {
    #[error("need at least 2 steps, got {0}")]
    TooFewSteps(usize),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The `(w, x)` coefficients being rotated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanePoint {
    pub w_r: f64,
    pub w_i: f64,
    pub x_r: f64,
    pub x_i: f64,
}

impl Default for PlanePoint {
    fn default() -> Self {
        Self { w_r: 1.0, w_i: 2.0, x_r: 3.0, x_i: 4.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub phi: f64,
    pub real_w: f64,
    pub real_x: f64,
    pub imag_w: f64,
    pub imag_x: f64,
}

impl PlanePoint {
    pub fn rotate(&self, phi: f64) -> TrajectoryRow {
        let (c, s) = (phi.cosh(), phi.sinh());
        TrajectoryRow {
            phi,
            real_w: self.w_r * c + self.x_i * s,
            real_x: self.x_r * c - self.w_i * s,
            imag_w: self.w_i * c - self.x_r * s,
            imag_x: self.x_i * c + self.w_r * s,
        }
    }
}

/// `steps` evenly spaced angles from `min` to `max` inclusive. The spacing
/// is computed from the index, so a grid symmetric about 0 hits 0 exactly.
pub fn phi_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>, RotateError> {
    if steps < 2 {
        return Err(RotateError::TooFewSteps(steps));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|i| min + (max - min) * (i as f64) / last).collect())
}

pub fn trajectory(p: PlanePoint, min: f64, max: f64, steps: usize) -> Result<Vec<TrajectoryRow>, RotateError> {
    Ok(phi_grid(min, max, steps)?.into_iter().map(|phi| p.rotate(phi)).collect())
}

/// Writes rows as CSV with a header line.
pub fn write_csv<W: Write>(rows: &[TrajectoryRow], out: W) -> Result<(), RotateError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
