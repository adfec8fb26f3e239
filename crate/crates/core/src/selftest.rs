//! Seeded property suites runnable outside the test harness.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{factorize, factorize_right, BiquatMatrix, Biquaternion, Complex};
use crate::eval::{rank_bottom, EvalReport};
use crate::gradcheck::{check_gradients, random_instance};
use crate::model::Mode;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    /// Largest error seen, against the suite's tolerance.
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn outcome(name: &'static str, cases: usize, max_error: f64, tolerance: f64) -> SuiteOutcome {
    SuiteOutcome { name, cases, max_error, tolerance, passed: max_error < tolerance }
}

fn random_biquaternion(rng: &mut impl Rng) -> Biquaternion {
    Biquaternion::from_reals(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
}

fn random_unit(rng: &mut impl Rng) -> Biquaternion {
    loop {
        let q = random_biquaternion(rng);
        if q.norm().norm() > 0.1 {
            return q.normalized().expect("norm is nonzero");
        }
    }
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

fn vec_diff(a: [Complex; 4], b: [Complex; 4]) -> (f64, f64) {
    let d = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    (d, b.iter().map(|y| y.norm()).fold(0.0, f64::max))
}

/// Product identities over `n` random pairs.
pub fn algebra_suite(seed: u64, n: usize) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (a, b) = (random_biquaternion(&mut rng), random_biquaternion(&mut rng));
        let ab = a * b;
        let (d, s) = vec_diff(ab.vector_rep(), b.matrix_rep().mul_vec(a.vector_rep()));
        worst = worst.max(rel(d, s));
        let m = b.matrix_rep() * a.matrix_rep();
        worst = worst.max(rel(ab.matrix_rep().max_abs_diff(&m), m.max_abs()));
        let c = b.conjugate() * a.conjugate();
        worst = worst.max(rel(ab.conjugate().max_abs_diff(c), c.to_reals().iter().fold(0.0, |m, v| m.max(v.abs()))));
        let n2 = a.norm_squared() * b.norm_squared();
        worst = worst.max(rel((ab.norm_squared() - n2).norm(), n2.norm()));
    }
    outcome("algebra", n, worst, 1e-10)
}

/// Left and right factorization of `n` random unit biquaternions.
pub fn factorization_suite(seed: u64, n: usize) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = Complex::new(1.0, 0.0);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let q = random_unit(&mut rng);
        let target = q.matrix_rep();
        for f in [factorize(q), factorize_right(q)] {
            let f = match f {
                Ok(f) => f,
                Err(_) => return outcome("factorization", n, f64::INFINITY, 1e-9),
            };
            let (mh, mu) = (f.hyperbolic_matrix(), f.circular_matrix());
            worst = worst.max(f.reconstruct().max_abs_diff(&target));
            worst = worst.max((mh.det() - one).norm()).max((mu.det() - one).norm());
            worst = worst.max((mh * mh.transpose()).max_abs_diff(&BiquatMatrix::identity()));
        }
        let (qr, qi) = (q.real_part(), q.imaginary_part());
        worst = worst.max((qr.norm_squared() - qi.norm_squared() - 1.0).abs());
        worst = worst.max((qr.conjugate() * qi).w.abs());
    }
    outcome("factorization", n, worst, 1e-9)
}

/// Finite-difference gradient checks on `per_mode` instances of every mode.
pub fn gradient_suite(seed: u64, per_mode: usize) -> SuiteOutcome {
    let mut worst: f64 = 0.0;
    for mode in Mode::ALL {
        for i in 0..per_mode as u64 {
            let inst = random_instance(seed.wrapping_add(i), mode);
            match check_gradients(&inst, 1e-5, None) {
                Ok(r) => worst = worst.max(r.max_rel_error),
                Err(_) => worst = f64::INFINITY,
            }
        }
    }
    outcome("gradient", per_mode * Mode::ALL.len(), worst, 1e-4)
}

/// BOTTOM ranks against a sort-based count, plus the two-query example.
pub fn ranking_suite(seed: u64, n: usize) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0usize;
    for _ in 0..n {
        let len = rng.gen_range(1..40);
        // coarse values so that ties are common
        let scores: Vec<f64> = (0..len).map(|_| rng.gen_range(0..8) as f64 / 4.0).collect();
        let true_id = rng.gen_range(0..len) as u32;
        let filtered: HashSet<u32> =
            (0..len as u32).filter(|&e| e != true_id && rng.gen_bool(0.3)).collect();
        let mut kept: Vec<f64> = (0..len as u32)
            .filter(|e| *e != true_id && !filtered.contains(e))
            .map(|e| scores[e as usize])
            .collect();
        kept.sort_by(|a, b| b.total_cmp(a));
        let target = scores[true_id as usize];
        let expected = 1 + kept.iter().take_while(|&&s| s >= target).count();
        mismatches += usize::from(rank_bottom(&scores, true_id, &filtered) != expected);
    }
    let r = EvalReport::from_ranks(&[1, 4]);
    let example = r.mrr == 0.625 && r.hits[&1] == 0.5 && r.hits[&3] == 0.5 && r.hits[&10] == 1.0;
    mismatches += usize::from(!example);
    outcome("ranking", n + 1, mismatches as f64, 0.5)
}

/// Runs every suite with the given seed.
pub fn run_all(seed: u64) -> Vec<SuiteOutcome> {
    vec![
        algebra_suite(seed, 1000),
        factorization_suite(seed, 1000),
        gradient_suite(seed, 10),
        ranking_suite(seed, 200),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        for s in run_all(0) {
            assert!(s.passed, "{s:?}");
        }
    }
}
