use bique::algebra::Biquaternion;
use bique::data::Triple;
use bique::gradcheck::{check_gradients, random_instance};
use bique::model::{
    loss_and_grad, normalize_rotation, score, score_all_tails, BiquatVector, Mode, ModelParameters,
    Normalization, Regularization,
};
use proptest::prelude::*;

fn params(seed: u64, mode: Mode) -> ModelParameters {
    let mut p = ModelParameters::init(5, 3, 2, mode, seed);
    for t in p.tables_mut() {
        t.as_mut_slice().iter_mut().for_each(|v| *v *= 4.0);
    }
    p.apply_constraints();
    p
}

fn mode() -> impl Strategy<Value = Mode> {
    prop::sample::select(Mode::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn score_is_linear_in_the_tail(seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut p = params(seed, Mode::Full);
        let (t1, t2) = (p.entities.row(1).to_vec(), p.entities.row(2).to_vec());
        let combo: Vec<f64> = t1.iter().zip(&t2).map(|(a, b)| alpha * a + beta * b).collect();
        p.entities.row_mut(3).copy_from_slice(&combo);
        let f = |t| score(&p, 0, 1, t).unwrap();
        let expect = alpha * f(1) + beta * f(2);
        prop_assert!((f(3) - expect).abs() < 1e-10 * (1.0 + expect.abs()));
    }

    #[test]
    fn loss_is_non_negative(seed in any::<u64>(), m in mode(), lambda in 0.0f64..1.0) {
        let p = params(seed, m);
        let batch = [Triple::new(0, 1, 2), Triple::new(4, 0, 4)];
        let (loss, _) = loss_and_grad(&p, &batch, Regularization::new(lambda, 2.0, 0.5)).unwrap();
        prop_assert!(loss >= 0.0);
    }

    #[test]
    fn permuting_entities_permutes_scores(seed in any::<u64>(), perm in Just((0..5).collect::<Vec<usize>>()).prop_shuffle()) {
        let p = params(seed, Mode::Full);
        let mut q = p.clone();
        // the head stays at row 0 of both tables
        let perm: Vec<usize> = std::iter::once(0).chain(perm.into_iter().filter(|&i| i != 0)).collect();
        for (new, &old) in perm.iter().enumerate() {
            q.entities.row_mut(new).copy_from_slice(p.entities.row(old));
        }
        let a = score_all_tails(&p, 0, 2).unwrap();
        let b = score_all_tails(&q, 0, 2).unwrap();
        for (new, &old) in perm.iter().enumerate() {
            prop_assert_eq!(b[new], a[old]);
        }
    }

    #[test]
    fn real_normalization_is_scale_free(reals in prop::array::uniform8(-2.0f64..2.0), c in 0.01f64..100.0) {
        prop_assume!(reals.iter().map(|v| v * v).sum::<f64>() > 1e-6);
        let q = Biquaternion::from_reals(reals);
        let scaled = Biquaternion::from_reals(reals.map(|v| v * c));
        let a = normalize_rotation(&BiquatVector::from_slots(&[q]), Normalization::RealVector).unwrap();
        let b = normalize_rotation(&BiquatVector::from_slots(&[scaled]), Normalization::RealVector).unwrap();
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            prop_assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn hamilton_transform_matches_algebra(a in prop::array::uniform8(-2.0f64..2.0), b in prop::array::uniform8(-2.0f64..2.0)) {
        let (qa, qb) = (Biquaternion::from_reals(a), Biquaternion::from_reals(b));
        let v = BiquatVector::from_slots(&[qa]).hamilton(&BiquatVector::from_slots(&[qb])).unwrap();
        prop_assert!(v.slot(0).max_abs_diff(qa * qb) < 1e-14);
        let s = BiquatVector::from_slots(&[qa]).translate(&BiquatVector::from_slots(&[qb])).unwrap();
        prop_assert_eq!(s.slot(0), qa + qb);
    }

    #[test]
    fn gradients_match_finite_differences(seed in 1000u64..1_000_000, m in mode()) {
        let r = check_gradients(&random_instance(seed, m), 1e-5, None).unwrap();
        prop_assert!(r.passes(1e-4), "{:?}", r);
    }
}

#[test]
fn quaternion_only_scores_are_real_products() {
    let p = ModelParameters::init(4, 2, 3, Mode::QuaternionOnly, 8);
    let hat = bique::model::transformed_head(&p, 1, 1).unwrap();
    for part in bique::model::Part::ALL.into_iter().filter(|p| p.is_imaginary()) {
        assert!(hat.part(part).iter().all(|&v| v == 0.0));
    }
}

#[test]
fn no_translation_rotates_the_bare_head() {
    let p = ModelParameters::init(4, 2, 3, Mode::NoTranslation, 8);
    let expect = p.entities.vector(0).hamilton(&p.rel_rotate.vector(1)).unwrap();
    assert_eq!(bique::model::transformed_head(&p, 0, 1).unwrap(), expect);
}
