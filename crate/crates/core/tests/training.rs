use bique::data::{build_graph, FilterIndex, KnowledgeGraph, RawTriple, Split, Triple};
use bique::eval::evaluate;
use bique::model::{loss_and_grad, loss_and_grad_into, Gradients, Mode, ModelParameters, Part, Regularization};
use bique::train::{adagrad_step, train, AdagradState, TrainConfig};

/// Eight entities in four symmetric pairs under one relation.
fn symmetric_pairs() -> KnowledgeGraph {
    let mut raw = vec![];
    for i in 0..4 {
        let (a, b) = (format!("a{i}"), format!("b{i}"));
        raw.push(RawTriple::new(a.as_str(), "married_to", b.as_str()));
        raw.push(RawTriple::new(b.as_str(), "married_to", a.as_str()));
    }
    build_graph(&raw, &[], &[])
}

#[test]
fn memorizes_a_symmetric_relation() {
    let kg = symmetric_pairs();
    assert_eq!(kg.n_entities(), 8);
    let cfg = TrainConfig { epochs: 200, k: 8, batch_size: 4, lambda: 0.01, eval_every: 0, ..TrainConfig::default() };
    let out = train(&kg, &cfg).unwrap();
    let report = evaluate(&out.best, &kg, Split::Train, &FilterIndex::build(&kg)).unwrap();
    assert!(report.mrr >= 0.95, "train MRR {}", report.mrr);
    assert!(out.log.last().unwrap().mean_batch_loss < out.log[0].mean_batch_loss);
}

#[test]
fn same_seed_same_run() {
    let kg = symmetric_pairs();
    let cfg = TrainConfig { epochs: 5, k: 2, batch_size: 3, eval_every: 0, seed: 12, ..TrainConfig::default() };
    let (a, b) = (train(&kg, &cfg).unwrap(), train(&kg, &cfg).unwrap());
    assert_eq!(a.last, b.last);
    let losses = |o: &bique::train::TrainOutcome| o.log.iter().map(|r| r.mean_batch_loss).collect::<Vec<_>>();
    assert_eq!(losses(&a), losses(&b));
    let c = train(&kg, &TrainConfig { seed: 13, ..cfg }).unwrap();
    assert_ne!(a.last, c.last);
}

#[test]
fn constrained_modes_stay_constrained() {
    let triples: Vec<Triple> = (0..20).map(|i| Triple::new(i % 6, i % 2, (i * 7 + 3) % 6)).collect();
    let kg = KnowledgeGraph::from_ids(6, &["r", "s"], &triples, &[], &[]);
    for mode in [Mode::QuaternionOnly, Mode::NoTranslation] {
        let mut params = ModelParameters::init(6, 4, 3, mode, 1);
        let mut state = AdagradState::new(&params);
        let mut grads = Gradients::for_params(&params);
        for step in 0..300 {
            let batch = &kg.train[(step % 8) * 5..(step % 8) * 5 + 5];
            loss_and_grad_into(&params, batch, Regularization::new(0.1, 2.0, 0.5), &mut grads).unwrap();
            adagrad_step(&mut params, &grads, &mut state, 0.1, 1e-10).unwrap();
        }
        match mode {
            Mode::QuaternionOnly => {
                for t in params.tables() {
                    for i in 0..t.rows() {
                        let v = t.vector(i);
                        for part in Part::ALL.into_iter().filter(|p| p.is_imaginary()) {
                            assert!(v.part(part).iter().all(|&x| x == 0.0));
                        }
                    }
                }
            }
            _ => assert!(params.rel_translate.as_slice().iter().all(|&x| x == 0.0)),
        }
    }
}

#[test]
fn accumulators_never_decrease() {
    let kg = symmetric_pairs();
    let mut params = ModelParameters::init(8, 2, 2, Mode::Full, 3);
    let mut state = AdagradState::new(&params);
    let mut prev: Vec<Vec<f64>> = state.accumulators().iter().map(|a| a.to_vec()).collect();
    for chunk in kg.train.chunks(3).cycle().take(20) {
        let (_, grads) = loss_and_grad(&params, chunk, Regularization::new(0.1, 2.0, 0.5)).unwrap();
        adagrad_step(&mut params, &grads, &mut state, 0.1, 1e-10).unwrap();
        for (now, before) in state.accumulators().iter().zip(&prev) {
            assert!(now.iter().zip(before).all(|(n, b)| n >= b && *n >= 0.0));
        }
        prev = state.accumulators().iter().map(|a| a.to_vec()).collect();
    }
}

#[test]
fn toy_loss_decreases() {
    let kg = bique::toy::toy_graph(1, 0.1);
    let cfg = TrainConfig { epochs: 200, k: 8, batch_size: 32, lambda: 0.05, eval_every: 0, ..TrainConfig::default() };
    let out = train(&kg, &cfg).unwrap();
    assert!(out.log[199].mean_batch_loss < out.log[0].mean_batch_loss);
}
