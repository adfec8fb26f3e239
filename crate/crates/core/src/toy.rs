//! A small synthetic graph for end-to-end checks.
//!
//! Fifty entities form a three-level tree: one root, seven children and six
//! grandchildren under each child. `child_of` links every non-root entity to
//! its parent, and `sibling_of` links every ordered pair of distinct entities
//! that share a parent, so it is symmetric.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{build_graph, KnowledgeGraph, RawTriple};

pub const CHILDREN: usize = 7;
pub const GRANDCHILDREN_PER_CHILD: usize = 6;
pub const N_ENTITIES: usize = 1 + CHILDREN + CHILDREN * GRANDCHILDREN_PER_CHILD;

/// Every raw triple of the toy graph in a fixed order.
pub fn toy_triples() -> Vec<RawTriple> {
    let mut groups: Vec<(String, Vec<String>)> = vec![];
    let children: Vec<String> = (0..CHILDREN).map(|c| format!("c{c}")).collect();
    groups.push(("root".into(), children.clone()));
    for c in &children {
        let kids = (0..GRANDCHILDREN_PER_CHILD).map(|g| format!("{c}_g{g}")).collect();
        groups.push((c.clone(), kids));
    }

    let mut out = vec![];
    for (parent, kids) in &groups {
        for a in kids {
            out.push(RawTriple::new(a.as_str(), "child_of", parent.as_str()));
        }
        for a in kids {
            for b in kids {
                if a != b {
                    out.push(RawTriple::new(a.as_str(), "sibling_of", b.as_str()));
                }
            }
        }
    }
    out
}

/// The toy graph with a seeded split: `test_fraction` of the raw triples go
/// to the test split, the rest to train. The validation split is empty.
pub fn toy_graph(seed: u64, test_fraction: f64) -> KnowledgeGraph {
    let mut triples = toy_triples();
    triples.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_test = (triples.len() as f64 * test_fraction).round() as usize;
    let test = triples.split_off(triples.len() - n_test);
    build_graph(&triples, &[], &test)
}
