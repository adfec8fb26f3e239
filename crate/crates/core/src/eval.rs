//! Filtered link-prediction ranking under the BOTTOM protocol.
//!
//! Every (post-augmentation) triple `(h, r, t)` of a split is one tail query.
//! Head prediction is covered by the reciprocal triples. The true tail is
//! ranked against every entity that is not a known-true tail of `(h, r)`, and
//! a competitor with exactly the same score is ranked ahead of it.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::data::{FilterIndex, KnowledgeGraph, Split, Triple};
use crate::model::{transformed_head, ModelParameters};

/// Cut-offs reported as Hits@k.
pub const HITS_AT: [usize; 3] = [1, 3, 10];

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("scorer has {scorer} entities but the graph has {graph}")]
    EntityCount { scorer: usize, graph: usize },
    #[error("scorer has {scorer} relations but the graph has {graph}")]
    RelationCount { scorer: usize, graph: usize },
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// 1-based rank of `true_id` among candidates not in `filtered_out`.
///
/// A competitor counts against the true entity unless its score is strictly
/// lower, so exact ties go against it and a NaN on either side is the worst
/// case. `true_id` itself is never a competitor, whether or not it appears in
/// `filtered_out`.
///
/// ```
/// use std::collections::HashSet;
/// use bique::eval::rank_bottom;
///
/// assert_eq!(rank_bottom(&[0.5, 0.5, 0.5, 0.5, 0.5], 2, &HashSet::new()), 5);
/// assert_eq!(rank_bottom(&[0.1, 0.9, 0.4], 1, &HashSet::new()), 1);
/// ```
pub fn rank_bottom(scores: &[f64], true_id: u32, filtered_out: &HashSet<u32>) -> usize {
    let target = scores[true_id as usize];
    let ahead = scores
        .iter()
        .enumerate()
        .filter(|&(e, &s)| {
            let e = e as u32;
            e != true_id && !filtered_out.contains(&e) && !(s < target)
        })
        .count();
    1 + ahead
}

/// Anything that can score every candidate tail of a `(head, relation)` query.
pub trait TailScorer: Sync {
    fn n_entities(&self) -> usize;
    fn n_relations(&self) -> usize;
    /// Writes one score per entity into `out`, which is resized as needed.
    fn score_tails(&self, head: u32, relation: u32, out: &mut Vec<f64>) -> Result<(), EvalError>;
}

impl TailScorer for ModelParameters {
    fn n_entities(&self) -> usize {
        ModelParameters::n_entities(self)
    }

    fn n_relations(&self) -> usize {
        ModelParameters::n_relations(self)
    }

    fn score_tails(&self, head: u32, relation: u32, out: &mut Vec<f64>) -> Result<(), EvalError> {
        let hat = transformed_head(self, head, relation)?;
        let hat = hat.as_slice();
        out.clear();
        out.extend(
            (0..self.entities.rows())
                .map(|e| self.entities.row(e).iter().zip(hat).map(|(a, b)| a * b).sum::<f64>()),
        );
        Ok(())
    }
}

/// Aggregate metrics for one group of queries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationMetrics {
    pub relation: u32,
    pub name: String,
    pub count: usize,
    pub mrr: f64,
    pub hits10: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub n_queries: usize,
    pub mrr: f64,
    /// Hits@k keyed by `k`.
    pub hits: BTreeMap<usize, f64>,
    /// One row per post-augmentation relation id that has queries.
    pub per_relation: Vec<RelationMetrics>,
    /// Each raw relation pooled with its reciprocal.
    pub merged_relations: Vec<RelationMetrics>,
}

#[derive(Default)]
struct Acc {
    count: usize,
    rr: f64,
    hits: [usize; HITS_AT.len()],
}

impl Acc {
    fn push(&mut self, rank: usize) {
        self.count += 1;
        self.rr += 1.0 / rank as f64;
        for (h, &k) in self.hits.iter_mut().zip(&HITS_AT) {
            *h += usize::from(rank <= k);
        }
    }

    fn mrr(&self) -> f64 {
        if self.count == 0 { 0.0 } else { self.rr / self.count as f64 }
    }

    fn hit_rate(&self, i: usize) -> f64 {
        if self.count == 0 { 0.0 } else { self.hits[i] as f64 / self.count as f64 }
    }

    fn row(&self, relation: u32, name: String) -> RelationMetrics {
        RelationMetrics { relation, name, count: self.count, mrr: self.mrr(), hits10: self.hit_rate(2) }
    }
}

impl EvalReport {
    /// Overall metrics from a list of ranks, without relation breakdown.
    ///
    /// ```
    /// let r = bique::eval::EvalReport::from_ranks(&[1, 4]);
    /// assert_eq!(r.mrr, 0.625);
    /// assert_eq!(r.hits[&1], 0.5);
    /// assert_eq!(r.hits[&3], 0.5);
    /// assert_eq!(r.hits[&10], 1.0);
    /// ```
    pub fn from_ranks(ranks: &[usize]) -> Self {
        let mut all = Acc::default();
        ranks.iter().for_each(|&r| all.push(r));
        Self::finish(&all, vec![], vec![])
    }

    /// Builds a full report from `(relation, rank)` pairs.
    pub fn from_queries(kg: &KnowledgeGraph, queries: &[(u32, usize)]) -> Self {
        let mut all = Acc::default();
        let mut per: BTreeMap<u32, Acc> = BTreeMap::new();
        let mut merged: BTreeMap<u32, Acc> = BTreeMap::new();
        for &(rel, rank) in queries {
            all.push(rank);
            per.entry(rel).or_default().push(rank);
            merged.entry(kg.raw_relation(rel)).or_default().push(rank);
        }
        let name = |r: u32| kg.relation_name(r).unwrap_or_else(|| r.to_string());
        let per = per.iter().map(|(&r, a)| a.row(r, name(r))).collect();
        let merged = merged.iter().map(|(&r, a)| a.row(r, name(r))).collect();
        Self::finish(&all, per, merged)
    }

    fn finish(all: &Acc, per: Vec<RelationMetrics>, merged: Vec<RelationMetrics>) -> Self {
        let hits = HITS_AT.iter().enumerate().map(|(i, &k)| (k, all.hit_rate(i))).collect();
        Self { n_queries: all.count, mrr: all.mrr(), hits, per_relation: per, merged_relations: merged }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Summary followed by an aligned per-relation table.
    pub fn to_table(&self) -> String {
        let mut s = format!("queries  {}\nMRR      {:.4}\n", self.n_queries, self.mrr);
        for (k, v) in &self.hits {
            s += &format!("{:<9}{v:.4}\n", format!("Hits@{k}"));
        }
        if self.per_relation.is_empty() {
            return s;
        }
        let width = self
            .per_relation
            .iter()
            .chain(&self.merged_relations)
            .map(|r| r.name.len())
            .max()
            .unwrap_or(0)
            .max("relation".len());
        for (title, rows) in [("per relation", &self.per_relation), ("merged", &self.merged_relations)] {
            s += &format!("\n{title}\n{:<width$}  {:>7}  {:>6}  {:>7}\n", "relation", "count", "mrr", "hits@10");
            for r in rows.iter() {
                s += &format!("{:<width$}  {:>7}  {:>6.4}  {:>7.4}\n", r.name, r.count, r.mrr, r.hits10);
            }
        }
        s
    }

    /// Per-relation rows as CSV with columns `relation,count,mrr,hits10`.
    pub fn write_relation_csv<W: Write>(&self, out: W) -> Result<(), EvalError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["relation", "count", "mrr", "hits10"])?;
        for r in &self.per_relation {
            w.write_record([r.name.clone(), r.count.to_string(), r.mrr.to_string(), r.hits10.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_dims<S: TailScorer + ?Sized>(scorer: &S, kg: &KnowledgeGraph) -> Result<(), EvalError> {
    if scorer.n_entities() != kg.n_entities() {
        return Err(EvalError::EntityCount { scorer: scorer.n_entities(), graph: kg.n_entities() });
    }
    if scorer.n_relations() != kg.n_relations() {
        return Err(EvalError::RelationCount { scorer: scorer.n_relations(), graph: kg.n_relations() });
    }
    Ok(())
}

fn rank_query<S: TailScorer + ?Sized>(
    scorer: &S,
    filter: &FilterIndex,
    t: Triple,
    buf: &mut Vec<f64>,
) -> Result<usize, EvalError> {
    scorer.score_tails(t.head, t.relation, buf)?;
    let empty = HashSet::new();
    let known = filter.tails(t.head, t.relation).unwrap_or(&empty);
    Ok(rank_bottom(buf, t.tail, known))
}

/// Filtered ranks of every query in `triples`, in order.
pub fn rank_triples<S: TailScorer + ?Sized>(
    scorer: &S,
    triples: &[Triple],
    filter: &FilterIndex,
) -> Result<Vec<usize>, EvalError> {
    let mut buf = Vec::new();
    triples.iter().map(|&t| rank_query(scorer, filter, t, &mut buf)).collect()
}

/// Single-threaded evaluation of one split.
pub fn evaluate<S: TailScorer + ?Sized>(
    scorer: &S,
    kg: &KnowledgeGraph,
    split: Split,
    filter: &FilterIndex,
) -> Result<EvalReport, EvalError> {
    check_dims(scorer, kg)?;
    let triples = kg.split(split);
    let ranks = rank_triples(scorer, triples, filter)?;
    Ok(report(kg, triples, &ranks))
}

/// [`evaluate`] with queries spread over `threads` workers. Ranks are
/// collected in query order, so the report equals the single-worker one.
pub fn evaluate_parallel<S: TailScorer + ?Sized>(
    scorer: &S,
    kg: &KnowledgeGraph,
    split: Split,
    filter: &FilterIndex,
    threads: usize,
) -> Result<EvalReport, EvalError> {
    if threads <= 1 {
        return evaluate(scorer, kg, split, filter);
    }
    check_dims(scorer, kg)?;
    let triples = kg.split(split);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    let ranks = pool.install(|| {
        triples
            .par_iter()
            .map_init(Vec::new, |buf, &t| rank_query(scorer, filter, t, buf))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(report(kg, triples, &ranks))
}

fn report(kg: &KnowledgeGraph, triples: &[Triple], ranks: &[usize]) -> EvalReport {
    let queries: Vec<(u32, usize)> = triples.iter().zip(ranks).map(|(t, &r)| (t.relation, r)).collect();
    EvalReport::from_queries(kg, &queries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_and_filtering() {
        let none = HashSet::new();
        assert_eq!(rank_bottom(&[1.0, 3.0, 2.0], 1, &none), 1);
        assert_eq!(rank_bottom(&[1.0, 3.0, 2.0], 0, &none), 3);
        assert_eq!(rank_bottom(&[2.0; 5], 0, &none), 5);
        let f: HashSet<u32> = [1, 2].into();
        assert_eq!(rank_bottom(&[1.0, 3.0, 2.0], 0, &f), 1);
        // the true id inside the filter set is ignored
        let f: HashSet<u32> = [0].into();
        assert_eq!(rank_bottom(&[1.0, 3.0, 2.0], 0, &f), 3);
    }

    #[test]
    fn nan_is_worst_case() {
        let none = HashSet::new();
        assert_eq!(rank_bottom(&[f64::NAN, 0.0, 1.0], 0, &none), 3);
        assert_eq!(rank_bottom(&[5.0, f64::NAN, 1.0], 0, &none), 2);
    }

    #[test]
    fn single_perfect_query() {
        let r = EvalReport::from_ranks(&[1]);
        assert_eq!(r.mrr, 1.0);
        assert!(r.hits.values().all(|&h| h == 1.0));
    }

    #[test]
    fn empty_report() {
        let r = EvalReport::from_ranks(&[]);
        assert_eq!((r.n_queries, r.mrr), (0, 0.0));
    }

    #[test]
    fn csv_and_table() {
        let kg = KnowledgeGraph::from_ids(3, &["likes"], &[], &[], &[]);
        let r = EvalReport::from_queries(&kg, &[(0, 1), (0, 4), (1, 2)]);
        assert_eq!(r.per_relation.len(), 2);
        assert_eq!(r.per_relation[1].name, "likes_reciprocal");
        assert_eq!(r.merged_relations.len(), 1);
        assert_eq!(r.merged_relations[0].count, 3);
        let mut out = Vec::new();
        r.write_relation_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().next(), Some("relation,count,mrr,hits10"));
        assert!(text.contains("likes,2,0.625,1"));
        assert!(r.to_table().contains("likes_reciprocal"));
    }
}
