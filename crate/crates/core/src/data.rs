//! Triple files, dictionaries, reciprocal augmentation and the filter index.
//!
//! Split files are UTF-8 with one `head<TAB>relation<TAB>tail` triple per
//! line. Ids are assigned by first appearance over train, then valid, then
//! test. Every split is augmented with reciprocal triples `(t, r⁻¹, h)`, where
//! `r⁻¹ = r + n_raw_relations`.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Suffix used when printing reciprocal relations.
pub const RECIPROCAL_SUFFIX: &str = "_reciprocal";

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected 3 tab-separated fields, found {found}")]
    Parse { line: usize, found: usize },
}

/// A triple of names as read from a split file.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RawTriple {
    pub head: String,
    pub relation: String,
    pub tail: String,
}

impl RawTriple {
    pub fn new(head: impl Into<String>, relation: impl Into<String>, tail: impl Into<String>) -> Self {
        Self { head: head.into(), relation: relation.into(), tail: tail.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub head: u32,
    pub relation: u32,
    pub tail: u32,
}

impl Triple {
    pub const fn new(head: u32, relation: u32, tail: u32) -> Self {
        Self { head, relation, tail }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl std::str::FromStr for Split {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "train" => Ok(Split::Train),
            "valid" | "validation" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}` (expected train, valid or test)")),
        }
    }
}

/// Parses split-file contents. Blank lines are skipped and a trailing `\r`
/// is accepted on every line.
pub fn parse_split(text: &str) -> Result<Vec<RawTriple>, DataError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(DataError::Parse { line: i + 1, found: fields.len() });
        }
        out.push(RawTriple::new(fields[0], fields[1], fields[2]));
    }
    Ok(out)
}

pub fn load_split(path: impl AsRef<Path>) -> Result<Vec<RawTriple>, DataError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|source| DataError::Io { path: path.to_path_buf(), source })?;
    parse_split(&text)
}

/// Entity and relation dictionaries plus the three augmented splits.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeGraph {
    entities: IndexSet<String>,
    relations: IndexSet<String>,
    pub train: Vec<Triple>,
    pub valid: Vec<Triple>,
    pub test: Vec<Triple>,
}

impl KnowledgeGraph {
    pub fn n_entities(&self) -> usize {
        self.entities.len()
    }

    /// Relation count before augmentation.
    pub fn n_raw_relations(&self) -> usize {
        self.relations.len()
    }

    /// Relation count after augmentation (twice the raw count).
    pub fn n_relations(&self) -> usize {
        2 * self.relations.len()
    }

    pub fn entity_name(&self, id: u32) -> Option<&str> {
        self.entities.get_index(id as usize).map(String::as_str)
    }

    pub fn entity_id(&self, name: &str) -> Option<u32> {
        self.entities.get_index_of(name).map(|i| i as u32)
    }

    /// Name of a post-augmentation relation id; reciprocal ids carry
    /// [`RECIPROCAL_SUFFIX`].
    pub fn relation_name(&self, id: u32) -> Option<String> {
        let n = self.relations.len();
        let id = id as usize;
        if id < n {
            self.relations.get_index(id).cloned()
        } else {
            self.relations.get_index(id - n).map(|r| format!("{r}{RECIPROCAL_SUFFIX}"))
        }
    }

    pub fn relation_id(&self, name: &str) -> Option<u32> {
        if let Some(i) = self.relations.get_index_of(name) {
            return Some(i as u32);
        }
        let base = name.strip_suffix(RECIPROCAL_SUFFIX)?;
        self.relations.get_index_of(base).map(|i| (i + self.relations.len()) as u32)
    }

    /// Raw relation id a (possibly reciprocal) relation belongs to.
    pub fn raw_relation(&self, id: u32) -> u32 {
        id % self.relations.len().max(1) as u32
    }

    pub fn is_reciprocal(&self, id: u32) -> bool {
        id as usize >= self.relations.len()
    }

    pub fn split(&self, split: Split) -> &[Triple] {
        match split {
            Split::Train => &self.train,
            Split::Valid => &self.valid,
            Split::Test => &self.test,
        }
    }

    /// Maps a stored triple back to names.
    pub fn to_raw(&self, t: Triple) -> Option<RawTriple> {
        Some(RawTriple {
            head: self.entity_name(t.head)?.to_owned(),
            relation: self.relation_name(t.relation)?,
            tail: self.entity_name(t.tail)?.to_owned(),
        })
    }

    /// Builds a graph from id-level splits over `n_entities` entities named
    /// `e0, e1, …` and the given relation names.
    pub fn from_ids(
        n_entities: usize,
        relation_names: &[&str],
        train: &[Triple],
        valid: &[Triple],
        test: &[Triple],
    ) -> Self {
        let entities = (0..n_entities).map(|i| format!("e{i}")).collect();
        let relations: IndexSet<String> = relation_names.iter().map(|s| s.to_string()).collect();
        let n_raw = relations.len() as u32;
        Self {
            entities,
            relations,
            train: augment(train.to_vec(), n_raw),
            valid: augment(valid.to_vec(), n_raw),
            test: augment(test.to_vec(), n_raw),
        }
    }
}

fn augment(mut raw: Vec<Triple>, n_raw_relations: u32) -> Vec<Triple> {
    let n = raw.len();
    raw.reserve(n);
    for i in 0..n {
        let t = raw[i];
        raw.push(Triple::new(t.tail, t.relation + n_raw_relations, t.head));
    }
    raw
}

/// Assigns ids over the union of the splits and appends reciprocal triples.
pub fn build_graph(train: &[RawTriple], valid: &[RawTriple], test: &[RawTriple]) -> KnowledgeGraph {
    let mut entities = IndexSet::new();
    let mut relations = IndexSet::new();
    for t in train.iter().chain(valid).chain(test) {
        entities.insert(t.head.clone());
        relations.insert(t.relation.clone());
        entities.insert(t.tail.clone());
    }
    let n_raw = relations.len() as u32;
    let encode = |split: &[RawTriple]| -> Vec<Triple> {
        let ids = split
            .iter()
            .map(|t| {
                Triple::new(
                    entities.get_index_of(&t.head).unwrap() as u32,
                    relations.get_index_of(&t.relation).unwrap() as u32,
                    entities.get_index_of(&t.tail).unwrap() as u32,
                )
            })
            .collect();
        augment(ids, n_raw)
    };
    let (train, valid, test) = (encode(train), encode(valid), encode(test));
    KnowledgeGraph { entities, relations, train, valid, test }
}

/// Loads `train`, `valid` and `test` split files and builds the graph.
pub fn load_graph(
    train: impl AsRef<Path>,
    valid: Option<&Path>,
    test: Option<&Path>,
) -> Result<KnowledgeGraph, DataError> {
    let train = load_split(train)?;
    let valid = valid.map(load_split).transpose()?.unwrap_or_default();
    let test = test.map(load_split).transpose()?.unwrap_or_default();
    Ok(build_graph(&train, &valid, &test))
}

/// Known-true tails per `(head, relation)` over all augmented splits.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterIndex {
    tails: HashMap<(u32, u32), HashSet<u32>>,
}

impl FilterIndex {
    pub fn build(kg: &KnowledgeGraph) -> Self {
        let mut tails: HashMap<(u32, u32), HashSet<u32>> = HashMap::new();
        for t in kg.train.iter().chain(&kg.valid).chain(&kg.test) {
            tails.entry((t.head, t.relation)).or_default().insert(t.tail);
        }
        Self { tails }
    }

    pub fn tails(&self, head: u32, relation: u32) -> Option<&HashSet<u32>> {
        self.tails.get(&(head, relation))
    }

    pub fn contains(&self, t: Triple) -> bool {
        self.tails(t.head, t.relation).is_some_and(|s| s.contains(&t.tail))
    }

    /// Number of distinct triples in the index.
    pub fn len(&self) -> usize {
        self.tails.values().map(HashSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.tails.is_empty()
    }
}
