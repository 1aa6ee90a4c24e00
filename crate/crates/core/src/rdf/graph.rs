use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use parking_lot::{RwLock, RwLockReadGuard};

use super::{Iri, Term, Triple};

/// Where a stored triple came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Local,
    Service(Iri),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Local => f.write_str("local"),
            Source::Service(iri) => f.write_str(iri.as_str()),
        }
    }
}

type Nested<A, B, C> = BTreeMap<A, BTreeMap<B, BTreeSet<C>>>;

/// In-memory triple store with SPO, POS and OSP indexes.
///
/// Every combination of bound positions in [`Graph::matching`] resolves to a
/// range scan over one index. Equality compares triples only; provenance is
/// bookkeeping.
#[derive(Clone, Default)]
pub struct Graph {
    spo: Nested<Iri, Iri, Term>,
    pos: Nested<Iri, Term, Iri>,
    osp: Nested<Term, Iri, Iri>,
    len: usize,
    provenance: BTreeMap<Triple, Source>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Inserts a triple with local provenance. Returns false if it was
    /// already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.insert_from(triple, Source::Local)
    }

    /// Inserts a triple, recording `source` unless the triple is already
    /// stored (first source wins).
    pub fn insert_from(&mut self, triple: Triple, source: Source) -> bool {
        let Triple {
            subject,
            predicate,
            object,
        } = triple.clone();
        let fresh = self
            .spo
            .entry(subject.clone())
            .or_default()
            .entry(predicate.clone())
            .or_default()
            .insert(object.clone());
        if !fresh {
            return false;
        }
        self.pos
            .entry(predicate.clone())
            .or_default()
            .entry(object.clone())
            .or_default()
            .insert(subject.clone());
        self.osp
            .entry(object)
            .or_default()
            .entry(subject)
            .or_default()
            .insert(predicate);
        self.provenance.insert(triple, source);
        self.len += 1;
        true
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.spo
            .get(&triple.subject)
            .and_then(|by_p| by_p.get(&triple.predicate))
            .is_some_and(|objects| objects.contains(&triple.object))
    }

    pub fn provenance(&self, triple: &Triple) -> Option<&Source> {
        self.provenance.get(triple)
    }

    /// All triples in lexicographic (s, p, o) order.
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().flat_map(|(s, by_p)| {
            by_p.iter().flat_map(move |(p, objects)| {
                objects
                    .iter()
                    .map(move |o| Triple::new(s.clone(), p.clone(), o.clone()))
            })
        })
    }

    pub fn has_predicate(&self, predicate: &Iri) -> bool {
        self.pos.contains_key(predicate)
    }

    /// Triples agreeing with every bound position, sorted (s, p, o).
    pub fn matching(&self, s: Option<&Iri>, p: Option<&Iri>, o: Option<&Term>) -> Vec<Triple> {
        let mut out = Vec::new();
        match (s, p, o) {
            (Some(s), Some(p), Some(o)) => {
                let t = Triple::new(s.clone(), p.clone(), o.clone());
                if self.contains(&t) {
                    out.push(t);
                }
            }
            (Some(s), Some(p), None) => {
                if let Some(objects) = self.spo.get(s).and_then(|m| m.get(p)) {
                    out.extend(objects.iter().map(|o| Triple::new(s.clone(), p.clone(), o.clone())));
                }
            }
            (Some(s), None, None) => {
                if let Some(by_p) = self.spo.get(s) {
                    for (p, objects) in by_p {
                        out.extend(objects.iter().map(|o| Triple::new(s.clone(), p.clone(), o.clone())));
                    }
                }
            }
            (None, Some(p), Some(o)) => {
                if let Some(subjects) = self.pos.get(p).and_then(|m| m.get(o)) {
                    out.extend(subjects.iter().map(|s| Triple::new(s.clone(), p.clone(), o.clone())));
                }
            }
            (None, Some(p), None) => {
                if let Some(by_o) = self.pos.get(p) {
                    for (o, subjects) in by_o {
                        out.extend(subjects.iter().map(|s| Triple::new(s.clone(), p.clone(), o.clone())));
                    }
                }
                out.sort();
            }
            (Some(s), None, Some(o)) => {
                if let Some(predicates) = self.osp.get(o).and_then(|m| m.get(s)) {
                    out.extend(predicates.iter().map(|p| Triple::new(s.clone(), p.clone(), o.clone())));
                }
            }
            (None, None, Some(o)) => {
                if let Some(by_s) = self.osp.get(o) {
                    for (s, predicates) in by_s {
                        out.extend(predicates.iter().map(|p| Triple::new(s.clone(), p.clone(), o.clone())));
                    }
                }
            }
            (None, None, None) => out.extend(self.iter()),
        }
        out
    }

    /// Subjects typed (via `rdf:type`) with any of `classes`.
    pub fn instances_of<'a>(&self, classes: impl IntoIterator<Item = &'a Iri>) -> BTreeSet<Iri> {
        let rdf_type = crate::vocab::rdf_type();
        let mut out = BTreeSet::new();
        for class in classes {
            let class = Term::Iri(class.clone());
            if let Some(subjects) = self.pos.get(&rdf_type).and_then(|m| m.get(&class)) {
                out.extend(subjects.iter().cloned());
            }
        }
        out
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.spo == other.spo
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

/// A [`Graph`] shared between tasks. Many readers, one writer; a batch
/// ingested through [`SharedGraph::ingest`] becomes visible atomically.
#[derive(Clone, Default)]
pub struct SharedGraph(Arc<RwLock<Graph>>);

impl SharedGraph {
    pub fn new(graph: Graph) -> Self {
        SharedGraph(Arc::new(RwLock::new(graph)))
    }

    pub fn read(&self) -> RwLockReadGuard<'_, Graph> {
        self.0.read()
    }

    /// Inserts every triple of `batch` under a single write lock and returns
    /// the number of triples that were new.
    pub fn ingest(&self, batch: impl IntoIterator<Item = Triple>, source: &Source) -> usize {
        let mut guard = self.0.write();
        batch
            .into_iter()
            .filter(|t| guard.insert_from(t.clone(), source.clone()))
            .count()
    }

    pub fn len(&self) -> usize {
        self.0.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.read().is_empty()
    }

    pub fn snapshot(&self) -> Graph {
        self.0.read().clone()
    }
}

impl fmt::Debug for SharedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("SharedGraph").field(&self.0.read().len()).finish()
    }
}
