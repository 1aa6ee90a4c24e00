//! The supported SPARQL subset: `PREFIX` declarations, `SELECT [DISTINCT]`
//! over a basic graph pattern, and an optional `LIMIT`.

mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::rdf::{Iri, TermPattern, Triple, Variable};

pub use parser::parse_query;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("syntax error at line {line}, column {column}: {reason}")]
    Syntax {
        /// Byte offset into the query text.
        position: usize,
        line: usize,
        column: usize,
        reason: String,
    },
    /// Valid SPARQL, but outside the supported subset.
    #[error("unsupported SPARQL feature at line {line}, column {column}: {feature}")]
    Unsupported {
        feature: String,
        position: usize,
        line: usize,
        column: usize,
    },
    #[error("invalid query: {0}")]
    Invalid(String),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriplePattern {
    pub subject: TermPattern,
    pub predicate: TermPattern,
    pub object: TermPattern,
}

impl TriplePattern {
    pub fn new(
        subject: impl Into<TermPattern>,
        predicate: impl Into<TermPattern>,
        object: impl Into<TermPattern>,
    ) -> Self {
        TriplePattern {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }

    pub fn positions(&self) -> [&TermPattern; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.positions().into_iter().filter_map(TermPattern::as_variable)
    }

    /// The ground triple, if no position is a variable (and the subject is
    /// an IRI).
    pub fn as_triple(&self) -> Option<Triple> {
        Some(Triple::new(
            self.subject.as_iri()?.clone(),
            self.predicate.as_iri()?.clone(),
            self.object.as_term()?.clone(),
        ))
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)
    }
}

impl fmt::Debug for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub select: Vec<Variable>,
    pub patterns: Vec<TriplePattern>,
    pub distinct: bool,
    pub limit: Option<u64>,
    /// Prefix bindings in effect when the query was parsed. Patterns hold
    /// expanded IRIs only.
    pub prefixes: BTreeMap<String, Iri>,
}

impl Query {
    /// Builds a `SELECT` query over `patterns`, checking the same invariants
    /// the parser enforces. Duplicate patterns are collapsed.
    pub fn select(select: Vec<Variable>, patterns: Vec<TriplePattern>) -> Result<Self, QueryError> {
        let patterns = dedup_patterns(patterns);
        if patterns.is_empty() {
            return Err(QueryError::Invalid("empty graph pattern".into()));
        }
        if select.is_empty() {
            return Err(QueryError::Invalid("no projected variables".into()));
        }
        let known: BTreeSet<_> = patterns.iter().flat_map(|p| p.variables()).collect();
        if let Some(missing) = select.iter().find(|v| !known.contains(v)) {
            return Err(QueryError::Invalid(format!(
                "projected variable {missing} does not occur in the graph pattern"
            )));
        }
        Ok(Query {
            select,
            patterns,
            distinct: false,
            limit: None,
            prefixes: BTreeMap::new(),
        })
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        query_variables(self)
    }
}

/// The union of variables over all patterns.
pub fn query_variables(query: &Query) -> BTreeSet<Variable> {
    query.patterns.iter().flat_map(|p| p.variables().cloned()).collect()
}

pub(crate) fn dedup_patterns(patterns: Vec<TriplePattern>) -> Vec<TriplePattern> {
    let mut seen = BTreeSet::new();
    patterns.into_iter().filter(|p| seen.insert(p.clone())).collect()
}

/// Renders with absolute IRIs only, so the output parses back to an equal
/// query (modulo `prefixes`).
impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT ")?;
        if self.distinct {
            f.write_str("DISTINCT ")?;
        }
        for v in &self.select {
            write!(f, "{v} ")?;
        }
        f.write_str("WHERE {\n")?;
        for p in &self.patterns {
            writeln!(f, "  {p} .")?;
        }
        f.write_str("}")?;
        if let Some(limit) = self.limit {
            write!(f, "\nLIMIT {limit}")?;
        }
        Ok(())
    }
}

pub(crate) fn well_known_prefixes() -> BTreeMap<String, Iri> {
    use crate::vocab::{OWL, RDF, RDFS, XSD};
    [("rdf", RDF), ("rdfs", RDFS), ("owl", OWL), ("xsd", XSD)]
        .into_iter()
        .map(|(p, ns)| (p.to_string(), Iri::new(ns).unwrap()))
        .collect()
}

impl From<&Triple> for TriplePattern {
    fn from(t: &Triple) -> Self {
        TriplePattern::new(t.subject.clone(), t.predicate.clone(), t.object.clone())
    }
}
