#![allow(dead_code)]

use std::collections::BTreeSet;

use share_core::engine::{evaluate_bgp, InvocationRecord, SolutionTable};
use share_core::rdf::{Graph, Iri, Term, Variable};
use share_core::reasoner::{expand_class_for, Ontology};
use share_core::sparql::{Query, TriplePattern};
use share_core::vocab;

pub fn var(name: &str) -> Variable {
    Variable::new(name).unwrap()
}

pub fn iris(terms: BTreeSet<Term>) -> BTreeSet<Iri> {
    terms.into_iter().map(|t| t.as_iri().unwrap().clone()).collect()
}

/// Answers over a fully materialized graph: class patterns are replaced by
/// their definitions, then the pattern is evaluated and projected.
pub fn oracle(graph: &Graph, query: &Query, ontology: &Ontology) -> BTreeSet<Vec<Term>> {
    let mut patterns: Vec<TriplePattern> = Vec::new();
    for p in &query.patterns {
        match (&p.predicate.as_iri(), p.object.as_iri()) {
            (Some(pred), Some(class)) if **pred == vocab::rdf_type() && ontology.is_defined(class) => {
                patterns.extend(expand_class_for(ontology, class, &p.subject).unwrap());
            }
            _ => patterns.push(p.clone()),
        }
    }
    evaluate_bgp(graph, &patterns).project(&query.select).row_set()
}

/// Records without timings, as a sorted multiset.
pub fn call_multiset(records: &[InvocationRecord]) -> Vec<String> {
    let mut out: Vec<String> = records
        .iter()
        .map(|r| {
            let inputs: Vec<String> = r.inputs.iter().map(Iri::to_string).collect();
            format!(
                "{} [{}] {} {}",
                r.service,
                inputs.join(" "),
                r.triples_returned,
                r.outcome
            )
        })
        .collect();
    out.sort();
    out
}

pub fn assert_no_duplicate_inputs(records: &[InvocationRecord]) {
    let mut seen = BTreeSet::new();
    for r in records {
        for i in &r.inputs {
            assert!(
                seen.insert((r.service.clone(), i.clone())),
                "{} sent twice to {}",
                i,
                r.service
            );
        }
    }
}

pub fn column(table: &SolutionTable, name: &str) -> BTreeSet<Iri> {
    iris(table.column(&var(name)))
}
