use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use share_core::engine::{InvocationRecord, SolutionTable};
use share_core::rdf::{serialize_ntriples, Graph, Iri, Term, TermPattern, Triple};
use share_core::sparql::{Query, TriplePattern};

fn term_json(term: &Term) -> Value {
    match term {
        Term::Iri(iri) => json!({"type": "uri", "value": iri.as_str()}),
        Term::Literal(lit) => {
            let mut v = json!({"type": "literal", "value": lit.lexical()});
            if let Some(dt) = lit.datatype() {
                v["datatype"] = json!(dt.as_str());
            }
            v
        }
    }
}

/// Invocation records without timings, in execution order.
pub fn records_json(records: &[InvocationRecord]) -> Value {
    Value::Array(
        records
            .iter()
            .map(|r| {
                json!({
                    "service": r.service.as_str(),
                    "inputs": r.inputs.iter().map(Iri::as_str).collect::<Vec<_>>(),
                    "triples": r.triples_returned,
                    "outcome": r.outcome.to_string(),
                })
            })
            .collect(),
    )
}

/// SPARQL JSON results, extended with call records and completeness.
pub fn table_json(table: &SolutionTable) -> Map<String, Value> {
    let vars: Vec<&str> = table.vars.iter().map(|v| v.name()).collect();
    let bindings: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let b: Map<String, Value> = vars
                .iter()
                .zip(row)
                .map(|(v, t)| (v.to_string(), term_json(t)))
                .collect();
            Value::Object(b)
        })
        .collect();
    let mut out = Map::new();
    out.insert("head".into(), json!({"vars": vars}));
    out.insert("results".into(), json!({"bindings": bindings}));
    out
}

fn instantiate(p: &TermPattern, vars: &SolutionTable, row: &[Term]) -> Option<Term> {
    match p {
        TermPattern::Term(t) => Some(t.clone()),
        TermPattern::Variable(v) => vars.column_index(v).map(|i| row[i].clone()),
    }
}

/// The triples of the query patterns instantiated by each answer row.
/// Patterns touching variables outside the projection are skipped.
pub fn answer_graph(query: &Query, table: &SolutionTable) -> Graph {
    let mut g = Graph::new();
    for row in &table.rows {
        for TriplePattern {
            subject,
            predicate,
            object,
        } in &query.patterns
        {
            let s = instantiate(subject, table, row);
            let p = instantiate(predicate, table, row);
            let o = instantiate(object, table, row);
            if let (Some(Term::Iri(s)), Some(Term::Iri(p)), Some(o)) = (s, p, o) {
                g.insert(Triple::new(s, p, o));
            }
        }
    }
    g
}

pub fn ntriples(graph: &Graph) -> String {
    serialize_ntriples(graph)
}

pub fn iri_lines(iris: &BTreeSet<Iri>) -> String {
    iris.iter().map(|i| format!("{i}\n")).collect()
}

/// One line per request for `--explain`.
pub fn records_text(records: &[InvocationRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&format!(
            "{}  {} inputs  {} triples  {}  {} ms\n",
            r.service,
            r.inputs.len(),
            r.triples_returned,
            r.outcome,
            r.duration.as_millis()
        ));
    }
    out
}
