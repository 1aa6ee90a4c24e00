//! OWL-lite classes whose membership is decided by invoking services.
//!
//! A defined class flattens to a conjunction of triple patterns about one
//! individual. Finding its instances is an ordinary query over those
//! patterns; testing one individual checks each pattern against the store
//! and asks the services annotated with the pattern's predicate for any
//! triple that is missing.

mod ontology;

use std::collections::{BTreeMap, BTreeSet};

use crate::engine::{Engine, InvocationRecord, ResolveError, Session};
use crate::rdf::{Graph, Iri, SharedGraph, Source, Term, TermPattern, Triple, Variable};
use crate::registry::{Direction, Registry};
use crate::sparql::Query;
use crate::vocab;

pub use ontology::{expand_class, expand_class_for, ClassDefinition, Ontology, OntologyError};

/// Outcome of a membership test. `Unknown` arises only when a service needed
/// to confirm a restriction failed under best-effort resolution; `NonMember`
/// means the membership is not derivable from the retrieved triples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Membership {
    Member,
    NonMember,
    Unknown,
}

/// `SELECT ?x WHERE { <expansion of class> }`.
pub fn class_query(ontology: &Ontology, class: &Iri) -> Result<Query, OntologyError> {
    let x = Variable::new("x").expect("valid variable name");
    let patterns = expand_class(ontology, class, &x)?;
    Ok(Query::select(vec![x], patterns).expect("a class expansion is a non-empty pattern over ?x"))
}

/// Individuals belonging to `class`, found by resolving its class query.
pub async fn instances(
    engine: &Engine,
    ontology: &Ontology,
    class: &Iri,
    registry: &Registry,
    store: &SharedGraph,
) -> Result<BTreeSet<Iri>, ResolveError> {
    let query = class_query(ontology, class)?;
    let resolution = engine.resolve(&query, registry, ontology, store).await?;
    Ok(resolution
        .table
        .column(&query.select[0])
        .into_iter()
        .filter_map(|t| t.as_iri().cloned())
        .collect())
}

pub async fn is_instance(
    engine: &Engine,
    ontology: &Ontology,
    class: &Iri,
    individual: &Iri,
    registry: &Registry,
    store: &SharedGraph,
) -> Result<Membership, ResolveError> {
    let mut session = Session::default();
    let individuals = BTreeSet::from([individual.clone()]);
    let verdicts = classify(engine, ontology, class, &individuals, registry, store, &mut session).await?;
    Ok(verdicts[individual])
}

#[derive(Debug, Clone, Default)]
pub struct Lifting {
    /// The inferred `rdf:type` statements.
    pub graph: Graph,
    /// (class, individual) pairs left undecided by failed calls.
    pub unknown: Vec<(Iri, Iri)>,
    pub records: Vec<InvocationRecord>,
}

/// Types every individual with every defined class it belongs to. Classes
/// are visited with intersection members before the classes built from
/// them. The inferred statements are also added to `store`.
pub async fn lift(
    engine: &Engine,
    ontology: &Ontology,
    individuals: &BTreeSet<Iri>,
    registry: &Registry,
    store: &SharedGraph,
) -> Result<Lifting, ResolveError> {
    let mut session = Session::default();
    let mut lifting = Lifting::default();
    if individuals.is_empty() {
        return Ok(lifting);
    }
    for class in ontology.topological_order()? {
        let verdicts = classify(engine, ontology, &class, individuals, registry, store, &mut session).await?;
        let mut inferred = Vec::new();
        for (individual, verdict) in verdicts {
            match verdict {
                Membership::Member => inferred.push(Triple::new(individual, vocab::rdf_type(), class.clone())),
                Membership::Unknown => lifting.unknown.push((class.clone(), individual)),
                Membership::NonMember => {}
            }
        }
        store.ingest(inferred.iter().cloned(), &Source::Local);
        lifting.graph.extend(inferred);
    }
    lifting.records = session.records;
    Ok(lifting)
}

/// Decides membership of each individual in `class`, fetching missing
/// restriction triples in one batch per restriction: from forward services
/// with the undecided individuals as input, or, when the predicate only has
/// inverse services, with the restriction value as input.
async fn classify(
    engine: &Engine,
    ontology: &Ontology,
    class: &Iri,
    individuals: &BTreeSet<Iri>,
    registry: &Registry,
    store: &SharedGraph,
    session: &mut Session,
) -> Result<BTreeMap<Iri, Membership>, ResolveError> {
    let x = Variable::new("x").expect("valid variable name");
    let restrictions: Vec<(Iri, Term)> = expand_class(ontology, class, &x)?
        .into_iter()
        .filter_map(|p| match (p.predicate, p.object) {
            (TermPattern::Term(Term::Iri(pred)), TermPattern::Term(value)) => Some((pred, value)),
            _ => None,
        })
        .collect();

    let holds = |i: &Iri, p: &Iri, v: &Term| store.read().contains(&Triple::new(i.clone(), p.clone(), v.clone()));
    // (individual, restriction index) pairs whose answering call failed.
    let mut undecided: BTreeSet<(Iri, usize)> = BTreeSet::new();
    for (index, (predicate, value)) in restrictions.iter().enumerate() {
        let missing: BTreeSet<Iri> = individuals
            .iter()
            .filter(|i| !holds(i, predicate, value))
            .cloned()
            .collect();
        if missing.is_empty() {
            continue;
        }
        let forward = registry.find_by_predicate(predicate, Some(Direction::Forward));
        let by_individual = !forward.is_empty();
        let jobs = if by_individual {
            forward.into_iter().map(|d| (d, missing.clone())).collect()
        } else {
            match value {
                Term::Iri(v) => registry
                    .find_by_predicate(predicate, Some(Direction::Inverse))
                    .into_iter()
                    .map(|d| (d, BTreeSet::from([v.clone()])))
                    .collect(),
                Term::Literal(_) => Vec::new(),
            }
        };
        let before = session.records.len();
        if !engine.call_services(session, jobs, store).await? {
            continue;
        }
        let failed: Vec<&InvocationRecord> = session.records[before..]
            .iter()
            .filter(|r| !r.outcome.is_ok())
            .collect();
        for i in &missing {
            let affected = !by_individual || failed.iter().any(|r| r.inputs.contains(i));
            if affected && !holds(i, predicate, value) {
                undecided.insert((i.clone(), index));
            }
        }
    }

    Ok(individuals
        .iter()
        .map(|i| {
            let mut verdict = Membership::Member;
            for (index, (p, v)) in restrictions.iter().enumerate() {
                if holds(i, p, v) {
                    continue;
                }
                if !undecided.contains(&(i.clone(), index)) {
                    verdict = Membership::NonMember;
                    break;
                }
                verdict = Membership::Unknown;
            }
            (i.clone(), verdict)
        })
        .collect())
}
