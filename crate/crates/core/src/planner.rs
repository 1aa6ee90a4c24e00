//! Turns a query into an ordered plan: which patterns are answered by
//! services (and in which direction), which are expanded from class
//! definitions, and which are left to the local store.
//!
//! Ordering is greedy. At each round every remaining pattern is scored by
//! readiness (its service input is a constant or an already bound variable;
//! it must enumerate known instances; or nothing can feed it), then by
//! estimated calls, then by its position in the query. Cardinalities are
//! crude: a constant counts 1, a variable bound by an earlier step inherits
//! that step's input count, an enumerated variable counts the known instances
//! of the service's input class.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::ops::Add;

use crate::rdf::{Graph, Iri, Term, TermPattern, Variable};
use crate::reasoner::{expand_class_for, Ontology, OntologyError};
use crate::registry::{Direction, Registry};
use crate::sparql::{Query, TriplePattern};
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cardinality {
    Finite(u64),
    Unbounded,
}

impl Cardinality {
    pub fn finite(self) -> Option<u64> {
        match self {
            Cardinality::Finite(n) => Some(n),
            Cardinality::Unbounded => None,
        }
    }
}

impl Add for Cardinality {
    type Output = Cardinality;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Cardinality::Finite(a), Cardinality::Finite(b)) => Cardinality::Finite(a.saturating_add(b)),
            _ => Cardinality::Unbounded,
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(1) => f.write_str("1 call"),
            Cardinality::Finite(n) => write!(f, "{n} calls"),
            Cardinality::Unbounded => f.write_str("unbounded calls"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    LocalOnly,
    Forward(Vec<Iri>),
    Inverse(Vec<Iri>),
    /// An `rdf:type` pattern naming a defined class, replaced by the
    /// patterns of the class definition, each planned as its own sub-step.
    ClassExpansion {
        class: Iri,
        steps: Vec<PatternStep>,
    },
}

impl Strategy {
    pub fn services(&self) -> &[Iri] {
        match self {
            Strategy::Forward(ids) | Strategy::Inverse(ids) => ids,
            _ => &[],
        }
    }

    pub fn direction(&self) -> Option<Direction> {
        match self {
            Strategy::Forward(_) => Some(Direction::Forward),
            Strategy::Inverse(_) => Some(Direction::Inverse),
            _ => None,
        }
    }
}

/// Where a service step takes its input terms from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSource {
    /// Not a service step.
    None,
    Constant(Iri),
    /// Values of a variable bound by earlier steps.
    Bound(Variable),
    /// Every known instance of each service's input class.
    Enumerate(Variable),
    /// Neither endpoint can be bound; execution refuses the pattern.
    Unresolvable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternStep {
    /// 1-based position within the enclosing list of steps.
    pub rank: usize,
    pub pattern: TriplePattern,
    pub strategy: Strategy,
    pub input: InputSource,
    /// Expected number of (service, input) pairs sent.
    pub estimated_calls: Cardinality,
}

impl PatternStep {
    pub fn is_unresolvable(&self) -> bool {
        match &self.strategy {
            Strategy::ClassExpansion { steps, .. } => steps.iter().any(PatternStep::is_unresolvable),
            _ => self.input == InputSource::Unresolvable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryPlan {
    pub steps: Vec<PatternStep>,
    /// Patterns nothing can bind, reported at plan time; execution fails on
    /// them.
    pub warnings: Vec<TriplePattern>,
}

impl QueryPlan {
    /// Leaf steps in execution order, with class expansions flattened.
    pub fn leaf_steps(&self) -> Vec<&PatternStep> {
        fn walk<'a>(steps: &'a [PatternStep], out: &mut Vec<&'a PatternStep>) {
            for step in steps {
                match &step.strategy {
                    Strategy::ClassExpansion { steps, .. } => walk(steps, out),
                    _ => out.push(step),
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.steps, &mut out);
        out
    }

    /// The patterns that are finally evaluated, in execution order.
    pub fn patterns(&self) -> Vec<TriplePattern> {
        self.leaf_steps().into_iter().map(|s| s.pattern.clone()).collect()
    }

    pub fn estimated_calls(&self) -> Cardinality {
        self.steps
            .iter()
            .fold(Cardinality::Finite(0), |acc, s| acc + s.estimated_calls)
    }
}

/// Plans `query`. `store` is consulted for the instances a step would have
/// to enumerate and for which predicates have local data.
pub fn plan(
    query: &Query,
    registry: &Registry,
    ontology: &Ontology,
    store: &Graph,
) -> Result<QueryPlan, OntologyError> {
    let planner = Planner { registry, store };
    let mut units = Vec::with_capacity(query.patterns.len());
    for pattern in &query.patterns {
        units.push(planner.unit(pattern, ontology)?);
    }
    let steps = planner.order(&units, &mut BTreeMap::new());
    let mut warnings = Vec::new();
    collect_warnings(&steps, &mut warnings);
    Ok(QueryPlan { steps, warnings })
}

fn collect_warnings(steps: &[PatternStep], out: &mut Vec<TriplePattern>) {
    for step in steps {
        match &step.strategy {
            Strategy::ClassExpansion { steps, .. } => collect_warnings(steps, out),
            _ if step.input == InputSource::Unresolvable => out.push(step.pattern.clone()),
            _ => {}
        }
    }
}

/// Renders one line per step: rank, pattern, strategy and services, cost.
/// Class expansions list their sub-steps underneath as `rank.sub`.
pub fn explain(plan: &QueryPlan) -> String {
    fn render(steps: &[PatternStep], prefix: &str, out: &mut String) {
        for step in steps {
            let rank = format!("{prefix}{}", step.rank);
            let _ = write!(out, "{rank}  {}  ", step.pattern);
            match &step.strategy {
                Strategy::ClassExpansion { class, steps } => {
                    let n = steps.len();
                    let _ = writeln!(
                        out,
                        "ClassExpansion of {class} into {n} pattern{} (est. {})",
                        if n == 1 { "" } else { "s" },
                        step.estimated_calls
                    );
                    render(steps, &format!("{rank}."), out);
                    continue;
                }
                Strategy::LocalOnly => out.push_str("LocalOnly"),
                Strategy::Forward(ids) | Strategy::Inverse(ids) => {
                    let dir = if matches!(step.strategy, Strategy::Forward(_)) {
                        "Forward"
                    } else {
                        "Inverse"
                    };
                    let ids: Vec<String> = ids.iter().map(Iri::to_string).collect();
                    let _ = write!(out, "{dir} via {}", ids.join(", "));
                    if let InputSource::Enumerate(v) = &step.input {
                        let _ = write!(out, " enumerating {v}");
                    }
                }
            }
            if step.input == InputSource::Unresolvable {
                out.push_str(" (unresolvable)\n");
            } else {
                let _ = writeln!(out, " (est. {})", step.estimated_calls);
            }
        }
    }
    let mut out = String::new();
    render(&plan.steps, "", &mut out);
    out
}

enum Unit {
    Pattern(TriplePattern),
    Class {
        pattern: TriplePattern,
        class: Iri,
        members: Vec<Unit>,
    },
}

/// Running plan-time cardinality of each bound variable.
type Bindings = BTreeMap<Variable, u64>;

struct Assessment {
    /// 0: ready; 1: must enumerate; 2: cannot be bound.
    readiness: u8,
    step: PatternStep,
    binds: Vec<(Variable, u64)>,
}

struct Planner<'a> {
    registry: &'a Registry,
    store: &'a Graph,
}

enum Endpoint<'p> {
    Constant(&'p Term),
    Bound(&'p Variable, u64),
    Fresh(&'p Variable),
}

impl Planner<'_> {
    fn unit(&self, pattern: &TriplePattern, ontology: &Ontology) -> Result<Unit, OntologyError> {
        let class = match (&pattern.predicate, &pattern.object) {
            (TermPattern::Term(Term::Iri(p)), TermPattern::Term(Term::Iri(c)))
                if *p == vocab::rdf_type() && ontology.is_defined(c) =>
            {
                c.clone()
            }
            _ => return Ok(Unit::Pattern(pattern.clone())),
        };
        let members = expand_class_for(ontology, &class, &pattern.subject)?
            .iter()
            .map(|p| self.unit(p, ontology))
            .collect::<Result<_, _>>()?;
        Ok(Unit::Class {
            pattern: pattern.clone(),
            class,
            members,
        })
    }

    fn order(&self, units: &[Unit], bound: &mut Bindings) -> Vec<PatternStep> {
        let mut remaining: Vec<usize> = (0..units.len()).collect();
        let mut steps = Vec::with_capacity(units.len());
        while !remaining.is_empty() {
            let (slot, assessment) = remaining
                .iter()
                .enumerate()
                .map(|(slot, &i)| (slot, self.assess(&units[i], bound)))
                .min_by_key(|(slot, a)| (a.readiness, a.step.estimated_calls, *slot))
                .expect("remaining is non-empty");
            remaining.remove(slot);
            for (v, n) in assessment.binds {
                bound.entry(v).or_insert(n);
            }
            let mut step = assessment.step;
            step.rank = steps.len() + 1;
            steps.push(step);
        }
        steps
    }

    fn assess(&self, unit: &Unit, bound: &Bindings) -> Assessment {
        match unit {
            Unit::Pattern(p) => self.assess_pattern(p, bound),
            Unit::Class {
                pattern,
                class,
                members,
            } => {
                let mut inner = bound.clone();
                let steps = self.order(members, &mut inner);
                let readiness = members
                    .iter()
                    .map(|m| self.assess(m, bound).readiness)
                    .min()
                    .unwrap_or(0);
                let estimated_calls = steps
                    .iter()
                    .fold(Cardinality::Finite(0), |acc, s| acc + s.estimated_calls);
                let binds = inner.into_iter().filter(|(v, _)| !bound.contains_key(v)).collect();
                Assessment {
                    readiness,
                    step: PatternStep {
                        rank: 0,
                        pattern: pattern.clone(),
                        strategy: Strategy::ClassExpansion {
                            class: class.clone(),
                            steps,
                        },
                        input: InputSource::None,
                        estimated_calls,
                    },
                    binds,
                }
            }
        }
    }

    fn endpoint<'p>(&self, tp: &'p TermPattern, bound: &Bindings) -> Endpoint<'p> {
        match tp {
            TermPattern::Term(t) => Endpoint::Constant(t),
            TermPattern::Variable(v) => match bound.get(v) {
                Some(&n) => Endpoint::Bound(v, n),
                None => Endpoint::Fresh(v),
            },
        }
    }

    /// Known instances of `class` or any registered subclass of it.
    fn known_instances(&self, class: &Iri) -> u64 {
        let classes = self.registry.subclasses(class);
        self.store.instances_of(&classes).len() as u64
    }

    fn assess_pattern(&self, pattern: &TriplePattern, bound: &Bindings) -> Assessment {
        let subject = self.endpoint(&pattern.subject, bound);
        let object = self.endpoint(&pattern.object, bound);
        let fresh_pair = matches!(subject, Endpoint::Fresh(_)) && matches!(object, Endpoint::Fresh(_));
        let unbound_vars = |n: u64| -> Vec<(Variable, u64)> {
            pattern
                .variables()
                .filter(|v| !bound.contains_key(*v))
                .map(|v| (v.clone(), n))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        };
        let step = |strategy, input, estimated_calls| PatternStep {
            rank: 0,
            pattern: pattern.clone(),
            strategy,
            input,
            estimated_calls,
        };

        let predicate = pattern.predicate.as_iri();
        let mut services: Vec<(Direction, Vec<Iri>)> = Vec::new();
        if let Some(p) = predicate {
            for dir in [Direction::Inverse, Direction::Forward] {
                let ids: Vec<Iri> = self
                    .registry
                    .find_by_predicate(p, Some(dir))
                    .into_iter()
                    .map(|d| d.id.clone())
                    .collect();
                if !ids.is_empty() {
                    services.push((dir, ids));
                }
            }
        }

        if services.is_empty() {
            let local_data = match predicate {
                Some(p) => self.store.has_predicate(p),
                None => !self.store.is_empty(),
            };
            if fresh_pair && !local_data && !pattern.predicate.as_variable().is_some_and(|v| bound.contains_key(v)) {
                return Assessment {
                    readiness: 2,
                    step: step(Strategy::LocalOnly, InputSource::Unresolvable, Cardinality::Finite(0)),
                    binds: Vec::new(),
                };
            }
            let matches = self
                .store
                .matching(pattern.subject.as_iri(), predicate, pattern.object.as_term());
            return Assessment {
                readiness: 0,
                step: step(Strategy::LocalOnly, InputSource::None, Cardinality::Finite(0)),
                binds: unbound_vars(matches.len() as u64),
            };
        }

        // (readiness, input cardinality, direction index, step)
        let mut best: Option<(u8, u64, usize, PatternStep)> = None;
        for (index, (dir, ids)) in services.iter().enumerate() {
            let (input_side, other_side) = match dir {
                Direction::Forward => (&subject, &object),
                Direction::Inverse => (&object, &subject),
            };
            let strategy = match dir {
                Direction::Forward => Strategy::Forward(ids.clone()),
                Direction::Inverse => Strategy::Inverse(ids.clone()),
            };
            let n_services = ids.len() as u64;
            let candidate = match input_side {
                Endpoint::Constant(Term::Iri(i)) => {
                    Some((0, 1, InputSource::Constant(i.clone()), Cardinality::Finite(n_services)))
                }
                Endpoint::Constant(Term::Literal(_)) => None,
                Endpoint::Bound(v, n) => Some((
                    0,
                    *n,
                    InputSource::Bound((*v).clone()),
                    Cardinality::Finite(n.saturating_mul(n_services)),
                )),
                Endpoint::Fresh(v) if !matches!(other_side, Endpoint::Fresh(_)) => {
                    let per_service: Vec<u64> = ids
                        .iter()
                        .filter_map(|id| self.registry.get(id))
                        .map(|d| self.known_instances(&d.input_class))
                        .collect();
                    let card = per_service.iter().copied().max().unwrap_or(0);
                    Some((
                        1,
                        card,
                        InputSource::Enumerate((*v).clone()),
                        Cardinality::Finite(per_service.iter().sum()),
                    ))
                }
                Endpoint::Fresh(_) => None,
            };
            if let Some((readiness, card, input, calls)) = candidate {
                let better = best.as_ref().is_none_or(|(r, c, _, _)| (readiness, card) < (*r, *c));
                if better {
                    best = Some((readiness, card, index, step(strategy, input, calls)));
                }
            }
        }

        match best {
            Some((readiness, card, _, step)) => Assessment {
                readiness,
                step,
                binds: unbound_vars(card),
            },
            None if fresh_pair => {
                let (dir, ids) = &services[0];
                let strategy = match dir {
                    Direction::Forward => Strategy::Forward(ids.clone()),
                    Direction::Inverse => Strategy::Inverse(ids.clone()),
                };
                Assessment {
                    readiness: 2,
                    step: step(strategy, InputSource::Unresolvable, Cardinality::Unbounded),
                    binds: Vec::new(),
                }
            }
            // The only usable input is a literal, which cannot be sent to a
            // service; the pattern is answered from the store.
            None => Assessment {
                readiness: 0,
                step: step(Strategy::LocalOnly, InputSource::None, Cardinality::Finite(0)),
                binds: unbound_vars(1),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{parse_ntriples, Triple};
    use crate::reasoner::ClassDefinition;
    use crate::registry::ServiceDescriptor;
    use crate::sparql::parse_query;

    const SHARE: &str = "http://share.example/vocab#";

    fn share(local: &str) -> Iri {
        Iri::new(format!("{SHARE}{local}")).unwrap()
    }

    fn service(name: &str, predicate: &str, direction: Direction, input: &str, output: &str) -> ServiceDescriptor {
        ServiceDescriptor {
            id: Iri::new(format!("http://share.example/services/{name}")).unwrap(),
            endpoint: format!("http://127.0.0.1:9/{name}").parse().unwrap(),
            input_class: share(input),
            output_class: share(output),
            predicates: [share(predicate)].into(),
            direction,
            provider: None,
        }
    }

    fn fixture_registry() -> Registry {
        let mut r = Registry::new();
        r.register(service(
            "getGOTermsByProtein",
            "hasGOTerm",
            Direction::Forward,
            "Protein",
            "GOTerm",
        ))
        .unwrap();
        r.register(service(
            "MOBYSHoundGiFromOMIM",
            "associatedWithDisease",
            Direction::Inverse,
            "OMIMRecord",
            "Protein",
        ))
        .unwrap();
        r.register(service(
            "getSolvedStructuresByProtein",
            "hasSolved3DStructure",
            Direction::Forward,
            "Protein",
            "Structure",
        ))
        .unwrap();
        r
    }

    fn parkinson_ontology() -> Ontology {
        Ontology::new(
            [ClassDefinition::has_values(
                share("ParkinsonTranscriptionFactor"),
                [
                    (
                        share("hasGOTerm"),
                        Term::Iri(Iri::new("http://share.example/go/0006351").unwrap()),
                    ),
                    (
                        share("associatedWithDisease"),
                        Term::Iri(Iri::new("http://share.example/omim/168600").unwrap()),
                    ),
                ],
            )],
            [],
        )
        .unwrap()
    }

    const PARKINSON: &str = "PREFIX SHARE: <http://share.example/vocab#>
        PREFIX GO: <http://share.example/go/>
        PREFIX OMIM: <http://share.example/omim/>
        SELECT ?transcriptionFactor WHERE {
          ?transcriptionFactor SHARE:hasGOTerm GO:0006351 .
          ?transcriptionFactor SHARE:associatedWithDisease OMIM:168600 .
        }";

    const PARKINSON_STRUCTURE: &str = "PREFIX SHARE: <http://share.example/vocab#>
        SELECT ?transcriptionFactor ?structure WHERE {
          ?transcriptionFactor rdf:type SHARE:ParkinsonTranscriptionFactor .
          ?transcriptionFactor SHARE:hasSolved3DStructure ?structure .
        }";

    #[test]
    fn parkinson_query_uses_one_inverse_call_first() {
        let q = parse_query(PARKINSON).unwrap();
        let plan = super::plan(&q, &fixture_registry(), &Ontology::empty(), &Graph::new()).unwrap();
        assert_eq!(plan.steps.len(), 2);
        let first = &plan.steps[0];
        assert_eq!(first.rank, 1);
        assert_eq!(first.pattern.predicate.as_iri(), Some(&share("associatedWithDisease")));
        assert!(matches!(&first.strategy, Strategy::Inverse(ids) if ids.len() == 1));
        assert_eq!(first.estimated_calls, Cardinality::Finite(1));
        let second = &plan.steps[1];
        assert!(matches!(second.strategy, Strategy::Forward(_)));
        assert_eq!(
            second.input,
            InputSource::Bound(Variable::new("transcriptionFactor").unwrap())
        );
        assert!(plan.warnings.is_empty());

        let text = explain(&plan);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("1  "));
        assert!(lines[0].ends_with("Inverse via <http://share.example/services/MOBYSHoundGiFromOMIM> (est. 1 call)"));
        assert!(lines[1].starts_with("2  "));
    }

    #[test]
    fn structure_query_expands_the_class_then_fetches_structures() {
        let q = parse_query(PARKINSON_STRUCTURE).unwrap();
        let plan = super::plan(&q, &fixture_registry(), &parkinson_ontology(), &Graph::new()).unwrap();
        assert_eq!(plan.steps.len(), 2);
        let Strategy::ClassExpansion { class, steps } = &plan.steps[0].strategy else {
            panic!("expected class expansion, got {:?}", plan.steps[0]);
        };
        assert_eq!(class, &share("ParkinsonTranscriptionFactor"));
        assert_eq!(steps.len(), 2);
        assert!(matches!(steps[0].strategy, Strategy::Inverse(_)));
        assert!(matches!(plan.steps[1].strategy, Strategy::Forward(_)));
        assert_eq!(plan.patterns().len(), 3);

        let text = explain(&plan);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].contains("ClassExpansion of <http://share.example/vocab#ParkinsonTranscriptionFactor>"));
        assert!(lines[1].starts_with("1.1  "));
        assert!(lines[2].starts_with("1.2  "));
        assert!(lines[3].starts_with("2  "));
    }

    #[test]
    fn unannotated_predicate_over_local_store_is_local_only() {
        let store =
            parse_ntriples("<http://share.example/protein/P1> <http://share.example/vocab#name> \"p53\" .\n").unwrap();
        let q = parse_query("SELECT ?p ?n WHERE { ?p <http://share.example/vocab#name> ?n }").unwrap();
        let plan = super::plan(&q, &fixture_registry(), &Ontology::empty(), &store).unwrap();
        assert_eq!(plan.steps.len(), 1);
        assert_eq!(plan.steps[0].strategy, Strategy::LocalOnly);
        assert!(plan.warnings.is_empty());
        assert_eq!(explain(&plan).lines().count(), 1);
    }

    #[test]
    fn unbindable_patterns_are_flagged() {
        let q = parse_query("SELECT ?p ?n WHERE { ?p <http://share.example/vocab#name> ?n }").unwrap();
        let plan = super::plan(&q, &fixture_registry(), &Ontology::empty(), &Graph::new()).unwrap();
        assert_eq!(plan.warnings.len(), 1);
        assert!(plan.steps[0].is_unresolvable());
        assert!(explain(&plan).contains("(unresolvable)"));

        let q = parse_query("SELECT ?p ?g WHERE { ?p <http://share.example/vocab#hasGOTerm> ?g }").unwrap();
        let plan = super::plan(&q, &fixture_registry(), &Ontology::empty(), &Graph::new()).unwrap();
        assert_eq!(plan.warnings.len(), 1);
    }

    #[test]
    fn forward_only_predicate_enumerates_known_instances() {
        let mut r = fixture_registry();
        r.remove(&Iri::new("http://share.example/services/MOBYSHoundGiFromOMIM").unwrap());
        r.register(service(
            "getOMIMByProtein",
            "associatedWithDisease",
            Direction::Forward,
            "Protein",
            "OMIMRecord",
        ))
        .unwrap();
        let store: Graph = (1..=7)
            .map(|i| {
                Triple::new(
                    Iri::new(format!("http://share.example/protein/P{i}")).unwrap(),
                    vocab::rdf_type(),
                    share("Protein"),
                )
            })
            .collect();
        let q = parse_query(
            "SELECT ?x WHERE { ?x <http://share.example/vocab#associatedWithDisease> <http://share.example/omim/168600> }",
        )
        .unwrap();
        let plan = super::plan(&q, &r, &Ontology::empty(), &store).unwrap();
        let step = &plan.steps[0];
        assert!(matches!(step.strategy, Strategy::Forward(_)));
        assert_eq!(step.input, InputSource::Enumerate(Variable::new("x").unwrap()));
        assert_eq!(step.estimated_calls, Cardinality::Finite(7));
        assert!(explain(&plan).contains("enumerating ?x (est. 7 calls)"));
    }

    #[test]
    fn all_services_for_a_predicate_are_planned() {
        let mut r = fixture_registry();
        r.register(service(
            "getGOTermsMirror",
            "hasGOTerm",
            Direction::Forward,
            "Protein",
            "GOTerm",
        ))
        .unwrap();
        let q = parse_query(
            "SELECT ?g WHERE { <http://share.example/protein/P1> <http://share.example/vocab#hasGOTerm> ?g }",
        )
        .unwrap();
        let plan = super::plan(&q, &r, &Ontology::empty(), &Graph::new()).unwrap();
        assert_eq!(plan.steps[0].strategy.services().len(), 2);
        assert_eq!(plan.steps[0].estimated_calls, Cardinality::Finite(2));
    }

    #[test]
    fn equal_cost_prefers_inverse() {
        let mut r = fixture_registry();
        r.register(service(
            "getOMIMByProtein",
            "associatedWithDisease",
            Direction::Forward,
            "Protein",
            "OMIMRecord",
        ))
        .unwrap();
        let q = parse_query(
            "SELECT ?x WHERE { <http://share.example/protein/P1> <http://share.example/vocab#associatedWithDisease> <http://share.example/omim/168600> . ?x <http://share.example/vocab#hasGOTerm> ?x }",
        )
        .unwrap();
        let plan = super::plan(&q, &r, &Ontology::empty(), &Graph::new()).unwrap();
        assert!(matches!(plan.steps[0].strategy, Strategy::Inverse(_)));
    }

    #[test]
    fn dependent_steps_follow_their_producers() {
        let q = parse_query(
            "SELECT ?s WHERE {
               ?x <http://share.example/vocab#hasSolved3DStructure> ?s .
               ?x <http://share.example/vocab#associatedWithDisease> <http://share.example/omim/168600> .
             }",
        )
        .unwrap();
        let plan = super::plan(&q, &fixture_registry(), &Ontology::empty(), &Graph::new()).unwrap();
        assert!(matches!(plan.steps[0].strategy, Strategy::Inverse(_)));
        assert_eq!(plan.steps[1].input, InputSource::Bound(Variable::new("x").unwrap()));
        assert!(plan.warnings.is_empty());
    }

    #[test]
    fn planning_is_deterministic_and_complete() {
        let q = parse_query(PARKINSON_STRUCTURE).unwrap();
        let a = super::plan(&q, &fixture_registry(), &parkinson_ontology(), &Graph::new()).unwrap();
        let b = super::plan(&q, &fixture_registry(), &parkinson_ontology(), &Graph::new()).unwrap();
        assert_eq!(a, b);
        assert_eq!(explain(&a), explain(&b));
        let top: BTreeSet<_> = a.steps.iter().map(|s| s.pattern.clone()).collect();
        assert_eq!(top, q.patterns.iter().cloned().collect());
    }
}
