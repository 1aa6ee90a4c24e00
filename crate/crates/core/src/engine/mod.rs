//! Plan execution: invoke the planned services step by step, merge their
//! answers into the store, then evaluate the whole pattern locally.

mod bgp;
mod cache;
mod client;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use futures::stream::{self, StreamExt};
use thiserror::Error;

use crate::planner::{self, InputSource, QueryPlan, Strategy};
use crate::rdf::{Graph, Iri, SharedGraph, Source, Term, Triple};
use crate::reasoner::{Ontology, OntologyError};
use crate::registry::{Registry, ServiceDescriptor};
use crate::sparql::{Query, TriplePattern};

pub use bgp::{evaluate_bgp, SolutionTable};
pub use cache::ResponseCache;
pub use client::{check_response, invoke_service, request_body, InvocationError, NTRIPLES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FailurePolicy {
    /// Abort the resolve on the first failed call.
    #[default]
    FailFast,
    /// Skip failed calls and flag the result as possibly incomplete.
    BestEffort,
}

#[derive(Debug, Clone)]
pub struct ResolveOptions {
    pub failure_policy: FailurePolicy,
    /// Per-call timeout.
    pub timeout: Duration,
    /// Concurrent calls within one step.
    pub parallelism: usize,
    /// Maximum requests per resolve.
    pub call_budget: usize,
    /// Maximum inputs per request; `None` sends all inputs of a step in one.
    pub batch_size: Option<usize>,
    /// Retry a timed-out call once.
    pub retry_on_timeout: bool,
    pub cache: Option<Arc<ResponseCache>>,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions {
            failure_policy: FailurePolicy::FailFast,
            timeout: Duration::from_secs(10),
            parallelism: 8,
            call_budget: 10_000,
            batch_size: None,
            retry_on_timeout: false,
            cache: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Timeout,
    HttpError(u16),
    BadPayload(String),
    /// The connection could not be established.
    Unreachable(String),
}

impl Outcome {
    pub fn is_ok(&self) -> bool {
        *self == Outcome::Ok
    }
}

impl From<&InvocationError> for Outcome {
    fn from(e: &InvocationError) -> Self {
        match e {
            InvocationError::Timeout => Outcome::Timeout,
            InvocationError::HttpError(code) => Outcome::HttpError(*code),
            InvocationError::BadPayload(reason) => Outcome::BadPayload(reason.clone()),
            InvocationError::Unreachable(reason) => Outcome::Unreachable(reason.clone()),
            InvocationError::NoInputs => Outcome::BadPayload(e.to_string()),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Ok => f.write_str("ok"),
            Outcome::Timeout => f.write_str("timeout"),
            Outcome::HttpError(code) => write!(f, "HTTP {code}"),
            Outcome::BadPayload(reason) => write!(f, "bad payload ({reason})"),
            Outcome::Unreachable(reason) => write!(f, "unreachable ({reason})"),
        }
    }
}

/// One HTTP request to one service.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvocationRecord {
    pub service: Iri,
    pub inputs: BTreeSet<Iri>,
    pub triples_returned: usize,
    pub duration: Duration,
    pub outcome: Outcome,
}

#[derive(Debug, Error)]
pub enum ResolveError {
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error("pattern `{0}` cannot be resolved: no service or local data can bind either endpoint")]
    UnresolvablePattern(TriplePattern),
    #[error("service {service} failed: {outcome}")]
    ServiceFailed {
        service: Iri,
        outcome: Outcome,
        records: Vec<InvocationRecord>,
    },
    #[error("service call budget of {budget} requests exceeded")]
    BudgetExceeded {
        budget: usize,
        records: Vec<InvocationRecord>,
    },
    #[error("service {0} is planned but not registered")]
    UnknownService(Iri),
}

impl ResolveError {
    /// Records of the calls made before the resolve was aborted.
    pub fn records(&self) -> &[InvocationRecord] {
        match self {
            ResolveError::ServiceFailed { records, .. } | ResolveError::BudgetExceeded { records, .. } => records,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Resolution {
    /// Projected, sorted, and (for `DISTINCT`) deduplicated answers.
    pub table: SolutionTable,
    /// One record per request, in execution order.
    pub records: Vec<InvocationRecord>,
    /// Some call failed under [`FailurePolicy::BestEffort`].
    pub incomplete: bool,
    pub plan: QueryPlan,
    /// Patterns whose service calls failed and that were left out of the
    /// final evaluation so the remaining constraints still yield answers.
    pub relaxed: Vec<TriplePattern>,
}

/// Per-resolve bookkeeping: which (service, input) pairs were already sent,
/// the records so far, and the request count against the budget.
#[derive(Debug, Default)]
pub(crate) struct Session {
    sent: HashSet<(Iri, Iri)>,
    pub(crate) records: Vec<InvocationRecord>,
    requests: usize,
}

pub struct Engine {
    client: reqwest::Client,
    options: ResolveOptions,
}

impl Engine {
    pub fn new(options: ResolveOptions) -> Self {
        Engine {
            client: reqwest::Client::new(),
            options,
        }
    }

    pub fn options(&self) -> &ResolveOptions {
        &self.options
    }

    /// A single request to `descriptor` with the configured timeout.
    pub async fn invoke_service(
        &self,
        descriptor: &ServiceDescriptor,
        inputs: &BTreeSet<Iri>,
    ) -> Result<Graph, InvocationError> {
        invoke_service(&self.client, descriptor, inputs, self.options.timeout).await
    }

    /// Answers `query`: plans it, runs every service step in rank order,
    /// ingesting answers into `store`, then evaluates the pattern on `store`.
    pub async fn resolve(
        &self,
        query: &Query,
        registry: &Registry,
        ontology: &Ontology,
        store: &SharedGraph,
    ) -> Result<Resolution, ResolveError> {
        let plan = planner::plan(query, registry, ontology, &store.read())?;
        if let Some(pattern) = plan.warnings.first() {
            return Err(ResolveError::UnresolvablePattern(pattern.clone()));
        }

        let mut session = Session::default();
        let mut executed: Vec<TriplePattern> = Vec::new();
        let mut failed: Vec<TriplePattern> = Vec::new();
        for step in plan.leaf_steps() {
            let ids = match &step.strategy {
                Strategy::Forward(ids) | Strategy::Inverse(ids) => ids,
                Strategy::LocalOnly | Strategy::ClassExpansion { .. } => {
                    executed.push(step.pattern.clone());
                    continue;
                }
            };
            let mut jobs = Vec::with_capacity(ids.len());
            for id in ids {
                let descriptor = registry
                    .get(id)
                    .ok_or_else(|| ResolveError::UnknownService(id.clone()))?;
                let inputs = match &step.input {
                    InputSource::Constant(i) => BTreeSet::from([i.clone()]),
                    InputSource::Bound(v) => {
                        let ok: Vec<TriplePattern> = executed.iter().filter(|p| !failed.contains(p)).cloned().collect();
                        let table = evaluate_bgp(&store.read(), &ok);
                        table
                            .column(v)
                            .into_iter()
                            .filter_map(|t| match t {
                                Term::Iri(i) => Some(i),
                                Term::Literal(_) => None,
                            })
                            .collect()
                    }
                    InputSource::Enumerate(_) => {
                        let classes = registry.subclasses(&descriptor.input_class);
                        store.read().instances_of(&classes)
                    }
                    InputSource::None | InputSource::Unresolvable => {
                        return Err(ResolveError::UnresolvablePattern(step.pattern.clone()))
                    }
                };
                jobs.push((descriptor, inputs));
            }
            if self.call_services(&mut session, jobs, store).await? {
                failed.push(step.pattern.clone());
            }
            executed.push(step.pattern.clone());
        }

        let mut patterns = plan.patterns();
        let mut relaxed = Vec::new();
        for pattern in &failed {
            let rest: Vec<TriplePattern> = patterns.iter().filter(|p| *p != pattern).cloned().collect();
            let covered: BTreeSet<_> = rest.iter().flat_map(|p| p.variables().cloned()).collect();
            if !rest.is_empty() && query.select.iter().all(|v| covered.contains(v)) {
                patterns = rest;
                relaxed.push(pattern.clone());
            }
        }

        let mut table = evaluate_bgp(&store.read(), &patterns).project(&query.select);
        table.sort();
        if query.distinct {
            table.dedup();
        }
        if let Some(limit) = query.limit {
            table.truncate(usize::try_from(limit).unwrap_or(usize::MAX));
        }
        let incomplete = session.records.iter().any(|r| !r.outcome.is_ok());
        Ok(Resolution {
            table,
            records: session.records,
            incomplete,
            plan,
            relaxed,
        })
    }

    /// Sends each job's not-yet-sent inputs to its service, distinct services
    /// concurrently, and ingests the answers. Returns whether any call
    /// failed; under fail-fast a failure is returned as an error instead.
    pub(crate) async fn call_services(
        &self,
        session: &mut Session,
        jobs: Vec<(&ServiceDescriptor, BTreeSet<Iri>)>,
        store: &SharedGraph,
    ) -> Result<bool, ResolveError> {
        let mut work: Vec<(&ServiceDescriptor, Vec<BTreeSet<Iri>>)> = Vec::new();
        let mut planned = 0;
        for (descriptor, inputs) in jobs {
            let mut fresh = BTreeSet::new();
            for input in inputs {
                if !session.sent.insert((descriptor.id.clone(), input.clone())) {
                    continue;
                }
                let cached = self.options.cache.as_ref().and_then(|c| c.get(&descriptor.id, &input));
                match cached {
                    Some(triples) => {
                        store.ingest(triples, &Source::Service(descriptor.id.clone()));
                    }
                    None => {
                        fresh.insert(input);
                    }
                }
            }
            if fresh.is_empty() {
                continue;
            }
            let batches = batches(fresh, self.options.batch_size);
            planned += batches.len();
            work.push((descriptor, batches));
        }
        if session.requests + planned > self.options.call_budget {
            return Err(ResolveError::BudgetExceeded {
                budget: self.options.call_budget,
                records: session.records.clone(),
            });
        }
        session.requests += planned;

        let results: Vec<Vec<(InvocationRecord, Option<Graph>)>> = stream::iter(work)
            .map(|(descriptor, batches)| async move {
                let mut out = Vec::with_capacity(batches.len());
                for inputs in batches {
                    out.extend(self.call_with_retry(descriptor, inputs).await);
                }
                out
            })
            .buffered(self.options.parallelism.max(1))
            .collect()
            .await;

        let mut first_failure: Option<(Iri, Outcome)> = None;
        for (record, graph) in results.into_iter().flatten() {
            if let Some(graph) = graph {
                let source = Source::Service(record.service.clone());
                if let Some(cache) = &self.options.cache {
                    for input in &record.inputs {
                        cache.put(&record.service, input, attributed(&graph, input));
                    }
                }
                store.ingest(graph.iter(), &source);
            } else if first_failure.is_none() {
                first_failure = Some((record.service.clone(), record.outcome.clone()));
            }
            session.records.push(record);
        }
        match first_failure {
            None => Ok(false),
            Some((service, outcome)) => match self.options.failure_policy {
                FailurePolicy::FailFast => Err(ResolveError::ServiceFailed {
                    service,
                    outcome,
                    records: session.records.clone(),
                }),
                FailurePolicy::BestEffort => Ok(true),
            },
        }
    }

    async fn call_with_retry(
        &self,
        descriptor: &ServiceDescriptor,
        inputs: BTreeSet<Iri>,
    ) -> Vec<(InvocationRecord, Option<Graph>)> {
        let mut out = Vec::new();
        let attempts = if self.options.retry_on_timeout { 2 } else { 1 };
        for attempt in 1..=attempts {
            let started = Instant::now();
            let result = self.invoke_service(descriptor, &inputs).await;
            let duration = started.elapsed();
            tracing::debug!(service = %descriptor.id, inputs = inputs.len(), ?duration, ok = result.is_ok(), "service call");
            let retry = matches!(result, Err(InvocationError::Timeout)) && attempt < attempts;
            let (outcome, triples_returned, graph) = match result {
                Ok(graph) => (Outcome::Ok, graph.len(), Some(graph)),
                Err(e) => (Outcome::from(&e), 0, None),
            };
            out.push((
                InvocationRecord {
                    service: descriptor.id.clone(),
                    inputs: inputs.clone(),
                    triples_returned,
                    duration,
                    outcome,
                },
                graph,
            ));
            if !retry {
                break;
            }
        }
        out
    }
}

fn batches(inputs: BTreeSet<Iri>, size: Option<usize>) -> Vec<BTreeSet<Iri>> {
    match size {
        None => vec![inputs],
        Some(size) => {
            let all: Vec<Iri> = inputs.into_iter().collect();
            all.chunks(size.max(1))
                .map(|chunk| chunk.iter().cloned().collect())
                .collect()
        }
    }
}

/// The part of a batched answer that concerns `input`: triples mentioning
/// it, plus statements about the terms those triples link it to.
fn attributed(graph: &Graph, input: &Iri) -> Vec<Triple> {
    let as_term = Term::Iri(input.clone());
    let direct: Vec<Triple> = graph
        .iter()
        .filter(|t| t.subject == *input || t.object == as_term)
        .collect();
    let linked: BTreeSet<Iri> = direct
        .iter()
        .flat_map(|t| [Some(t.subject.clone()), t.object.as_iri().cloned()])
        .flatten()
        .filter(|i| i != input)
        .collect();
    let mut out = direct;
    out.extend(graph.iter().filter(|t| linked.contains(&t.subject)));
    out.sort();
    out.dedup();
    out
}
