//! Query resolution over predicate-annotated web services.
//!
//! A SPARQL basic graph pattern is answered by (1) matching its predicates
//! against registered services, (2) invoking those services and merging
//! their RDF output into a local store, and (3) evaluating the pattern on
//! that store. Class membership tests for OWL-lite class definitions run
//! through the same machinery.

pub mod engine;
pub mod planner;
pub mod rdf;
pub mod reasoner;
pub mod registry;
pub mod sparql;
pub mod vocab;
