//! RDF terms, triples and the local triple store.

mod graph;
mod ntriples;
pub(crate) mod term;

pub use graph::{Graph, SharedGraph, Source};
pub use ntriples::{parse_ntriples, parse_term, serialize_ntriples, NTriplesError};
pub use term::{Iri, Literal, Term, TermError, TermPattern, Triple, Variable};
