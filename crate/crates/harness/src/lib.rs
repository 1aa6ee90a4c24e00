//! Mock services speaking the N-Triples service protocol, for tests and
//! demos. Each mock serves one predicate of a fixed dataset, in one
//! direction, with optional latency and a deterministic failure schedule.

pub mod config;
pub mod fixture;
mod server;

pub use server::{serve, Failure, HarnessError, MockHandle, MockServiceConfig};
