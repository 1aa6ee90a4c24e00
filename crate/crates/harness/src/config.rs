//! Harness configuration files.
//!
//! ```json
//! {
//!   "services": [
//!     {
//!       "id": "http://share.example/services/getGOTermsByProtein",
//!       "port": 18080,
//!       "predicate": "http://share.example/vocab#hasGOTerm",
//!       "direction": "forward",
//!       "dataset": "proteins.nt",
//!       "input_class": "http://share.example/vocab#Protein",
//!       "output_class": "http://share.example/vocab#GOTerm",
//!       "latency_ms": 0,
//!       "failure": { "kind": "http_status", "code": 500 },
//!       "failure_every_n": 2
//!     }
//!   ]
//! }
//! ```
//!
//! `dataset` is an N-Triples file, relative to the configuration file; only
//! its triples using `predicate` are served. `port` 0 (or absent) picks an
//! ephemeral port. `latency_ms`, `failure` and `failure_every_n` are
//! optional.

use std::path::Path;
use std::time::Duration;

use serde::Deserialize;

use share_core::rdf::{parse_ntriples, Iri};
use share_core::registry::Direction;

use crate::fixture;
use crate::server::{Failure, HarnessError, MockServiceConfig};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HarnessFile {
    services: Vec<ServiceEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ServiceEntry {
    id: Iri,
    #[serde(default)]
    port: u16,
    predicate: Iri,
    direction: Direction,
    dataset: String,
    input_class: Iri,
    output_class: Iri,
    #[serde(default)]
    latency_ms: u64,
    #[serde(default)]
    failure: Failure,
    #[serde(default)]
    failure_every_n: Option<u32>,
}

pub fn load_config(path: impl AsRef<Path>) -> Result<Vec<MockServiceConfig>, HarnessError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}

/// Parses a configuration, resolving dataset paths against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<Vec<MockServiceConfig>, HarnessError> {
    let file: HarnessFile = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut configs = Vec::with_capacity(file.services.len());
    for entry in file.services {
        let path = base.join(&entry.dataset);
        let data =
            std::fs::read_to_string(&path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        let graph = parse_ntriples(&data).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        let config = MockServiceConfig {
            port: entry.port,
            latency: Duration::from_millis(entry.latency_ms),
            failure: entry.failure,
            failure_every_n: entry.failure_every_n,
            ..MockServiceConfig::new(
                entry.id,
                entry.predicate.clone(),
                entry.direction,
                fixture::relation(&graph, &entry.predicate),
                entry.input_class,
                entry.output_class,
            )
        };
        config.validate()?;
        configs.push(config);
    }
    Ok(configs)
}

/// The fixture services on consecutive ports starting at `port_base`.
pub fn fixture_configs(port_base: u16) -> Vec<MockServiceConfig> {
    fixture::service_configs()
        .into_iter()
        .zip(port_base..)
        .map(|(config, port)| MockServiceConfig { port, ..config })
        .collect()
}
