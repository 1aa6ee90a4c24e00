//! Service registry: predicate-annotated service descriptors plus a named
//! class hierarchy used for datatype-based discovery.
//!
//! # File format
//!
//! A registry persists as one JSON document:
//!
//! ```json
//! {
//!   "services": [
//!     {
//!       "id": "http://share.example/services/getGOTermsByProtein",
//!       "endpoint": "http://127.0.0.1:18080/",
//!       "input_class": "http://share.example/vocab#Protein",
//!       "output_class": "http://share.example/vocab#GOTerm",
//!       "predicates": ["http://share.example/vocab#hasGOTerm"],
//!       "direction": "forward",
//!       "provider": "example.org"
//!     }
//!   ],
//!   "class_hierarchy": [
//!     ["http://share.example/vocab#TranscriptionFactor", "http://share.example/vocab#Protein"]
//!   ]
//! }
//! ```
//!
//! `services` is written sorted by id; `class_hierarchy` holds
//! `[subclass, superclass]` pairs and must be acyclic. `provider` is optional.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

use crate::rdf::Iri;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Consumes subjects of the annotated predicate, returns objects.
    Forward,
    /// Consumes objects of the annotated predicate, returns subjects.
    Inverse,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Forward => f.write_str("forward"),
            Direction::Inverse => f.write_str("inverse"),
        }
    }
}

/// Which side of a service interface a class lookup targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Input,
    Output,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceDescriptor {
    pub id: Iri,
    pub endpoint: Url,
    pub input_class: Iri,
    pub output_class: Iri,
    pub predicates: BTreeSet<Iri>,
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provider: Option<String>,
}

impl ServiceDescriptor {
    pub fn validate(&self) -> Result<(), RegistryError> {
        if self.predicates.is_empty() {
            return Err(RegistryError::InvalidDescriptor {
                id: self.id.as_str().to_string(),
                reason: "no predicate annotations".into(),
            });
        }
        if !matches!(self.endpoint.scheme(), "http" | "https") || self.endpoint.host().is_none() {
            return Err(RegistryError::InvalidDescriptor {
                id: self.id.as_str().to_string(),
                reason: format!("endpoint `{}` is not an http(s) URL with a host", self.endpoint),
            });
        }
        Ok(())
    }

    pub fn is_annotated_with(&self, predicate: &Iri) -> bool {
        self.predicates.contains(predicate)
    }
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("invalid service descriptor {id}: {reason}")]
    InvalidDescriptor { id: String, reason: String },
    #[error("class hierarchy cycle: {0}")]
    CyclicHierarchy(String),
    #[error("registry format error{}: {message}", location(.line, .column))]
    Format {
        line: Option<usize>,
        column: Option<usize>,
        message: String,
    },
    #[error("registry I/O error: {0}")]
    Io(#[from] std::io::Error),
}

fn location(line: &Option<usize>, column: &Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" at line {l}, column {c}"),
        (Some(l), None) => format!(" at line {l}"),
        _ => String::new(),
    }
}

impl RegistryError {
    fn format(message: impl Into<String>) -> Self {
        RegistryError::Format {
            line: None,
            column: None,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    services: BTreeMap<Iri, ServiceDescriptor>,
    class_hierarchy: BTreeSet<(Iri, Iri)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    services: Vec<ServiceDescriptor>,
    #[serde(default)]
    class_hierarchy: Vec<(Iri, Iri)>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.services.len()
    }

    pub fn is_empty(&self) -> bool {
        self.services.is_empty()
    }

    /// Adds or replaces (by id) a descriptor. Returns the replaced one.
    pub fn register(&mut self, descriptor: ServiceDescriptor) -> Result<Option<ServiceDescriptor>, RegistryError> {
        descriptor.validate()?;
        Ok(self.services.insert(descriptor.id.clone(), descriptor))
    }

    pub fn remove(&mut self, id: &Iri) -> Option<ServiceDescriptor> {
        self.services.remove(id)
    }

    pub fn get(&self, id: &Iri) -> Option<&ServiceDescriptor> {
        self.services.get(id)
    }

    /// All descriptors, sorted by id.
    pub fn services(&self) -> impl Iterator<Item = &ServiceDescriptor> {
        self.services.values()
    }

    pub fn class_hierarchy(&self) -> impl Iterator<Item = &(Iri, Iri)> {
        self.class_hierarchy.iter()
    }

    /// Declares `sub ⊑ sup`. Rejects edges that would close a cycle.
    pub fn add_subclass(&mut self, sub: Iri, sup: Iri) -> Result<(), RegistryError> {
        if sub == sup || self.superclasses(&sup).contains(&sub) {
            return Err(RegistryError::CyclicHierarchy(format!(
                "{sub} ⊑ {sup} would make the hierarchy cyclic"
            )));
        }
        self.class_hierarchy.insert((sub, sup));
        Ok(())
    }

    /// Reflexive-transitive superclasses of `class`.
    pub fn superclasses(&self, class: &Iri) -> BTreeSet<Iri> {
        self.closure(class, |(sub, sup), c| (sub == c).then_some(sup))
    }

    /// Reflexive-transitive subclasses of `class`.
    pub fn subclasses(&self, class: &Iri) -> BTreeSet<Iri> {
        self.closure(class, |(sub, sup), c| (sup == c).then_some(sub))
    }

    fn closure<'a>(&'a self, start: &Iri, step: impl Fn(&'a (Iri, Iri), &Iri) -> Option<&'a Iri>) -> BTreeSet<Iri> {
        let mut seen = BTreeSet::from([start.clone()]);
        let mut frontier = vec![start.clone()];
        while let Some(c) = frontier.pop() {
            for edge in &self.class_hierarchy {
                if let Some(next) = step(edge, &c) {
                    if seen.insert(next.clone()) {
                        frontier.push(next.clone());
                    }
                }
            }
        }
        seen
    }

    pub fn is_subclass_of(&self, sub: &Iri, sup: &Iri) -> bool {
        self.superclasses(sub).contains(sup)
    }

    /// Descriptors annotated with `predicate`, optionally restricted to one
    /// direction; sorted by id.
    pub fn find_by_predicate(&self, predicate: &Iri, direction: Option<Direction>) -> Vec<&ServiceDescriptor> {
        self.services
            .values()
            .filter(|d| d.is_annotated_with(predicate))
            .filter(|d| direction.is_none_or(|dir| d.direction == dir))
            .collect()
    }

    /// Discovery by datatype. On the input side a service declared on `X`
    /// accepts `class` whenever `class ⊑ X`; on the output side a service
    /// producing `Y` qualifies whenever `Y ⊑ class`.
    pub fn find_by_class(&self, class: &Iri, side: Side) -> Vec<&ServiceDescriptor> {
        match side {
            Side::Input => {
                let accepted = self.superclasses(class);
                self.services
                    .values()
                    .filter(|d| accepted.contains(&d.input_class))
                    .collect()
            }
            Side::Output => {
                let produced = self.subclasses(class);
                self.services
                    .values()
                    .filter(|d| produced.contains(&d.output_class))
                    .collect()
            }
        }
    }

    pub fn to_json(&self) -> String {
        let file = RegistryFile {
            services: self.services.values().cloned().collect(),
            class_hierarchy: self.class_hierarchy.iter().cloned().collect(),
        };
        let mut out = serde_json::to_string_pretty(&file).expect("registry serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, RegistryError> {
        let file: RegistryFile = serde_json::from_str(text).map_err(|e| RegistryError::Format {
            line: Some(e.line()),
            column: Some(e.column()),
            message: e.to_string(),
        })?;
        let mut registry = Registry::new();
        for (idx, d) in file.services.into_iter().enumerate() {
            d.validate()
                .map_err(|e| RegistryError::format(format!("services[{idx}]: {e}")))?;
            if registry.services.contains_key(&d.id) {
                return Err(RegistryError::format(format!("duplicate service id {}", d.id.as_str())));
            }
            registry.services.insert(d.id.clone(), d);
        }
        for (idx, (sub, sup)) in file.class_hierarchy.into_iter().enumerate() {
            registry
                .add_subclass(sub, sup)
                .map_err(|e| RegistryError::format(format!("class_hierarchy[{idx}]: {e}")))?;
        }
        Ok(registry)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RegistryError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), RegistryError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}
