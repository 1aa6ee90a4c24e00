//! OWL-lite class definitions: named primitive classes, `intersectionOf`
//! and `hasValue` restrictions.
//!
//! # File format
//!
//! ```json
//! {
//!   "primitives": ["http://share.example/vocab#Protein"],
//!   "classes": [
//!     {
//!       "id": "http://share.example/vocab#ParkinsonTranscriptionFactor",
//!       "intersection_of": [],
//!       "has_value": [
//!         { "property": "http://share.example/vocab#hasGOTerm",
//!           "value": "<http://share.example/go/0006351>" }
//!       ]
//!     }
//!   ]
//! }
//! ```
//!
//! `value` is a single term in N-Triples syntax. Class entries carrying
//! `some_values_from`, `all_values_from` or any cardinality key are rejected
//! as unsupported constructs.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::{parse_term, Iri, Term, TermPattern, Variable};
use crate::sparql::TriplePattern;
use crate::vocab;

const UNSUPPORTED_KEYS: &[&str] = &[
    "some_values_from",
    "all_values_from",
    "cardinality",
    "min_cardinality",
    "max_cardinality",
    "union_of",
    "complement_of",
    "one_of",
];

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("class {0} is not defined")]
    UndefinedClass(Iri),
    #[error("cyclic class definition: {}", render_path(.0))]
    CyclicDefinition(Vec<Iri>),
    #[error("class {0} has neither intersection members nor hasValue restrictions")]
    EmptyDefinition(Iri),
    #[error("class {class} references {reference}, which is neither defined nor declared primitive")]
    UndeclaredReference { class: Iri, reference: Iri },
    #[error("class {class} uses unsupported construct `{construct}`")]
    UnsupportedConstruct { class: String, construct: String },
    #[error("ontology format error: {0}")]
    Format(String),
    #[error("ontology I/O error: {0}")]
    Io(#[from] std::io::Error),
}

fn render_path(path: &[Iri]) -> String {
    path.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" -> ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDefinition {
    pub id: Iri,
    pub intersection_of: Vec<Iri>,
    pub has_value: Vec<(Iri, Term)>,
}

impl ClassDefinition {
    pub fn has_values(id: Iri, restrictions: impl IntoIterator<Item = (Iri, Term)>) -> Self {
        ClassDefinition {
            id,
            intersection_of: Vec::new(),
            has_value: restrictions.into_iter().collect(),
        }
    }

    pub fn intersection(id: Iri, members: impl IntoIterator<Item = Iri>) -> Self {
        ClassDefinition {
            id,
            intersection_of: members.into_iter().collect(),
            has_value: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    classes: BTreeMap<Iri, ClassDefinition>,
    primitives: BTreeSet<Iri>,
}

impl Ontology {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds and validates an ontology: every definition is non-empty, every
    /// intersection member is defined or primitive, and definitions are
    /// acyclic.
    pub fn new(
        classes: impl IntoIterator<Item = ClassDefinition>,
        primitives: impl IntoIterator<Item = Iri>,
    ) -> Result<Self, OntologyError> {
        let primitives: BTreeSet<Iri> = primitives.into_iter().collect();
        let mut defs = BTreeMap::new();
        for def in classes {
            if def.intersection_of.is_empty() && def.has_value.is_empty() {
                return Err(OntologyError::EmptyDefinition(def.id));
            }
            if primitives.contains(&def.id) {
                return Err(OntologyError::Format(format!(
                    "{} is declared both primitive and defined",
                    def.id
                )));
            }
            if defs.contains_key(&def.id) {
                return Err(OntologyError::Format(format!("duplicate class {}", def.id)));
            }
            defs.insert(def.id.clone(), def);
        }
        for def in defs.values() {
            for member in &def.intersection_of {
                if !defs.contains_key(member) && !primitives.contains(member) {
                    return Err(OntologyError::UndeclaredReference {
                        class: def.id.clone(),
                        reference: member.clone(),
                    });
                }
            }
        }
        let ontology = Ontology {
            classes: defs,
            primitives,
        };
        ontology.topological_order()?;
        Ok(ontology)
    }

    pub fn is_defined(&self, class: &Iri) -> bool {
        self.classes.contains_key(class)
    }

    pub fn is_primitive(&self, class: &Iri) -> bool {
        self.primitives.contains(class)
    }

    pub fn get(&self, class: &Iri) -> Option<&ClassDefinition> {
        self.classes.get(class)
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassDefinition> {
        self.classes.values()
    }

    pub fn primitives(&self) -> impl Iterator<Item = &Iri> {
        self.primitives.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Defined classes with intersection members ahead of the classes built
    /// from them; otherwise in IRI order.
    pub fn topological_order(&self) -> Result<Vec<Iri>, OntologyError> {
        fn visit(
            onto: &Ontology,
            class: &Iri,
            path: &mut Vec<Iri>,
            done: &mut BTreeSet<Iri>,
            out: &mut Vec<Iri>,
        ) -> Result<(), OntologyError> {
            if done.contains(class) {
                return Ok(());
            }
            if let Some(at) = path.iter().position(|c| c == class) {
                let mut cycle = path[at..].to_vec();
                cycle.push(class.clone());
                return Err(OntologyError::CyclicDefinition(cycle));
            }
            let Some(def) = onto.classes.get(class) else {
                return Ok(());
            };
            path.push(class.clone());
            for member in &def.intersection_of {
                visit(onto, member, path, done, out)?;
            }
            path.pop();
            done.insert(class.clone());
            out.push(class.clone());
            Ok(())
        }

        let mut out = Vec::new();
        let mut done = BTreeSet::new();
        for class in self.classes.keys() {
            visit(self, class, &mut Vec::new(), &mut done, &mut out)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let file = OntologyFile {
            primitives: self.primitives.iter().cloned().collect(),
            classes: self
                .classes
                .values()
                .map(|def| RawClass {
                    id: def.id.clone(),
                    intersection_of: def.intersection_of.clone(),
                    has_value: def
                        .has_value
                        .iter()
                        .map(|(p, v)| RawRestriction {
                            property: p.clone(),
                            value: v.to_string(),
                        })
                        .collect(),
                    extra: BTreeMap::new(),
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&file).expect("ontology serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, OntologyError> {
        let file: OntologyFile = serde_json::from_str(text)
            .map_err(|e| OntologyError::Format(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        let mut classes = Vec::with_capacity(file.classes.len());
        for raw in file.classes {
            if let Some(key) = raw.extra.keys().next() {
                return Err(if UNSUPPORTED_KEYS.contains(&key.as_str()) {
                    OntologyError::UnsupportedConstruct {
                        class: raw.id.as_str().to_string(),
                        construct: key.clone(),
                    }
                } else {
                    OntologyError::Format(format!("class {}: unknown field `{key}`", raw.id))
                });
            }
            let mut has_value = Vec::with_capacity(raw.has_value.len());
            for r in raw.has_value {
                let value = parse_term(&r.value)
                    .map_err(|e| OntologyError::Format(format!("class {}: value `{}`: {e}", raw.id, r.value)))?;
                has_value.push((r.property, value));
            }
            classes.push(ClassDefinition {
                id: raw.id,
                intersection_of: raw.intersection_of,
                has_value,
            });
        }
        Ontology::new(classes, file.primitives)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, OntologyError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), OntologyError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OntologyFile {
    #[serde(default)]
    primitives: Vec<Iri>,
    classes: Vec<RawClass>,
}

#[derive(Serialize, Deserialize)]
struct RawClass {
    id: Iri,
    #[serde(default)]
    intersection_of: Vec<Iri>,
    #[serde(default)]
    has_value: Vec<RawRestriction>,
    #[serde(flatten)]
    extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRestriction {
    property: Iri,
    value: String,
}

/// Flattens `class` into triple patterns about `?subject_var`.
///
/// Intersections are expanded depth-first in definition order, each
/// `hasValue (p, v)` becomes `?s p v`, and each primitive class `P` reached
/// becomes `?s rdf:type P`. Duplicates are dropped, first occurrence kept.
pub fn expand_class(
    ontology: &Ontology,
    class: &Iri,
    subject_var: &Variable,
) -> Result<Vec<TriplePattern>, OntologyError> {
    expand_class_for(ontology, class, &TermPattern::Variable(subject_var.clone()))
}

/// [`expand_class`] for an arbitrary subject position (variable or IRI).
pub fn expand_class_for(
    ontology: &Ontology,
    class: &Iri,
    subject: &TermPattern,
) -> Result<Vec<TriplePattern>, OntologyError> {
    fn walk(
        onto: &Ontology,
        class: &Iri,
        subject: &TermPattern,
        path: &mut Vec<Iri>,
        out: &mut Vec<TriplePattern>,
    ) -> Result<(), OntologyError> {
        if let Some(at) = path.iter().position(|c| c == class) {
            let mut cycle = path[at..].to_vec();
            cycle.push(class.clone());
            return Err(OntologyError::CyclicDefinition(cycle));
        }
        let Some(def) = onto.classes.get(class) else {
            out.push(TriplePattern::new(subject.clone(), vocab::rdf_type(), class.clone()));
            return Ok(());
        };
        path.push(class.clone());
        for member in &def.intersection_of {
            walk(onto, member, subject, path, out)?;
        }
        path.pop();
        for (property, value) in &def.has_value {
            out.push(TriplePattern::new(subject.clone(), property.clone(), value.clone()));
        }
        Ok(())
    }

    if !ontology.is_defined(class) {
        return Err(OntologyError::UndefinedClass(class.clone()));
    }
    let mut out = Vec::new();
    walk(ontology, class, subject, &mut Vec::new(), &mut out)?;
    Ok(crate::sparql::dedup_patterns(out))
}
