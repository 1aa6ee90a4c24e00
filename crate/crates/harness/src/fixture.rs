//! The canonical fixture: five proteins, three services, and the Parkinson
//! transcription-factor ontology in flat and intersection form.

use share_core::rdf::{Graph, Iri, Term, Triple};
use share_core::reasoner::{ClassDefinition, Ontology};
use share_core::registry::{Direction, Registry};

use crate::server::{serve, HarnessError, MockHandle, MockServiceConfig};

pub const SHARE: &str = "http://share.example/vocab#";
pub const GO: &str = "http://share.example/go/";
pub const OMIM: &str = "http://share.example/omim/";
pub const PDB: &str = "http://share.example/pdb/";
pub const PROTEIN: &str = "http://share.example/protein/";
pub const SERVICES: &str = "http://share.example/services/";

pub const PREFIXES: &str = "PREFIX SHARE: <http://share.example/vocab#>
PREFIX GO: <http://share.example/go/>
PREFIX OMIM: <http://share.example/omim/>
PREFIX PDB: <http://share.example/pdb/>
";

/// Transcription factors implicated in Parkinson's disease.
pub const PARKINSON_QUERY: &str = "PREFIX SHARE: <http://share.example/vocab#>
PREFIX GO: <http://share.example/go/>
PREFIX OMIM: <http://share.example/omim/>
SELECT ?transcriptionFactor
WHERE
{
    ?transcriptionFactor SHARE:hasGOTerm GO:0006351 .
    ?transcriptionFactor SHARE:associatedWithDisease OMIM:168600 .
}
";

/// Parkinson transcription factors with a solved 3D structure, projecting
/// both the protein and the structure.
pub const PARKINSON_STRUCTURE_QUERY: &str = "PREFIX SHARE: <http://share.example/vocab#>
SELECT ?transcriptionFactor ?structure
WHERE
{
    ?transcriptionFactor rdf:type SHARE:ParkinsonTranscriptionFactor .
    ?transcriptionFactor SHARE:hasSolved3DStructure ?structure .
}
";

pub fn share(local: &str) -> Iri {
    iri(SHARE, local)
}

pub fn protein(n: usize) -> Iri {
    iri(PROTEIN, &format!("P{n}"))
}

pub fn go_transcription() -> Iri {
    iri(GO, "0006351")
}

pub fn omim_parkinson() -> Iri {
    iri(OMIM, "168600")
}

pub fn pdb(code: &str) -> Iri {
    iri(PDB, code)
}

pub fn service_id(name: &str) -> Iri {
    iri(SERVICES, name)
}

fn iri(ns: &str, local: &str) -> Iri {
    Iri::new(format!("{ns}{local}")).expect("fixture IRIs are valid")
}

pub fn has_go_term() -> Iri {
    share("hasGOTerm")
}

pub fn associated_with_disease() -> Iri {
    share("associatedWithDisease")
}

pub fn has_solved_structure() -> Iri {
    share("hasSolved3DStructure")
}

pub fn go_service_id() -> Iri {
    service_id("getGOTermsByProtein")
}

pub fn omim_service_id() -> Iri {
    service_id("MOBYSHoundGiFromOMIM")
}

pub fn structure_service_id() -> Iri {
    service_id("getSolvedStructuresByProtein")
}

/// The eight triples of the virtual graph.
pub fn dataset() -> Graph {
    let go = || Term::Iri(go_transcription());
    let omim = || Term::Iri(omim_parkinson());
    [
        Triple::new(protein(1), has_go_term(), go()),
        Triple::new(protein(1), associated_with_disease(), omim()),
        Triple::new(protein(1), has_solved_structure(), pdb("1ABC")),
        Triple::new(protein(2), has_go_term(), go()),
        Triple::new(protein(3), associated_with_disease(), omim()),
        Triple::new(protein(4), has_go_term(), go()),
        Triple::new(protein(4), associated_with_disease(), omim()),
        Triple::new(protein(5), has_solved_structure(), pdb("2XYZ")),
    ]
    .into_iter()
    .collect()
}

/// The fixture proteins P1..P5.
pub fn individuals() -> Vec<Iri> {
    (1..=5).map(protein).collect()
}

/// Triples of `graph` using `predicate`.
pub fn relation(graph: &Graph, predicate: &Iri) -> Graph {
    graph.matching(None, Some(predicate), None).into_iter().collect()
}

/// Configurations of the three fixture services on ephemeral ports: forward
/// GO terms by protein, inverse proteins by OMIM record, forward solved
/// structures by protein.
pub fn service_configs() -> Vec<MockServiceConfig> {
    let data = dataset();
    vec![
        MockServiceConfig::new(
            go_service_id(),
            has_go_term(),
            Direction::Forward,
            relation(&data, &has_go_term()),
            share("Protein"),
            share("GOTerm"),
        ),
        MockServiceConfig::new(
            omim_service_id(),
            associated_with_disease(),
            Direction::Inverse,
            relation(&data, &associated_with_disease()),
            share("OMIMRecord"),
            share("Protein"),
        ),
        MockServiceConfig::new(
            structure_service_id(),
            has_solved_structure(),
            Direction::Forward,
            relation(&data, &has_solved_structure()),
            share("Protein"),
            share("Structure"),
        ),
    ]
}

/// `ParkinsonTranscriptionFactor` defined directly by its two `hasValue`
/// restrictions.
pub fn parkinson_ontology() -> Ontology {
    Ontology::new(
        [ClassDefinition::has_values(
            share("ParkinsonTranscriptionFactor"),
            [
                (has_go_term(), Term::Iri(go_transcription())),
                (associated_with_disease(), Term::Iri(omim_parkinson())),
            ],
        )],
        [],
    )
    .expect("fixture ontology is valid")
}

/// `ParkinsonTranscriptionFactor` as the intersection of
/// `ParkinsonAssociatedProtein` and `TranscriptionFactor`.
pub fn parkinson_intersection_ontology() -> Ontology {
    Ontology::new(
        [
            ClassDefinition::intersection(
                share("ParkinsonTranscriptionFactor"),
                [share("ParkinsonAssociatedProtein"), share("TranscriptionFactor")],
            ),
            ClassDefinition::has_values(
                share("ParkinsonAssociatedProtein"),
                [(associated_with_disease(), Term::Iri(omim_parkinson()))],
            ),
            ClassDefinition::has_values(
                share("TranscriptionFactor"),
                [(has_go_term(), Term::Iri(go_transcription()))],
            ),
        ],
        [],
    )
    .expect("fixture ontology is valid")
}

/// Running services plus a registry pointing at them.
pub struct Network {
    pub registry: Registry,
    pub handles: Vec<MockHandle>,
}

impl Network {
    pub fn handle(&self, id: &Iri) -> Option<&MockHandle> {
        self.handles.iter().find(|h| h.id() == id)
    }

    /// Request count of service `id` (0 if there is no such service).
    pub fn request_count(&self, id: &Iri) -> usize {
        self.handle(id).map_or(0, MockHandle::request_count)
    }

    pub async fn shutdown(self) {
        for handle in self.handles {
            handle.shutdown().await;
        }
    }
}

/// Serves every config and registers each service.
pub async fn spawn_network(configs: Vec<MockServiceConfig>) -> Result<Network, HarnessError> {
    let mut registry = Registry::new();
    let mut handles = Vec::with_capacity(configs.len());
    for config in configs {
        let handle = serve(config).await?;
        registry
            .register(handle.descriptor().clone())
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        handles.push(handle);
    }
    Ok(Network { registry, handles })
}

pub async fn spawn_fixture_network() -> Result<Network, HarnessError> {
    spawn_network(service_configs()).await
}

/// The fixture network after `customize` has adjusted the configurations,
/// e.g. to inject failures.
pub async fn spawn_fixture_network_with(
    customize: impl FnOnce(&mut Vec<MockServiceConfig>),
) -> Result<Network, HarnessError> {
    let mut configs = service_configs();
    customize(&mut configs);
    spawn_network(configs).await
}
