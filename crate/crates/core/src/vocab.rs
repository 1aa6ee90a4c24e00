//! Well-known IRIs.

use std::sync::LazyLock;

use crate::rdf::Iri;

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

static RDF_TYPE: LazyLock<Iri> = LazyLock::new(|| Iri::new(format!("{RDF}type")).unwrap());
static XSD_INTEGER: LazyLock<Iri> = LazyLock::new(|| Iri::new(format!("{XSD}integer")).unwrap());

pub fn rdf_type() -> Iri {
    RDF_TYPE.clone()
}

pub fn xsd_integer() -> Iri {
    XSD_INTEGER.clone()
}
