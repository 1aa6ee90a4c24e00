use std::collections::BTreeSet;
use std::time::Duration;

use thiserror::Error;

use crate::rdf::{parse_ntriples, Graph, Iri, Term, Triple};
use crate::registry::{Direction, ServiceDescriptor};
use crate::vocab;

pub const NTRIPLES: &str = "application/n-triples";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvocationError {
    #[error("no inputs to send")]
    NoInputs,
    #[error("timed out")]
    Timeout,
    #[error("HTTP status {0}")]
    HttpError(u16),
    #[error("bad payload: {0}")]
    BadPayload(String),
    #[error("unreachable: {0}")]
    Unreachable(String),
}

/// Request body: one `<i> rdf:type <input class> .` line per input.
pub fn request_body(descriptor: &ServiceDescriptor, inputs: &BTreeSet<Iri>) -> String {
    let graph: Graph = inputs
        .iter()
        .map(|i| Triple::new(i.clone(), vocab::rdf_type(), descriptor.input_class.clone()))
        .collect();
    crate::rdf::serialize_ntriples(&graph)
}

/// Checks that every annotated-predicate triple in a response has its
/// service-side endpoint among `inputs`.
pub fn check_response(
    descriptor: &ServiceDescriptor,
    inputs: &BTreeSet<Iri>,
    response: &Graph,
) -> Result<(), InvocationError> {
    for triple in response.iter() {
        if !descriptor.is_annotated_with(&triple.predicate) {
            continue;
        }
        let endpoint = match descriptor.direction {
            Direction::Forward => Some(&triple.subject),
            Direction::Inverse => match &triple.object {
                Term::Iri(i) => Some(i),
                Term::Literal(_) => None,
            },
        };
        if !endpoint.is_some_and(|e| inputs.contains(e)) {
            return Err(InvocationError::BadPayload(format!(
                "triple `{triple}` does not answer any of the inputs"
            )));
        }
    }
    Ok(())
}

/// Sends one request to `descriptor.endpoint` carrying all `inputs` and
/// parses the N-Triples reply.
pub async fn invoke_service(
    client: &reqwest::Client,
    descriptor: &ServiceDescriptor,
    inputs: &BTreeSet<Iri>,
    timeout: Duration,
) -> Result<Graph, InvocationError> {
    if inputs.is_empty() {
        return Err(InvocationError::NoInputs);
    }
    let request = client
        .post(descriptor.endpoint.clone())
        .header(reqwest::header::CONTENT_TYPE, NTRIPLES)
        .header(reqwest::header::ACCEPT, NTRIPLES)
        .body(request_body(descriptor, inputs));
    let exchange = async {
        let response = request.send().await?;
        let status = response.status();
        let body = response.text().await?;
        Ok::<_, reqwest::Error>((status, body))
    };
    let (status, body) = match tokio::time::timeout(timeout, exchange).await {
        Err(_) => return Err(InvocationError::Timeout),
        Ok(Err(e)) if e.is_timeout() => return Err(InvocationError::Timeout),
        Ok(Err(e)) => return Err(InvocationError::Unreachable(error_chain(&e))),
        Ok(Ok(reply)) => reply,
    };
    if status != reqwest::StatusCode::OK {
        return Err(InvocationError::HttpError(status.as_u16()));
    }
    let graph = parse_ntriples(&body).map_err(|e| InvocationError::BadPayload(e.to_string()))?;
    check_response(descriptor, inputs, &graph)?;
    Ok(graph)
}

fn error_chain(e: &dyn std::error::Error) -> String {
    let mut text = e.to_string();
    let mut source = e.source();
    while let Some(s) = source {
        text.push_str(": ");
        text.push_str(&s.to_string());
        source = s.source();
    }
    text
}
