use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::Router;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::watch;
use tokio::task::JoinHandle;
use url::Url;

use share_core::engine::NTRIPLES;
use share_core::rdf::{parse_ntriples, serialize_ntriples, Graph, Iri, Term, Triple};
use share_core::registry::{Direction, ServiceDescriptor};
use share_core::vocab;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot bind 127.0.0.1:{port}: {source}")]
    Bind {
        port: u16,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid mock service {id}: {reason}")]
    InvalidConfig { id: String, reason: String },
    #[error("harness config: {0}")]
    Config(String),
}

/// Injected misbehaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Failure {
    #[default]
    None,
    /// Answer with this status and an empty body.
    HttpStatus { code: u16 },
    /// Never answer (until the service shuts down).
    Timeout,
    /// Answer 200 with a body that is not N-Triples.
    GarbagePayload,
}

#[derive(Debug, Clone)]
pub struct MockServiceConfig {
    pub id: Iri,
    /// 0 picks a free ephemeral port.
    pub port: u16,
    pub predicate: Iri,
    pub direction: Direction,
    /// The relation served; every triple uses `predicate`.
    pub dataset: Graph,
    pub input_class: Iri,
    pub output_class: Iri,
    pub latency: Duration,
    pub failure: Failure,
    /// Fail only on every nth request (1-based); `None` fails every request.
    pub failure_every_n: Option<u32>,
}

impl MockServiceConfig {
    pub fn new(
        id: Iri,
        predicate: Iri,
        direction: Direction,
        dataset: Graph,
        input_class: Iri,
        output_class: Iri,
    ) -> Self {
        MockServiceConfig {
            id,
            port: 0,
            predicate,
            direction,
            dataset,
            input_class,
            output_class,
            latency: Duration::ZERO,
            failure: Failure::None,
            failure_every_n: None,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let invalid = |reason: String| HarnessError::InvalidConfig {
            id: self.id.as_str().to_string(),
            reason,
        };
        if let Some(t) = self.dataset.iter().find(|t| t.predicate != self.predicate) {
            return Err(invalid(format!("dataset triple `{t}` does not use {}", self.predicate)));
        }
        if self.failure_every_n == Some(0) {
            return Err(invalid("failure_every_n must be at least 1".into()));
        }
        Ok(())
    }

    /// Registry entry for this service listening at `endpoint`.
    pub fn descriptor(&self, endpoint: Url) -> ServiceDescriptor {
        ServiceDescriptor {
            id: self.id.clone(),
            endpoint,
            input_class: self.input_class.clone(),
            output_class: self.output_class.clone(),
            predicates: [self.predicate.clone()].into(),
            direction: self.direction,
            provider: Some("share-harness".into()),
        }
    }

    /// Registry entry for this service on its configured loopback port.
    pub fn loopback_descriptor(&self) -> ServiceDescriptor {
        let endpoint = format!("http://127.0.0.1:{}/", self.port)
            .parse()
            .expect("loopback URL is valid");
        self.descriptor(endpoint)
    }

    fn fails_on(&self, request: usize) -> bool {
        self.failure != Failure::None && self.failure_every_n.is_none_or(|n| request % n as usize == 0)
    }

    /// Answer for a set of inputs: the matching dataset triples in canonical
    /// direction, plus typing of the returned terms with the output class.
    pub fn answer(&self, inputs: &[Iri]) -> Graph {
        let mut out = Graph::new();
        for input in inputs {
            let matches = match self.direction {
                Direction::Forward => self.dataset.matching(Some(input), Some(&self.predicate), None),
                Direction::Inverse => {
                    self.dataset
                        .matching(None, Some(&self.predicate), Some(&Term::Iri(input.clone())))
                }
            };
            for triple in matches {
                let produced = match self.direction {
                    Direction::Forward => triple.object.as_iri().cloned(),
                    Direction::Inverse => Some(triple.subject.clone()),
                };
                if let Some(p) = produced {
                    out.insert(Triple::new(p, vocab::rdf_type(), self.output_class.clone()));
                }
                out.insert(triple);
            }
        }
        out
    }
}

struct ServiceState {
    config: MockServiceConfig,
    requests: Arc<AtomicUsize>,
    shutdown: watch::Receiver<bool>,
}

/// A running mock service. Dropping the handle stops the server.
pub struct MockHandle {
    id: Iri,
    endpoint: Url,
    descriptor: ServiceDescriptor,
    requests: Arc<AtomicUsize>,
    shutdown: watch::Sender<bool>,
    task: Option<JoinHandle<()>>,
}

impl MockHandle {
    pub fn id(&self) -> &Iri {
        &self.id
    }

    pub fn endpoint(&self) -> &Url {
        &self.endpoint
    }

    pub fn port(&self) -> u16 {
        self.endpoint.port().expect("endpoint has an explicit port")
    }

    /// Registry entry pointing at this service.
    pub fn descriptor(&self) -> &ServiceDescriptor {
        &self.descriptor
    }

    pub fn request_count(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }

    /// Stops accepting connections and waits for the server to finish.
    pub async fn shutdown(mut self) {
        let _ = self.shutdown.send(true);
        if let Some(task) = self.task.take() {
            let _ = task.await;
        }
    }
}

impl Drop for MockHandle {
    fn drop(&mut self) {
        let _ = self.shutdown.send(true);
    }
}

/// Starts `config` on 127.0.0.1. Must be called inside a Tokio runtime.
pub async fn serve(config: MockServiceConfig) -> Result<MockHandle, HarnessError> {
    config.validate()?;
    let listener = tokio::net::TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], config.port)))
        .await
        .map_err(|source| HarnessError::Bind {
            port: config.port,
            source,
        })?;
    let addr = listener.local_addr().map_err(|source| HarnessError::Bind {
        port: config.port,
        source,
    })?;
    let endpoint: Url = format!("http://{addr}/")
        .parse()
        .expect("socket address forms a valid URL");
    let descriptor = config.descriptor(endpoint.clone());
    let requests = Arc::new(AtomicUsize::new(0));
    let (shutdown, shutdown_rx) = watch::channel(false);
    let state = Arc::new(ServiceState {
        config,
        requests: Arc::clone(&requests),
        shutdown: shutdown_rx.clone(),
    });
    let app = Router::new().route("/", post(handle)).with_state(state);
    let mut stop = shutdown_rx;
    let task = tokio::spawn(async move {
        let graceful = async move {
            let _ = stop.wait_for(|s| *s).await;
        };
        if let Err(e) = axum::serve(listener, app).with_graceful_shutdown(graceful).await {
            tracing::warn!("mock service stopped: {e}");
        }
    });
    Ok(MockHandle {
        id: descriptor.id.clone(),
        endpoint,
        descriptor,
        requests,
        shutdown,
        task: Some(task),
    })
}

async fn handle(State(state): State<Arc<ServiceState>>, headers: HeaderMap, body: Bytes) -> Response {
    let request = state.requests.fetch_add(1, Ordering::SeqCst) + 1;
    let config = &state.config;

    let content_type = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("");
    if content_type.split(';').next().map(str::trim) != Some(NTRIPLES) {
        return (StatusCode::UNSUPPORTED_MEDIA_TYPE, format!("expected {NTRIPLES}\n")).into_response();
    }
    let Ok(text) = std::str::from_utf8(&body) else {
        return (StatusCode::BAD_REQUEST, "body is not UTF-8\n").into_response();
    };
    let inputs: Vec<Iri> = match parse_ntriples(text) {
        Ok(g) if g.is_empty() => {
            return (StatusCode::BAD_REQUEST, "no inputs\n").into_response();
        }
        Ok(g) => {
            let rdf_type = vocab::rdf_type();
            g.iter()
                .filter(|t| t.predicate == rdf_type)
                .map(|t| t.subject)
                .collect()
        }
        Err(e) => return (StatusCode::BAD_REQUEST, format!("{e}\n")).into_response(),
    };

    if !config.latency.is_zero() {
        tokio::time::sleep(config.latency).await;
    }
    if config.fails_on(request) {
        match config.failure {
            Failure::None => {}
            Failure::HttpStatus { code } => {
                let status = StatusCode::from_u16(code).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
                return status.into_response();
            }
            Failure::Timeout => {
                let mut stop = state.shutdown.clone();
                let _ = stop.wait_for(|s| *s).await;
                return StatusCode::SERVICE_UNAVAILABLE.into_response();
            }
            Failure::GarbagePayload => {
                return ntriples_response("this is <not N-Triples\n".to_string());
            }
        }
    }
    ntriples_response(serialize_ntriples(&config.answer(&inputs)))
}

fn ntriples_response(body: String) -> Response {
    ([(header::CONTENT_TYPE, NTRIPLES)], body).into_response()
}
