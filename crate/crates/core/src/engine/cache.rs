use std::collections::HashMap;
use std::time::{Duration, Instant};

use parking_lot::Mutex;

use crate::rdf::{Iri, Triple};

type Entry = (Instant, Vec<Triple>);

/// Service responses keyed by (service id, input), shared across resolves.
/// Entries expire `ttl` after they were stored.
#[derive(Debug)]
pub struct ResponseCache {
    ttl: Duration,
    entries: Mutex<HashMap<(Iri, Iri), Entry>>,
}

impl ResponseCache {
    pub fn new(ttl: Duration) -> Self {
        ResponseCache {
            ttl,
            entries: Mutex::new(HashMap::new()),
        }
    }

    pub fn ttl(&self) -> Duration {
        self.ttl
    }

    pub fn get(&self, service: &Iri, input: &Iri) -> Option<Vec<Triple>> {
        let mut entries = self.entries.lock();
        let key = (service.clone(), input.clone());
        match entries.get(&key) {
            Some((stored, triples)) if stored.elapsed() < self.ttl => Some(triples.clone()),
            Some(_) => {
                entries.remove(&key);
                None
            }
            None => None,
        }
    }

    pub fn put(&self, service: &Iri, input: &Iri, triples: Vec<Triple>) {
        self.entries
            .lock()
            .insert((service.clone(), input.clone()), (Instant::now(), triples));
    }

    pub fn len(&self) -> usize {
        self.entries.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.entries.lock().clear();
    }
}
