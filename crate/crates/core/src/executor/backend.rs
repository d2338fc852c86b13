use crate::rdf::{parse_ntriples, DocId, Graph, Uri, WebOfLinkedData};
use rand::{Rng, SeedableRng};
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

/// Dereferences one URI. `None` means the URI is not retrievable.
pub trait LookupBackend: Send + Sync {
    fn fetch(&self, u: &Uri) -> Option<Graph>;
}

/// Serves `data(adoc(u))` from a materialized Web.
pub struct FixtureBackend {
    web: WebOfLinkedData,
}

impl FixtureBackend {
    pub fn new(web: WebOfLinkedData) -> Self {
        FixtureBackend { web }
    }
}

impl LookupBackend for FixtureBackend {
    fn fetch(&self, u: &Uri) -> Option<Graph> {
        self.web.data_of(u).cloned()
    }
}

/// HTTP(S) dereferencing of N-Triples documents.
///
/// Any transport error, non-2xx status, timeout or unparsable body makes the
/// URI not retrievable. Blank nodes are scoped to the request URI.
pub struct HttpBackend {
    client: reqwest::blocking::Client,
    per_host_delay: Option<Duration>,
    last_request: Mutex<HashMap<String, Instant>>,
}

pub const DEFAULT_HTTP_TIMEOUT: Duration = Duration::from_secs(10);

impl HttpBackend {
    pub fn new(timeout: Duration, per_host_delay: Option<Duration>) -> Result<Self, reqwest::Error> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .redirect(reqwest::redirect::Policy::limited(5))
            .user_agent(concat!("ldql/", env!("CARGO_PKG_VERSION")))
            .build()?;
        Ok(HttpBackend { client, per_host_delay, last_request: Mutex::new(HashMap::new()) })
    }

    fn wait_for_host(&self, host: &str) {
        let Some(delay) = self.per_host_delay else { return };
        let wait = {
            let mut last = self.last_request.lock().expect("host table poisoned");
            let now = Instant::now();
            let ready = last.get(host).map_or(now, |t| (*t + delay).max(now));
            last.insert(host.to_string(), ready);
            ready - now
        };
        std::thread::sleep(wait);
    }
}

impl LookupBackend for HttpBackend {
    fn fetch(&self, u: &Uri) -> Option<Graph> {
        let mut url = reqwest::Url::parse(u.as_str()).ok()?;
        if !matches!(url.scheme(), "http" | "https") {
            return None;
        }
        url.set_fragment(None);
        self.wait_for_host(url.host_str().unwrap_or(""));
        let resp = self
            .client
            .get(url)
            .header(reqwest::header::ACCEPT, "application/n-triples, text/plain;q=0.5")
            .send()
            .ok()?;
        if !resp.status().is_success() {
            return None;
        }
        let body = resp.text().ok()?;
        parse_ntriples(&body, &DocId::new(u.as_str())).ok()
    }
}

/// Delays every fetch by a pseudo-random amount, to shake out order dependence.
pub struct ChaosBackend<B> {
    inner: B,
    seed: u64,
    max_delay: Duration,
}

impl<B: LookupBackend> ChaosBackend<B> {
    pub fn new(inner: B, seed: u64, max_delay: Duration) -> Self {
        ChaosBackend { inner, seed, max_delay }
    }
}

impl<B: LookupBackend> LookupBackend for ChaosBackend<B> {
    fn fetch(&self, u: &Uri) -> Option<Graph> {
        let mut h = DefaultHasher::new();
        u.hash(&mut h);
        let mut rng = rand::rngs::StdRng::seed_from_u64(self.seed ^ h.finish());
        let micros = self.max_delay.as_micros() as u64;
        if micros > 0 {
            std::thread::sleep(Duration::from_micros(rng.gen_range(0..=micros)));
        }
        self.inner.fetch(u)
    }
}

type Slot = Arc<OnceLock<Option<Arc<Graph>>>>;

/// Memoizing front for a backend: each URI is fetched at most once.
pub struct LookupService {
    backend: Box<dyn LookupBackend>,
    cache: Mutex<HashMap<Uri, Slot>>,
    attempts: AtomicUsize,
    successes: AtomicUsize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct LookupStats {
    /// Distinct URIs dereferenced; cache hits are not counted.
    pub attempts: usize,
    pub successes: usize,
}

impl LookupStats {
    pub fn failures(&self) -> usize {
        self.attempts - self.successes
    }
}

impl LookupService {
    pub fn new(backend: impl LookupBackend + 'static) -> Self {
        LookupService {
            backend: Box::new(backend),
            cache: Mutex::new(HashMap::new()),
            attempts: AtomicUsize::new(0),
            successes: AtomicUsize::new(0),
        }
    }

    pub fn fixture(web: WebOfLinkedData) -> Self {
        LookupService::new(FixtureBackend::new(web))
    }

    pub fn lookup(&self, u: &Uri) -> Option<Arc<Graph>> {
        let slot = self.cache.lock().expect("lookup cache poisoned").entry(u.clone()).or_default().clone();
        slot.get_or_init(|| {
            self.attempts.fetch_add(1, Ordering::SeqCst);
            let r = self.backend.fetch(u).map(Arc::new);
            if r.is_some() {
                self.successes.fetch_add(1, Ordering::SeqCst);
            }
            r
        })
        .clone()
    }

    pub fn stats(&self) -> LookupStats {
        LookupStats { attempts: self.attempts.load(Ordering::SeqCst), successes: self.successes.load(Ordering::SeqCst) }
    }

    /// URIs whose lookup has completed.
    pub fn attempted(&self) -> BTreeSet<Uri> {
        let cache = self.cache.lock().expect("lookup cache poisoned");
        cache.iter().filter(|(_, s)| s.get().is_some()).map(|(u, _)| u.clone()).collect()
    }
}
