//! Validity checking: the bounded enumerator, an optional external
//! SMT-LIB solver, and the semantic query cache in front of both.

mod cache;
pub(crate) use cache::fnv;
mod enumerator;
mod query;
mod smtlib;

pub use cache::{cache_key, context_key, CacheEntry, QueryCache};
pub use enumerator::{EnumStats, Enumerator, Limits, Parallelism};
pub use query::{ChainPos, Query, Scope, Verdict, Witness};
pub use smtlib::{export_smtlib, ExportError, ExternalSolver};

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

#[derive(Clone, Debug)]
pub enum Backend {
    Enumerate,
    SmtLib(ExternalSolver),
}

impl Backend {
    /// `enum` or `smtlib:<solver path>`.
    pub fn parse(s: &str) -> Option<Backend> {
        match s {
            "enum" => Some(Backend::Enumerate),
            _ => s
                .strip_prefix("smtlib:")
                .filter(|p| !p.is_empty())
                .map(|p| Backend::SmtLib(ExternalSolver::new(p))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProverStats {
    pub calls: u64,
    pub hits: u64,
    pub backend_calls: u64,
    pub valid: u64,
    pub not_valid: u64,
    pub unknown: u64,
}

impl ProverStats {
    pub fn hit_percent(&self) -> f64 {
        if self.calls == 0 {
            0.0
        } else {
            100.0 * self.hits as f64 / self.calls as f64
        }
    }
}

#[derive(Default)]
struct Counters {
    calls: AtomicU64,
    hits: AtomicU64,
    backend_calls: AtomicU64,
    valid: AtomicU64,
    not_valid: AtomicU64,
    unknown: AtomicU64,
}

/// Backends tried in order behind a shared cache; the first definite
/// verdict wins.
pub struct Prover {
    pub scope: Scope,
    enumerator: Enumerator,
    backends: Vec<Backend>,
    cache: Option<RwLock<QueryCache>>,
    counters: Counters,
}

impl Prover {
    pub fn new(scope: Scope) -> Self {
        Prover {
            scope,
            enumerator: Enumerator::new(scope),
            backends: vec![Backend::Enumerate],
            cache: Some(RwLock::new(QueryCache::new())),
            counters: Counters::default(),
        }
    }

    pub fn without_cache(mut self) -> Self {
        self.cache = None;
        self
    }

    pub fn with_cache(mut self, cache: QueryCache) -> Self {
        self.cache = Some(RwLock::new(cache));
        self
    }

    pub fn with_backends(mut self, backends: Vec<Backend>) -> Self {
        assert!(!backends.is_empty(), "at least one backend is required");
        self.backends = backends;
        self
    }

    pub fn with_parallelism(mut self, p: Parallelism) -> Self {
        self.enumerator.parallelism = p;
        self
    }

    pub fn with_limits(mut self, l: Limits) -> Self {
        self.enumerator.limits = l;
        self
    }

    /// Disables reuse of context models inside the enumerator.
    pub fn with_model_reuse(mut self, on: bool) -> Self {
        self.enumerator.reuse_models = on;
        self
    }

    pub fn enumerator(&self) -> &Enumerator {
        &self.enumerator
    }

    pub fn caching(&self) -> bool {
        self.cache.is_some()
    }

    pub fn stats(&self) -> ProverStats {
        let c = &self.counters;
        let l = |a: &AtomicU64| a.load(Ordering::Relaxed);
        ProverStats {
            calls: l(&c.calls),
            hits: l(&c.hits),
            backend_calls: l(&c.backend_calls),
            valid: l(&c.valid),
            not_valid: l(&c.not_valid),
            unknown: l(&c.unknown),
        }
    }

    pub fn reset_stats(&self) {
        let c = &self.counters;
        for a in [&c.calls, &c.hits, &c.backend_calls, &c.valid, &c.not_valid, &c.unknown] {
            a.store(0, Ordering::Relaxed);
        }
    }

    pub fn load_cache(&mut self, path: &Path) {
        self.cache = Some(RwLock::new(QueryCache::load(path)));
    }

    pub fn save_cache(&self, path: &Path) -> std::io::Result<()> {
        match &self.cache {
            Some(c) => c.read().unwrap().save(path),
            None => Ok(()),
        }
    }

    pub fn cache_len(&self) -> usize {
        self.cache.as_ref().map_or(0, |c| c.read().unwrap().len())
    }

    fn count(&self, v: &Verdict) {
        let c = &self.counters;
        match v {
            Verdict::Valid => &c.valid,
            Verdict::NotValid(_) => &c.not_valid,
            Verdict::Unknown(_) => &c.unknown,
        }
        .fetch_add(1, Ordering::Relaxed);
    }

    pub fn check(&self, q: &Query) -> Verdict {
        self.counters.calls.fetch_add(1, Ordering::Relaxed);
        let keys = self.cache.as_ref().map(|_| (cache_key(q, self.scope), context_key(q)));
        if let (Some(cache), Some((key, ctx))) = (&self.cache, &keys) {
            if let Some(v) = cache.read().unwrap().lookup(key, ctx, q.chain, &q.sig) {
                self.counters.hits.fetch_add(1, Ordering::Relaxed);
                self.count(&v);
                return v;
            }
        }
        let mut verdict = Verdict::Unknown("no backend".into());
        for b in &self.backends {
            self.counters.backend_calls.fetch_add(1, Ordering::Relaxed);
            verdict = match b {
                Backend::Enumerate => self.enumerator.check(q),
                Backend::SmtLib(s) => s.check(q, Some(self.scope)),
            };
            if !matches!(verdict, Verdict::Unknown(_)) {
                break;
            }
        }
        if let (Some(cache), Some((key, context))) = (&self.cache, keys) {
            cache.write().unwrap().insert(CacheEntry {
                key,
                context,
                chain: q.chain,
                verdict: verdict.clone(),
            });
        }
        self.count(&verdict);
        verdict
    }
}

/// Caps the worker threads used for parallel checking; `0` keeps the
/// default. Has no effect once the pool has started.
pub fn configure_threads(n: usize) {
    #[cfg(feature = "parallel")]
    if n > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let _ = n;
}
