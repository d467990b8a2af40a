//! Verdicts keyed by the alpha-normal form of a query.
//!
//! A valid entry is only reused under an identical context. A failed
//! entailment is also reused at any later position of the same context
//! chain, since later contexts are weaker.

use super::query::{ChainPos, Query, Scope, Verdict};
use crate::logic::{alpha_normalize, ConcreteState, Expr, Signature, Sort};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheEntry {
    pub key: String,
    pub context: String,
    pub chain: Option<ChainPos>,
    pub verdict: Verdict,
}

#[derive(Default, Debug)]
pub struct QueryCache {
    entries: HashMap<String, Vec<CacheEntry>>,
}

pub(crate) fn fnv(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn sort_tag(sig: &Signature, name: &str) -> &'static str {
    if sig.fields.contains(name) {
        "f"
    } else if sig.data.contains(name) {
        "d"
    } else {
        match sig.var_sort(name) {
            Some(Sort::Obj) => "o",
            Some(Sort::Int) => "i",
            Some(Sort::Set) => "s",
            _ => "?",
        }
    }
}

/// Scope, sorts of the symbols involved, and the normal form of the
/// non-context part.
pub fn cache_key(q: &Query, scope: Scope) -> String {
    let body = Expr::implies_simplified(Expr::and(q.assumptions.iter().cloned()), q.goal.clone());
    let mut syms = body.symbols();
    for c in &q.context {
        syms.extend(c.symbols());
    }
    let mut key = format!("{scope} [");
    for (i, s) in syms.iter().enumerate() {
        if i > 0 {
            key.push(' ');
        }
        let _ = write!(key, "{s}:{}", sort_tag(&q.sig, s));
    }
    let _ = write!(key, "] {}", alpha_normalize(&body));
    key
}

pub fn context_key(q: &Query) -> String {
    let parts: Vec<String> = q.context.iter().map(|c| alpha_normalize(c).to_string()).collect();
    parts.join(" ;; ")
}

/// Copies the values of every symbol `sig` shares with `s`.
fn adapt(sig: &Signature, s: &ConcreteState) -> ConcreteState {
    let mut out = ConcreteState::new(sig, s.size);
    for (n, v) in &s.fields {
        if let Some(t) = out.fields.get_mut(n) {
            *t = v.clone();
        }
    }
    for (n, v) in &s.data {
        if let Some(t) = out.data.get_mut(n) {
            *t = v.clone();
        }
    }
    for (n, v) in &s.objs {
        if let Some(t) = out.objs.get_mut(n) {
            *t = *v;
        }
    }
    for (n, v) in &s.ints {
        if let Some(t) = out.ints.get_mut(n) {
            *t = *v;
        }
    }
    for (n, v) in &s.sets {
        if let Some(t) = out.sets.get_mut(n) {
            *t = *v;
        }
    }
    out
}

impl QueryCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn lookup(&self, key: &str, context: &str, chain: Option<ChainPos>, sig: &Signature) -> Option<Verdict> {
        let list = self.entries.get(key)?;
        let exact = list.iter().find(|e| e.context == context);
        let hit = exact.or_else(|| {
            let c = chain?;
            list.iter().find(|e| {
                e.verdict.is_not_valid() && e.chain.is_some_and(|p| p.chain == c.chain && p.pos <= c.pos)
            })
        })?;
        Some(match &hit.verdict {
            Verdict::NotValid(Some(w)) => {
                let mut w = w.clone();
                w.state = adapt(sig, &w.state);
                Verdict::NotValid(Some(w))
            }
            v => v.clone(),
        })
    }

    /// Unknown verdicts are never stored.
    pub fn insert(&mut self, entry: CacheEntry) {
        if matches!(entry.verdict, Verdict::Unknown(_)) {
            return;
        }
        let list = self.entries.entry(entry.key.clone()).or_default();
        if !list.iter().any(|e| e.context == entry.context && e.chain == entry.chain) {
            list.push(entry);
        }
    }

    /// One entry per line: hash, key, context, chain, position, verdict.
    pub fn to_text(&self) -> String {
        let mut keys: Vec<&String> = self.entries.keys().collect();
        keys.sort();
        let mut out = String::from("boheap-cache 1\n");
        for k in keys {
            for e in &self.entries[k] {
                let (chain, pos) = match e.chain {
                    Some(c) => (format!("{:016x}", c.chain), c.pos.to_string()),
                    None => ("-".into(), "-".into()),
                };
                let verdict = serde_json::to_string(&e.verdict).expect("verdicts serialize");
                let _ = writeln!(out, "{:016x}\t{}\t{}\t{chain}\t{pos}\t{verdict}", fnv(k), k, e.context);
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        if lines.next() != Some("boheap-cache 1") {
            return Err("missing header".into());
        }
        let mut cache = QueryCache::new();
        for (i, line) in lines.enumerate() {
            let bad = |m: &str| format!("line {}: {m}", i + 2);
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 6 {
                return Err(bad("expected 6 columns"));
            }
            let hash = u64::from_str_radix(cols[0], 16).map_err(|_| bad("bad hash"))?;
            if hash != fnv(cols[1]) {
                return Err(bad("hash mismatch"));
            }
            let chain = match (cols[3], cols[4]) {
                ("-", "-") => None,
                (c, p) => Some(ChainPos {
                    chain: u64::from_str_radix(c, 16).map_err(|_| bad("bad chain"))?,
                    pos: p.parse().map_err(|_| bad("bad position"))?,
                }),
            };
            let verdict: Verdict = serde_json::from_str(cols[5]).map_err(|e| bad(&e.to_string()))?;
            cache.insert(CacheEntry {
                key: cols[1].to_string(),
                context: cols[2].to_string(),
                chain,
                verdict,
            });
        }
        Ok(cache)
    }

    /// Reads a cache file; a missing file gives an empty cache and a
    /// corrupt one is ignored with a warning.
    pub fn load(path: &Path) -> Self {
        match fs::read_to_string(path) {
            Ok(text) => QueryCache::from_text(&text).unwrap_or_else(|e| {
                log::warn!("ignoring corrupt cache file {}: {e}", path.display());
                QueryCache::new()
            }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => QueryCache::new(),
            Err(e) => {
                log::warn!("ignoring unreadable cache file {}: {e}", path.display());
                QueryCache::new()
            }
        }
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.to_text())
    }
}
