//! The built-in bounded checker: exhaustive search for a counter-model
//! with at most `N` objects and data values in `[0, M]`.
//!
//! Queries with a context reuse the models of that context: they are
//! enumerated once, and every other formula is turned into a bit vector
//! over (model, value of `v`) pairs, so a query reduces to bit operations.

mod ir;
mod layout;
mod search;

use super::query::{Query, Scope, Verdict, Witness};
use crate::logic::{alpha_normalize, conjuncts, Expr, Formula, Signature};
use ir::{Compiler, Eval, Prop};
use layout::Layout;
use search::{NumMode, Outcome, Space, Task};
use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

/// How independent search tasks are run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Search nodes per task before giving up.
    pub nodes: u64,
    /// Largest number of context models kept for reuse.
    pub models: usize,
    /// Reused model sets and bit vectors kept before the memo is flushed.
    pub bases: usize,
    pub vectors: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            nodes: 50_000_000,
            models: 60_000,
            bases: 48,
            vectors: 40_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumStats {
    pub searches: u64,
    pub reused: u64,
    pub bases: u64,
    pub vectors: u64,
}

struct Base {
    id: u64,
    lay: Layout,
    k_of: Vec<u8>,
    models: Vec<Vec<u8>>,
    offsets: Vec<usize>,
    bits: usize,
}

impl Base {
    fn locate(&self, bit: usize) -> (usize, u8) {
        let m = self.offsets.partition_point(|&o| o <= bit) - 1;
        (m, (bit - self.offsets[m]) as u8)
    }
}

#[derive(Default)]
struct Memo {
    bases: HashMap<String, Option<Arc<Base>>>,
    vectors: HashMap<(u64, String), Arc<Vec<u64>>>,
    next_id: u64,
}

pub struct Enumerator {
    pub scope: Scope,
    pub limits: Limits,
    pub parallelism: Parallelism,
    pub reuse_models: bool,
    memo: Mutex<Memo>,
    searches: AtomicU64,
    reused: AtomicU64,
    bases: AtomicU64,
    vectors: AtomicU64,
}

fn order_compatible(f: &Formula) -> bool {
    let mut ok = true;
    f.visit(&mut |e| match e {
        Expr::Int(i) if *i != 0 => ok = false,
        Expr::Add(..) | Expr::Sub(..) => ok = false,
        _ => {}
    });
    ok
}

fn nf(f: &Formula) -> String {
    alpha_normalize(f).to_string()
}

fn sig_key(sig: &Signature) -> String {
    format!("{sig:?}")
}

/// Maps `f` over `items` keeping order; parallel when enabled.
fn ordered_map<T: Sync, R: Send>(par: Parallelism, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    if par == Parallelism::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = par;
    items.iter().map(f).collect()
}

/// First `Some` in item order; parallel when enabled.
fn ordered_find<T: Sync, R: Send>(par: Parallelism, items: &[T], f: impl Fn(&T) -> Option<R> + Sync + Send) -> Option<R> {
    #[cfg(feature = "parallel")]
    if par == Parallelism::Parallel {
        use rayon::prelude::*;
        return items.par_iter().find_map_first(f);
    }
    let _ = par;
    items.iter().find_map(f)
}

impl Enumerator {
    pub fn new(scope: Scope) -> Self {
        assert!(scope.objects <= 6, "at most 6 objects are supported");
        assert!((0..=254).contains(&scope.data_max), "data bound must lie in [0, 254]");
        Enumerator {
            scope,
            limits: Limits::default(),
            parallelism: Parallelism::default(),
            reuse_models: true,
            memo: Mutex::new(Memo::default()),
            searches: AtomicU64::new(0),
            reused: AtomicU64::new(0),
            bases: AtomicU64::new(0),
            vectors: AtomicU64::new(0),
        }
    }

    pub fn with_parallelism(mut self, p: Parallelism) -> Self {
        self.parallelism = p;
        self
    }

    pub fn with_limits(mut self, l: Limits) -> Self {
        self.limits = l;
        self
    }

    pub fn stats(&self) -> EnumStats {
        EnumStats {
            searches: self.searches.load(Ordering::Relaxed),
            reused: self.reused.load(Ordering::Relaxed),
            bases: self.bases.load(Ordering::Relaxed),
            vectors: self.vectors.load(Ordering::Relaxed),
        }
    }

    /// Validity of a closed formula at scope.
    pub fn bounded_valid(&self, sig: Arc<Signature>, f: Formula) -> Verdict {
        self.check(&Query::new(sig, f))
    }

    pub fn check(&self, q: &Query) -> Verdict {
        let all: Vec<&Formula> = q.context.iter().chain(&q.assumptions).chain([&q.goal]).collect();
        let mode_order = all.iter().all(|f| order_compatible(f));
        if self.reuse_models && !q.context.is_empty() {
            if let Some(base) = self.base(&q.sig, &q.context, mode_order) {
                self.reused.fetch_add(1, Ordering::Relaxed);
                return self.check_on(&q.sig, &base, q);
            }
        }
        self.searches.fetch_add(1, Ordering::Relaxed);
        self.search(q, mode_order)
    }

    fn num_mode(&self, order: bool, cells: usize) -> NumMode {
        let m = self.scope.data_max as u8;
        if order {
            NumMode::Order(m.min(cells as u8))
        } else {
            NumMode::Full(m)
        }
    }

    fn compile(lay: &Layout, fs: &[&Formula]) -> Result<Vec<Prop>, String> {
        fs.iter().map(|f| Compiler::new(lay).prop(f)).collect()
    }

    fn search(&self, q: &Query, mode_order: bool) -> Verdict {
        let lay = Layout::new(&q.sig, self.scope.objects);
        let negated = Expr::not(q.goal.clone());
        let mut fs: Vec<&Formula> = q.context.iter().chain(&q.assumptions).collect();
        fs.push(&negated);
        let props = match Self::compile(&lay, &fs) {
            Ok(p) => p,
            Err(e) => return Verdict::Unknown(e),
        };
        let mut symbols = BTreeSet::new();
        let mut with_v = false;
        for f in &fs {
            symbols.extend(f.symbols());
            with_v |= f.mentions_free_var();
        }
        let spaces: Vec<Space> = (0..=self.scope.objects)
            .map(|k| {
                let order = lay.order(k, &symbols, with_v);
                let cells = order.iter().filter(|&&s| lay.kind(s) == layout::CellKind::Num).count();
                Space::new(&lay, k, order, &props, self.num_mode(mode_order, cells), self.limits.nodes)
            })
            .collect();
        let tasks: Vec<(usize, Task)> = spaces
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.tasks(2).into_iter().map(move |t| (i, t)))
            .collect();
        let exhausted = AtomicBool::new(false);
        let found = ordered_find(self.parallelism, &tasks, |(i, t)| {
            let sp = &spaces[*i];
            let mut hit = None;
            let out = sp.run(t, &mut |cells| {
                hit = Some(cells.to_vec());
                true
            });
            if out == Outcome::Exhausted {
                exhausted.store(true, Ordering::Relaxed);
            }
            hit.map(|c| (sp.k, c))
        });
        match found {
            Some((k, cells)) => Verdict::NotValid(Some(Witness {
                state: lay.to_state(&q.sig, k, &cells),
                v: cells[lay.v_slot()],
            })),
            None if exhausted.load(Ordering::Relaxed) => {
                Verdict::Unknown(format!("search exceeded {} nodes", self.limits.nodes))
            }
            None => Verdict::Valid,
        }
    }

    /// All models of `context` over the whole signature, or `None` when
    /// there are more than the configured limit.
    fn base(&self, sig: &Arc<Signature>, context: &[Formula], mode_order: bool) -> Option<Arc<Base>> {
        let head = format!("{}|{}|{}", sig_key(sig), mode_order, self.scope);
        let keys: Vec<String> = (1..=context.len())
            .map(|i| {
                let parts: Vec<String> = context[..i].iter().map(nf).collect();
                format!("{head}|{}", parts.join("\u{1f}"))
            })
            .collect();
        let mut prev: Option<Arc<Base>> = None;
        for (i, key) in keys.iter().enumerate() {
            if let Some(hit) = self.memo.lock().unwrap().bases.get(key) {
                prev = hit.clone();
                continue;
            }
            let built = match &prev {
                Some(b) => self.filter(b, &context[i]),
                None if i + 1 == context.len() || i == 0 => self.enumerate(sig, &context[..=i], mode_order),
                None => continue,
            };
            let mut memo = self.memo.lock().unwrap();
            if memo.bases.len() >= self.limits.bases {
                memo.bases.clear();
                memo.vectors.clear();
            }
            let built = built.map(|mut b| {
                b.id = memo.next_id;
                memo.next_id += 1;
                Arc::new(b)
            });
            memo.bases.insert(key.clone(), built.clone());
            prev = built;
        }
        prev
    }

    fn finish(lay: Layout, found: Vec<(u8, Vec<u8>)>) -> Base {
        let mut offsets = Vec::with_capacity(found.len());
        let mut bits = 0;
        let mut k_of = Vec::with_capacity(found.len());
        let mut models = Vec::with_capacity(found.len());
        for (k, c) in found {
            offsets.push(bits);
            bits += k as usize + 1;
            k_of.push(k);
            models.push(c);
        }
        Base {
            id: 0,
            lay,
            k_of,
            models,
            offsets,
            bits,
        }
    }

    fn enumerate(&self, sig: &Signature, context: &[Formula], mode_order: bool) -> Option<Base> {
        self.bases.fetch_add(1, Ordering::Relaxed);
        let lay = Layout::new(sig, self.scope.objects);
        let fs: Vec<&Formula> = context.iter().collect();
        let props = Self::compile(&lay, &fs).ok()?;
        let symbols = lay.all_symbols();
        let spaces: Vec<Space> = (0..=self.scope.objects)
            .map(|k| {
                let order = lay.order(k, &symbols, false);
                let cells = order.iter().filter(|&&s| lay.kind(s) == layout::CellKind::Num).count();
                Space::new(&lay, k, order, &props, self.num_mode(mode_order, cells), self.limits.nodes)
            })
            .collect();
        let tasks: Vec<(usize, Task)> = spaces
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.tasks(2).into_iter().map(move |t| (i, t)))
            .collect();
        let limit = self.limits.models;
        let parts = ordered_map(self.parallelism, &tasks, |(i, t)| {
            let sp = &spaces[*i];
            let mut out = Vec::new();
            let res = sp.run(t, &mut |cells| {
                out.push((sp.k, cells.to_vec()));
                out.len() > limit
            });
            (res == Outcome::Done).then_some(out)
        });
        let mut found = Vec::new();
        for p in parts {
            found.extend(p?);
            if found.len() > limit {
                return None;
            }
        }
        drop(spaces);
        Some(Self::finish(lay, found))
    }

    fn filter(&self, base: &Base, f: &Formula) -> Option<Base> {
        let p = Compiler::new(&base.lay).prop(f).ok()?;
        let kept: Vec<(u8, Vec<u8>)> = base
            .models
            .iter()
            .zip(&base.k_of)
            .filter(|(c, &k)| Eval::new(&base.lay, c, k).prop(&p) == Some(true))
            .map(|(c, &k)| (k, c.clone()))
            .collect();
        Some(Self::finish(base.lay.clone(), kept))
    }

    fn vector(&self, base: &Base, f: &Formula) -> Option<Arc<Vec<u64>>> {
        let key = (base.id, nf(f));
        if let Some(v) = self.memo.lock().unwrap().vectors.get(&key) {
            return Some(v.clone());
        }
        self.vectors.fetch_add(1, Ordering::Relaxed);
        let p = Compiler::new(&base.lay).prop(f).ok()?;
        let vs = base.lay.v_slot();
        let idx: Vec<usize> = (0..base.models.len()).collect();
        let chunks: Vec<&[usize]> = idx.chunks(256).collect();
        let parts = ordered_map(self.parallelism, &chunks, |chunk| {
            let mut out = Vec::new();
            for &m in chunk.iter() {
                let k = base.k_of[m];
                let mut cells = base.models[m].clone();
                for o in 0..=k {
                    cells[vs] = o;
                    if Eval::new(&base.lay, &cells, k).prop(&p) == Some(true) {
                        out.push(base.offsets[m] + o as usize);
                    }
                }
            }
            out
        });
        let mut bits = vec![0u64; base.bits.div_ceil(64)];
        for b in parts.into_iter().flatten() {
            bits[b / 64] |= 1 << (b % 64);
        }
        let bits = Arc::new(bits);
        let mut memo = self.memo.lock().unwrap();
        if memo.vectors.len() >= self.limits.vectors {
            memo.vectors.clear();
        }
        memo.vectors.insert(key, bits.clone());
        Some(bits)
    }

    fn check_on(&self, sig: &Signature, base: &Base, q: &Query) -> Verdict {
        let words = base.bits.div_ceil(64);
        let mut acc = vec![u64::MAX; words];
        if base.bits % 64 != 0 {
            acc[words - 1] = (1u64 << (base.bits % 64)) - 1;
        }
        let parts: Vec<Formula> = q.assumptions.iter().flat_map(conjuncts).collect();
        for f in &parts {
            let Some(v) = self.vector(base, f) else {
                return Verdict::Unknown(format!("cannot evaluate `{f}`"));
            };
            for (a, b) in acc.iter_mut().zip(v.iter()) {
                *a &= b;
            }
            if acc.iter().all(|&w| w == 0) {
                return Verdict::Valid;
            }
        }
        let Some(g) = self.vector(base, &q.goal) else {
            return Verdict::Unknown(format!("cannot evaluate `{}`", q.goal));
        };
        for (w, (a, b)) in acc.iter().zip(g.iter()).enumerate() {
            let bad = a & !b;
            if bad != 0 {
                let (m, o) = base.locate(w * 64 + bad.trailing_zeros() as usize);
                let k = base.k_of[m];
                return Verdict::NotValid(Some(Witness {
                    state: base.lay.to_state(sig, k, &base.models[m]),
                    v: o,
                }));
            }
        }
        Verdict::Valid
    }
}
