//! Boolean heap abstraction of formulas and guarded commands.

mod clean;
mod cubes;
mod kappa;

pub use clean::{split, split_heap};
pub use cubes::{bits, cube_of, Context};
pub use kappa::{instantiate, kappa, Instance};

use crate::heap::{Cube, Heap, HeapDomain, HeapSet, Relation};
use crate::logic::{conjuncts, wlp, Expr, Formula, GuardedCommand, Name, Predicate, Signature, SortError};
use crate::prover::{Parallelism, Prover};
use cubes::Checker;
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Config {
    /// Longest cube tried when abstracting a weakest precondition.
    pub cube_max: usize,
    /// Reuse abstract transitions for repeated command and context pairs.
    pub memo: bool,
    pub parallelism: Parallelism,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            cube_max: 3,
            memo: true,
            parallelism: Parallelism::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AbstractionStats {
    pub queries: u64,
    pub transitions: u64,
    pub transition_hits: u64,
}

/// An abstract transition with the key it was built for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub relation: Relation,
    pub key: String,
}

/// Abstraction operators over a fixed list of predicates.
pub struct Abstraction<'a> {
    pub sig: Arc<Signature>,
    pub predicates: Vec<Predicate>,
    pub formulas: Vec<Formula>,
    pub singletons: u64,
    pub points_to: Vec<(Name, usize)>,
    pub dom: HeapDomain,
    pub config: Config,
    prover: &'a Prover,
    memo: RefCell<HashMap<String, Relation>>,
    queries: AtomicU64,
    transitions: AtomicU64,
    transition_hits: AtomicU64,
}

fn par_map<T: Sync, U: Send>(par: Parallelism, items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    #[cfg(feature = "parallel")]
    if par == Parallelism::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = par;
    items.iter().map(f).collect()
}

impl<'a> Abstraction<'a> {
    pub fn new(sig: Arc<Signature>, predicates: Vec<Predicate>, prover: &'a Prover, config: Config) -> Self {
        let formulas: Vec<Formula> = predicates.iter().map(|p| p.formula.clone()).collect();
        let mut singletons = 0;
        let mut points_to: Vec<(Name, usize)> = Vec::new();
        for (i, p) in predicates.iter().enumerate() {
            if p.singleton {
                singletons |= 1 << i;
            }
            if let Some(x) = p.pointed_by() {
                if !points_to.iter().any(|(y, _)| y == x) {
                    points_to.push((x.to_string(), i));
                }
            }
        }
        Abstraction {
            sig,
            dom: HeapDomain::new(predicates.len()),
            predicates,
            formulas,
            singletons,
            points_to,
            config,
            prover,
            memo: RefCell::new(HashMap::new()),
            queries: AtomicU64::new(0),
            transitions: AtomicU64::new(0),
            transition_hits: AtomicU64::new(0),
        }
    }

    pub fn prover(&self) -> &Prover {
        self.prover
    }

    pub fn stats(&self) -> AbstractionStats {
        AbstractionStats {
            queries: self.queries.load(Ordering::Relaxed),
            transitions: self.transitions.load(Ordering::Relaxed),
            transition_hits: self.transition_hits.load(Ordering::Relaxed),
        }
    }

    pub fn all(&self) -> u64 {
        self.dom.all()
    }

    fn checker(&self) -> Checker<'_> {
        Checker {
            prover: self.prover,
            sig: &self.sig,
            formulas: &self.formulas,
            cube_max: self.config.cube_max,
            queries: &self.queries,
        }
    }

    /// `[p ↦ 1]` when `c` leaves every symbol of predicate `p` alone.
    fn frame_seed(&self, c: &GuardedCommand, p: usize, polarity: bool, over: u64) -> Vec<Cube> {
        let modified = c.modified();
        let untouched = self.formulas[p].symbols().is_disjoint(&modified);
        if untouched && over & (1 << p) != 0 {
            vec![Cube::literal(p, polarity)]
        } else {
            Vec::new()
        }
    }

    fn literal(&self, p: usize, polarity: bool) -> Formula {
        if polarity {
            self.formulas[p].clone()
        } else {
            Expr::negate(self.formulas[p].clone())
        }
    }

    /// Cubes over `over` entailing `wlp(c, f)` under the context.
    pub fn wlp_sharp(&self, c: &GuardedCommand, ctx: &Context, f: &Formula, over: u64) -> Result<Heap, SortError> {
        let goal = wlp(&self.sig, c, f)?;
        let cubes = self.checker().entailing(ctx, &goal, over, &[]);
        Ok(self.dom.from_cubes(&cubes))
    }

    /// Memo key: command, context up to alpha equivalence, and masks.
    pub fn transition_key(c: &GuardedCommand, ctx: &Context, src: u64, dst: u64) -> String {
        let parts: Vec<String> = ctx
            .conjuncts
            .iter()
            .map(|f| crate::logic::alpha_normalize(f).to_string())
            .collect();
        format!("{c}|{}|{src:x}|{dst:x}", parts.join(" ;; "))
    }

    /// `⊓_p ([p' ↦ 1] ⊓ ¬wlp#(c, Γ, ¬p)) ⊔ ([p' ↦ 0] ⊓ ¬wlp#(c, Γ, p))`
    /// over the predicates `dst`, with cubes over `src`.
    pub fn abstract_transition(&self, c: &GuardedCommand, ctx: &Context, src: u64, dst: u64) -> Result<Transition, SortError> {
        let key = Self::transition_key(c, ctx, src, dst);
        if self.config.memo {
            if let Some(&r) = self.memo.borrow().get(&key) {
                self.transition_hits.fetch_add(1, Ordering::Relaxed);
                return Ok(Transition { relation: r, key });
            }
        }
        self.transitions.fetch_add(1, Ordering::Relaxed);
        let mut jobs = Vec::new();
        for p in bits(dst) {
            for polarity in [true, false] {
                let goal = wlp(&self.sig, c, &self.literal(p, polarity))?;
                jobs.push((goal, self.frame_seed(c, p, polarity, src)));
            }
        }
        let chk = self.checker();
        let found = par_map(self.config.parallelism, &jobs, |(goal, seed)| chk.entailing(ctx, goal, src, seed));
        let mut r = self.dom.relation_top();
        for (p, pair) in bits(dst).zip(found.chunks(2)) {
            let pos = self.dom.from_cubes(&pair[0]);
            let neg = self.dom.from_cubes(&pair[1]);
            r = self.dom.relation_meet(r, self.dom.primed_constraint(p, pos, neg));
        }
        if self.config.memo {
            self.memo.borrow_mut().insert(key.clone(), r);
        }
        Ok(Transition { relation: r, key })
    }

    pub fn relational_product(&self, h: Heap, t: &Transition) -> Heap {
        self.dom.relational_product(h, t.relation)
    }

    /// Image of each member heap under the abstract transition.
    pub fn cartesian_post(&self, c: &GuardedCommand, ctx: &Context, s: &HeapSet, src: u64, dst: u64) -> Result<HeapSet, SortError> {
        if s.is_empty() {
            return Ok(HeapSet::empty());
        }
        let t = self.abstract_transition(c, ctx, src, dst)?;
        Ok(self.canon(s.heaps().iter().map(|&h| self.relational_product(h, &t))))
    }

    /// The same post computed cube by cube: each complete cube `C` of a
    /// member heap goes to the meet of the literals `p^b` with
    /// `C ⊑ wlp#(c, Γ, p^b)`.
    pub fn cartesian_post_direct(&self, c: &GuardedCommand, ctx: &Context, s: &HeapSet, src: u64, dst: u64) -> Result<HeapSet, SortError> {
        let mut table = Vec::new();
        let mut over = 0;
        for p in bits(dst) {
            let pos = self.wlp_sharp(c, ctx, &self.literal(p, true), src)?;
            let neg = self.wlp_sharp(c, ctx, &self.literal(p, false), src)?;
            over |= self.dom.support(pos) | self.dom.support(neg);
            table.push((p, pos, neg));
        }
        let mut out = Vec::new();
        for &h in s.heaps() {
            let mut post = self.dom.bottom();
            for cube in self.dom.complete_cubes(h, over | self.dom.support(h)) {
                let mut image = Some(Cube::top());
                for &(p, pos, neg) in &table {
                    let (a, b) = (self.dom.in_c(&cube, pos), self.dom.in_c(&cube, neg));
                    image = match (a, b) {
                        (true, true) => None,
                        (true, false) => image.map(|i| i.with(p, true)),
                        (false, true) => image.map(|i| i.with(p, false)),
                        (false, false) => image,
                    };
                }
                if let Some(i) = image {
                    post = self.dom.join(post, self.dom.cube_heap(&i));
                }
            }
            out.push(post);
        }
        Ok(self.canon(out))
    }

    fn canon(&self, heaps: impl IntoIterator<Item = Heap>) -> HeapSet {
        self.dom.canon(heaps.into_iter().filter(|&h| !self.dom.is_bottom(h)))
    }

    pub fn split(&self, s: &HeapSet) -> HeapSet {
        split(&self.dom, self.singletons, s)
    }

    /// Drops heaps and complete cubes over `over` that are unsatisfiable
    /// together with `f`.
    pub fn clean(&self, f: &Formula, s: &HeapSet, over: u64) -> HeapSet {
        clean::clean(&self.checker(), &self.dom, f, s, over)
    }

    /// `clean(f, split({¬⊔{C | C ⊨ ¬f}}))` with cubes over `over`.
    pub fn abstract_formula(&self, f: &Formula, over: u64) -> HeapSet {
        let neg = Expr::negate(f.clone());
        let cubes = self.checker().entailing(&Context::default(), &neg, over, &[]);
        let h = self.dom.complement(self.dom.from_cubes(&cubes));
        if self.dom.is_bottom(h) {
            return HeapSet::empty();
        }
        let split = self.split(&self.dom.singleton(h));
        self.clean(f, &split, over)
    }

    pub fn instantiate(&self, h: Heap) -> Instance {
        instantiate(&self.dom, &self.formulas, &self.points_to, h)
    }

    pub fn kappa(&self, s: &HeapSet) -> Instance {
        kappa(&self.dom, &self.formulas, &self.points_to, s)
    }

    /// `S = clean(guard ∧ assumed, split(S0)); Γ = assumed ∧ κ(context ⊔ S);
    /// cartesian_post(c, Γ, S)`. The chain position is kept only when κ
    /// used every variable.
    pub fn abstract_post(&self, c: &GuardedCommand, step: &Step, context: &HeapSet, s0: &HeapSet) -> Result<HeapSet, SortError> {
        if s0.is_empty() {
            return Ok(HeapSet::empty());
        }
        let mut f = step.assumed.clone();
        f.push(c.guard.clone());
        let s = self.clean(&Expr::and(f), &self.split(s0), step.src);
        if s.is_empty() {
            return Ok(s);
        }
        let k = self.kappa(&self.dom.set_join(context, &s));
        let mut gamma = step.assumed.clone();
        gamma.extend(conjuncts(&k.formula).into_iter().filter(|f| *f != Expr::Bool(true)));
        let ctx = Context::new(gamma).in_chain(if k.complete { step.chain } else { None });
        self.cartesian_post(c, &ctx, &s, step.src, step.dst)
    }
}

/// Per-edge parameters of an abstract post.
#[derive(Clone, Debug, Default)]
pub struct Step {
    /// Facts known at the source location.
    pub assumed: Vec<Formula>,
    /// Predicates relevant at the source and target.
    pub src: u64,
    pub dst: u64,
    pub chain: Option<crate::prover::ChainPos>,
}
