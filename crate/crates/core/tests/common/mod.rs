#![allow(dead_code)]

use boheap::engine::{parse_procedure, Procedure};
use boheap::heap::{Cube, Heap, HeapDomain, HeapSet};
use boheap::logic::{eval, eval_at, parse, ConcreteState, Expr, Field, Formula, GuardedCommand, Predicate, Signature};
use boheap::oracle;
use boheap::prover::Scope;
use rand::seq::SliceRandom;
use rand::Rng;
use std::path::PathBuf;
use std::sync::Arc;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn load(name: &str) -> Procedure {
    let path = corpus_dir().join(format!("{name}.bh"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_procedure(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Every corpus procedure, by file name.
pub fn corpus() -> Vec<(String, Procedure)> {
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "bh").then(|| p.file_stem()?.to_str().map(String::from))?
        })
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), load(&n))).collect()
}

/// Predicates over `small_sig`; the first three are singletons.
pub fn predicate_pool() -> Vec<Predicate> {
    let singleton = |name: &str, src: &str| Predicate {
        singleton: true,
        ..Predicate::new(name, parse(src).unwrap())
    };
    vec![
        Predicate::points_to("x"),
        Predicate::points_to("y"),
        singleton("nul", "v = null"),
        Predicate::new("rx", parse("reach f x v").unwrap()),
        Predicate::new("ins", parse("v : S").unwrap()),
        Predicate::new("fnul", parse("v..f = null").unwrap()),
        Predicate::new("small", parse("v..d < i").unwrap()),
        Predicate::new("loop", parse("v..f = v").unwrap()),
    ]
}

/// Between 1 and `max` distinct pool predicates, starting with a singleton.
pub fn random_predicates<R: Rng>(rng: &mut R, max: usize) -> Vec<Predicate> {
    let pool = predicate_pool();
    let mut out = vec![pool[rng.gen_range(0..3)].clone()];
    let k = rng.gen_range(1..=max);
    let mut rest: Vec<&Predicate> = pool.iter().filter(|p| **p != out[0]).collect();
    rest.shuffle(rng);
    out.extend(rest.into_iter().take(k - 1).cloned());
    out
}

pub fn random_cube<R: Rng>(rng: &mut R, n: usize) -> Cube {
    let mut c = Cube::top();
    for p in 0..n {
        match rng.gen_range(0..3) {
            0 => c = c.with(p, true),
            1 => c = c.with(p, false),
            _ => {}
        }
    }
    c
}

pub fn random_heap<R: Rng>(rng: &mut R, dom: &HeapDomain) -> Heap {
    let k = rng.gen_range(1..=4);
    let cubes: Vec<Cube> = (0..k).map(|_| random_cube(rng, dom.predicates())).collect();
    dom.from_cubes(&cubes)
}

pub fn random_set<R: Rng>(rng: &mut R, dom: &HeapDomain) -> HeapSet {
    let k = rng.gen_range(1..=3);
    let heaps: Vec<Heap> = (0..k).map(|_| random_heap(rng, dom)).collect();
    dom.canon(heaps)
}

/// A random command over `small_sig` with one or two updates and perhaps
/// a guard or a havoc.
pub fn random_command<R: Rng>(rng: &mut R) -> GuardedCommand {
    let mut g = Gen::new(rng);
    let guard = if g.rng.gen_bool(0.5) { Expr::Bool(true) } else { g.formula(1) };
    let mut c = GuardedCommand::assume(guard);
    let mut targets = vec!["x", "y", "i", "S", "f", "d"];
    targets.shuffle(g.rng);
    let k = g.rng.gen_range(1..=2);
    for &t in &targets[..k] {
        c = match t {
            "x" | "y" => {
                let e = g.obj(2);
                c.assign(t, e)
            }
            "i" => {
                let e = g.int(1);
                c.assign(t, e)
            }
            "S" => {
                let e = g.set(1);
                c.assign(t, e)
            }
            "f" => {
                let (a, b) = (g.obj(1), g.obj(1));
                c.store(t, Field::Named("f".into()).update(a, b))
            }
            _ => {
                let (a, b) = (g.obj(1), g.int(0));
                c.store(t, Field::Named("d".into()).update(a, b))
            }
        };
    }
    if !targets[..k].contains(&"y") && g.rng.gen_bool(0.15) {
        c = c.havoc("y");
    }
    c
}

/// Truth value of a closed formula in each state.
pub fn models(states: &[ConcreteState], f: &Formula) -> Vec<bool> {
    states.iter().map(|s| eval(s, f).unwrap()).collect()
}

/// Whether every state satisfying `a` satisfies `b`.
pub fn entails_in(states: &[ConcreteState], a: &Formula, b: &Formula) -> bool {
    states.iter().all(|s| !eval(s, a).unwrap() || eval(s, b).unwrap())
}

pub fn small_sig() -> Arc<Signature> {
    let mut s = Signature::new();
    s.add_field("f").unwrap();
    s.add_data("d").unwrap();
    s.add_obj_var("x").unwrap();
    s.add_obj_var("y").unwrap();
    s.add_int_var("i").unwrap();
    s.add_set_var("S").unwrap();
    Arc::new(s)
}

/// Random well-sorted formulas over the symbols of a signature.
pub struct Gen<'r, R: Rng> {
    pub rng: &'r mut R,
    pub bound: Vec<String>,
    pub with_v: bool,
    pub int_literals: bool,
    fields: Vec<String>,
    data: Vec<String>,
    objs: Vec<String>,
    ints: Vec<String>,
    sets: Vec<String>,
}

impl<'r, R: Rng> Gen<'r, R> {
    pub fn new(rng: &'r mut R) -> Self {
        Self::for_sig(rng, &small_sig())
    }

    pub fn for_sig(rng: &'r mut R, sig: &Signature) -> Self {
        let names = |s: &std::collections::BTreeSet<String>| s.iter().cloned().collect();
        Gen {
            rng,
            bound: Vec::new(),
            with_v: false,
            int_literals: true,
            fields: names(&sig.fields),
            data: names(&sig.data),
            objs: names(&sig.obj_vars),
            ints: names(&sig.int_vars),
            sets: names(&sig.set_vars),
        }
    }

    fn pick(&mut self, from: &[String]) -> String {
        if from.len() == 1 {
            from[0].clone()
        } else {
            from.choose(self.rng).unwrap().clone()
        }
    }

    pub fn field(&mut self, depth: u32) -> Field {
        let f = Field::Named(self.pick(&self.fields.clone()));
        if depth > 0 && self.rng.gen_bool(0.2) {
            let a = self.obj(depth - 1);
            let b = self.obj(depth - 1);
            f.update(a, b)
        } else {
            f
        }
    }

    pub fn obj(&mut self, depth: u32) -> Expr {
        let mut leaves = vec![Expr::Null];
        leaves.extend(self.objs.iter().map(|x| Expr::var(x.as_str())));
        if self.with_v {
            leaves.push(Expr::free_var());
        }
        for b in &self.bound {
            leaves.push(Expr::var(b.as_str()));
            leaves.push(Expr::var(b.as_str()));
        }
        if depth > 0 && !self.fields.is_empty() && self.rng.gen_bool(0.3) {
            let f = self.field(depth - 1);
            let t = self.obj(depth - 1);
            return Expr::App(f, Box::new(t));
        }
        leaves.choose(self.rng).unwrap().clone()
    }

    pub fn int(&mut self, depth: u32) -> Expr {
        match self.rng.gen_range(0..5) {
            0 if !self.ints.is_empty() => Expr::var(self.pick(&self.ints.clone())),
            1 if self.int_literals => Expr::Int(self.rng.gen_range(0..3)),
            2 if self.int_literals && depth > 0 => Expr::Add(Box::new(self.int(depth - 1)), Box::new(Expr::Int(1))),
            _ if !self.data.is_empty() => {
                let d = self.pick(&self.data.clone());
                Expr::App(Field::Named(d), Box::new(self.obj(depth)))
            }
            _ => Expr::Int(0),
        }
    }

    fn set_var(&mut self) -> Option<Expr> {
        (!self.sets.is_empty()).then(|| Expr::var(self.pick(&self.sets.clone())))
    }

    pub fn set(&mut self, depth: u32) -> Expr {
        match self.rng.gen_range(0..5) {
            0 => Expr::EmptySet,
            1 => Expr::Singleton(Box::new(self.obj(depth))),
            2 if depth > 0 => {
                let w = format!("w{}", self.bound.len());
                self.bound.push(w.clone());
                let body = self.formula(depth - 1);
                self.bound.pop();
                Expr::Compr(w, Box::new(body))
            }
            3 if !self.sets.is_empty() => {
                let s = self.set_var().unwrap();
                Expr::Union(Box::new(s), Box::new(self.set(depth.saturating_sub(1))))
            }
            _ => self.set_var().unwrap_or(Expr::EmptySet),
        }
    }

    pub fn atom(&mut self, depth: u32) -> Formula {
        match self.rng.gen_range(0..8) {
            2 => Expr::lt(self.int(depth), self.int(depth)),
            3 => Expr::le(self.int(depth), self.int(depth)),
            4 => Expr::member(self.obj(depth), self.set(depth)),
            5 if !self.fields.is_empty() => Expr::reach(self.field(depth), self.obj(depth), self.obj(depth)),
            6 if !self.sets.is_empty() => {
                let s = self.set_var().unwrap();
                Expr::eq(s, self.set(depth))
            }
            7 => Expr::eq(self.int(depth), self.int(depth)),
            _ => Expr::eq(self.obj(depth), self.obj(depth)),
        }
    }

    pub fn formula(&mut self, depth: u32) -> Formula {
        if depth == 0 {
            return self.atom(0);
        }
        match self.rng.gen_range(0..9) {
            0 => Expr::Not(Box::new(self.formula(depth - 1))),
            1 => Expr::And(vec![self.formula(depth - 1), self.formula(depth - 1)]),
            2 => Expr::Or(vec![self.formula(depth - 1), self.formula(depth - 1)]),
            3 => Expr::Implies(Box::new(self.formula(depth - 1)), Box::new(self.formula(depth - 1))),
            4 => Expr::Iff(Box::new(self.formula(depth - 1)), Box::new(self.formula(depth - 1))),
            5 | 6 => {
                let w = format!("w{}", self.bound.len());
                self.bound.push(w.clone());
                let body = self.formula(depth - 1);
                self.bound.pop();
                if self.rng.gen_bool(0.5) {
                    Expr::Forall(vec![w], Box::new(body))
                } else {
                    Expr::Exists(vec![w], Box::new(body))
                }
            }
            _ => self.atom(depth - 1),
        }
    }
}

/// Validity by evaluating `f` in every state and for every value of `v`.
pub fn brute_valid(sig: &Signature, scope: Scope, f: &Formula) -> bool {
    oracle::states(sig, scope, &[])
        .iter()
        .all(|s| s.objects().all(|o| eval_at(s, f, o).unwrap()))
}

pub fn valid_in(states: &[boheap::logic::ConcreteState], f: &Formula) -> bool {
    states.iter().all(|s| s.objects().all(|o| eval_at(s, f, o).unwrap()))
}
