//! Explicit-state semantics at finite scope, used as ground truth.
//!
//! Built on the tree-walking evaluator only: no weakest preconditions and
//! none of the checker's machinery.

use crate::engine::{Loc, Procedure};
use crate::logic::{eval, eval_term, ConcreteState, Expr, Formula, GuardedCommand, Name, Signature, Update, Value};
use crate::prover::Scope;
use std::collections::{BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("more than {0} states")]
    TooManyStates(usize),
    #[error("evaluation failed: {0}")]
    Eval(String),
}

/// Every state over `sig` with exactly `k` objects and data in `[0, m]`
/// satisfying all of `constraints`. Each constraint is checked as soon as
/// all its symbols are assigned.
pub fn states_of_size(sig: &Signature, k: u8, m: i64, constraints: &[Formula]) -> Vec<ConcreteState> {
    #[derive(Clone, Copy)]
    enum Slot<'a> {
        Field(&'a Name),
        Data(&'a Name),
        Obj(&'a Name),
        Int(&'a Name),
        Set(&'a Name),
    }
    let mut slots: Vec<Slot> = Vec::new();
    slots.extend(sig.fields.iter().map(Slot::Field));
    slots.extend(sig.obj_vars.iter().map(Slot::Obj));
    slots.extend(sig.set_vars.iter().map(Slot::Set));
    slots.extend(sig.data.iter().map(Slot::Data));
    slots.extend(sig.int_vars.iter().map(Slot::Int));
    let name = |s: &Slot| -> Name {
        match s {
            Slot::Field(n) | Slot::Data(n) | Slot::Obj(n) | Slot::Int(n) | Slot::Set(n) => (*n).clone(),
        }
    };
    // due[d] lists the constraints whose symbols are all assigned once d slots are.
    let syms: Vec<BTreeSet<Name>> = constraints.iter().map(|c| c.symbols()).collect();
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); slots.len() + 1];
    for (i, s) in syms.iter().enumerate() {
        let last = (0..slots.len()).filter(|&j| s.contains(&name(&slots[j]))).max();
        due[last.map_or(0, |j| j + 1)].push(i);
    }
    let n = k as usize + 1;
    let choices = |s: &Slot| -> u64 {
        match s {
            Slot::Field(_) => (n as u64).pow(k as u32),
            Slot::Data(_) => (m as u64 + 1).pow(k as u32),
            Slot::Obj(_) => n as u64,
            Slot::Int(_) => m as u64 + 1,
            Slot::Set(_) => 1 << k,
        }
    };
    let apply = |st: &mut ConcreteState, s: &Slot, mut code: u64| match s {
        Slot::Field(f) => {
            let img = st.fields.get_mut(*f).unwrap();
            for o in 1..n {
                img[o] = (code % n as u64) as u8;
                code /= n as u64;
            }
        }
        Slot::Data(d) => {
            let img = st.data.get_mut(*d).unwrap();
            for o in 1..n {
                img[o] = (code % (m as u64 + 1)) as i64;
                code /= m as u64 + 1;
            }
        }
        Slot::Obj(x) => {
            st.objs.insert((*x).clone(), code as u8);
        }
        Slot::Int(x) => {
            st.ints.insert((*x).clone(), code as i64);
        }
        Slot::Set(x) => {
            st.sets.insert((*x).clone(), code << 1);
        }
    };
    let ok = |st: &ConcreteState, d: usize| due[d].iter().all(|&i| eval(st, &constraints[i]).unwrap_or(false));
    let mut out = Vec::new();
    let mut st = ConcreteState::new(sig, k);
    if !ok(&st, 0) {
        return out;
    }
    fn rec(
        d: usize,
        st: &mut ConcreteState,
        slots_len: usize,
        choices: &dyn Fn(usize) -> u64,
        apply: &dyn Fn(&mut ConcreteState, usize, u64),
        ok: &dyn Fn(&ConcreteState, usize) -> bool,
        out: &mut Vec<ConcreteState>,
    ) {
        if d == slots_len {
            out.push(st.clone());
            return;
        }
        for code in 0..choices(d) {
            apply(st, d, code);
            if ok(st, d + 1) {
                rec(d + 1, st, slots_len, choices, apply, ok, out);
            }
        }
        apply(st, d, 0);
    }
    rec(
        0,
        &mut st,
        slots.len(),
        &|d| choices(&slots[d]),
        &|st, d, code| apply(st, &slots[d], code),
        &ok,
        &mut out,
    );
    out
}

/// All states with at most `scope.objects` objects satisfying
/// `constraints`, smallest universes first.
pub fn states(sig: &Signature, scope: Scope, constraints: &[Formula]) -> Vec<ConcreteState> {
    (0..=scope.objects)
        .flat_map(|k| states_of_size(sig, k, scope.data_max, constraints))
        .collect()
}

fn permutations(k: u8) -> Vec<Vec<u8>> {
    let mut out = vec![vec![0u8]];
    for o in 1..=k {
        let mut next = Vec::new();
        for p in &out {
            for pos in 1..=p.len() {
                let mut q = p.clone();
                q.insert(pos, o);
                next.push(q);
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|p| {
            // p lists images in order; convert to a map old -> new.
            let mut perm = vec![0u8; p.len()];
            for (new, &old) in p.iter().enumerate() {
                perm[old as usize] = new as u8;
            }
            perm
        })
        .collect()
}

/// Least isomorphic copy under renaming of non-null objects.
pub fn canonical(s: &ConcreteState) -> ConcreteState {
    permutations(s.size)
        .iter()
        .map(|p| s.permute(p))
        .min()
        .expect("identity permutation")
}

fn value_err(e: impl ToString) -> OracleError {
    OracleError::Eval(e.to_string())
}

/// Successors of `s` under `c`: none if the guard fails, one per value of
/// the havocked variable otherwise.
pub fn concrete_post(c: &GuardedCommand, s: &ConcreteState) -> Result<Vec<ConcreteState>, OracleError> {
    if !eval(s, &c.guard).map_err(value_err)? {
        return Ok(Vec::new());
    }
    let mut next = s.clone();
    for u in &c.updates {
        match u {
            Update::Var(x, t) => match eval_term(s, t, &[]).map_err(value_err)? {
                Value::Obj(o) => {
                    next.objs.insert(x.clone(), o);
                }
                Value::Int(i) => {
                    next.ints.insert(x.clone(), i);
                }
                Value::Set(m) => {
                    next.sets.insert(x.clone(), m);
                }
                Value::Bool(_) => return Err(OracleError::Eval(format!("`{t}` is not a term"))),
            },
            Update::Field(f, to) => {
                let probe = "%o".to_string();
                let app = Expr::App(to.clone(), Box::new(Expr::Var(probe.clone())));
                for o in 1..=s.size {
                    match eval_term(s, &app, &[(probe.clone(), o)]).map_err(value_err)? {
                        Value::Obj(r) => next.fields.get_mut(f).unwrap()[o as usize] = r,
                        Value::Int(r) => next.data.get_mut(f).unwrap()[o as usize] = r,
                        _ => return Err(OracleError::Eval(format!("`{to}` is not a field"))),
                    }
                }
            }
        }
    }
    Ok(match &c.havoc {
        None => vec![next],
        Some(x) => s
            .objects()
            .map(|o| {
                let mut t = next.clone();
                t.objs.insert(x.clone(), o);
                t
            })
            .collect(),
    })
}

/// Canonical states reachable at each location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteReachSet {
    pub states: Vec<BTreeSet<ConcreteState>>,
}

impl ConcreteReachSet {
    pub fn total(&self) -> usize {
        self.states.iter().map(BTreeSet::len).sum()
    }

    pub fn at(&self, l: Loc) -> &BTreeSet<ConcreteState> {
        &self.states[l]
    }
}

/// Integer values within `[0, M]`; successors leaving the range are not
/// part of the finite semantics.
pub fn in_scope(s: &ConcreteState, scope: Scope) -> bool {
    let ok = |i: &i64| (0..=scope.data_max).contains(i);
    s.ints.values().all(ok) && s.data.values().all(|d| d.iter().all(ok))
}

/// Breadth-first closure from all initial states, up to isomorphism.
pub fn concrete_reach(p: &Procedure, scope: Scope, limit: usize) -> Result<ConcreteReachSet, OracleError> {
    let init = p.initial_conjuncts();
    let mut reach = ConcreteReachSet {
        states: vec![BTreeSet::new(); p.locations.len()],
    };
    let mut queue = VecDeque::new();
    for s in states(&p.sig, scope, &init) {
        let c = canonical(&s);
        if reach.states[p.entry].insert(c.clone()) {
            queue.push_back((p.entry, c));
        }
    }
    let mut count = reach.total();
    while let Some((l, s)) = queue.pop_front() {
        for (_, e) in p.out_edges(l) {
            for t in concrete_post(&e.command, &s)? {
                if !in_scope(&t, scope) {
                    continue;
                }
                let t = canonical(&t);
                if reach.states[e.to].insert(t.clone()) {
                    count += 1;
                    if count > limit {
                        return Err(OracleError::TooManyStates(limit));
                    }
                    queue.push_back((e.to, t));
                }
            }
        }
    }
    Ok(reach)
}
