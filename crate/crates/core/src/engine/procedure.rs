use crate::logic::{conjuncts, Expr, Formula, GuardedCommand, Name, Predicate, Signature, SortError};
use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;
use thiserror::Error;

pub type Loc = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: Loc,
    pub to: Loc,
    pub command: GuardedCommand,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProcedureError {
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error("location `{0}` is not reachable from the entry")]
    Unreachable(String),
    #[error("the exit location has outgoing edges")]
    ExitHasSuccessors,
    #[error("duplicate predicate `{0}`")]
    DuplicatePredicate(Name),
    #[error("`{0}` is not an object variable")]
    NotObject(Name),
}

/// A procedure as a control-flow graph of loop-free guarded commands.
///
/// Locals start out null, 0 or empty; everything else is constrained only
/// by the precondition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Procedure {
    pub name: String,
    pub sig: Arc<Signature>,
    pub locals: BTreeSet<Name>,
    pub requires: Formula,
    pub ensures: Formula,
    pub predicates: Vec<Predicate>,
    pub locations: Vec<String>,
    pub entry: Loc,
    pub exit: Loc,
    pub edges: Vec<Edge>,
}

impl Procedure {
    pub fn loc(&self, name: &str) -> Option<Loc> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn out_edges(&self, l: Loc) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.from == l)
    }

    /// Locals set to their initial values.
    pub fn locals_init(&self) -> Formula {
        let parts = self.locals.iter().map(|x| {
            if self.sig.obj_vars.contains(x) {
                Expr::eq(Expr::var(x.as_str()), Expr::Null)
            } else if self.sig.int_vars.contains(x) {
                Expr::eq(Expr::var(x.as_str()), Expr::Int(0))
            } else {
                Expr::eq(Expr::var(x.as_str()), Expr::EmptySet)
            }
        });
        Expr::and(parts)
    }

    /// Precondition conjuncts including the initial values of locals.
    pub fn initial_conjuncts(&self) -> Vec<Formula> {
        let mut out = conjuncts(&self.requires);
        for c in conjuncts(&self.locals_init()) {
            if c != Expr::Bool(true) {
                out.push(c);
            }
        }
        out
    }

    /// User predicates plus `(x = v)` for every object variable that has
    /// no such predicate yet.
    pub fn all_predicates(&self) -> Vec<Predicate> {
        let mut out = self.predicates.clone();
        for x in &self.sig.obj_vars {
            if !out.iter().any(|p| p.pointed_by() == Some(x.as_str())) {
                let mut p = Predicate::points_to(x);
                while out.iter().any(|q| q.name == p.name) {
                    p.name.push('_');
                }
                out.push(p);
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), ProcedureError> {
        self.sig.check_formula(&self.requires)?;
        self.sig.check_formula(&self.ensures)?;
        let mut names = BTreeSet::new();
        for p in &self.predicates {
            p.validate(&self.sig)?;
            if !names.insert(p.name.clone()) {
                return Err(ProcedureError::DuplicatePredicate(p.name.clone()));
            }
        }
        for e in &self.edges {
            e.command.validate(&self.sig)?;
        }
        for x in &self.locals {
            if self.sig.var_sort(x).is_none() || x == crate::logic::FREE_VAR {
                return Err(SortError::Unknown(x.clone()).into());
            }
        }
        if self.out_edges(self.exit).next().is_some() {
            return Err(ProcedureError::ExitHasSuccessors);
        }
        let seen = self.reachable();
        if let Some(l) = (0..self.locations.len()).find(|&l| !seen[l]) {
            return Err(ProcedureError::Unreachable(self.locations[l].clone()));
        }
        Ok(())
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.locations.len()];
        let mut queue = VecDeque::from([self.entry]);
        seen[self.entry] = true;
        while let Some(l) = queue.pop_front() {
            for (_, e) in self.out_edges(l) {
                if !seen[e.to] {
                    seen[e.to] = true;
                    queue.push_back(e.to);
                }
            }
        }
        seen
    }

    /// Depth-first postorder from the entry and the set of back edges.
    fn dfs(&self) -> (Vec<Loc>, BTreeSet<usize>) {
        let n = self.locations.len();
        let mut state = vec![0u8; n];
        let mut post = Vec::new();
        let mut back = BTreeSet::new();
        let mut stack: Vec<(Loc, Vec<(usize, Loc)>)> = Vec::new();
        let succ = |l: Loc| -> Vec<(usize, Loc)> {
            let mut v: Vec<(usize, Loc)> = self.out_edges(l).map(|(i, e)| (i, e.to)).collect();
            v.reverse();
            v
        };
        state[self.entry] = 1;
        stack.push((self.entry, succ(self.entry)));
        while let Some((l, rest)) = stack.last_mut() {
            let l = *l;
            match rest.pop() {
                Some((i, t)) => match state[t] {
                    0 => {
                        state[t] = 1;
                        stack.push((t, succ(t)));
                    }
                    1 => {
                        back.insert(i);
                    }
                    _ => {}
                },
                None => {
                    state[l] = 2;
                    post.push(l);
                    stack.pop();
                }
            }
        }
        (post, back)
    }

    pub fn reverse_postorder(&self) -> Vec<Loc> {
        let mut p = self.dfs().0;
        p.reverse();
        p
    }

    /// Indices of back edges under the depth-first spanning tree.
    pub fn back_edges(&self) -> BTreeSet<usize> {
        self.dfs().1
    }

    pub fn loop_heads(&self) -> BTreeSet<Loc> {
        self.back_edges().iter().map(|&i| self.edges[i].to).collect()
    }

    /// Entry, loop heads and exit, in location order.
    pub fn cut_points(&self) -> BTreeSet<Loc> {
        let mut out = self.loop_heads();
        out.insert(self.entry);
        out.insert(self.exit);
        out
    }

    /// Position of each location in reverse postorder.
    pub fn topo_rank(&self) -> Vec<usize> {
        let mut rank = vec![usize::MAX; self.locations.len()];
        for (i, l) in self.reverse_postorder().into_iter().enumerate() {
            rank[l] = i;
        }
        rank
    }

    pub fn user_predicate_count(&self) -> usize {
        self.predicates.len()
    }
}
