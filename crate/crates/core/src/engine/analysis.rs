//! Abstract reachability, invariants and verification conditions.

use super::bench::print_procedure;
use super::procedure::{Loc, Procedure, ProcedureError};
use super::relevance::relevance_masks;
use crate::abstraction::{self, Abstraction, Step};
use crate::heap::{dump_set, gamma_set, HeapSet};
use crate::logic::{conjuncts, wlp, Expr, Formula, SortError};
use crate::propagation::{propagate, ConjunctMap};
use crate::prover::{fnv, ChainPos, Prover, Query};
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Procedure(#[from] ProcedureError),
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error("{0} predicates exceed the limit of 64")]
    TooManyPredicates(usize),
    #[error("unknown location `{0}`")]
    UnknownLocation(String),
}

/// Order in which unprocessed tree nodes are taken.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    /// Lowest reverse-postorder rank first, then insertion order.
    #[default]
    Topological,
    /// Insertion order only.
    Fifo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub abstraction: abstraction::Config,
    /// Restrict each location to its relevant predicates.
    pub relevance: bool,
    pub schedule: Schedule,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            abstraction: abstraction::Config::default(),
            relevance: true,
            schedule: Schedule::Topological,
        }
    }
}

/// A node of the abstract reachability tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachNode {
    pub location: Loc,
    pub states: HeapSet,
    /// Parent node and the edge taken from it.
    pub parent: Option<(usize, usize)>,
    /// Edge taken and child node.
    pub sons: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Timings {
    pub propagate: Duration,
    pub reach: Duration,
    pub check: Duration,
}

/// One proof obligation: a loop-free path between annotated locations and
/// one conjunct of the conclusion at its end.
#[derive(Clone, Debug)]
pub struct Vc {
    pub from: Loc,
    pub to: Loc,
    pub edges: Vec<usize>,
    /// Position of the conclusion conjunct, from 1, and the number of them.
    pub conjunct: usize,
    pub conjuncts: usize,
    pub conclusion: Formula,
    pub query: Query,
}

pub struct Analysis<'a> {
    pub procedure: &'a Procedure,
    pub abstraction: Abstraction<'a>,
    pub conjuncts: ConjunctMap,
    pub masks: Vec<u64>,
    pub nodes: Vec<ReachNode>,
    /// Union of the states of all nodes at each location.
    pub states: Vec<HeapSet>,
    /// Nodes in the order they were processed.
    pub processed: Vec<usize>,
    pub timings: Timings,
    chain_base: u64,
}

/// Runs propagation and the reachability analysis.
pub fn analyze<'a>(p: &'a Procedure, prover: &'a Prover, opts: &Options) -> Result<Analysis<'a>, EngineError> {
    p.validate()?;
    let preds = p.all_predicates();
    if preds.len() > 64 {
        return Err(EngineError::TooManyPredicates(preds.len()));
    }
    let t = Instant::now();
    let conj = propagate(prover, p)?;
    let propagate_time = t.elapsed();
    let masks = relevance_masks(p, &preds, opts.relevance);
    let abs = Abstraction::new(p.sig.clone(), preds, prover, opts.abstraction);
    let config = format!(
        "{}|{}|{}|{:?}",
        prover.scope, opts.abstraction.cube_max, opts.relevance, opts.schedule
    );
    let mut a = Analysis {
        procedure: p,
        abstraction: abs,
        conjuncts: conj,
        masks,
        nodes: Vec::new(),
        states: vec![HeapSet::empty(); p.locations.len()],
        processed: Vec::new(),
        timings: Timings {
            propagate: propagate_time,
            ..Timings::default()
        },
        chain_base: fnv(&format!("{config}\n{}", print_procedure(p))),
    };
    let t = Instant::now();
    a.reach(opts.schedule)?;
    a.timings.reach = t.elapsed();
    Ok(a)
}

impl<'a> Analysis<'a> {
    fn chain_at(&self, l: Loc) -> ChainPos {
        let pos = self.nodes.iter().filter(|n| n.location == l).count() as u32;
        ChainPos {
            chain: fnv(&format!("{:x}|{l}", self.chain_base)),
            pos,
        }
    }

    fn reach(&mut self, schedule: Schedule) -> Result<(), EngineError> {
        let p = self.procedure;
        let rank = p.topo_rank();
        let pre = Expr::and(p.initial_conjuncts());
        let init = self.abstraction.abstract_formula(&pre, self.masks[p.entry]);
        self.states[p.entry] = init.clone();
        self.nodes.push(ReachNode {
            location: p.entry,
            states: init,
            parent: None,
            sons: Vec::new(),
        });
        let key = |l: Loc, seq: usize| match schedule {
            Schedule::Topological => (rank[l], seq),
            Schedule::Fifo => (0, seq),
        };
        let mut work = BinaryHeap::from([Reverse((key(p.entry, 0), 0usize))]);
        while let Some(Reverse((_, n))) = work.pop() {
            self.processed.push(n);
            let l = self.nodes[n].location;
            for (ei, e) in p.out_edges(l) {
                let step = Step {
                    assumed: self.conjuncts.at(l),
                    src: self.masks[l],
                    dst: self.masks[e.to],
                    chain: Some(self.chain_at(l)),
                };
                let post = self.abstraction.abstract_post(&e.command, &step, &self.states[l], &self.nodes[n].states)?;
                let new = self.abstraction.dom.set_difference(&post, &self.states[e.to]);
                if new.is_empty() {
                    continue;
                }
                let id = self.nodes.len();
                self.states[e.to] = self.abstraction.dom.set_join(&self.states[e.to], &new);
                self.nodes.push(ReachNode {
                    location: e.to,
                    states: new,
                    parent: Some((n, ei)),
                    sons: Vec::new(),
                });
                self.nodes[n].sons.push((ei, id));
                work.push(Reverse((key(e.to, id), id)));
            }
        }
        Ok(())
    }

    /// Propagated conjuncts and the meaning of the reached heaps; `false`
    /// where nothing was reached.
    pub fn invariant_at(&self, l: Loc) -> Formula {
        if self.states[l].is_empty() {
            return Expr::Bool(false);
        }
        let mut parts = self.conjuncts.at(l);
        parts.push(self.heap_invariant(l));
        Expr::and(parts)
    }

    pub fn heap_invariant(&self, l: Loc) -> Formula {
        gamma_set(&self.abstraction.dom, &self.abstraction.formulas, &self.states[l])
    }

    pub fn invariant_named(&self, name: &str) -> Result<Formula, EngineError> {
        let l = self.procedure.loc(name).ok_or_else(|| EngineError::UnknownLocation(name.to_string()))?;
        Ok(self.invariant_at(l))
    }

    /// Locations where invariants are reported: entry, loop heads, exit.
    pub fn annotated(&self) -> Vec<Loc> {
        self.procedure.cut_points().into_iter().collect()
    }

    /// Edge sequences from `from` to the next annotated locations.
    pub fn paths_from(&self, from: Loc) -> Vec<Vec<usize>> {
        let p = self.procedure;
        let cuts = p.cut_points();
        let mut out = Vec::new();
        let mut stack: Vec<(Loc, Vec<usize>)> = vec![(from, Vec::new())];
        while let Some((l, path)) = stack.pop() {
            let succ: Vec<(usize, Loc)> = p.out_edges(l).map(|(i, e)| (i, e.to)).collect();
            for &(i, t) in succ.iter().rev() {
                let mut next = path.clone();
                next.push(i);
                if cuts.contains(&t) {
                    out.push(next);
                } else {
                    stack.push((t, next));
                }
            }
        }
        out.sort();
        out
    }

    /// One query per conclusion conjunct per path; paths into the exit
    /// target the postcondition.
    pub fn vcgen(&self) -> Result<Vec<Vc>, EngineError> {
        let p = self.procedure;
        let mut out = Vec::new();
        for from in self.annotated() {
            if from == p.exit {
                continue;
            }
            let context: Vec<Formula> = conjuncts(&self.invariant_at(from));
            for path in self.paths_from(from) {
                let to = p.edges[*path.last().unwrap()].to;
                let target = if to == p.exit { p.ensures.clone() } else { self.invariant_at(to) };
                let parts = conjuncts(&target);
                for (i, g) in parts.iter().enumerate() {
                    let mut goal = g.clone();
                    for &e in path.iter().rev() {
                        goal = wlp(&p.sig, &p.edges[e].command, &goal)?;
                    }
                    out.push(Vc {
                        from,
                        to,
                        edges: path.clone(),
                        conjunct: i + 1,
                        conjuncts: parts.len(),
                        conclusion: g.clone(),
                        query: Query::new(p.sig.clone(), goal).with_context(context.clone()),
                    });
                }
            }
        }
        Ok(out)
    }

    /// Location names from the root to the first node at `l`.
    pub fn trace_to(&self, l: Loc) -> Option<Vec<String>> {
        let mut n = self.nodes.iter().position(|x| x.location == l)?;
        let mut out = vec![self.procedure.locations[l].clone()];
        while let Some((parent, _)) = self.nodes[n].parent {
            n = parent;
            out.push(self.procedure.locations[self.nodes[n].location].clone());
        }
        out.reverse();
        Some(out)
    }

    pub fn predicate_names(&self) -> Vec<String> {
        self.abstraction.predicates.iter().map(|p| p.name.clone()).collect()
    }

    /// The reachability tree, one node per paragraph.
    pub fn tree_text(&self) -> String {
        let p = self.procedure;
        let names = self.predicate_names();
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = write!(out, "node {i} at {}", p.locations[n.location]);
            if let Some((parent, e)) = n.parent {
                let _ = write!(out, " from node {parent} by `{}`", p.edges[e].command);
            }
            let _ = writeln!(out);
            out.push_str(&dump_set(&self.abstraction.dom, &names, &n.states));
            out.push('\n');
        }
        out
    }
}
