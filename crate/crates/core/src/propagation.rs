//! Propagation of precondition conjuncts across the control-flow graph.
//!
//! Every conjunct starts out assumed at every location. A conjunct is
//! dropped at the target of an edge if it was dropped at the source, or
//! if the conjuncts remaining at the source do not entail its weakest
//! precondition under the edge's command.

use crate::engine::{Loc, Procedure};
use crate::logic::{alpha_normalize, wlp, Expr, Formula, GuardedCommand, SortError};
use crate::prover::{Prover, Query};
use std::collections::BTreeSet;

/// The conjuncts assumed at each location, as indices into `conjuncts`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjunctMap {
    pub conjuncts: Vec<Formula>,
    pub alive: Vec<BTreeSet<usize>>,
}

impl ConjunctMap {
    /// All conjuncts at all locations; duplicates up to alpha
    /// equivalence are merged.
    pub fn full(conjuncts: Vec<Formula>, locations: usize) -> Self {
        let mut seen = BTreeSet::new();
        let conjuncts: Vec<Formula> = conjuncts
            .into_iter()
            .filter(|c| *c != Expr::Bool(true))
            .filter(|c| seen.insert(alpha_normalize(c)))
            .collect();
        let all: BTreeSet<usize> = (0..conjuncts.len()).collect();
        ConjunctMap {
            conjuncts,
            alive: vec![all; locations],
        }
    }

    pub fn at(&self, l: Loc) -> Vec<Formula> {
        self.alive[l].iter().map(|&i| self.conjuncts[i].clone()).collect()
    }

    pub fn formula_at(&self, l: Loc) -> Formula {
        Expr::and(self.at(l))
    }
}

/// Whether `assumed` entails `wlp(c, f)`; unknown counts as no.
pub fn preserved(prover: &Prover, p: &Procedure, assumed: &[Formula], c: &GuardedCommand, f: &Formula) -> Result<bool, SortError> {
    let goal = wlp(&p.sig, c, f)?;
    let q = Query::new(p.sig.clone(), goal).with_context(assumed.to_vec());
    Ok(prover.check(&q).is_valid())
}

/// Greatest fixpoint from `start`, visiting the out-edges of locations in
/// the given priority order until nothing changes.
pub fn propagate_from(prover: &Prover, p: &Procedure, start: ConjunctMap, order: &[Loc]) -> Result<ConjunctMap, SortError> {
    let mut map = start;
    let mut dirty = vec![true; p.locations.len()];
    while let Some(&l) = order.iter().find(|&&l| dirty[l]) {
        dirty[l] = false;
        let assumed = map.at(l);
        for (_, e) in p.out_edges(l) {
            let mut dropped = Vec::new();
            for &i in &map.alive[e.to] {
                if !map.alive[l].contains(&i) || !preserved(prover, p, &assumed, &e.command, &map.conjuncts[i])? {
                    dropped.push(i);
                }
            }
            if !dropped.is_empty() {
                for i in dropped {
                    map.alive[e.to].remove(&i);
                }
                dirty[e.to] = true;
            }
        }
    }
    Ok(map)
}

/// Propagates the conjuncts of the precondition, including the initial
/// values of locals.
pub fn propagate(prover: &Prover, p: &Procedure) -> Result<ConjunctMap, SortError> {
    let start = ConjunctMap::full(p.initial_conjuncts(), p.locations.len());
    propagate_from(prover, p, start, &p.reverse_postorder())
}
