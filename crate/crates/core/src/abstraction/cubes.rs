//! Search for the cubes that entail a formula.

use crate::heap::{gamma_cube, Cube};
use crate::logic::{eval_at, ConcreteState, Formula, Signature};
use crate::prover::{ChainPos, Prover, Query, Verdict};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Facts assumed in every query of one abstraction step.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context {
    pub conjuncts: Vec<Formula>,
    pub chain: Option<ChainPos>,
}

impl Context {
    pub fn new(conjuncts: Vec<Formula>) -> Self {
        Context {
            conjuncts,
            chain: None,
        }
    }

    pub fn in_chain(mut self, chain: Option<ChainPos>) -> Self {
        self.chain = chain;
        self
    }
}

/// The part of an abstraction that can be shared across threads.
pub(crate) struct Checker<'a> {
    pub prover: &'a Prover,
    pub sig: &'a Arc<Signature>,
    pub formulas: &'a [Formula],
    pub cube_max: usize,
    pub queries: &'a AtomicU64,
}

/// Complete cube of object `o` in `s` over the predicates in `over`.
pub fn cube_of(formulas: &[Formula], s: &ConcreteState, o: u8, over: u64) -> Cube {
    let mut c = Cube::top();
    for p in bits(over) {
        c = c.with(p, eval_at(s, &formulas[p], o).unwrap_or(false));
    }
    c
}

pub fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |p| mask & (1 << p) != 0)
}

fn combinations(items: &[usize], len: usize, out: &mut Vec<Vec<usize>>) {
    fn go(items: &[usize], len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < len - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, len, i + 1, cur, out);
            cur.pop();
        }
    }
    go(items, len, 0, &mut Vec::new(), out);
}

impl Checker<'_> {
    pub fn query(&self, ctx: &Context, assumption: Formula, goal: Formula) -> Verdict {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let q = Query::new(self.sig.clone(), goal)
            .with_context(ctx.conjuncts.clone())
            .assume(assumption)
            .in_chain(ctx.chain);
        self.prover.check(&q)
    }

    /// Cubes over `over` of at most `cube_max` literals whose meaning
    /// entails `goal` under `ctx`, shortest first, minimal under `⊑`.
    /// `seed` cubes are known to entail the goal.
    pub fn entailing(&self, ctx: &Context, goal: &Formula, over: u64, seed: &[Cube]) -> Vec<Cube> {
        let preds: Vec<usize> = bits(over).collect();
        let mut found: Vec<Cube> = Vec::new();
        let mut refuted: Vec<Cube> = Vec::new();
        for len in 0..=self.cube_max.min(preds.len()) {
            let mut combos = Vec::new();
            combinations(&preds, len, &mut combos);
            for combo in combos {
                for signs in 0..1u64 << len {
                    let c = combo
                        .iter()
                        .enumerate()
                        .fold(Cube::top(), |c, (i, &p)| c.with(p, signs & (1 << i) != 0));
                    if found.iter().any(|d| c.leq(d)) || refuted.iter().any(|w| w.leq(&c)) {
                        continue;
                    }
                    if seed.iter().any(|d| c.leq(d)) {
                        found.push(c);
                        continue;
                    }
                    match self.query(ctx, gamma_cube(self.formulas, &c), goal.clone()) {
                        Verdict::Valid => found.push(c),
                        Verdict::NotValid(Some(w)) => refuted.push(cube_of(self.formulas, &w.state, w.v, over)),
                        _ => {}
                    }
                }
            }
            if found.contains(&Cube::top()) {
                break;
            }
        }
        found
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_combinations() {
        let mut out = Vec::new();
        combinations(&[1, 3, 5, 7], 2, &mut out);
        assert_eq!(out.len(), 6);
        assert_eq!(out[0], vec![1, 3]);
        assert_eq!(out[5], vec![5, 7]);
        out.clear();
        combinations(&[1, 3], 0, &mut out);
        assert_eq!(out, vec![Vec::<usize>::new()]);
    }
}
