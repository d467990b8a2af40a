//! Predicates worth tracking at each location.
//!
//! A symbol is live at a location if some path from there reads it before
//! overwriting it, counting the postcondition as a read at the exit. A
//! predicate is relevant where one of its symbols is live, where it has
//! no program symbols, or everywhere when marked `track`.

use super::procedure::{Loc, Procedure};
use crate::logic::{Name, Predicate, Update, FREE_VAR};
use std::collections::BTreeSet;

pub fn live_symbols(p: &Procedure) -> Vec<BTreeSet<Name>> {
    let mut live = vec![BTreeSet::new(); p.locations.len()];
    live[p.exit] = p.ensures.symbols();
    let mut changed = true;
    while changed {
        changed = false;
        for e in &p.edges {
            let c = &e.command;
            let mut kill: BTreeSet<Name> = c
                .updates
                .iter()
                .filter_map(|u| match u {
                    Update::Var(x, _) => Some(x.clone()),
                    Update::Field(..) => None,
                })
                .collect();
            kill.extend(c.havoc.iter().cloned());
            let mut need: BTreeSet<Name> = live[e.to].difference(&kill).cloned().collect();
            need.extend(c.read());
            need.remove(FREE_VAR);
            let before = live[e.from].len();
            live[e.from].extend(need);
            changed |= live[e.from].len() != before;
        }
    }
    live
}

pub fn relevant(pred: &Predicate, live: &BTreeSet<Name>) -> bool {
    let mut syms = pred.symbols();
    syms.remove(FREE_VAR);
    pred.track || syms.is_empty() || !syms.is_disjoint(live)
}

/// Mask of relevant predicates per location; every predicate everywhere
/// when `enabled` is false.
pub fn relevance_masks(p: &Procedure, preds: &[Predicate], enabled: bool) -> Vec<u64> {
    let all = if preds.len() == 64 { u64::MAX } else { (1u64 << preds.len()) - 1 };
    if !enabled {
        return vec![all; p.locations.len()];
    }
    let live = live_symbols(p);
    (0..p.locations.len())
        .map(|l: Loc| {
            preds
                .iter()
                .enumerate()
                .filter(|(_, q)| relevant(q, &live[l]))
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .collect()
}
