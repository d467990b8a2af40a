//! Quantifier instantiation at objects named by program variables.

use crate::heap::{gamma_cube, Cube, Heap, HeapDomain, HeapSet};
use crate::logic::{substitute, Expr, Formula, Name, FREE_VAR};
use std::collections::BTreeMap;

/// A context formula together with whether every variable contributed.
/// A variable contributes nothing when no cube of the heap is positive in
/// its `(x = v)` predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub formula: Formula,
    pub complete: bool,
}

/// `∧_x γ(hull(h ⊓ [(x = v) ↦ 1]))[v := x]` over the given variable and
/// predicate pairs.
pub fn instantiate(dom: &HeapDomain, formulas: &[Formula], points_to: &[(Name, usize)], h: Heap) -> Instance {
    let mut parts = Vec::new();
    let mut complete = true;
    for (x, p) in points_to {
        let at = dom.meet(h, dom.cube_heap(&Cube::literal(*p, true)));
        match dom.hull(at) {
            Some(c) => {
                let binding = BTreeMap::from([(FREE_VAR.to_string(), Expr::var(x.as_str()))]);
                parts.push(substitute(&gamma_cube(formulas, &c), &binding));
            }
            None => complete = false,
        }
    }
    Instance {
        formula: Expr::and(parts),
        complete,
    }
}

/// `instantiate(⊔ s)`.
pub fn kappa(dom: &HeapDomain, formulas: &[Formula], points_to: &[(Name, usize)], s: &HeapSet) -> Instance {
    instantiate(dom, formulas, points_to, dom.flatten(s))
}
