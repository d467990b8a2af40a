//! Splitting on singleton predicates and semantic cleaning.

use super::cubes::{bits, cube_of, Checker, Context};
use crate::heap::{gamma_cube, gamma_heap, Cube, Heap, HeapDomain, HeapSet};
use crate::logic::{conjuncts, Expr, Formula};
use crate::prover::Verdict;

/// One heap per complete cube positive in `p`, each joined with the part
/// of `h` negative in `p`. Completion is over the support of that part.
pub fn split_heap(dom: &HeapDomain, h: Heap, p: usize) -> Vec<Heap> {
    let pos = dom.meet(h, dom.cube_heap(&Cube::literal(p, true)));
    if dom.is_bottom(pos) {
        return vec![h];
    }
    let neg = dom.meet(h, dom.cube_heap(&Cube::literal(p, false)));
    let over = dom.support(pos) | (1 << p);
    dom.complete_cubes(pos, over)
        .iter()
        .map(|c| dom.join(neg, dom.cube_heap(c)))
        .collect()
}

/// Splits until every heap has at most one complete cube positive in each
/// singleton predicate.
pub fn split(dom: &HeapDomain, singletons: u64, s: &HeapSet) -> HeapSet {
    let mut work: Vec<Heap> = s.heaps().to_vec();
    let mut done = Vec::new();
    while let Some(h) = work.pop() {
        if dom.is_bottom(h) {
            continue;
        }
        match bits(singletons).map(|p| split_heap(dom, h, p)).find(|parts| parts.len() > 1) {
            Some(parts) => work.extend(parts),
            None => done.push(h),
        }
    }
    dom.canon(done)
}

/// Cleans one heap: `None` if `f ∧ γ(h)` is unsatisfiable, otherwise the
/// heap of complete cubes over `over` that some model realizes.
pub(crate) fn clean_heap(
    chk: &Checker,
    dom: &HeapDomain,
    f: &[Formula],
    h: Heap,
    over: u64,
) -> Option<Heap> {
    if dom.is_bottom(h) {
        return None;
    }
    let over = over | dom.support(h);
    let mut context = f.to_vec();
    context.push(gamma_heap(dom, chk.formulas, h));
    let ctx = Context::new(context);
    let mut seen: Vec<Cube> = Vec::new();
    let harvest = |v: &Verdict, seen: &mut Vec<Cube>| {
        if let Some(w) = v.witness() {
            for o in w.state.objects() {
                let c = cube_of(chk.formulas, &w.state, o, over);
                if !seen.contains(&c) {
                    seen.push(c);
                }
            }
        }
    };
    let v = chk.query(&ctx, Expr::Bool(true), Expr::Bool(false));
    if v.is_valid() {
        return None;
    }
    harvest(&v, &mut seen);
    let order: Vec<usize> = bits(over).collect();
    let mut kept: Vec<Cube> = Vec::new();
    let mut stack = vec![(Cube::top(), 0usize)];
    while let Some((c, depth)) = stack.pop() {
        if dom.is_bottom(dom.meet(h, dom.cube_heap(&c))) {
            continue;
        }
        let known = seen.iter().any(|s| s.leq(&c));
        if !known {
            let v = chk.query(&ctx, gamma_cube(chk.formulas, &c), Expr::Bool(false));
            if v.is_valid() {
                continue;
            }
            harvest(&v, &mut seen);
        }
        if depth == order.len() {
            kept.push(c);
            continue;
        }
        let p = order[depth];
        stack.push((c.with(p, true), depth + 1));
        stack.push((c.with(p, false), depth + 1));
    }
    let out = dom.from_cubes(&kept);
    (!dom.is_bottom(out)).then_some(out)
}

pub(crate) fn clean(chk: &Checker, dom: &HeapDomain, f: &Formula, s: &HeapSet, over: u64) -> HeapSet {
    let parts: Vec<Formula> = conjuncts(f).into_iter().filter(|c| *c != Expr::Bool(true)).collect();
    if parts.contains(&Expr::Bool(false)) {
        return HeapSet::empty();
    }
    dom.canon(s.heaps().iter().filter_map(|&h| clean_heap(chk, dom, &parts, h, over)))
}
