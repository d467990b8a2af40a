mod common;

use boheap::heap::{gamma_cube, gamma_heap, gamma_set, Cube, HeapDomain, HeapSet};
use boheap::logic::ConcreteState;
use boheap::oracle::states;
use boheap::prover::Scope;
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn small_states() -> &'static Vec<ConcreteState> {
    static CELL: OnceLock<Vec<ConcreteState>> = OnceLock::new();
    CELL.get_or_init(|| {
        let scope = Scope {
            objects: 2,
            data_max: 1,
        };
        states(&small_sig(), scope, &[])
    })
}

fn setup(seed: u64) -> (ChaCha8Rng, HeapDomain) {
    let rng = ChaCha8Rng::seed_from_u64(seed);
    (rng, HeapDomain::new(4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn heaps_form_a_lattice(seed in any::<u64>()) {
        let (mut rng, dom) = setup(seed);
        let (a, b, c) = (random_heap(&mut rng, &dom), random_heap(&mut rng, &dom), random_heap(&mut rng, &dom));
        prop_assert_eq!(dom.join(a, b), dom.join(b, a));
        prop_assert_eq!(dom.meet(a, b), dom.meet(b, a));
        prop_assert_eq!(dom.join(a, dom.meet(a, b)), a);
        prop_assert_eq!(dom.meet(a, dom.join(a, b)), a);
        prop_assert_eq!(dom.join(a, dom.join(b, c)), dom.join(dom.join(a, b), c));
        prop_assert_eq!(dom.leq(a, b), dom.meet(a, b) == a);
        prop_assert!(dom.leq(dom.bottom(), a) && dom.leq(a, dom.top()));
        prop_assert_eq!(dom.complement(dom.complement(a)), a);
    }

    #[test]
    fn cubes_describe_the_heap(seed in any::<u64>()) {
        let (mut rng, dom) = setup(seed);
        let h = random_heap(&mut rng, &dom);
        prop_assert_eq!(dom.from_cubes(&dom.cubes(h)), h);
        let over = dom.support(h);
        let complete = dom.complete_cubes(h, over);
        prop_assert!(complete.iter().all(|c| c.is_complete(over) && dom.in_c(c, h)));
        prop_assert_eq!(dom.from_cubes(&complete), h);
        if let Some(hull) = dom.hull(h) {
            prop_assert!(dom.leq(h, dom.cube_heap(&hull)));
        }
        let dropped = random_cube(&mut rng, 4).mask;
        prop_assert!(dom.leq(h, dom.forget(h, dropped)));
        prop_assert_eq!(dom.support(dom.forget(h, dropped)) & dropped, 0);
    }

    #[test]
    fn cube_order_matches_heap_order(seed in any::<u64>()) {
        let (mut rng, dom) = setup(seed);
        let (a, b) = (random_cube(&mut rng, 4), random_cube(&mut rng, 4));
        prop_assert_eq!(a.leq(&b), dom.leq(dom.cube_heap(&a), dom.cube_heap(&b)));
        let j = a.join(&b);
        prop_assert!(a.leq(&j) && b.leq(&j));
        match a.meet(&b) {
            Some(m) => prop_assert_eq!(dom.cube_heap(&m), dom.meet(dom.cube_heap(&a), dom.cube_heap(&b))),
            None => prop_assert!(dom.is_bottom(dom.meet(dom.cube_heap(&a), dom.cube_heap(&b)))),
        }
    }

    #[test]
    fn heap_set_operations(seed in any::<u64>()) {
        let (mut rng, dom) = setup(seed);
        let (a, b) = (random_set(&mut rng, &dom), random_set(&mut rng, &dom));
        let j = dom.set_join(&a, &b);
        prop_assert!(dom.set_leq(&a, &j) && dom.set_leq(&b, &j));
        let m = dom.set_meet(&a, &b);
        prop_assert!(dom.set_leq(&m, &a) && dom.set_leq(&m, &b));
        let d = dom.set_difference(&a, &b);
        prop_assert!(dom.set_leq(&a, &dom.set_join(&d, &b)));
        prop_assert!(d.heaps().iter().all(|&h| !b.heaps().iter().any(|&g| dom.leq(h, g))));
        prop_assert_eq!(dom.canon(j.heaps().iter().copied()), j.clone());
        prop_assert!(dom.leq(dom.flatten(&j), dom.join(dom.flatten(&a), dom.flatten(&b))));
    }

    #[test]
    fn meaning_is_monotone(seed in any::<u64>()) {
        let (mut rng, _) = setup(seed);
        let preds = random_predicates(&mut rng, 4);
        let fs: Vec<_> = preds.iter().map(|p| p.formula.clone()).collect();
        let dom = HeapDomain::new(preds.len());
        let a = random_heap(&mut rng, &dom);
        let b = dom.join(a, random_heap(&mut rng, &dom));
        prop_assert!(entails_in(small_states(), &gamma_heap(&dom, &fs, a), &gamma_heap(&dom, &fs, b)));
        let s = random_set(&mut rng, &dom);
        let t = dom.set_join(&s, &random_set(&mut rng, &dom));
        prop_assert!(entails_in(small_states(), &gamma_set(&dom, &fs, &s), &gamma_set(&dom, &fs, &t)));
    }
}

#[test]
fn empty_cube_and_set_meanings() {
    let fs = vec![boheap::logic::parse("v = null").unwrap()];
    let dom = HeapDomain::new(1);
    assert_eq!(gamma_cube(&fs, &Cube::top()), boheap::logic::Expr::Bool(true));
    assert_eq!(gamma_set(&dom, &fs, &HeapSet::empty()), boheap::logic::Expr::Bool(false));
    assert!(dom.is_bottom(dom.flatten(&HeapSet::empty())));
}
