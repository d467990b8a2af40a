mod common;

use boheap::abstraction::{self, cube_of, split, Abstraction, Context, Step};
use boheap::engine::{analyze, Options};
use boheap::heap::{gamma_set, Cube, HeapSet};
use boheap::logic::{eval, eval_at, wlp, ConcreteState, Expr};
use boheap::oracle::{self, concrete_post, in_scope};
use boheap::prover::{Parallelism, Prover, Scope};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

const SMALL: Scope = Scope {
    objects: 2,
    data_max: 1,
};

fn states() -> &'static Vec<ConcreteState> {
    static CELL: OnceLock<Vec<ConcreteState>> = OnceLock::new();
    CELL.get_or_init(|| oracle::states(&small_sig(), SMALL, &[]))
}

fn prover() -> &'static Prover {
    static CELL: OnceLock<Prover> = OnceLock::new();
    CELL.get_or_init(|| Prover::new(SMALL))
}

fn instance(seed: u64, max: usize) -> (ChaCha8Rng, Abstraction<'static>, HeapSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let preds = random_predicates(&mut rng, max);
    let abs = Abstraction::new(small_sig(), preds, prover(), abstraction::Config::default());
    let s = random_set(&mut rng, &abs.dom);
    (rng, abs, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn split_isolates_each_singleton(seed in any::<u64>()) {
        let (_, abs, s) = instance(seed, 4);
        let t = split(&abs.dom, abs.singletons, &s);
        let mean = |x: &HeapSet| models(states(), &gamma_set(&abs.dom, &abs.formulas, x));
        prop_assert_eq!(mean(&s), mean(&t));
        for &h in t.heaps() {
            prop_assert!(!abs.dom.is_bottom(h));
            for p in 0..abs.dom.predicates() {
                if abs.singletons & 1 << p == 0 {
                    continue;
                }
                let pos = abs.dom.meet(h, abs.dom.cube_heap(&Cube::literal(p, true)));
                let over = abs.dom.support(pos) | 1 << p;
                prop_assert!(abs.dom.complete_cubes(pos, over).len() <= 1);
            }
        }
    }

    #[test]
    fn clean_is_deflationary_and_idempotent(seed in any::<u64>()) {
        let (mut rng, abs, s) = instance(seed, 4);
        let f = Gen::new(&mut rng).formula(2);
        let once = abs.clean(&f, &s, abs.all());
        prop_assert!(abs.dom.set_leq(&once, &s));
        prop_assert_eq!(abs.clean(&f, &once, abs.all()), once);
    }

    #[test]
    fn abstracting_a_formula_overapproximates_it(seed in any::<u64>()) {
        let (mut rng, abs, _) = instance(seed, 4);
        let f = Gen::new(&mut rng).formula(2);
        let s = abs.abstract_formula(&f, abs.all());
        prop_assert!(entails_in(states(), &f, &gamma_set(&abs.dom, &abs.formulas, &s)));
    }

    #[test]
    fn abstract_wlp_cubes_entail_the_wlp(seed in any::<u64>()) {
        let (mut rng, abs, _) = instance(seed, 3);
        let c = random_command(&mut rng);
        for p in 0..abs.dom.predicates() {
            for lit in [abs.formulas[p].clone(), Expr::negate(abs.formulas[p].clone())] {
                let h = abs.wlp_sharp(&c, &Context::default(), &lit, abs.all()).unwrap();
                let w = wlp(&abs.sig, &c, &lit).unwrap();
                for s in states() {
                    for o in s.objects() {
                        let cube = cube_of(&abs.formulas, s, o, abs.all());
                        if abs.dom.in_c(&cube, h) {
                            prop_assert!(eval_at(s, &w, o).unwrap(), "{} in {} at {}", c, s, o);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn abstract_post_overapproximates(seed in any::<u64>()) {
        let (mut rng, abs, s) = instance(seed, 4);
        let c = random_command(&mut rng);
        let step = Step { src: abs.all(), dst: abs.all(), ..Step::default() };
        let post = abs.abstract_post(&c, &step, &s, &s).unwrap();
        let gs = gamma_set(&abs.dom, &abs.formulas, &s);
        let gp = gamma_set(&abs.dom, &abs.formulas, &post);
        for st in states().iter().filter(|st| eval(st, &gs).unwrap()) {
            for t in concrete_post(&c, st).unwrap().into_iter().filter(|t| in_scope(t, SMALL)) {
                prop_assert!(eval(&t, &gp).unwrap());
            }
        }
    }

    #[test]
    fn kappa_is_implied(seed in any::<u64>()) {
        let (_, abs, s) = instance(seed, 4);
        let k = abs.kappa(&s);
        prop_assert!(entails_in(states(), &gamma_set(&abs.dom, &abs.formulas, &s), &k.formula));
    }
}

#[test]
fn kappa_of_nothing_is_true() {
    let (_, abs, _) = instance(1, 3);
    let k = abs.kappa(&HeapSet::empty());
    assert_eq!(k.formula, Expr::Bool(true));
}

#[test]
fn sequential_and_parallel_transitions_agree() {
    for seed in 0..24 {
        let (mut rng, _, _) = instance(seed, 3);
        let preds = random_predicates(&mut rng, 3);
        let c = random_command(&mut rng);
        let rel = |par: Parallelism| {
            let cfg = abstraction::Config {
                parallelism: par,
                ..Default::default()
            };
            let abs = Abstraction::new(small_sig(), preds.clone(), prover(), cfg);
            let t = abs.abstract_transition(&c, &Context::default(), abs.all(), abs.all()).unwrap();
            abs.dom.relation_cubes(t.relation)
        };
        assert_eq!(rel(Parallelism::Sequential), rel(Parallelism::Parallel), "{c}");
    }
}

#[test]
fn memo_reuses_transitions_without_changing_results() {
    let p = load("list_reverse");
    let run = |memo: bool| {
        let prover = Prover::new(SMALL);
        let opts = Options {
            abstraction: abstraction::Config {
                memo,
                ..Default::default()
            },
            ..Options::default()
        };
        let mut a = analyze(&p, &prover, &opts).unwrap();
        let text = a.check(&prover).unwrap().to_text();
        (text, a.abstraction.stats())
    };
    let (with, s1) = run(true);
    let (without, s2) = run(false);
    assert_eq!(with, without);
    assert_eq!(s2.transition_hits, 0);
    assert!(s1.transitions <= s2.transitions);
}

#[test]
fn the_memo_key_ignores_bound_variable_names() {
    let c = boheap::logic::GuardedCommand::skip().assign("x", Expr::var("y"));
    let a = Context::new(vec![boheap::logic::parse("ALL a. a..f ~= x").unwrap()]);
    let b = Context::new(vec![boheap::logic::parse("ALL b. b..f ~= x").unwrap()]);
    assert_eq!(Abstraction::transition_key(&c, &a, 3, 3), Abstraction::transition_key(&c, &b, 3, 3));
    assert_ne!(Abstraction::transition_key(&c, &a, 3, 3), Abstraction::transition_key(&c, &a, 3, 1));
}
