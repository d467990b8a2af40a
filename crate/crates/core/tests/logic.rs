mod common;

use boheap::logic::{alpha_normalize, conjuncts, eval, eval_at, parse, print, substitute, Expr, ConcreteState};
use boheap::oracle::states;
use boheap::prover::Scope;
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
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

fn same_meaning(a: &Expr, b: &Expr) -> bool {
    small_states()
        .iter()
        .all(|s| s.objects().all(|o| eval_at(s, a, o).unwrap() == eval_at(s, b, o).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_then_parsing_is_the_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Gen::new(&mut rng);
        g.with_v = true;
        let f = g.formula(3);
        let text = print(&f);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &f, "{}", text);
        prop_assert!(small_sig().check_formula(&back).is_ok());
    }

    #[test]
    fn alpha_normal_form_keeps_the_meaning(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Gen::new(&mut rng);
        g.with_v = true;
        let f = g.formula(2);
        let n = alpha_normalize(&f);
        prop_assert_eq!(alpha_normalize(&n), n.clone());
        prop_assert!(same_meaning(&f, &n));
    }

    #[test]
    fn conjuncts_rebuild_the_formula(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Gen::new(&mut rng);
        let f = Expr::and([g.formula(2), g.formula(1)]);
        prop_assert!(same_meaning(&f, &Expr::and(conjuncts(&f))));
    }

    #[test]
    fn substitution_commutes_with_evaluation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Gen::new(&mut rng);
        let f = g.formula(2);
        let t = g.obj(1);
        let sub = substitute(&f, &BTreeMap::from([("x".to_string(), t.clone())]));
        for s in small_states() {
            let mut u = s.clone();
            let o = match boheap::logic::eval_term(s, &t, &[]).unwrap() {
                boheap::logic::Value::Obj(o) => o,
                v => panic!("{v:?}"),
            };
            u.objs.insert("x".into(), o);
            prop_assert_eq!(eval(s, &sub).unwrap(), eval(&u, &f).unwrap());
        }
    }
}
