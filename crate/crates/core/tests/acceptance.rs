//! Acceptance gate: one line per criterion, then a single verdict.

mod common;

use boheap::abstraction::{self, split, Abstraction, Context};
use boheap::engine::{analyze, Options, Procedure, Report, Status};
use boheap::heap::{gamma_set, HeapDomain, HeapSet};
use boheap::logic::{alpha_normalize, conjuncts, eval, eval_at, parse, wlp, Expr, Formula, Predicate, Signature};
use boheap::oracle::{self, canonical, concrete_post, concrete_reach, in_scope, ConcreteReachSet};
use boheap::propagation::propagate;
use boheap::prover::{Prover, Query, Scope};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, OnceLock};
use std::time::Instant;

type Outcome = Result<String, String>;

const CORPUS_SCOPE: Scope = Scope {
    objects: 3,
    data_max: 7,
};
const SMALL: Scope = Scope {
    objects: 2,
    data_max: 1,
};

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn reach_sets() -> &'static Vec<(String, Procedure, ConcreteReachSet)> {
    static CELL: OnceLock<Vec<(String, Procedure, ConcreteReachSet)>> = OnceLock::new();
    CELL.get_or_init(|| {
        corpus()
            .into_iter()
            .map(|(n, p)| {
                let r = concrete_reach(&p, CORPUS_SCOPE, 5_000_000).unwrap();
                (n, p, r)
            })
            .collect()
    })
}

fn run(p: &Procedure, prover: &Prover) -> Report {
    let mut a = analyze(p, prover, &Options::default()).unwrap();
    a.check(prover).unwrap()
}

fn small_states() -> &'static Vec<boheap::logic::ConcreteState> {
    static CELL: OnceLock<Vec<boheap::logic::ConcreteState>> = OnceLock::new();
    CELL.get_or_init(|| oracle::states(&small_sig(), SMALL, &[]))
}

fn soundness() -> Outcome {
    let mut checked = 0;
    for (name, p, reach) in reach_sets() {
        let prover = Prover::new(CORPUS_SCOPE);
        let a = analyze(p, &prover, &Options::default()).map_err(|e| e.to_string())?;
        for l in 0..p.locations.len() {
            let inv = a.invariant_at(l);
            for s in reach.at(l) {
                ensure(eval(s, &inv).unwrap(), || format!("{name}: state at {} violates the invariant: {s}", p.locations[l]))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} reachable states over {} procedures", reach_sets().len()))
}

fn sorted_insert() -> Outcome {
    let p = load("sorted_insert");
    let prover = Prover::new(CORPUS_SCOPE);
    let mut a = analyze(&p, &prover, &Options::default()).map_err(|e| e.to_string())?;
    let entails = |at: &str, goal: &str| -> Result<(), String> {
        let ctx = conjuncts(&a.invariant_named(at).unwrap());
        let q = Query::new(p.sig.clone(), parse(goal).unwrap()).with_context(ctx);
        let v = prover.check(&q);
        ensure(v.is_valid(), || format!("invariant at {at} does not entail `{goal}`: {}", v.label()))
    };
    entails("head", "content = old_content")?;
    entails("head", "curr ~= null --> curr : content")?;
    entails("exit", "content = old_content Un {n}")?;
    let report = a.check(&prover).map_err(|e| e.to_string())?;
    let (valid, bad, unknown) = report.counts();
    ensure(report.status == Status::Verified, || format!("{valid} valid, {bad} not valid, {unknown} unknown"))?;
    let sorted = conjuncts(&p.ensures)
        .into_iter()
        .find(|c| c.symbols().contains("data"))
        .ok_or("no sortedness conjunct")?
        .to_string();
    let fig = report
        .vcs
        .iter()
        .filter(|r| r.path.len() == 3 && r.path[1] == "fix" && r.conclusion == sorted && r.verdict.is_valid())
        .count();
    ensure(fig == 2, || format!("expected the sortedness condition on both insertion paths, found {fig}"))?;
    Ok(format!("loop-head entailments hold, {valid}/{} conditions valid", report.vcs.len()))
}

fn random_instance(rng: &mut ChaCha8Rng, max: usize) -> (Vec<Predicate>, HeapDomain, HeapSet) {
    let preds = random_predicates(rng, max);
    let dom = HeapDomain::new(preds.len());
    let s = random_set(rng, &dom);
    (preds, dom, s)
}

fn formulas(preds: &[Predicate]) -> Vec<Formula> {
    preds.iter().map(|p| p.formula.clone()).collect()
}

fn split_preserves_meaning() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let states = small_states();
    let mut grown = 0;
    for i in 0..200 {
        let (preds, dom, s) = random_instance(&mut rng, 4);
        let singletons = preds.iter().enumerate().filter(|(_, p)| p.singleton).fold(0, |m, (i, _)| m | 1 << i);
        let t = split(&dom, singletons, &s);
        let fs = formulas(&preds);
        ensure(models(states, &gamma_set(&dom, &fs, &s)) == models(states, &gamma_set(&dom, &fs, &t)), || {
            format!("instance {i}: split changed the meaning")
        })?;
        grown += (t.len() > s.len()) as usize;
    }
    Ok(format!("200 sets, {grown} split into more heaps"))
}

fn clean_sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let states = small_states();
    let prover = Prover::new(SMALL);
    let mut shrunk = 0;
    for i in 0..200 {
        let (preds, _, _) = random_instance(&mut rng, 4);
        let abs = Abstraction::new(small_sig(), preds, &prover, abstraction::Config::default());
        let s = random_set(&mut rng, &abs.dom);
        let f = Gen::new(&mut rng).formula(2);
        let c = abs.clean(&f, &s, abs.all());
        let gs = gamma_set(&abs.dom, &abs.formulas, &s);
        let gc = gamma_set(&abs.dom, &abs.formulas, &c);
        ensure(entails_in(states, &Expr::and([f.clone(), gs.clone()]), &gc), || format!("instance {i}: F & gamma(S) does not entail gamma(clean)"))?;
        ensure(entails_in(states, &gc, &gs), || format!("instance {i}: gamma(clean) does not entail gamma(S)"))?;
        shrunk += (!abs.dom.set_leq(&s, &c)) as usize;
    }
    Ok(format!("200 instances, {shrunk} strictly cleaned"))
}

fn cartesian_overapproximates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let states = small_states();
    let prover = Prover::new(SMALL);
    let mut pairs = 0;
    for i in 0..100 {
        let (preds, _, _) = random_instance(&mut rng, 4);
        let abs = Abstraction::new(small_sig(), preds, &prover, abstraction::Config::default());
        let s = random_set(&mut rng, &abs.dom);
        let c = random_command(&mut rng);
        let post = abs.cartesian_post(&c, &Context::default(), &s, abs.all(), abs.all()).unwrap();
        let gs = gamma_set(&abs.dom, &abs.formulas, &s);
        let gp = gamma_set(&abs.dom, &abs.formulas, &post);
        for st in states.iter().filter(|st| eval(st, &gs).unwrap()) {
            for t in concrete_post(&c, st).unwrap().into_iter().filter(|t| in_scope(t, SMALL)) {
                ensure(eval(&t, &gp).unwrap(), || format!("instance {i}: `{c}` leaves the post from {st}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("100 instances, {pairs} concrete transitions covered"))
}

fn cartesian_definitions_agree() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let prover = Prover::new(SMALL);
    for i in 0..100 {
        let (preds, _, _) = random_instance(&mut rng, 3);
        let abs = Abstraction::new(small_sig(), preds, &prover, abstraction::Config::default());
        let s = random_set(&mut rng, &abs.dom);
        let c = random_command(&mut rng);
        let ctx = Context::default();
        let a = abs.cartesian_post(&c, &ctx, &s, abs.all(), abs.all()).unwrap();
        let b = abs.cartesian_post_direct(&c, &ctx, &s, abs.all(), abs.all()).unwrap();
        ensure(abs.dom.set_leq(&a, &b) && abs.dom.set_leq(&b, &a), || format!("instance {i}: posts differ under `{c}`"))?;
    }
    Ok("100 instances equal up to the order".into())
}

/// Heap set whose every heap has a cube positive in predicate 0.
fn pointed_set(rng: &mut ChaCha8Rng, dom: &HeapDomain) -> HeapSet {
    let s = random_set(rng, dom);
    let heaps: Vec<_> = s
        .heaps()
        .iter()
        .map(|&h| {
            let c = random_cube(rng, dom.predicates()).with(0, true);
            dom.join(h, dom.cube_heap(&c))
        })
        .collect();
    dom.canon(heaps)
}

fn kappa_contract() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let states = small_states();
    let prover = Prover::new(SMALL);
    let pool = predicate_pool();
    let with_x = |rng: &mut ChaCha8Rng| {
        let mut preds = vec![pool[0].clone()];
        preds.extend(random_predicates(rng, 3).into_iter().filter(|p| *p != pool[0]));
        preds
    };
    for i in 0..100 {
        let abs = Abstraction::new(small_sig(), with_x(&mut rng), &prover, abstraction::Config::default());
        let s = random_set(&mut rng, &abs.dom);
        let k = abs.kappa(&s);
        ensure(entails_in(states, &gamma_set(&abs.dom, &abs.formulas, &s), &k.formula), || {
            format!("set {i}: gamma does not entail kappa {}", k.formula)
        })?;
    }
    for i in 0..20 {
        let abs = Abstraction::new(small_sig(), with_x(&mut rng), &prover, abstraction::Config::default());
        let mut s = pointed_set(&mut rng, &abs.dom);
        for step in 0..5 {
            let bigger = abs.dom.set_join(&s, &pointed_set(&mut rng, &abs.dom));
            let widened: Vec<_> = bigger
                .heaps()
                .iter()
                .map(|&h| {
                    if rng.gen_bool(0.5) {
                        abs.dom.join(h, abs.dom.cube_heap(&random_cube(&mut rng, abs.dom.predicates())))
                    } else {
                        h
                    }
                })
                .collect();
            let t = abs.dom.canon(widened);
            ensure(abs.dom.set_leq(&s, &t), || format!("chain {i}: step {step} is not increasing"))?;
            let (a, b) = (abs.kappa(&s), abs.kappa(&t));
            ensure(a.complete && b.complete, || format!("chain {i}: kappa incomplete"))?;
            ensure(entails_in(states, &a.formula, &b.formula), || format!("chain {i}: kappa not monotone at step {step}"))?;
            s = t;
        }
    }
    Ok("100 sets and 20 chains of length 6".into())
}

fn texts(prover: &Prover) -> Vec<String> {
    corpus().iter().map(|(_, p)| run(p, prover).to_text()).collect()
}

fn cache_transparency() -> Outcome {
    let cold = Prover::new(CORPUS_SCOPE);
    let uncached = Prover::new(CORPUS_SCOPE).without_cache();
    ensure(texts(&cold) == texts(&uncached), || "reports differ with the cache off".into())?;
    let path = std::env::temp_dir().join(format!("boheap-acceptance-{}.cache", std::process::id()));
    let first = Prover::new(CORPUS_SCOPE);
    let _ = texts(&first);
    let s1 = first.stats();
    first.save_cache(&path).map_err(|e| e.to_string())?;
    let mut warm = Prover::new(CORPUS_SCOPE);
    warm.load_cache(&path);
    let _ = std::fs::remove_file(&path);
    let _ = texts(&warm);
    let s2 = warm.stats();
    ensure(s2.hit_percent() > 0.0 && s2.backend_calls < s1.backend_calls, || {
        format!("warm run: {:.1}% hits, {} backend calls against {}", s2.hit_percent(), s2.backend_calls, s1.backend_calls)
    })?;
    Ok(format!(
        "identical reports; backend calls {} cold, {} warm ({:.1}% hits)",
        s1.backend_calls,
        s2.backend_calls,
        s2.hit_percent()
    ))
}

fn propagation_soundness() -> Outcome {
    let mut kept = 0;
    for (name, p, reach) in reach_sets() {
        let prover = Prover::new(CORPUS_SCOPE);
        let map = propagate(&prover, p).map_err(|e| e.to_string())?;
        for l in 0..p.locations.len() {
            for &i in &map.alive[l] {
                let c = &map.conjuncts[i];
                ensure(reach.at(l).iter().all(|s| eval(s, c).unwrap()), || {
                    format!("{name}: `{c}` kept at {} but violated", p.locations[l])
                })?;
                kept += 1;
            }
        }
    }
    let p = load("list_traverse");
    let map = propagate(&Prover::new(CORPUS_SCOPE), &p).map_err(|e| e.to_string())?;
    let heap: Vec<usize> = conjuncts(&p.requires)
        .iter()
        .map(|c| map.conjuncts.iter().position(|d| alpha_normalize(d) == alpha_normalize(c)).unwrap())
        .collect();
    for l in 0..p.locations.len() {
        for &i in &heap {
            ensure(map.alive[l].contains(&i), || format!("traversal drops `{}` at {}", map.conjuncts[i], p.locations[l]))?;
        }
    }
    Ok(format!("{kept} surviving conjuncts hold; traversal keeps {}/{} everywhere", heap.len(), heap.len()))
}

fn determinism() -> Outcome {
    let once = || -> Vec<String> {
        let prover = Prover::new(CORPUS_SCOPE);
        corpus()
            .iter()
            .map(|(_, p)| {
                let r = run(p, &prover);
                r.to_text() + &r.to_json_lines()
            })
            .collect()
    };
    let (a, b) = (once(), once());
    ensure(a == b, || "two runs differ".into())?;
    Ok(format!("{} reports byte-identical", a.len()))
}

/// The signature restricted to the given symbols.
fn restrict(sig: &Signature, syms: &std::collections::BTreeSet<String>) -> Signature {
    let mut out = Signature::new();
    for s in syms {
        if sig.fields.contains(s) {
            out.add_field(s).unwrap();
        } else if sig.data.contains(s) {
            out.add_data(s).unwrap();
        } else if sig.obj_vars.contains(s) {
            out.add_obj_var(s).unwrap();
        } else if sig.int_vars.contains(s) {
            out.add_int_var(s).unwrap();
        } else if sig.set_vars.contains(s) {
            out.add_set_var(s).unwrap();
        }
    }
    out
}

fn wlp_duality() -> Outcome {
    let scope = Scope {
        objects: 3,
        data_max: 1,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut commands = 0;
    let mut checks = 0u64;
    for (name, p) in corpus() {
        for e in &p.edges {
            let c = &e.command;
            let mut syms = c.read();
            syms.extend(c.modified());
            let sig = Arc::new(restrict(&p.sig, &syms));
            let states: Vec<_> = oracle::states(&sig, scope, &[])
                .into_iter()
                .filter(|s| *s == canonical(s))
                .collect();
            let posts: Vec<Vec<_>> = states
                .iter()
                .map(|s| concrete_post(c, s).unwrap().into_iter().filter(|t| in_scope(t, scope)).collect())
                .collect();
            let mut g = Gen::for_sig(&mut rng, &sig);
            g.with_v = true;
            g.int_literals = false;
            for _ in 0..50 {
                let f = g.formula(2);
                let w = wlp(&sig, c, &f).map_err(|e| e.to_string())?;
                for (s, ts) in states.iter().zip(&posts) {
                    for o in s.objects() {
                        let lhs = eval_at(s, &w, o).unwrap();
                        let rhs = ts.iter().all(|t| eval_at(t, &f, o).unwrap());
                        ensure(lhs == rhs, || format!("{name}: `{c}` and `{f}` disagree in {s} at v = {o}"))?;
                        checks += 1;
                    }
                }
            }
            commands += 1;
        }
    }
    Ok(format!("{commands} commands x 50 formulas, {checks} state checks"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("end-to-end soundness at N=3, M=7", soundness),
        ("sorted insert invariant and conditions", sorted_insert),
        ("split preserves meaning", split_preserves_meaning),
        ("clean sandwich", clean_sandwich),
        ("Cartesian post overapproximates", cartesian_overapproximates),
        ("relational and direct Cartesian post agree", cartesian_definitions_agree),
        ("context operator is sound and monotone", kappa_contract),
        ("cache transparency and effectiveness", cache_transparency),
        ("propagation soundness", propagation_soundness),
        ("determinism", determinism),
        ("wlp agrees with the concrete semantics", wlp_duality),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => report(format!("PASS {:>2}. {name}: {detail} ({secs:.1} s)", i + 1)),
            Err(why) => {
                report(format!("FAIL {:>2}. {name}: {why} ({secs:.1} s)", i + 1));
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}

fn report(line: String) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}
