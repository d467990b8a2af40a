use boheap::abstraction::{self, Abstraction, Context};
use boheap::engine::{analyze, parse_procedure, Options, Procedure};
use boheap::prover::{Parallelism, Prover, Query, Scope};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const SCOPE: Scope = Scope {
    objects: 3,
    data_max: 7,
};

fn load(name: &str) -> Procedure {
    let path = format!("{}/../../corpus/{name}.bh", env!("CARGO_MANIFEST_DIR"));
    parse_procedure(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn conditions(p: &Procedure) -> Vec<Query> {
    let prover = Prover::new(SCOPE);
    let a = analyze(p, &prover, &Options::default()).unwrap();
    a.vcgen().unwrap().into_iter().map(|vc| vc.query).collect()
}

fn modes() -> [(&'static str, Parallelism); 2] {
    [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Parallel)]
}

fn check_conditions(c: &mut Criterion) {
    let p = load("sorted_insert");
    let queries = conditions(&p);
    let mut group = c.benchmark_group("sorted_insert conditions");
    group.sample_size(10);
    for (name, par) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &par, |b, &par| {
            b.iter(|| {
                let prover = Prover::new(SCOPE).without_cache().with_parallelism(par);
                queries.iter().filter(|q| prover.check(q).is_valid()).count()
            })
        });
    }
    group.finish();
}

fn abstract_loop_body(c: &mut Criterion) {
    let p = load("list_reverse");
    let body = p.edges.iter().find(|e| p.locations[e.from] == "body").unwrap();
    let preds = p.all_predicates();
    let mut group = c.benchmark_group("list_reverse transition");
    group.sample_size(10);
    for (name, par) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &par, |b, &par| {
            b.iter(|| {
                let prover = Prover::new(SCOPE).without_cache().with_parallelism(par);
                let cfg = abstraction::Config {
                    parallelism: par,
                    ..Default::default()
                };
                let abs = Abstraction::new(p.sig.clone(), preds.clone(), &prover, cfg);
                abs.abstract_transition(&body.command, &Context::default(), abs.all(), abs.all()).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, check_conditions, abstract_loop_body);
criterion_main!(benches);
