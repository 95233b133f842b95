use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mqc_bench::{case_tree, generated};
use mqc_core::{beta_nf, check, normalize, Options};

fn case_trees(c: &mut Criterion) {
    let mut group = c.benchmark_group("case_tree");
    for depth in [4, 7, 10] {
        let problem = case_tree(depth);
        group.bench_with_input(BenchmarkId::from_parameter(depth), &problem, |b, p| {
            b.iter(|| normalize(&p.context, &p.term, &p.goal, Options::cbn()).unwrap())
        });
    }
    group.finish();
}

fn generated_terms(c: &mut Criterion) {
    let problems = generated(50, 30, 3);
    c.bench_function("check/generated", |b| {
        b.iter(|| problems.iter().all(|p| check(&p.context, &p.term, &p.goal).is_ok()))
    });
    c.bench_function("normalize/generated", |b| {
        b.iter(|| {
            for p in &problems {
                normalize(&p.context, &p.term, &p.goal, Options::cbn()).unwrap();
            }
        })
    });
    c.bench_function("beta_nf/generated", |b| {
        b.iter(|| {
            for p in &problems {
                beta_nf(&p.term, 100_000).unwrap();
            }
        })
    });
}

criterion_group!(benches, case_trees, generated_terms);
criterion_main!(benches);
