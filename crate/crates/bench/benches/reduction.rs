use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use pregroup_core::checks::{oracle_table, random_type};
use pregroup_core::{data, enumerate_reductions, oracle_reduce, parse_compound, reduce, Lcg64, TargetType};

fn sentences(c: &mut Criterion) {
    let ja = data::lexicon("ja").unwrap();
    let t = |s: &str| parse_compound(s, ja.table()).unwrap();
    let cases = [
        ("transitive", "n n^r o1 n n^r o2 o2^r o1^r s1", "s"),
        (
            "composite",
            "n n^r o2 o2^r s o1^l o1 s^r n n^l n n^r o1 n n^r o5 o5^r s o1^l o1 s^r n n^l n n^r o2 o2^r o1^r s",
            "s",
        ),
    ];
    let mut group = c.benchmark_group("reduce");
    for (name, input, target) in cases {
        let input = t(input);
        let target = TargetType::new(t(target));
        group.bench_function(name, |b| b.iter(|| reduce(black_box(&input), &target, ja.table()).unwrap()));
    }
    group.finish();
}

fn chart_against_oracle(c: &mut Criterion) {
    let table = oracle_table();
    let mut rng = Lcg64::new(3);
    let mut group = c.benchmark_group("enumerate");
    for len in [6usize, 10, 12] {
        let inputs: Vec<_> = (0..32).map(|_| random_type(&mut rng, &table, len)).collect();
        group.bench_with_input(BenchmarkId::new("chart", len), &inputs, |b, inputs| {
            b.iter(|| {
                for x in inputs {
                    black_box(enumerate_reductions(x, &TargetType::unit(), &table, usize::MAX).unwrap());
                }
            })
        });
        if len <= 10 {
            group.bench_with_input(BenchmarkId::new("brute force", len), &inputs, |b, inputs| {
                b.iter(|| {
                    for x in inputs {
                        black_box(oracle_reduce(x, &TargetType::unit(), &table).unwrap());
                    }
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sentences, chart_against_oracle);
criterion_main!(benches);
