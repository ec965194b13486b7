use criterion::{black_box, criterion_group, criterion_main, Criterion};

use pregroup_core::checks::shipped_squares;
use pregroup_core::{enumerate_reductions, interpret, interpret_brute_force, AlphaSpec, CompoundType};

fn squares(c: &mut Criterion) {
    let mut group = c.benchmark_group("semantics");
    for square in shipped_squares().unwrap() {
        let tensors = square.fixture.sentence_tensors(&square.words).unwrap();
        let flat: CompoundType = square.words.iter().flat_map(|(_, t)| t.iter().cloned()).collect();
        let w = enumerate_reductions(&flat, &square.target, &square.source_table, 1)
            .unwrap()
            .remove(0);
        let spaces = &square.fixture.spaces;
        group.bench_function(format!("{}: contraction", square.name), |b| {
            b.iter(|| interpret(black_box(&w), &tensors, spaces).unwrap())
        });
        group.bench_function(format!("{}: index sum", square.name), |b| {
            b.iter(|| interpret_brute_force(black_box(&w), &tensors, spaces).unwrap())
        });
        let alpha = square.random_alpha(1);
        group.bench_function(format!("{}: naturality", square.name), |b| {
            b.iter(|| square.check(black_box(&alpha), 1e-9).unwrap())
        });
        let identity = AlphaSpec::identity(spaces);
        group.bench_function(format!("{}: naturality, identity", square.name), |b| {
            b.iter(|| square.check(black_box(&identity), 0.0).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, squares);
criterion_main!(benches);
