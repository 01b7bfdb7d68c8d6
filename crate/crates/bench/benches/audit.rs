use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riskforest_core::fairness::{default_plan, impossibility_search, scored_groups};
use riskforest_core::metrics::auc;

fn roc(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let scores: Vec<f64> = (0..100_000).map(|_| rng.random()).collect();
    let actual: Vec<bool> = scores.iter().map(|&s| rng.random::<f64>() < s).collect();
    c.bench_function("auc_100000", |b| b.iter(|| auc(&scores, &actual).unwrap()));
}

fn search(c: &mut Criterion) {
    let outcomes = scored_groups(&default_plan(), 7).unwrap();
    c.bench_function("impossibility_search_binned", |b| b.iter(|| impossibility_search(&outcomes, 0.01).unwrap()));
}

criterion_group!(benches, roc, search);
criterion_main!(benches);
