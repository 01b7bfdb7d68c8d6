use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use riskforest_bench::synthetic;
use riskforest_core::{train_forest, train_tree, ForestConfig, TreeParams};

fn tree(c: &mut Criterion) {
    let mut group = c.benchmark_group("train_tree");
    for rows in [1_000, 10_000] {
        let data = synthetic(rows, 1);
        let rows_used: Vec<usize> = (0..data.n_rows()).collect();
        let class_weights = vec![1.0; data.schema().n_labels()];
        group.bench_with_input(BenchmarkId::from_parameter(rows), &data, |b, data| {
            b.iter(|| train_tree(data, &rows_used, &class_weights, &TreeParams::default(), 7).unwrap())
        });
    }
    group.finish();
}

fn forest(c: &mut Criterion) {
    let data = synthetic(5_000, 2);
    let config = ForestConfig::new(data.schema().n_labels(), 3).with_trees(51);
    let mut group = c.benchmark_group("forest");
    group.sample_size(10);
    group.bench_function("train_51_trees_5000_rows", |b| b.iter(|| train_forest(&data, &config).unwrap()));
    let model = train_forest(&data, &config).unwrap();
    let holdout = synthetic(5_000, 4);
    group.bench_function("predict_5000_rows", |b| b.iter(|| model.predict(&holdout).unwrap()));
    group.bench_function("oob_predict_5000_rows", |b| b.iter(|| model.oob_predict(&data).unwrap()));
    group.finish();
}

criterion_group!(benches, tree, forest);
criterion_main!(benches);
