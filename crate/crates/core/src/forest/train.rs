use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Forest, ForestConfig, Sampling};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::tree::{self, Tree};

/// Random stream for tree `index`: the master seed picks the key, the tree
/// index picks the ChaCha stream, so trees never share randomness and can
/// be grown in any order.
pub(crate) fn tree_rng(master_seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index as u64);
    rng
}

/// Sorted training rows for one tree. Consumes the first draws of `rng`.
pub(crate) fn draw_rows(config: &ForestConfig, n_rows: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut rows: Vec<u32> = match config.sampling {
        Sampling::Identity => (0..n_rows as u32).collect(),
        Sampling::Bootstrap => {
            let size = config.bootstrap_size.unwrap_or(n_rows);
            (0..size).map(|_| rng.random_range(0..n_rows as u32)).collect()
        }
    };
    rows.sort_unstable();
    rows
}

fn check(data: &Dataset, config: &ForestConfig) -> Result<()> {
    if data.is_empty() {
        return Err(Error::invalid("cannot train a forest on an empty dataset"));
    }
    config.validate(data.schema().n_labels())?;
    if config.sampling == Sampling::Identity && config.bootstrap_size.is_some_and(|s| s != data.n_rows()) {
        return Err(Error::invalid("identity sampling requires bootstrap size equal to the row count"));
    }
    let rows: Vec<usize> = vec![0];
    tree::check_inputs(data, &rows, &config.class_weights, &config.tree)
}

fn grow_one(data: &Dataset, config: &ForestConfig, index: usize) -> (Tree, Vec<u32>) {
    let mut rng = tree_rng(config.master_seed, index);
    let draws = draw_rows(config, data.n_rows(), &mut rng);
    let rows = draws.iter().map(|&r| r as usize).collect();
    let tree = tree::grow(data, rows, &config.class_weights, &config.tree, &mut rng);
    (tree, draws)
}

/// Train on rayon's current pool. The result depends only on `data` and
/// `config`.
pub fn train_forest(data: &Dataset, config: &ForestConfig) -> Result<Forest> {
    check(data, config)?;
    let (trees, inbag): (Vec<Tree>, Vec<Vec<u32>>) =
        (0..config.n_trees).into_par_iter().map(|i| grow_one(data, config, i)).unzip();
    Ok(Forest {
        config: config.clone(),
        trees,
        inbag,
        labels: data.schema().labels.clone(),
        n_features: data.n_features(),
        schema_fingerprint: data.schema().fingerprint(),
        data_fingerprint: data.fingerprint(),
        n_train_rows: data.n_rows(),
    })
}

/// Train with at most `threads` workers (0 means rayon's default).
pub fn train_forest_with_threads(data: &Dataset, config: &ForestConfig, threads: usize) -> Result<Forest> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| train_forest(data, config))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: Vec<u32> = (0..4).map(|_| tree_rng(5, 0).random()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let first: u64 = tree_rng(5, 0).random();
        let second: u64 = tree_rng(5, 1).random();
        let other_seed: u64 = tree_rng(6, 0).random();
        assert_ne!(first, second);
        assert_ne!(first, other_seed);
    }

    #[test]
    fn bootstrap_has_requested_size() {
        let mut config = ForestConfig::new(2, 3);
        config.bootstrap_size = Some(7);
        let rows = draw_rows(&config, 100, &mut tree_rng(3, 0));
        assert_eq!(rows.len(), 7);
        assert!(rows.iter().all(|&r| r < 100));
        config.sampling = Sampling::Identity;
        assert_eq!(draw_rows(&config, 4, &mut tree_rng(3, 0)), vec![0, 1, 2, 3]);
    }
}
