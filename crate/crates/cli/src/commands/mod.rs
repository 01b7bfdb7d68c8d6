use riskforest_core::forest::ForestConfig;
use riskforest_core::{FeatureSchema, TreeParams};

use crate::config::RunConfig;
use crate::io::parse_floats;
use crate::{Command, ForestArgs};

mod audit;
mod pipeline;
mod tables;

pub fn dispatch(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::ReproduceTables(a) => tables::reproduce(a),
        Command::Baseline(a) => tables::baseline(a),
        Command::Generate(a) => pipeline::generate(a),
        Command::Train(a) => pipeline::train(a),
        Command::Predict(a) => pipeline::predict(a),
        Command::Evaluate(a) => pipeline::evaluate(a),
        Command::Calibrate(a) => pipeline::calibrate(a),
        Command::Audit(a) => audit::audit(a),
        Command::KAnon(a) => audit::k_anon(a),
    }
}

/// Resolve forest flags against the schema, filling in defaults.
fn forest_config(args: &ForestArgs, schema: &FeatureSchema, seed: u64) -> anyhow::Result<ForestConfig> {
    let mut config = ForestConfig::new(schema.n_labels(), seed).with_trees(args.trees);
    if let Some(w) = &args.weights {
        config = config.with_class_weights(parse_floats("--weights", w)?);
    }
    let defaults = TreeParams::default();
    config.tree = TreeParams {
        max_features: Some(
            args.max_features.unwrap_or_else(|| defaults.features_per_node(schema.n_features())),
        ),
        min_leaf: args.min_leaf.unwrap_or(defaults.min_leaf),
        max_depth: args.max_depth.unwrap_or(defaults.max_depth),
    };
    config.validate(schema.n_labels())?;
    Ok(config)
}

fn forest_params(run: RunConfig, config: &ForestConfig) -> RunConfig {
    run.param("trees", config.n_trees)
        .param("weights", &config.class_weights)
        .param("min_leaf", config.tree.min_leaf)
        .param("max_depth", config.tree.max_depth)
        .param("max_features", config.tree.max_features)
}
