use std::fmt::Write;

use anyhow::{bail, Context};
use riskforest_core::data::{generate_grouped, generate_synthetic, split_holdout, GroupPlan};
use riskforest_core::forest::calibrate_cost_ratio;
use riskforest_core::metrics::{auc, one_vs_rest, random_baseline};
use riskforest_core::{derive_metrics, reference, train_forest, ConfusionMatrix, Dataset, Forest, MetricReport};
use serde::Serialize;

use super::{forest_config, forest_params};
use crate::config::RunConfig;
use crate::io::{self, check_positive, load_data, load_schema, parse_floats, schema_param};
use crate::{CalibrateArgs, GenerateArgs, ModelDataArgs, TrainArgs};

#[derive(Debug, Serialize)]
struct LabelShare {
    group: Option<String>,
    rows: usize,
    counts: Vec<usize>,
}

#[derive(Debug, Serialize)]
struct GenerateReport {
    labels: Vec<String>,
    fingerprint: String,
    shares: Vec<LabelShare>,
    train_rows: Option<usize>,
    holdout_rows: Option<usize>,
}

fn label_shares(data: &Dataset) -> Vec<LabelShare> {
    let k = data.schema().n_labels();
    let mut out = vec![LabelShare { group: None, rows: data.n_rows(), counts: data.label_counts() }];
    if let Some(groups) = data.groups() {
        let mut names: Vec<&String> = groups.iter().collect();
        names.sort();
        names.dedup();
        for name in names {
            let mut counts = vec![0; k];
            for (i, g) in groups.iter().enumerate() {
                if g == name {
                    counts[data.label(i)] += 1;
                }
            }
            out.push(LabelShare { group: Some(name.clone()), rows: counts.iter().sum(), counts });
        }
    }
    out
}

fn shares_markdown(labels: &[String], shares: &[LabelShare]) -> String {
    let mut md = format!("| group | rows | {} |\n|---|---:|{}\n", labels.join(" | "), "---:|".repeat(labels.len()));
    for s in shares {
        let cells: Vec<String> =
            s.counts.iter().map(|&c| format!("{c} ({:.1}%)", 100.0 * c as f64 / s.rows.max(1) as f64)).collect();
        let _ = writeln!(md, "| {} | {} | {} |", s.group.as_deref().unwrap_or("all"), s.rows, cells.join(" | "));
    }
    md
}

pub fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let schema = load_schema(&args.schema)?;
    let marginals = match &args.marginals {
        Some(m) => parse_floats("--marginals", m)?,
        None => reference::OUTCOME_MARGINALS.to_vec(),
    };
    if !(0.0..=1.0).contains(&args.signal) {
        bail!("--signal must lie in [0, 1], got {}", args.signal);
    }
    let data = match args.planted_gap {
        None => generate_synthetic(&schema, args.rows, &marginals, args.signal, args.seed)?,
        Some(gap) => {
            if !(gap >= 0.0) {
                bail!("--planted-gap must be nonnegative, got {gap}");
            }
            let last = marginals.len() - 1;
            let shifted = |sign: f64| {
                let mut m = marginals.clone();
                m[0] += sign * gap / 2.0;
                m[last] -= sign * gap / 2.0;
                m
            };
            let (a, b) = (shifted(1.0), shifted(-1.0));
            if a.iter().chain(&b).any(|&p| p < 0.0) {
                bail!("--planted-gap {gap} pushes a label share below zero");
            }
            let plan = [
                GroupPlan { name: "A".into(), share: 0.5, marginals: a },
                GroupPlan { name: "B".into(), share: 0.5, marginals: b },
            ];
            generate_grouped(&schema, args.rows, &plan, args.signal, args.seed)?
        }
    };

    let run = RunConfig::new("generate")
        .param("schema", schema_param(&args.schema))
        .param("rows", args.rows)
        .param("marginals", &marginals)
        .param("signal", args.signal)
        .param("seed", args.seed)
        .param("planted_gap", args.planted_gap)
        .param("holdout", args.holdout)
        .input("schema", schema.fingerprint());
    let out = io::out_dir(&args.out.out)?;
    let comments = [run.comment()];
    data.write_csv_file(out.join("data.csv"), &comments)?;

    let mut report = GenerateReport {
        labels: schema.labels.clone(),
        fingerprint: data.fingerprint(),
        shares: label_shares(&data),
        train_rows: None,
        holdout_rows: None,
    };
    if let Some(fraction) = args.holdout {
        let (train, holdout) = split_holdout(&data, fraction, args.seed)?;
        train.write_csv_file(out.join("train.csv"), &comments)?;
        holdout.write_csv_file(out.join("holdout.csv"), &comments)?;
        report.train_rows = Some(train.n_rows());
        report.holdout_rows = Some(holdout.n_rows());
    }
    let mut md = format!("{} rows, fingerprint `{}`.\n\n", data.n_rows(), report.fingerprint);
    md.push_str(&shares_markdown(&report.labels, &report.shares));
    if let (Some(t), Some(h)) = (report.train_rows, report.holdout_rows) {
        let _ = writeln!(md, "\nSplit into `train.csv` ({t} rows) and `holdout.csv` ({h} rows).");
    }
    io::write_report(&out, "generate", "Synthetic data", &run, &report, &md)
}

#[derive(Debug, Serialize)]
struct TreeSummary {
    tree: usize,
    distinct_inbag: usize,
    oob_rows: usize,
    leaves: usize,
    depth: usize,
}

#[derive(Debug, Serialize)]
struct OobReport {
    confusion: ConfusionMatrix,
    metrics: MetricReport,
    rows_with_estimate: usize,
    rows_without_estimate: usize,
    trees: Vec<TreeSummary>,
}

fn metrics_for(cm: &ConfusionMatrix) -> anyhow::Result<MetricReport> {
    let labels = cm.labels();
    Ok(derive_metrics(cm, labels.first().map(String::as_str), labels.last().map(String::as_str))?)
}

pub fn train(args: TrainArgs) -> anyhow::Result<()> {
    let schema = load_schema(&args.schema)?;
    let data = load_data(&args.data, &schema, "group")?;
    let config = forest_config(&args.forest, &schema, args.seed)?;
    let forest = train_forest(&data, &config)?;

    let out = io::out_dir(&args.out.out)?;
    forest.save(out.join("model.forest"))?;

    let oob = forest.oob_predict(&data)?;
    let (mut predicted, mut actual) = (Vec::new(), Vec::new());
    for (i, v) in oob.iter().enumerate() {
        if let Some(v) = v {
            predicted.push(v.label);
            actual.push(data.label(i));
        }
    }
    let confusion = ConfusionMatrix::from_indices(&predicted, &actual, &schema.labels)?;
    let metrics = metrics_for(&confusion)?;
    let trees = forest
        .trees()
        .iter()
        .zip(forest.oob_counts())
        .enumerate()
        .map(|(t, (tree, oob_rows))| TreeSummary {
            tree: t,
            distinct_inbag: forest.n_train_rows() - oob_rows,
            oob_rows,
            leaves: tree.n_leaves(),
            depth: tree.depth(),
        })
        .collect();
    let report = OobReport {
        rows_with_estimate: predicted.len(),
        rows_without_estimate: data.n_rows() - predicted.len(),
        confusion,
        metrics,
        trees,
    };

    let mut md = format!(
        "{} trees on {} rows. {} rows have an out-of-bag forecast; {} were in every bootstrap.\n\n",
        forest.trees().len(),
        data.n_rows(),
        report.rows_with_estimate,
        report.rows_without_estimate
    );
    let _ = writeln!(md, "## Out-of-bag confusion matrix\n\n{}", report.confusion.to_markdown());
    let _ = writeln!(md, "## Measures\n\n{}", report.metrics.to_markdown());
    let _ = writeln!(md, "## Trees\n\n| tree | distinct in-bag rows | out-of-bag rows | leaves | depth |\n|---:|---:|---:|---:|---:|");
    for t in &report.trees {
        let _ = writeln!(md, "| {} | {} | {} | {} | {} |", t.tree, t.distinct_inbag, t.oob_rows, t.leaves, t.depth);
    }

    let run = forest_params(
        RunConfig::new("train")
            .param("schema", schema_param(&args.schema))
            .param("data", args.data.display().to_string())
            .param("seed", args.seed),
        &config,
    )
    .input("schema", schema.fingerprint())
    .input("data", data.fingerprint());
    io::write_report(&out, "oob", "Out-of-bag performance", &run, &report, &md)
}

fn load_model(args: &ModelDataArgs) -> anyhow::Result<(Forest, Dataset)> {
    let schema = load_schema(&args.schema)?;
    let forest = Forest::load(&args.model).with_context(|| format!("loading model {}", args.model.display()))?;
    let data = load_data(&args.data, &schema, "group")?;
    Ok((forest, data))
}

fn model_run(command: &str, args: &ModelDataArgs, forest: &Forest, data: &Dataset) -> RunConfig {
    RunConfig::new(command)
        .param("schema", schema_param(&args.schema))
        .param("model", args.model.display().to_string())
        .param("data", args.data.display().to_string())
        .input("schema", forest.schema_fingerprint())
        .input("model training data", forest.data_fingerprint())
        .input("data", data.fingerprint())
}

pub fn predict(args: ModelDataArgs) -> anyhow::Result<()> {
    let (forest, data) = load_model(&args)?;
    let votes = forest.predict(&data)?;
    let run = model_run("predict", &args, &forest, &data);
    let labels = forest.labels();

    let mut text = format!("# {}\n", run.comment());
    let tally_cols: Vec<String> = labels.iter().map(|l| format!("votes_{l}")).collect();
    let _ = writeln!(text, "row,forecast,actual,{}", tally_cols.join(","));
    for (i, v) in votes.iter().enumerate() {
        let tally: Vec<String> = v.tally.iter().map(usize::to_string).collect();
        let _ = writeln!(text, "{i},{},{},{}", labels[v.label], labels[data.label(i)], tally.join(","));
    }
    let out = io::out_dir(&args.out.out)?;
    io::write_file(&out.join("predictions.csv"), &text)
}

#[derive(Debug, Serialize)]
struct LabelAuc {
    label: String,
    auc: Option<f64>,
}

#[derive(Debug, Serialize)]
struct EvaluationReport {
    confusion: ConfusionMatrix,
    metrics: MetricReport,
    label_frequencies: Vec<f64>,
    random_baseline: f64,
    auc: Vec<LabelAuc>,
}

pub fn evaluate(args: ModelDataArgs) -> anyhow::Result<()> {
    let (forest, data) = load_model(&args)?;
    let votes = forest.predict(&data)?;
    let labels = forest.labels().to_vec();
    let predicted: Vec<usize> = votes.iter().map(|v| v.label).collect();
    let confusion = ConfusionMatrix::from_indices(&predicted, data.labels(), &labels)?;
    let metrics = metrics_for(&confusion)?;
    let shares: Vec<Vec<f64>> = votes
        .iter()
        .map(|v| {
            let n = v.total() as f64;
            v.tally.iter().map(|&c| c as f64 / n).collect()
        })
        .collect();
    let auc = (0..labels.len())
        .map(|l| {
            let (scores, actual) = one_vs_rest(&shares, data.labels(), l)?;
            Ok(LabelAuc { label: labels[l].clone(), auc: auc(&scores, &actual).ok() })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let label_frequencies = data.label_frequencies();
    let report = EvaluationReport {
        random_baseline: random_baseline(&label_frequencies)?,
        label_frequencies,
        confusion,
        metrics,
        auc,
    };

    let mut md = format!(
        "{} rows. Accuracy {:.4} against a random-guess baseline of {:.4}.\n\n",
        data.n_rows(),
        report.metrics.overall_accuracy,
        report.random_baseline
    );
    let _ = writeln!(md, "## Confusion matrix\n\n{}", report.confusion.to_markdown());
    let _ = writeln!(md, "## Measures\n\n{}", report.metrics.to_markdown());
    let _ = writeln!(md, "## One-vs-rest AUC from vote shares\n\n| label | AUC |\n|---|---:|");
    for a in &report.auc {
        let _ = writeln!(md, "| {} | {} |", a.label, a.auc.map_or("undefined".into(), |x| format!("{x:.4}")));
    }
    let run = model_run("evaluate", &args, &forest, &data);
    let out = io::out_dir(&args.out.out)?;
    io::write_file(&out.join("confusion.csv"), &report.confusion.to_csv_string())?;
    io::write_report(&out, "evaluation", "Evaluation", &run, &report, &md)
}

pub fn calibrate(args: CalibrateArgs) -> anyhow::Result<()> {
    check_positive("--target", args.target)?;
    let schema = load_schema(&args.schema)?;
    let data = load_data(&args.data, &schema, "group")?;
    let config = forest_config(&args.forest, &schema, args.seed)?;
    let calibration = calibrate_cost_ratio(&data, &config, args.target)?;

    let mut md = format!(
        "Target {} cautious errors per dangerous error, measured on a {}-row holdout.\n\n",
        calibration.target_ratio, calibration.holdout_rows
    );
    let _ = writeln!(md, "| multiplier | weights | dangerous | cautious | ratio |\n|---:|---|---:|---:|---:|");
    for p in &calibration.sweep {
        let w: Vec<String> = p.class_weights.iter().map(|x| x.to_string()).collect();
        let ratio = p.ratio.map_or("undefined".into(), |r| format!("{r:.3}"));
        let _ = writeln!(md, "| {} | {} | {} | {} | {ratio} |", p.multiplier, w.join(", "), p.dangerous, p.cautious);
    }
    let chosen: Vec<String> = calibration.class_weights.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(
        md,
        "\nChosen weights `{}` (multiplier {}), realized ratio {:.3}.",
        chosen.join(","),
        calibration.multiplier,
        calibration.realized_ratio
    );
    println!("{}", chosen.join(","));

    let run = forest_params(
        RunConfig::new("calibrate")
            .param("schema", schema_param(&args.schema))
            .param("data", args.data.display().to_string())
            .param("seed", args.seed)
            .param("target", args.target),
        &config,
    )
    .input("schema", schema.fingerprint())
    .input("data", data.fingerprint());
    let out = io::out_dir(&args.out.out)?;
    io::write_report(&out, "calibration", "Cost-ratio calibration", &run, &calibration, &md)
}

