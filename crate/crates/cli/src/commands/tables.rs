use std::fmt::Write;
use std::path::Path;

use anyhow::{bail, Context};
use riskforest_core::metrics::{majority_baseline, random_baseline};
use riskforest_core::reference::{self, PublishedFigures, FIGURE_TOLERANCE};
use riskforest_core::{derive_metrics, ConfusionMatrix, MetricReport};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::io::{self, load_schema, parse_floats, schema_param};
use crate::{BaselineArgs, ReproduceArgs};

const OOB_FILE: &str = "published_oob.csv";
const VALIDATION_FILE: &str = "published_validation.csv";

#[derive(Debug, Serialize)]
struct Comparison {
    measure: String,
    label: Option<String>,
    /// Fractions, not percent.
    computed: Option<f64>,
    published: f64,
    delta: Option<f64>,
    within_tolerance: bool,
}

#[derive(Debug, Serialize)]
struct MatrixCheck {
    name: String,
    matrix: Vec<Vec<f64>>,
    metrics: MetricReport,
    comparisons: Vec<Comparison>,
    #[serde(skip)]
    matrix_markdown: String,
}

#[derive(Debug, Serialize)]
struct TablesReport {
    tolerance: f64,
    checks: Vec<MatrixCheck>,
    marginals: Vec<f64>,
    random_baseline: f64,
    published_random_baseline: f64,
    all_within_tolerance: bool,
}

fn compare(measure: &str, label: Option<&str>, computed: Option<f64>, published_pct: f64) -> Comparison {
    let published = published_pct / 100.0;
    let delta = computed.map(|c| c - published);
    Comparison {
        measure: measure.to_string(),
        label: label.map(str::to_string),
        computed,
        published,
        delta,
        within_tolerance: delta.is_some_and(|d| d.abs() <= FIGURE_TOLERANCE / 100.0 + 1e-12),
    }
}

fn check_matrix(name: &str, cm: &ConfusionMatrix, figures: &PublishedFigures) -> anyhow::Result<MatrixCheck> {
    let labels = cm.labels().to_vec();
    if labels.len() != 3 {
        bail!("{name} matrix has {} labels, expected 3", labels.len());
    }
    let metrics = derive_metrics(cm, Some(&labels[0]), Some(&labels[2]))?;
    let mut comparisons = vec![compare("overall accuracy", None, Some(metrics.overall_accuracy), figures.overall_accuracy)];
    for (i, m) in metrics.per_label.iter().enumerate() {
        comparisons.push(compare("sensitivity", Some(&m.label), m.sensitivity, figures.sensitivity[i]));
    }
    for (i, m) in metrics.per_label.iter().enumerate() {
        comparisons.push(compare("precision", Some(&m.label), m.precision, figures.precision[i]));
    }
    let risk = metrics.risk_errors.as_ref();
    comparisons.push(compare("very dangerous", None, risk.and_then(|r| r.very_dangerous), figures.very_dangerous));
    comparisons.push(compare("very cautious", None, risk.and_then(|r| r.very_cautious), figures.very_cautious));
    let matrix = (0..cm.k()).map(|f| (0..cm.k()).map(|a| cm.cell(f, a)).collect()).collect();
    Ok(MatrixCheck { name: name.to_string(), matrix, metrics, comparisons, matrix_markdown: cm.to_markdown() })
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn read_fixture(dir: Option<&Path>, file: &str, bundled: &str) -> anyhow::Result<String> {
    match dir {
        Some(d) => {
            let path = d.join(file);
            std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))
        }
        None => Ok(bundled.to_string()),
    }
}

fn fmt_opt(x: Option<f64>, digits: usize) -> String {
    x.map_or("undefined".to_string(), |v| format!("{v:.digits$}"))
}

pub fn reproduce(args: ReproduceArgs) -> anyhow::Result<()> {
    let dir = args.fixtures.as_deref();
    let oob_text = read_fixture(dir, OOB_FILE, reference::OOB_MATRIX_CSV)?;
    let val_text = read_fixture(dir, VALIDATION_FILE, reference::VALIDATION_MATRIX_CSV)?;
    let oob = ConfusionMatrix::read_csv(oob_text.as_bytes()).with_context(|| format!("parsing {OOB_FILE}"))?;
    let val = ConfusionMatrix::read_csv(val_text.as_bytes()).with_context(|| format!("parsing {VALIDATION_FILE}"))?;

    let checks = vec![
        check_matrix("out-of-bag", &oob, &reference::OOB_FIGURES)?,
        check_matrix("validation", &val, &reference::VALIDATION_FIGURES)?,
    ];
    let marginals = reference::OUTCOME_MARGINALS.to_vec();
    let random = random_baseline(&marginals)?;
    let baseline_ok = (random - reference::RANDOM_BASELINE).abs() <= 0.0005;
    let failures: Vec<String> = checks
        .iter()
        .flat_map(|c| {
            c.comparisons.iter().filter(|x| !x.within_tolerance).map(move |x| match &x.label {
                Some(l) => format!("{} {} ({l})", c.name, x.measure),
                None => format!("{} {}", c.name, x.measure),
            })
        })
        .chain((!baseline_ok).then(|| "random baseline".to_string()))
        .collect();

    let report = TablesReport {
        tolerance: FIGURE_TOLERANCE / 100.0,
        checks,
        marginals,
        random_baseline: random,
        published_random_baseline: reference::RANDOM_BASELINE,
        all_within_tolerance: failures.is_empty(),
    };

    let mut md = String::new();
    for c in &report.checks {
        let _ = writeln!(md, "## {} matrix\n", c.name);
        let _ = writeln!(md, "{}", c.matrix_markdown);
        let _ = writeln!(md, "| measure | label | computed | published | delta | ok |\n|---|---|---:|---:|---:|---|");
        for x in &c.comparisons {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {:.4} | {} | {} |",
                x.measure,
                x.label.as_deref().unwrap_or(""),
                fmt_opt(x.computed, 4),
                x.published,
                fmt_opt(x.delta, 4),
                if x.within_tolerance { "yes" } else { "no" }
            );
        }
        md.push('\n');
    }
    let _ = writeln!(
        md,
        "Random-guess baseline from the outcome shares: {:.4} (printed {:.3}).\n",
        report.random_baseline, report.published_random_baseline
    );

    let run = RunConfig::new("reproduce-tables")
        .param("fixtures", args.fixtures.as_ref().map(|p| p.display().to_string()))
        .input(OOB_FILE, sha256_hex(&oob_text))
        .input(VALIDATION_FILE, sha256_hex(&val_text));
    let out = io::out_dir(&args.out.out)?;
    io::write_report(&out, "tables", "Published performance figures", &run, &report, &md)?;

    if !failures.is_empty() {
        bail!("outside tolerance {:.4}: {}", report.tolerance, failures.join(", "));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct BaselineReport {
    labels: Vec<String>,
    marginals: Vec<f64>,
    random_baseline: f64,
    majority_baseline: f64,
}

pub fn baseline(args: BaselineArgs) -> anyhow::Result<()> {
    let schema = load_schema(&args.schema)?;
    let mut run = RunConfig::new("baseline").param("schema", schema_param(&args.schema));
    let marginals = match (&args.marginals, &args.data) {
        (Some(m), _) => parse_floats("--marginals", m)?,
        (None, Some(path)) => {
            let data = io::load_data(path, &schema, "group")?;
            run = run.param("data", path.display().to_string()).input("data", data.fingerprint());
            data.label_frequencies()
        }
        (None, None) => reference::OUTCOME_MARGINALS.to_vec(),
    };
    run = run.param("marginals", &marginals);
    let labels = if marginals.len() == schema.n_labels() {
        schema.labels.clone()
    } else {
        (0..marginals.len()).map(|i| format!("label {i}")).collect()
    };
    let report = BaselineReport {
        random_baseline: random_baseline(&marginals)?,
        majority_baseline: majority_baseline(&marginals)?,
        labels,
        marginals,
    };
    let mut md = String::from("| label | share |\n|---|---:|\n");
    for (l, p) in report.labels.iter().zip(&report.marginals) {
        let _ = writeln!(md, "| {l} | {p:.4} |");
    }
    let _ = writeln!(
        md,
        "\nRandom guesser drawing from the marginals: {:.4}. Always forecasting the commonest label: {:.4}.",
        report.random_baseline, report.majority_baseline
    );
    println!("{:.4}", report.random_baseline);
    let out = io::out_dir(&args.out.out)?;
    io::write_report(&out, "baseline", "Chance baselines", &run, &report, &md)
}
