use std::collections::BTreeMap;
use std::fmt::Write;

use anyhow::{bail, Context};
use riskforest_core::data::anonymity_profile;
use riskforest_core::fairness::{default_plan, impossibility_search, scored_groups, GroupData};
use riskforest_core::{FairnessReport, Forest, GroupedOutcomes};
use serde::Serialize;

use crate::config::RunConfig;
use crate::io::{self, load_data, load_schema, parse_list, schema_param};
use crate::{AuditArgs, KAnonArgs};

pub fn audit(args: AuditArgs) -> anyhow::Result<()> {
    if !(args.epsilon >= 0.0 && args.epsilon.is_finite()) {
        bail!("--epsilon must be nonnegative, got {}", args.epsilon);
    }
    let (report, run) = if args.recipe {
        let seed = args.seed.context("--recipe needs --seed")?;
        let outcomes = scored_groups(&default_plan(), seed)?;
        let search = impossibility_search(&outcomes, args.epsilon)?;
        let report = FairnessReport {
            positive_label: outcomes.positive_label().to_string(),
            epsilon: args.epsilon,
            verdicts: Vec::new(),
            impossibility: Some(search),
            notes: vec!["Scored two-group instance; only the threshold search applies.".to_string()],
        };
        let plan: Vec<String> =
            default_plan().iter().map(|p| format!("{}:{}:{}", p.name, p.rows, p.base_rate)).collect();
        let run = RunConfig::new("audit")
            .param("recipe", true)
            .param("seed", seed)
            .param("epsilon", args.epsilon)
            .input("recipe plan", plan.join(" "));
        (report, run)
    } else {
        let (model, data) = match (&args.model, &args.data) {
            (Some(m), Some(d)) => (m, d),
            _ => bail!("--model and --data are required without --recipe"),
        };
        let schema = load_schema(&args.schema)?;
        let forest = Forest::load(model).with_context(|| format!("loading model {}", model.display()))?;
        let data = load_data(data, &schema, &args.group_column)?;
        let Some(groups) = data.groups() else {
            bail!("{} has no `{}` column", data.provenance(), args.group_column);
        };
        let labels = forest.labels().to_vec();
        let positive = args.positive.clone().unwrap_or_else(|| labels[0].clone());
        let pos = labels
            .iter()
            .position(|l| *l == positive)
            .with_context(|| format!("--positive `{positive}` is not a label"))?;
        let votes = forest.predict(&data)?;

        let mut by_group: BTreeMap<&str, GroupData> = BTreeMap::new();
        for (i, v) in votes.iter().enumerate() {
            let g = by_group.entry(groups[i].as_str()).or_insert_with(|| GroupData {
                predicted: Vec::new(),
                actual: Vec::new(),
                scores: Some(Vec::new()),
            });
            g.predicted.push(v.label);
            g.actual.push(data.label(i));
            if let Some(s) = g.scores.as_mut() {
                s.push(v.tally[pos] as f64 / v.total() as f64);
            }
        }
        let both_outcomes = by_group.values().all(|g| {
            let hits = g.actual.iter().filter(|&&a| a == pos).count();
            hits > 0 && hits < g.actual.len()
        });
        let n_groups = by_group.len();
        let outcomes = GroupedOutcomes::new(
            labels,
            &positive,
            by_group.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        )?;
        let mut report = FairnessReport::evaluate(&outcomes, args.epsilon);
        if n_groups == 2 && both_outcomes {
            report.impossibility = Some(impossibility_search(&outcomes, args.epsilon)?);
        } else {
            report.notes.push(format!(
                "Threshold search skipped: it needs exactly two groups that each contain both outcomes ({n_groups} groups found)."
            ));
        }
        let run = RunConfig::new("audit")
            .param("schema", schema_param(&args.schema))
            .param("model", model.display().to_string())
            .param("data", args.data.as_ref().map(|p| p.display().to_string()))
            .param("group_column", &args.group_column)
            .param("positive", &positive)
            .param("epsilon", args.epsilon)
            .input("schema", forest.schema_fingerprint())
            .input("data", data.fingerprint());
        (report, run)
    };

    let out = io::out_dir(&args.out.out)?;
    io::write_report(&out, "audit", "Fairness audit", &run, &report, &report.to_markdown())
}

#[derive(Debug, Serialize)]
struct KAnonReport {
    columns: Vec<String>,
    rows: usize,
    k: usize,
    classes: usize,
    rows_at_k: usize,
    min_k: Option<usize>,
}

pub fn k_anon(args: KAnonArgs) -> anyhow::Result<()> {
    let schema = load_schema(&args.schema)?;
    let data = load_data(&args.data, &schema, &args.group_column)?;
    let columns = parse_list(&args.columns);
    if columns.is_empty() {
        bail!("--columns names no columns");
    }
    let names: Vec<&str> = columns.iter().map(String::as_str).collect();
    let profile = anonymity_profile(&data, &names)?;
    let report = KAnonReport {
        rows: data.n_rows(),
        k: profile.k,
        classes: profile.n_classes,
        rows_at_k: profile.rows_at_k,
        min_k: args.min_k,
        columns,
    };
    let mut md = format!(
        "Quasi-identifiers: {}.\n\n| rows | k | equivalence classes | rows in a class of size k |\n|---:|---:|---:|---:|\n",
        report.columns.iter().map(|c| format!("`{c}`")).collect::<Vec<_>>().join(", ")
    );
    let _ = writeln!(md, "| {} | {} | {} | {} |", report.rows, report.k, report.classes, report.rows_at_k);
    println!("{}", report.k);

    let run = RunConfig::new("k-anon")
        .param("schema", schema_param(&args.schema))
        .param("data", args.data.display().to_string())
        .param("columns", &report.columns)
        .param("group_column", &args.group_column)
        .param("min_k", args.min_k)
        .input("data", data.fingerprint());
    let out = io::out_dir(&args.out.out)?;
    io::write_report(&out, "kanon", "k-anonymity", &run, &report, &md)?;
    if let Some(min_k) = args.min_k {
        if report.k < min_k {
            bail!("k = {} is below the required {min_k}", report.k);
        }
    }
    Ok(())
}
