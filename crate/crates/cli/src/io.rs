use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use riskforest_core::{reference, Dataset, FeatureSchema};
use serde::Serialize;

use crate::config::RunConfig;
use crate::SchemaArgs;

pub fn load_schema(args: &SchemaArgs) -> anyhow::Result<FeatureSchema> {
    match &args.schema {
        Some(path) => FeatureSchema::load(path).with_context(|| format!("loading schema {}", path.display())),
        None => Ok(reference::schema()?),
    }
}

pub fn schema_param(args: &SchemaArgs) -> Option<String> {
    args.schema.as_ref().map(|p| p.display().to_string())
}

/// Load a CSV under `schema`. A column named `group_column` that the schema
/// does not already declare is taken as the group attribute.
pub fn load_data(path: &Path, schema: &FeatureSchema, group_column: &str) -> anyhow::Result<Dataset> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap_or("");
    let has_group = header.split(',').any(|c| c.trim() == group_column);
    let schema = if has_group && schema.group_attribute.is_none() {
        schema.clone().with_group_attribute(Some(group_column))?
    } else {
        schema.clone()
    };
    Dataset::read_csv(text.as_bytes(), &schema, path.display().to_string())
        .with_context(|| format!("loading {}", path.display()))
}

pub fn parse_floats(what: &str, text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("{what}: `{s}` is not a number")))
        .collect()
}

pub fn parse_list(text: &str) -> Vec<String> {
    text.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

pub fn out_dir(dir: &Path) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.to_path_buf())
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    run: &'a RunConfig,
    report: &'a T,
}

/// Write `<stem>.json` (run header plus `body`) and `<stem>.md`.
pub fn write_report<T: Serialize>(
    dir: &Path,
    stem: &str,
    title: &str,
    run: &RunConfig,
    body: &T,
    markdown: &str,
) -> anyhow::Result<()> {
    let json = serde_json::to_string_pretty(&Envelope { run, report: body })?;
    write_file(&dir.join(format!("{stem}.json")), &(json + "\n"))?;
    let md = format!("# {title}\n\n{}\n{}", markdown.trim_end_matches('\n').to_string() + "\n", run.markdown());
    write_file(&dir.join(format!("{stem}.md")), &md)
}

pub fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn check_positive(name: &str, value: f64) -> anyhow::Result<()> {
    if !(value > 0.0 && value.is_finite()) {
        bail!("{name} must be positive, got {value}");
    }
    Ok(())
}
