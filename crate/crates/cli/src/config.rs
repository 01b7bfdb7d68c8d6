use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{bail, Context};
use serde::Serialize;
use serde_json::Value;

/// Global flags that take a value and may precede the subcommand.
const GLOBAL_VALUE_FLAGS: [&str; 2] = ["--config", "--threads"];

/// Splice the flags from a `--config` TOML file in right after the
/// subcommand, so flags given on the command line still win.
///
/// Keys are long flag names (`min_leaf` or `min-leaf`); arrays become
/// comma-separated values and `true` becomes a bare switch.
pub fn expand_config(args: Vec<OsString>) -> anyhow::Result<Vec<OsString>> {
    let mut path: Option<PathBuf> = None;
    let mut subcommand = None;
    let mut i = 1;
    while i < args.len() {
        let arg = args[i].to_string_lossy();
        if arg == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
        if subcommand.is_none() {
            if GLOBAL_VALUE_FLAGS.contains(&arg.as_ref()) {
                i += 2;
                continue;
            }
            if !arg.starts_with('-') {
                subcommand = Some(i);
            }
        }
        i += 1;
    }
    let path = path.or_else(|| std::env::var_os("RISKFOREST_CONFIG").map(PathBuf::from));
    let (Some(path), Some(at)) = (path, subcommand) else {
        return Ok(args);
    };

    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
    let table: toml::Table = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in table {
        if key == "config" {
            bail!("config files cannot name another config file");
        }
        let flag = format!("--{}", key.replace('_', "-"));
        let rendered = match value {
            toml::Value::Boolean(true) => {
                extra.push(flag.into());
                continue;
            }
            toml::Value::Boolean(false) => continue,
            toml::Value::String(s) => s,
            toml::Value::Integer(n) => n.to_string(),
            toml::Value::Float(x) => x.to_string(),
            toml::Value::Array(items) => items
                .iter()
                .map(|v| match v {
                    toml::Value::String(s) => Ok(s.clone()),
                    toml::Value::Integer(n) => Ok(n.to_string()),
                    toml::Value::Float(x) => Ok(x.to_string()),
                    other => bail!("config key `{key}`: unsupported array item {other}"),
                })
                .collect::<anyhow::Result<Vec<_>>>()?
                .join(","),
            other => bail!("config key `{key}`: unsupported value {other}"),
        };
        extra.push(flag.into());
        extra.push(rendered.into());
    }
    let mut out = args[..=at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at + 1..]);
    Ok(out)
}

/// The fully resolved parameters of one command run, written at the top of
/// every report. `parameters` can be fed back through `--config`.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub tool_version: String,
    pub parameters: BTreeMap<String, Value>,
    /// Content fingerprints of the inputs.
    pub inputs: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            parameters: BTreeMap::new(),
            inputs: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        let value = serde_json::to_value(value).expect("parameter serializes");
        if !value.is_null() {
            self.parameters.insert(key.to_string(), value);
        }
        self
    }

    pub fn input(mut self, key: &str, fingerprint: impl Into<String>) -> Self {
        self.inputs.insert(key.to_string(), fingerprint.into());
        self
    }

    /// The parameters as a TOML document usable with `--config`.
    pub fn parameters_toml(&self) -> String {
        toml::to_string(&self.parameters).expect("parameters serialize to TOML")
    }

    pub fn markdown(&self) -> String {
        let mut out = format!("## Run configuration\n\nCommand `{}`, version {}.\n\n", self.command, self.tool_version);
        out.push_str("```toml\n");
        out.push_str(&self.parameters_toml());
        out.push_str("```\n");
        if !self.inputs.is_empty() {
            out.push_str("\n| input | fingerprint |\n|---|---|\n");
            for (k, v) in &self.inputs {
                out.push_str(&format!("| {k} | `{v}` |\n"));
            }
        }
        out
    }

    /// One-line JSON rendering for CSV comment headers.
    pub fn comment(&self) -> String {
        format!("run {}", serde_json::to_string(self).expect("run config serializes"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(args: &[&str]) -> Vec<OsString> {
        args.iter().map(OsString::from).collect()
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "trees = 11\nmin_leaf = 3\nweights = [2, 1, 1]\nrecipe = true\nx = false\n").unwrap();
        let p = path.to_str().unwrap();
        let out = expand_config(os(&["rf", "--threads", "2", "--config", p, "train", "--seed", "1"])).unwrap();
        let out: Vec<String> = out.iter().map(|s| s.to_string_lossy().into_owned()).collect();
        assert_eq!(
            out,
            [
                "rf", "--threads", "2", "--config", p, "train", "--min-leaf", "3", "--recipe", "--trees", "11",
                "--weights", "2,1,1", "--seed", "1"
            ]
        );
    }

    #[test]
    fn untouched_without_config() {
        let args = os(&["rf", "train", "--seed", "1"]);
        assert_eq!(expand_config(args.clone()).unwrap(), args);
    }

    #[test]
    fn parameters_round_trip_as_toml() {
        let run = RunConfig::new("train").param("seed", 7).param("weights", [1.0, 2.0]).param("none", None::<u8>);
        assert_eq!(run.parameters_toml(), "seed = 7\nweights = [1.0, 2.0]\n");
    }
}
