//! Seeded generator of labeled tables for any [`FeatureSchema`].
//!
//! Each row draws its label from the requested marginals and a latent risk
//! score `t = signal^3 * SEPARATION * rank(label) + N(0, 1)`, where `rank` is
//! centered so the first (highest-risk) label sits highest. Two features in
//! three load on `t` with alternating sign, every third is pure noise, and
//! each feature adds its own noise before being mapped onto its kind. With
//! `signal = 0` no feature depends on the label.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use super::dataset::{Dataset, Record};
use super::schema::{FeatureKind, FeatureSchema, FeatureSpec, Sentinel};
use crate::error::{Error, Result};

/// Distance in latent standard deviations between adjacent labels at full signal.
const SEPARATION: f64 = 3.2;
/// Per-feature noise added to the latent score.
const FEATURE_NOISE: f64 = 0.6;

/// Group layout for [`generate_grouped`]: each group gets a share of the
/// rows and its own label marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPlan {
    pub name: String,
    pub share: f64,
    pub marginals: Vec<f64>,
}

pub(crate) fn check_marginals(marginals: &[f64], n_labels: usize) -> Result<()> {
    if marginals.len() != n_labels {
        return Err(Error::invalid(format!("{} marginals given for {n_labels} labels", marginals.len())));
    }
    if marginals.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::invalid("marginals must be nonnegative"));
    }
    let sum: f64 = marginals.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("marginals sum to {sum}, not 1")));
    }
    Ok(())
}

pub fn generate_synthetic(
    schema: &FeatureSchema,
    n: usize,
    marginals: &[f64],
    signal_strength: f64,
    seed: u64,
) -> Result<Dataset> {
    let plan = [GroupPlan { name: String::new(), share: 1.0, marginals: marginals.to_vec() }];
    let schema = schema.clone().with_group_attribute(None)?;
    generate(&schema, n, &plan, signal_strength, seed)
}

/// Like [`generate_synthetic`], but rows are assigned to groups and each
/// group draws labels from its own marginals. The schema's group attribute
/// names the group column (`"group"` if the schema has none).
pub fn generate_grouped(
    schema: &FeatureSchema,
    n: usize,
    groups: &[GroupPlan],
    signal_strength: f64,
    seed: u64,
) -> Result<Dataset> {
    if groups.is_empty() {
        return Err(Error::invalid("at least one group is required"));
    }
    let shares: Vec<f64> = groups.iter().map(|g| g.share).collect();
    check_marginals(&shares, groups.len()).map_err(|_| Error::invalid("group shares must sum to 1"))?;
    let group_column = schema.group_attribute.clone().unwrap_or_else(|| "group".to_string());
    let schema = schema.clone().with_group_attribute(Some(&group_column))?;
    generate(&schema, n, groups, signal_strength, seed)
}

fn generate(
    schema: &FeatureSchema,
    n: usize,
    groups: &[GroupPlan],
    signal_strength: f64,
    seed: u64,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::invalid("row count must be at least 1"));
    }
    if !(0.0..=1.0).contains(&signal_strength) {
        return Err(Error::invalid(format!("signal strength {signal_strength} outside [0, 1]")));
    }
    for g in groups {
        check_marginals(&g.marginals, schema.n_labels())?;
    }

    let k = schema.n_labels();
    let center = (k as f64 - 1.0) / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let standard = Normal::new(0.0, 1.0).expect("unit normal");
    let with_groups = schema.group_attribute.is_some();

    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let group = &groups[draw_index(&mut rng, groups.iter().map(|g| g.share))];
        let label = draw_index(&mut rng, group.marginals.iter().copied());
        let rank = center - label as f64;
        let latent = signal_strength.powi(3) * SEPARATION * rank + standard.sample(&mut rng);
        let values = schema
            .features
            .iter()
            .enumerate()
            .map(|(j, spec)| {
                let loading = match j % 3 {
                    0 => 1.0,
                    1 => -1.0,
                    _ => 0.0,
                };
                let u = loading * latent + FEATURE_NOISE * standard.sample(&mut rng);
                draw_value(spec, u, &mut rng)
            })
            .collect();
        rows.push(Record { values, label, group: with_groups.then(|| group.name.clone()) });
    }
    let provenance = format!("synthetic(n={n}, signal={signal_strength}, seed={seed})");
    Dataset::from_rows(schema.clone(), rows, provenance)
}

fn draw_index(rng: &mut impl Rng, weights: impl Iterator<Item = f64> + Clone) -> usize {
    let total: f64 = weights.clone().sum();
    let mut x = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            last = i;
            if x < w {
                return i;
            }
            x -= w;
        }
    }
    last
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Map a latent feature score `u` (roughly standard normal when label-free)
/// onto a legal value of `spec`. Larger `u` means more offending history.
fn draw_value(spec: &FeatureSpec, u: f64, rng: &mut impl Rng) -> f64 {
    match spec.kind {
        FeatureKind::Numeric => {
            if spec.sentinel == Some(Sentinel::NullAllowed) && rng.random::<f64>() > sigmoid(u) {
                return f64::INFINITY;
            }
            round1((30.0 - 6.0 * u).clamp(10.0, 90.0))
        }
        FeatureKind::Count => {
            if spec.sentinel == Some(Sentinel::NullAllowed) && rng.random::<f64>() < 0.02 {
                return f64::INFINITY;
            }
            let mean = (0.7 + 0.8 * u).exp().min(200.0);
            Poisson::new(mean).expect("positive mean").sample(rng).floor()
        }
        FeatureKind::YearsSince => {
            let code = match spec.sentinel {
                Some(Sentinel::MissingHistoryCode(code)) => code as f64,
                _ => unreachable!("validated schema"),
            };
            if rng.random::<f64>() > sigmoid(1.0 + 1.5 * u) {
                code
            } else {
                round1((1.0 - 0.7 * u + 0.3 * rng.random::<f64>()).exp().clamp(0.0, 60.0))
            }
        }
        FeatureKind::Binary => {
            if rng.random::<f64>() < sigmoid(u) {
                1.0
            } else {
                0.0
            }
        }
        FeatureKind::Categorical => {
            let k = spec.categories.len();
            let mid = (k as f64 - 1.0) / 2.0;
            let logits: Vec<f64> = (0..k).map(|c| u * 2.0 * (c as f64 - mid) / k as f64).collect();
            let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            draw_index(rng, logits.iter().map(move |l| (l - max).exp())) as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE4: [f64; 3] = [0.1186, 0.4835, 0.3979];

    #[test]
    fn label_frequencies_follow_marginals() {
        let n = 10_000;
        let data = generate_synthetic(&FeatureSchema::hart(), n, &TABLE4, 0.8, 7).unwrap();
        assert_eq!(data.n_rows(), n);
        let tol = 3.0 / (n as f64).sqrt();
        for (f, p) in data.label_frequencies().iter().zip(TABLE4) {
            assert!((f - p).abs() <= tol, "{f} vs {p}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let schema = FeatureSchema::hart();
        let a = generate_synthetic(&schema, 200, &TABLE4, 0.5, 3).unwrap();
        let b = generate_synthetic(&schema, 200, &TABLE4, 0.5, 3).unwrap();
        let c = generate_synthetic(&schema, 200, &TABLE4, 0.5, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_marginals() {
        let schema = FeatureSchema::hart();
        assert!(generate_synthetic(&schema, 10, &[0.5, 0.5], 0.5, 1).is_err());
        assert!(generate_synthetic(&schema, 10, &[0.5, 0.6, -0.1], 0.5, 1).is_err());
        assert!(generate_synthetic(&schema, 10, &[0.5, 0.3, 0.1], 0.5, 1).is_err());
        assert!(generate_synthetic(&schema, 0, &TABLE4, 0.5, 1).is_err());
        assert!(generate_synthetic(&schema, 10, &TABLE4, 1.5, 1).is_err());
    }

    #[test]
    fn grouped_rows_follow_group_marginals() {
        let groups = [
            GroupPlan { name: "A".into(), share: 0.5, marginals: vec![0.1, 0.5, 0.4] },
            GroupPlan { name: "B".into(), share: 0.5, marginals: vec![0.3, 0.5, 0.2] },
        ];
        let data = generate_grouped(&FeatureSchema::hart(), 4000, &groups, 0.8, 11).unwrap();
        assert_eq!(data.schema().group_attribute.as_deref(), Some("group"));
        let rate = |name: &str| {
            let rows: Vec<usize> = (0..data.n_rows()).filter(|&i| data.group(i) == Some(name)).collect();
            rows.iter().filter(|&&i| data.label(i) == 0).count() as f64 / rows.len() as f64
        };
        assert!((rate("B") - rate("A") - 0.2).abs() < 0.05);
    }
}
