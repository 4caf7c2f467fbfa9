//! Run configuration: a TOML document with nested sections. Unknown keys are
//! hard errors (a silently ignored typo corrupts a benchmark sweep), and the
//! whole offending set is reported at once.

use serde::{Deserialize, Serialize};
use ttprep::quantize::{DistributionSpec, GridSpec, OrderingScheme};

use crate::error::AppError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distribution: DistributionSection,
    pub grid: GridSection,
    #[serde(default)]
    pub ordering: OrderingSection,
    #[serde(default)]
    pub cross: CrossSection,
    #[serde(default)]
    pub compile: CompileSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSection {
    /// "lognormal" (univariate) or "lognormal_nd".
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cov: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Qubits per variable.
    pub qubits: usize,
    /// One `[lower, upper]` pair per variable; canonical quantile bounds
    /// when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderingSection {
    pub scheme: String,
}

impl Default for OrderingSection {
    fn default() -> Self {
        Self {
            scheme: "sequential".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrossSection {
    pub max_rank: usize,
    pub rel_tol: f64,
    pub max_sweeps: usize,
    pub rank_increment: usize,
    pub seed: u64,
    pub validation_samples: usize,
}

impl Default for CrossSection {
    fn default() -> Self {
        Self {
            max_rank: 8,
            rel_tol: 1e-10,
            max_sweeps: 10,
            rank_increment: 4,
            seed: 0,
            validation_samples: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompileSection {
    /// Hard bond cap for compilation; defaults to max_rank rounded up to a
    /// power of two.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_cap: Option<usize>,
    pub merge: bool,
    /// Also build the exact conditional-rotation baseline (univariate only).
    pub baseline: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub shots: u64,
    pub seed: u64,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self {
            shots: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Qubit counts per variable, one report row each.
    pub qubits: Vec<usize>,
    /// Wall-time repetitions per point; the row carries the mean.
    #[serde(default = "default_repeats")]
    pub repeats: usize,
}

fn default_repeats() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// "csv" or "json".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

/// section -> allowed keys; kept in sync with the serde structs so the
/// unknown-key pass can name every offender before typed parsing runs.
const SCHEMA: &[(&str, &[&str])] = &[
    ("distribution", &["kind", "mu", "sigma", "mean", "cov"]),
    ("grid", &["qubits", "bounds"]),
    ("ordering", &["scheme"]),
    (
        "cross",
        &[
            "max_rank",
            "rel_tol",
            "max_sweeps",
            "rank_increment",
            "seed",
            "validation_samples",
        ],
    ),
    ("compile", &["chi_cap", "merge", "baseline"]),
    ("simulate", &["shots", "seed"]),
    ("sweep", &["qubits", "repeats"]),
    ("output", &["path", "format"]),
];

fn unknown_keys(doc: &toml::Value) -> Vec<String> {
    let mut bad = Vec::new();
    let Some(table) = doc.as_table() else {
        return bad;
    };
    for (section, value) in table {
        match SCHEMA.iter().find(|(name, _)| name == section) {
            None => bad.push(section.clone()),
            Some((_, keys)) => {
                if let Some(entries) = value.as_table() {
                    for key in entries.keys() {
                        if !keys.contains(&key.as_str()) {
                            bad.push(format!("{section}.{key}"));
                        }
                    }
                }
            }
        }
    }
    bad
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, AppError> {
    let doc: toml::Value = text
        .parse()
        .map_err(|e| AppError::Config(format!("not valid TOML: {e}")))?;
    let bad = unknown_keys(&doc);
    if !bad.is_empty() {
        return Err(AppError::Config(format!(
            "unknown config keys: {}",
            bad.join(", ")
        )));
    }
    let mut cfg: ExperimentConfig = doc
        .try_into()
        .map_err(|e| AppError::Config(format!("{e}")))?;
    if cfg.distribution.kind == "lognormal" {
        cfg.distribution.mu.get_or_insert(0.0);
        cfg.distribution.sigma.get_or_insert(0.25);
    }
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config sections serialize to tables")
    }

    /// Variables in the distribution (and therefore grid dimensions).
    pub fn dims(&self) -> usize {
        match self.distribution.kind.as_str() {
            "lognormal_nd" => self.distribution.mean.as_ref().map_or(0, Vec::len),
            _ => 1,
        }
    }

    /// Compilation bond cap with the default resolved.
    pub fn chi_cap(&self) -> usize {
        self.compile
            .chi_cap
            .unwrap_or_else(|| self.cross.max_rank.next_power_of_two())
    }

    pub fn scheme(&self) -> OrderingScheme {
        match self.ordering.scheme.as_str() {
            "mirrored" => OrderingScheme::Mirrored,
            "interleaved" => OrderingScheme::Interleaved,
            _ => OrderingScheme::Sequential,
        }
    }

    /// A fresh distribution spec (specs hold closures for custom densities
    /// and are deliberately not Clone).
    pub fn distribution_spec(&self) -> DistributionSpec {
        match self.distribution.kind.as_str() {
            "lognormal_nd" => DistributionSpec::LognormalNd {
                mu: self.distribution.mean.clone().expect("validated"),
                cov: self.distribution.cov.clone().expect("validated"),
            },
            _ => DistributionSpec::Lognormal1d {
                mu: self.distribution.mu.unwrap_or(0.0),
                sigma: self.distribution.sigma.unwrap_or(0.25),
            },
        }
    }

    /// Grid for `qubits` per dimension: configured bounds if present,
    /// otherwise the distribution's canonical quantile box.
    pub fn grid_for(&self, qubits: usize) -> Result<GridSpec, AppError> {
        match &self.grid.bounds {
            Some(bounds) => GridSpec::new(
                bounds.iter().map(|b| (b[0], b[1])).collect(),
                qubits,
            )
            .map_err(|e| AppError::Numeric(format!("{e}"))),
            None => self
                .distribution_spec()
                .canonical_grid(qubits)
                .map_err(|e| AppError::Numeric(format!("{e}"))),
        }
    }

    fn validate(&self) -> Result<(), AppError> {
        let err = |msg: String| Err(AppError::Config(msg));

        match self.distribution.kind.as_str() {
            "lognormal" => {
                if self.distribution.mean.is_some() || self.distribution.cov.is_some() {
                    return err(
                        "distribution: univariate lognormal takes mu/sigma, not mean/cov".into(),
                    );
                }
                if let Some(s) = self.distribution.sigma {
                    if !(s > 0.0) || !s.is_finite() {
                        return err(format!("distribution.sigma must be positive, got {s}"));
                    }
                }
            }
            "lognormal_nd" => {
                if self.distribution.mu.is_some() || self.distribution.sigma.is_some() {
                    return err(
                        "distribution: lognormal_nd takes mean/cov, not mu/sigma".into(),
                    );
                }
                let Some(mean) = &self.distribution.mean else {
                    return err("distribution.mean is required for lognormal_nd".into());
                };
                let Some(cov) = &self.distribution.cov else {
                    return err("distribution.cov is required for lognormal_nd".into());
                };
                if mean.is_empty() {
                    return err("distribution.mean must be non-empty".into());
                }
                if cov.len() != mean.len() || cov.iter().any(|row| row.len() != mean.len()) {
                    return err(format!(
                        "distribution.cov must be {n}x{n} to match the mean",
                        n = mean.len()
                    ));
                }
            }
            other => {
                return err(format!(
                    "distribution.kind {other:?} is not one of: lognormal, lognormal_nd"
                ))
            }
        }

        let dims = self.dims();
        match self.ordering.scheme.as_str() {
            "sequential" | "interleaved" => {}
            "mirrored" => {
                if dims != 2 {
                    return err(format!(
                        "ordering.scheme mirrored needs exactly 2 dims, distribution has {dims}"
                    ));
                }
            }
            other => {
                return err(format!(
                    "ordering.scheme {other:?} is not one of: sequential, mirrored, interleaved"
                ))
            }
        }

        if self.grid.qubits == 0 {
            return err("grid.qubits must be at least 1".into());
        }
        if let Some(bounds) = &self.grid.bounds {
            if bounds.len() != dims {
                return err(format!(
                    "grid.bounds has {} pairs for {dims} dims",
                    bounds.len()
                ));
            }
            for (i, b) in bounds.iter().enumerate() {
                if !(b[0] < b[1]) || !b[0].is_finite() || !b[1].is_finite() {
                    return err(format!("grid.bounds[{i}] must be finite and increasing"));
                }
            }
        }

        if self.cross.max_rank == 0 {
            return err("cross.max_rank must be at least 1".into());
        }
        let padded = self.cross.max_rank.next_power_of_two();
        if self.chi_cap() < padded {
            return err(format!(
                "compile.chi_cap {} cannot hold cross.max_rank {} after power-of-two padding ({padded})",
                self.chi_cap(),
                self.cross.max_rank
            ));
        }

        if self.compile.baseline && dims != 1 {
            return err("compile.baseline is univariate only".into());
        }

        if let Some(sweep) = &self.sweep {
            if sweep.qubits.is_empty() {
                return err("sweep.qubits must list at least one point".into());
            }
            if sweep.qubits.iter().any(|&q| q == 0) {
                return err("sweep.qubits entries must be at least 1".into());
            }
            if sweep.repeats == 0 {
                return err("sweep.repeats must be at least 1".into());
            }
        }

        if let Some(output) = &self.output {
            if let Some(fmt) = &output.format {
                if fmt != "csv" && fmt != "json" {
                    return err(format!("output.format {fmt:?} is not one of: csv, json"));
                }
            }
        }
        Ok(())
    }
}
