//! Normalized deviation of ergodicity for several degrees from one sample set.
//!
//! Each instance contributes one correlation estimate per degree. Estimates
//! are averaged over instances before the deviation is taken, so the
//! circuit-to-circuit spread of `C_f(P, P)` enters only through the standard
//! error and is not folded by the absolute value.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use super::{config_hash, csv_line, pretty_json, ResultTable, SAMPLE_STREAM};
use crate::analytic::HaarMeanMode;
use crate::ensembles::{member_distribution, EnsembleSpec};
use crate::error::{Error, Result};
use crate::estimators::{estimate_c_f, ProbabilityLookup, SchemeFunction};
use crate::formats::{csv_num, read_probabilities, read_samples, serialize_f64_17};
use crate::noise::{sample_experimental, NoiseModel, SampleSet};
use crate::rng::derive_seed;
use crate::statevector::SystemDims;
use crate::stats::mean_and_se;

/// A probability table and the bitstrings sampled from the same circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestPair {
    pub probabilities: PathBuf,
    pub samples: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormalizedDeSource {
    Simulate {
        ensemble: EnsembleSpec,
        noise: NoiseModel,
        instances: usize,
    },
    Ingest {
        pairs: Vec<IngestPair>,
    },
}

/// `samples` is the per-instance sample count when simulating; when
/// ingesting, 0 uses every bitstring in the file and a positive value keeps
/// the first `samples`.
#[derive(Debug, Clone, Serialize)]
pub struct NormalizedDeConfig {
    pub n_range: Vec<u32>,
    pub degrees: Vec<u32>,
    pub source: NormalizedDeSource,
    pub samples: usize,
    pub base_seed: u64,
    pub haar_mean_mode: HaarMeanMode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedDeRow {
    pub n: u32,
    pub degree: u32,
    pub instances: usize,
    pub samples: usize,
    #[serde(serialize_with = "serialize_f64_17")]
    pub haar_mean: f64,
    /// Instance-averaged normalized correlation estimate.
    #[serde(serialize_with = "serialize_f64_17")]
    pub c_f: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub std_error: f64,
    /// Normalized deviation `|haar_mean - c_f|`.
    #[serde(serialize_with = "serialize_f64_17")]
    pub deviation: f64,
    /// `1 - deviation`, the depolarizing fidelity estimate.
    #[serde(serialize_with = "serialize_f64_17")]
    pub f_hat: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub f_hat_se: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizedDeResult {
    pub config_hash: String,
    pub config: NormalizedDeConfig,
    pub rows: Vec<NormalizedDeRow>,
}

impl NormalizedDeResult {
    pub fn row(&self, n: u32, degree: u32) -> Option<&NormalizedDeRow> {
        self.rows.iter().find(|r| r.n == n && r.degree == degree)
    }
}

/// Per-instance estimates: one value and standard error per degree.
type InstanceEstimates = Vec<(f64, f64)>;

fn estimates_for<L: ProbabilityLookup + ?Sized>(
    p: &L,
    samples: &SampleSet,
    schemes: &[SchemeFunction],
) -> Result<InstanceEstimates> {
    schemes
        .iter()
        .map(|s| estimate_c_f(p, samples, s).map(|e| (e.value, e.std_error)))
        .collect()
}

pub fn run_normalized_de(config: &NormalizedDeConfig) -> Result<NormalizedDeResult> {
    if config.degrees.is_empty() {
        return Err(Error::InvalidArgument("no degrees given".into()));
    }
    let schemes: Vec<SchemeFunction> = config
        .degrees
        .iter()
        .map(|&i| {
            if i < 2 {
                return Err(Error::InvalidArgument(format!(
                    "degree must be at least 2, got {i}"
                )));
            }
            SchemeFunction::normalized_monomial(i)
        })
        .collect::<Result<_>>()?;

    // n -> (sample count, per-instance estimates)
    let mut groups: BTreeMap<u32, (usize, Vec<InstanceEstimates>)> = BTreeMap::new();
    match &config.source {
        NormalizedDeSource::Simulate {
            ensemble,
            noise,
            instances,
        } => {
            if *instances == 0 || config.samples == 0 {
                return Err(Error::InvalidArgument(
                    "simulation needs at least one instance and one sample".into(),
                ));
            }
            if config.n_range.is_empty() {
                return Err(Error::InvalidArgument("n_range is empty".into()));
            }
            for &n in &config.n_range {
                let spec = ensemble
                    .with_dims(SystemDims::dense(n)?)?
                    .with_seed(derive_seed(config.base_seed, &[u64::from(n)]));
                let estimates: Vec<InstanceEstimates> = (0..*instances as u64)
                    .into_par_iter()
                    .map(|k| {
                        let p = member_distribution(&spec, k)?;
                        let seed = derive_seed(config.base_seed, &[u64::from(n), k, SAMPLE_STREAM]);
                        let s = sample_experimental(&p, noise, config.samples, seed)?;
                        estimates_for(&p, &s, &schemes)
                    })
                    .collect::<Result<_>>()?;
                groups.insert(n, (config.samples, estimates));
            }
        }
        NormalizedDeSource::Ingest { pairs } => {
            if pairs.is_empty() {
                return Err(Error::InvalidArgument("no input files given".into()));
            }
            for pair in pairs {
                let table = read_probabilities(&pair.probabilities)?;
                let mut samples = read_samples(&pair.samples, Some(table.dims()))?;
                if config.samples > 0 {
                    if samples.len() < config.samples {
                        return Err(Error::InvalidArgument(format!(
                            "{} holds {} samples, fewer than the {} requested",
                            pair.samples.display(),
                            samples.len(),
                            config.samples
                        )));
                    }
                    samples = SampleSet::new(
                        samples.dims(),
                        samples.bitstrings()[..config.samples].to_vec(),
                        samples.provenance().clone(),
                    )?;
                }
                let n = table.dims().qubits();
                if !config.n_range.is_empty() && !config.n_range.contains(&n) {
                    return Err(Error::Dimension(format!(
                        "{} holds a {n}-qubit table, outside the requested range",
                        pair.probabilities.display()
                    )));
                }
                let estimates = estimates_for(&table, &samples, &schemes)?;
                let entry = groups.entry(n).or_insert((samples.len(), Vec::new()));
                entry.0 = entry.0.min(samples.len());
                entry.1.push(estimates);
            }
        }
    }

    let mut rows = Vec::new();
    for (n, (samples, estimates)) in &groups {
        let big_n = 1u64 << n;
        for (d, scheme) in schemes.iter().enumerate() {
            let haar_mean = scheme.haar_mean(big_n, config.haar_mean_mode)?;
            let (c_f, std_error) = if estimates.len() == 1 {
                estimates[0][d]
            } else {
                mean_and_se(&estimates.iter().map(|e| e[d].0).collect::<Vec<_>>())
            };
            let deviation = (haar_mean - c_f).abs();
            rows.push(NormalizedDeRow {
                n: *n,
                degree: scheme.degree().unwrap_or_default(),
                instances: estimates.len(),
                samples: *samples,
                haar_mean,
                c_f,
                std_error,
                deviation,
                f_hat: 1.0 - deviation,
                f_hat_se: std_error,
            });
        }
    }
    Ok(NormalizedDeResult {
        config_hash: config_hash(config)?,
        config: config.clone(),
        rows,
    })
}

impl ResultTable for NormalizedDeResult {
    fn stem(&self) -> &'static str {
        "normalized-de"
    }

    fn config_hash(&self) -> &str {
        &self.config_hash
    }

    fn to_csv(&self) -> String {
        let mut out = csv_line(&[
            "n",
            "degree",
            "instances",
            "T",
            "haar_mean",
            "c_f",
            "std_error",
            "deviation",
            "f_hat",
            "f_hat_se",
        ]);
        for r in &self.rows {
            out.push_str(&csv_line(&[
                r.n.to_string(),
                r.degree.to_string(),
                r.instances.to_string(),
                r.samples.to_string(),
                csv_num(r.haar_mean),
                csv_num(r.c_f),
                csv_num(r.std_error),
                csv_num(r.deviation),
                csv_num(r.f_hat),
                csv_num(r.f_hat_se),
            ]));
        }
        out
    }

    fn to_json(&self) -> Result<String> {
        pretty_json(self)
    }
}
