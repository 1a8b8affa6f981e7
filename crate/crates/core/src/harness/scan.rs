//! Deviation-of-ergodicity scans over register sizes and circuit instances.

use rayon::prelude::*;
use serde::Serialize;

use super::{config_hash, csv_line, pretty_json, ResultTable, SAMPLE_STREAM};
use crate::analytic::HaarMeanMode;
use crate::ensembles::{member_distribution, EnsembleSpec};
use crate::error::{Error, Result};
use crate::estimators::{
    deviation_of_ergodicity, deviation_of_ergodicity_exact, fidelity_from_report, ErgodicityReport,
    SchemeFunction, Verdict, DEFAULT_ALPHA,
};
use crate::formats::{csv_num, serialize_f64_17, serialize_opt_f64_17};
use crate::noise::{experimental_distribution, sample_experimental, NoiseModel};
use crate::rng::derive_seed;
use crate::statevector::SystemDims;
use crate::stats::{mean_and_se, median};

/// Scan configuration. `samples == 0` evaluates `C_f(P, Q)` exactly.
#[derive(Debug, Clone, Serialize)]
pub struct ScanConfig {
    pub ensemble: EnsembleSpec,
    pub n_range: Vec<u32>,
    pub instances: usize,
    pub scheme: SchemeFunction,
    pub alpha: f64,
    pub samples: usize,
    pub noise: NoiseModel,
    pub base_seed: u64,
    pub haar_mean_mode: HaarMeanMode,
}

impl ScanConfig {
    /// Noiseless exact scan with 10 instances and `alpha = 10`.
    pub fn new(ensemble: EnsembleSpec, n_range: Vec<u32>, scheme: SchemeFunction) -> Self {
        let base_seed = ensemble.base_seed();
        Self {
            ensemble,
            n_range,
            instances: 10,
            scheme,
            alpha: DEFAULT_ALPHA,
            samples: 0,
            noise: NoiseModel::Noiseless,
            base_seed,
            haar_mean_mode: HaarMeanMode::Exact,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_range.is_empty() {
            return Err(Error::InvalidArgument("n_range is empty".into()));
        }
        if self.instances == 0 {
            return Err(Error::InvalidArgument(
                "instances must be at least 1".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        self.scheme.validate()
    }
}

/// One circuit instance at one register size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: u32,
    pub instance: u64,
    /// Seed of the sampled bitstrings; `None` for exact rows.
    pub sample_seed: Option<u64>,
    pub samples: usize,
    #[serde(serialize_with = "serialize_f64_17")]
    pub c_f: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub std_error: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub haar_mean: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub sigma_f: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub deviation: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub alpha: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub threshold: f64,
    pub verdict: Verdict,
    #[serde(serialize_with = "serialize_opt_f64_17")]
    pub f_hat: Option<f64>,
    #[serde(serialize_with = "serialize_opt_f64_17")]
    pub f_hat_se: Option<f64>,
}

impl ScanRow {
    fn from_report(
        n: u32,
        instance: u64,
        sample_seed: Option<u64>,
        report: &ErgodicityReport,
    ) -> Self {
        let fidelity = match report.scheme {
            SchemeFunction::Monomial(i) | SchemeFunction::NormalizedMonomial(i) if i >= 2 => {
                fidelity_from_report(report).ok()
            }
            _ => None,
        };
        Self {
            n,
            instance,
            sample_seed,
            samples: report.estimate.samples,
            c_f: report.estimate.value,
            std_error: report.estimate.std_error,
            haar_mean: report.haar_mean,
            sigma_f: report.sigma_f,
            deviation: report.deviation,
            alpha: report.alpha,
            threshold: report.threshold,
            verdict: report.verdict,
            f_hat: fidelity.map(|f| f.f_hat),
            f_hat_se: fidelity.map(|f| f.std_error),
        }
    }

    /// The verdict implied by this row's own fields.
    pub fn recomputed_verdict(&self) -> Verdict {
        let threshold = self.alpha * self.sigma_f / ((1u64 << self.n) as f64).sqrt();
        if (self.haar_mean - self.c_f).abs() <= threshold {
            Verdict::Within
        } else {
            Verdict::Violated
        }
    }
}

/// Per-size aggregate over instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummaryRow {
    pub n: u32,
    pub instances: usize,
    #[serde(serialize_with = "serialize_f64_17")]
    pub median_deviation: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub mean_deviation: f64,
    pub violations: usize,
    #[serde(serialize_with = "serialize_f64_17")]
    pub violation_rate: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub sigma_f: f64,
    /// `sigma_f / sqrt(N)`, the expected scale of the deviation.
    #[serde(serialize_with = "serialize_f64_17")]
    pub reference_scale: f64,
    #[serde(serialize_with = "serialize_opt_f64_17")]
    pub mean_f_hat: Option<f64>,
    /// Standard error of `mean_f_hat` across instances.
    #[serde(serialize_with = "serialize_opt_f64_17")]
    pub mean_f_hat_se: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub config_hash: String,
    pub config: ScanConfig,
    /// Brickwork layer count actually used.
    pub depth: Option<u32>,
    #[serde(skip)]
    pub rows: Vec<ScanRow>,
    pub summary: Vec<ScanSummaryRow>,
}

/// Run the scan. Instances are evaluated in parallel and returned in order.
pub fn run_ergodicity_scan(config: &ScanConfig) -> Result<ScanResult> {
    config.validate()?;
    let hash = config_hash(config)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut depth = None;
    for &n in &config.n_range {
        let dims = SystemDims::dense(n)?;
        let spec = config
            .ensemble
            .with_dims(dims)?
            .with_seed(derive_seed(config.base_seed, &[u64::from(n)]));
        depth = depth.or(spec.depth());
        if let Some(size) = spec.size() {
            if config.instances as u64 > size {
                return Err(Error::MemberOutOfRange {
                    index: config.instances as u64 - 1,
                    size,
                });
            }
        }
        let block: Vec<ScanRow> = (0..config.instances as u64)
            .into_par_iter()
            .map(|k| run_instance(config, &spec, n, k))
            .collect::<Result<_>>()?;
        summary.push(summarize(n, &block));
        rows.extend(block);
    }
    Ok(ScanResult {
        config_hash: hash,
        config: config.clone(),
        depth,
        rows,
        summary,
    })
}

fn run_instance(config: &ScanConfig, spec: &EnsembleSpec, n: u32, k: u64) -> Result<ScanRow> {
    let p = member_distribution(spec, k)?;
    if config.samples == 0 {
        let q = experimental_distribution(&p, &config.noise)?;
        let report = deviation_of_ergodicity_exact(
            &p,
            &q,
            &config.scheme,
            config.alpha,
            config.haar_mean_mode,
        )?;
        Ok(ScanRow::from_report(n, k, None, &report))
    } else {
        let seed = derive_seed(config.base_seed, &[u64::from(n), k, SAMPLE_STREAM]);
        let samples = sample_experimental(&p, &config.noise, config.samples, seed)?;
        let report = deviation_of_ergodicity(
            &p,
            &samples,
            &config.scheme,
            config.alpha,
            config.haar_mean_mode,
        )?;
        Ok(ScanRow::from_report(n, k, Some(seed), &report))
    }
}

fn summarize(n: u32, rows: &[ScanRow]) -> ScanSummaryRow {
    let deviations: Vec<f64> = rows.iter().map(|r| r.deviation).collect();
    let violations = rows
        .iter()
        .filter(|r| r.verdict == Verdict::Violated)
        .count();
    let f_hats: Option<Vec<f64>> = rows.iter().map(|r| r.f_hat).collect();
    let (mean_f_hat, mean_f_hat_se) = match f_hats {
        Some(v) if !v.is_empty() => {
            let (m, se) = mean_and_se(&v);
            (Some(m), Some(se))
        }
        _ => (None, None),
    };
    let sigma_f = rows[0].sigma_f;
    ScanSummaryRow {
        n,
        instances: rows.len(),
        median_deviation: median(&deviations).unwrap_or(f64::NAN),
        mean_deviation: mean_and_se(&deviations).0,
        violations,
        violation_rate: violations as f64 / rows.len() as f64,
        sigma_f,
        reference_scale: sigma_f / ((1u64 << n) as f64).sqrt(),
        mean_f_hat,
        mean_f_hat_se,
    }
}

fn opt_num(v: Option<f64>) -> String {
    v.map(csv_num).unwrap_or_default()
}

impl ResultTable for ScanResult {
    fn stem(&self) -> &'static str {
        "scan"
    }

    fn config_hash(&self) -> &str {
        &self.config_hash
    }

    fn to_csv(&self) -> String {
        let mut out = csv_line(&[
            "n",
            "instance",
            "sample_seed",
            "T",
            "c_f",
            "std_error",
            "haar_mean",
            "sigma_f",
            "deviation",
            "alpha",
            "threshold",
            "verdict",
            "f_hat",
            "f_hat_se",
        ]);
        for r in &self.rows {
            out.push_str(&csv_line(&[
                r.n.to_string(),
                r.instance.to_string(),
                r.sample_seed.map(|s| s.to_string()).unwrap_or_default(),
                r.samples.to_string(),
                csv_num(r.c_f),
                csv_num(r.std_error),
                csv_num(r.haar_mean),
                csv_num(r.sigma_f),
                csv_num(r.deviation),
                csv_num(r.alpha),
                csv_num(r.threshold),
                r.verdict.as_str().to_string(),
                opt_num(r.f_hat),
                opt_num(r.f_hat_se),
            ]));
        }
        out
    }

    fn to_json(&self) -> Result<String> {
        pretty_json(self)
    }
}
