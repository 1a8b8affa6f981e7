//! Monte-Carlo checks of the Haar moment and covariance formulas.

use rayon::prelude::*;
use serde::Serialize;

use super::{config_hash, csv_line, pretty_json, ResultTable};
use crate::analytic::{
    digamma, haar_covariance, haar_joint_moment, plogp_covariance, MomentQuery, EULER_GAMMA,
};
use crate::ensembles::haar_vector_from;
use crate::error::{Error, Result};
use crate::formats::{csv_num, serialize_f64_17};
use crate::rng::{derive_seed, rng_from_seed};
use crate::stats::{batch_ranges, mean_and_se, DEFAULT_BATCHES};
use crate::summation::CompensatedSum;

/// Largest register for [`run_moment_scaling`].
pub const MAX_MOMENT_QUBITS: u32 = 10;

/// Largest dimension for [`run_covariance_verification`].
pub const MAX_COVARIANCE_DIM: u64 = 256;

fn z_score(mc: f64, analytic: f64, se: f64) -> f64 {
    if se > 0.0 {
        (mc - analytic) / se
    } else {
        f64::NAN
    }
}

/// Accumulates `E[a]`, `E[b]`, `E[ab]` and the within-batch covariance.
#[derive(Default)]
struct PairAccumulator {
    a: CompensatedSum,
    b: CompensatedSum,
    ab: CompensatedSum,
}

impl PairAccumulator {
    fn push(&mut self, a: f64, b: f64) {
        self.a.add(a);
        self.b.add(b);
        self.ab.add(a * b);
    }

    /// `(E[a], E[ab], Cov(a, b))` over `m` draws.
    fn finish(&self, m: usize) -> (f64, f64, f64) {
        let m = m as f64;
        let ea = self.a.value() / m;
        let eb = self.b.value() / m;
        let eab = self.ab.value() / m;
        (ea, eab, eab - ea * eb)
    }
}

/// Per-batch Haar draws of `(P(0), P(1))` evaluated by `sink`, one stream per batch.
fn batched_pairs<T, F>(n_dim: usize, samples: usize, seed: u64, sink: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut dyn Iterator<Item = (f64, f64)>, usize) -> T + Sync,
{
    let ranges: Vec<(usize, usize)> = batch_ranges(samples, DEFAULT_BATCHES).collect();
    ranges
        .into_par_iter()
        .enumerate()
        .map(|(b, (lo, hi))| {
            let mut rng = rng_from_seed(derive_seed(seed, &[b as u64]));
            let mut draws = (lo..hi).map(|_| {
                let v = haar_vector_from(&mut rng, n_dim);
                (v[0].norm_sqr(), v[1].norm_sqr())
            });
            sink(&mut draws, hi - lo)
        })
        .collect()
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 * DEFAULT_BATCHES {
        return Err(Error::InvalidArgument(format!(
            "need at least {} samples, got {samples}",
            2 * DEFAULT_BATCHES
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MomentScalingConfig {
    pub n_range: Vec<u32>,
    pub samples: usize,
    pub base_seed: u64,
}

/// Monte-Carlo and analytic `E[P]`, `E[P(x)P(y)]` and `Cov(P(x), P(y))` at one size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub n: u32,
    pub big_n: u64,
    pub samples: usize,
    #[serde(serialize_with = "serialize_f64_17")]
    pub mean_mc: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub mean_se: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub mean_analytic: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub joint_mc: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub joint_se: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub joint_analytic: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub cov_mc: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub cov_se: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub cov_analytic: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentScalingResult {
    pub config_hash: String,
    pub config: MomentScalingConfig,
    pub rows: Vec<MomentRow>,
}

/// Haar first and second moments against `1/N`, `1/(N(N+1))` and `-1/(N^2(N+1))`.
pub fn run_moment_scaling(config: &MomentScalingConfig) -> Result<MomentScalingResult> {
    check_samples(config.samples)?;
    if config.n_range.is_empty() {
        return Err(Error::InvalidArgument("n_range is empty".into()));
    }
    let mut rows = Vec::with_capacity(config.n_range.len());
    for &n in &config.n_range {
        if !(1..=MAX_MOMENT_QUBITS).contains(&n) {
            return Err(Error::SizeCap(format!(
                "moment scaling supports 1..={MAX_MOMENT_QUBITS} qubits, got {n}"
            )));
        }
        let big_n = 1u64 << n;
        let seed = derive_seed(config.base_seed, &[u64::from(n)]);
        let batches = batched_pairs(big_n as usize, config.samples, seed, |draws, m| {
            let mut acc = PairAccumulator::default();
            draws.for_each(|(p, q)| acc.push(p, q));
            acc.finish(m)
        });
        let (mean_mc, mean_se) = mean_and_se(&batches.iter().map(|b| b.0).collect::<Vec<_>>());
        let (joint_mc, joint_se) = mean_and_se(&batches.iter().map(|b| b.1).collect::<Vec<_>>());
        let (cov_mc, cov_se) = mean_and_se(&batches.iter().map(|b| b.2).collect::<Vec<_>>());
        let nf = big_n as f64;
        rows.push(MomentRow {
            n,
            big_n,
            samples: config.samples,
            mean_mc,
            mean_se,
            mean_analytic: 1.0 / nf,
            joint_mc,
            joint_se,
            joint_analytic: 1.0 / (nf * (nf + 1.0)),
            cov_mc,
            cov_se,
            cov_analytic: -1.0 / (nf * nf * (nf + 1.0)),
        });
    }
    Ok(MomentScalingResult {
        config_hash: config_hash(config)?,
        config: config.clone(),
        rows,
    })
}

impl ResultTable for MomentScalingResult {
    fn stem(&self) -> &'static str {
        "moments"
    }

    fn config_hash(&self) -> &str {
        &self.config_hash
    }

    fn to_csv(&self) -> String {
        let mut out = csv_line(&[
            "n",
            "N",
            "samples",
            "mean_mc",
            "mean_se",
            "mean_analytic",
            "joint_mc",
            "joint_se",
            "joint_analytic",
            "cov_mc",
            "cov_se",
            "cov_analytic",
        ]);
        for r in &self.rows {
            out.push_str(&csv_line(&[
                r.n.to_string(),
                r.big_n.to_string(),
                r.samples.to_string(),
                csv_num(r.mean_mc),
                csv_num(r.mean_se),
                csv_num(r.mean_analytic),
                csv_num(r.joint_mc),
                csv_num(r.joint_se),
                csv_num(r.joint_analytic),
                csv_num(r.cov_mc),
                csv_num(r.cov_se),
                csv_num(r.cov_analytic),
            ]));
        }
        out
    }

    fn to_json(&self) -> Result<String> {
        pretty_json(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceConfig {
    pub n_dim: u64,
    /// `(q1, q2)` pairs for `Cov(P(x)^q1, P(y)^q2)`.
    pub grid: Vec<(f64, f64)>,
    /// Also check `Cov(P ln P (x), P ln P (y))`.
    pub plogp: bool,
    pub samples: usize,
    pub base_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceRow {
    /// `power` or `plogp`.
    pub function: &'static str,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
    #[serde(serialize_with = "serialize_f64_17")]
    pub joint_analytic: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub joint_mc: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub joint_se: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub joint_z: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub cov_analytic: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub cov_mc: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub cov_se: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub cov_z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CovarianceResult {
    pub config_hash: String,
    pub config: CovarianceConfig,
    pub samples: usize,
    pub rows: Vec<CovarianceRow>,
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// Sampled covariances of Haar output probabilities against the closed forms.
pub fn run_covariance_verification(config: &CovarianceConfig) -> Result<CovarianceResult> {
    check_samples(config.samples)?;
    if !(2..=MAX_COVARIANCE_DIM).contains(&config.n_dim) {
        return Err(Error::SizeCap(format!(
            "covariance verification supports 2 <= N <= {MAX_COVARIANCE_DIM}, got {}",
            config.n_dim
        )));
    }
    let mut analytic = Vec::new();
    for &(q1, q2) in &config.grid {
        let q = MomentQuery::new(q1, q2, config.n_dim)?;
        analytic.push((haar_joint_moment(&q)?, haar_covariance(&q)?));
    }
    if config.plogp {
        let cov = plogp_covariance(config.n_dim)?;
        let n = config.n_dim as f64;
        let mean = (1.0 - EULER_GAMMA - digamma(n + 1.0)?) / n;
        analytic.push((cov + mean * mean, cov));
    }
    let grid = config.grid.clone();
    let with_plogp = config.plogp;
    let batches = batched_pairs(
        config.n_dim as usize,
        config.samples,
        config.base_seed,
        |draws, m| {
            let mut accs: Vec<PairAccumulator> = (0..grid.len() + usize::from(with_plogp))
                .map(|_| PairAccumulator::default())
                .collect();
            for (p, q) in draws {
                for (acc, &(q1, q2)) in accs.iter_mut().zip(&grid) {
                    acc.push(p.powf(q1), q.powf(q2));
                }
                if with_plogp {
                    accs[grid.len()].push(plogp(p), plogp(q));
                }
            }
            accs.iter().map(|a| a.finish(m)).collect::<Vec<_>>()
        },
    );
    let rows = analytic
        .iter()
        .enumerate()
        .map(|(k, &(joint_analytic, cov_analytic))| {
            let joints: Vec<f64> = batches.iter().map(|b| b[k].1).collect();
            let covs: Vec<f64> = batches.iter().map(|b| b[k].2).collect();
            let (joint_mc, joint_se) = mean_and_se(&joints);
            let (cov_mc, cov_se) = mean_and_se(&covs);
            let (function, q1, q2) = match config.grid.get(k) {
                Some(&(q1, q2)) => ("power", Some(q1), Some(q2)),
                None => ("plogp", None, None),
            };
            CovarianceRow {
                function,
                q1,
                q2,
                joint_analytic,
                joint_mc,
                joint_se,
                joint_z: z_score(joint_mc, joint_analytic, joint_se),
                cov_analytic,
                cov_mc,
                cov_se,
                cov_z: z_score(cov_mc, cov_analytic, cov_se),
            }
        })
        .collect();
    Ok(CovarianceResult {
        config_hash: config_hash(config)?,
        config: config.clone(),
        samples: config.samples,
        rows,
    })
}

impl ResultTable for CovarianceResult {
    fn stem(&self) -> &'static str {
        "covariance"
    }

    fn config_hash(&self) -> &str {
        &self.config_hash
    }

    fn to_csv(&self) -> String {
        let mut out = csv_line(&[
            "function",
            "q1",
            "q2",
            "joint_analytic",
            "joint_mc",
            "joint_se",
            "joint_z",
            "cov_analytic",
            "cov_mc",
            "cov_se",
            "cov_z",
        ]);
        let opt = |v: Option<f64>| v.map(csv_num).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&csv_line(&[
                r.function.to_string(),
                opt(r.q1),
                opt(r.q2),
                csv_num(r.joint_analytic),
                csv_num(r.joint_mc),
                csv_num(r.joint_se),
                csv_num(r.joint_z),
                csv_num(r.cov_analytic),
                csv_num(r.cov_mc),
                csv_num(r.cov_se),
                csv_num(r.cov_z),
            ]));
        }
        out
    }

    fn to_json(&self) -> Result<String> {
        pretty_json(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_scaling_matches_formulas() {
        let cfg = MomentScalingConfig {
            n_range: vec![2, 4],
            samples: 20_000,
            base_seed: 3,
        };
        let result = run_moment_scaling(&cfg).unwrap();
        for r in &result.rows {
            assert!((r.mean_mc - r.mean_analytic).abs() < 5.0 * r.mean_se.max(1e-15));
            assert!((r.joint_mc - r.joint_analytic).abs() < 5.0 * r.joint_se);
            assert!((r.cov_mc - r.cov_analytic).abs() < 5.0 * r.cov_se);
        }
        assert!(run_moment_scaling(&MomentScalingConfig {
            n_range: vec![11],
            ..cfg
        })
        .is_err());
    }

    #[test]
    fn covariance_rows() {
        let cfg = CovarianceConfig {
            n_dim: 8,
            grid: vec![(1.0, 1.0), (2.0, 3.0)],
            plogp: true,
            samples: 20_000,
            base_seed: 5,
        };
        let result = run_covariance_verification(&cfg).unwrap();
        assert_eq!(result.rows.len(), 3);
        assert_eq!(result.rows[2].function, "plogp");
        for r in &result.rows {
            assert!(r.cov_z.abs() < 5.0, "{r:?}");
            assert!(r.joint_z.abs() < 5.0, "{r:?}");
        }
        let again = run_covariance_verification(&cfg).unwrap();
        assert_eq!(result.to_csv(), again.to_csv());
    }
}
