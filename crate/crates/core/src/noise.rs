//! Output-level noise: experimental distributions `Q` built from ideal `P`,
//! and bitstring sampling from `Q`.

use std::path::PathBuf;
use std::sync::Arc;

use rand::Rng as _;
use rand_distr::{weighted::WeightedAliasIndex, Distribution};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Rng};
use crate::statevector::{OutputDistribution, SystemDims};
use crate::summation::{compensated_sum, CompensatedSum};

/// Most negative `Q(x)` tolerated (and clamped to zero) for custom models.
pub const NEGATIVE_Q_TOL: f64 = 1e-12;

/// Tolerance on `sum chi = 1`.
pub const CHI_SUM_TOL: f64 = 1e-10;

/// Noise acting on the output distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseModel {
    Noiseless,
    /// `Q = F P + (1 - F) / N`.
    #[serde(rename = "depolarizing")]
    GlobalDepolarizing {
        fidelity: f64,
    },
    /// `Q = 1 / N`.
    CompletelyNoisy,
    /// `Q = F P + (1 - F) chi`, with `chi` a quasiprobability summing to one.
    Custom {
        fidelity: f64,
        chi: Arc<Vec<f64>>,
    },
}

fn check_fidelity(f: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidArgument(format!(
            "fidelity {f} outside [0, 1]"
        )));
    }
    Ok(())
}

impl NoiseModel {
    pub fn depolarizing(fidelity: f64) -> Result<Self> {
        check_fidelity(fidelity)?;
        Ok(Self::GlobalDepolarizing { fidelity })
    }

    /// Custom model. Entries of `chi` may be negative; positivity of the
    /// induced `Q` is checked against each `P` in [`experimental_distribution`].
    pub fn custom(fidelity: f64, chi: Vec<f64>) -> Result<Self> {
        check_fidelity(fidelity)?;
        if chi.is_empty() || chi.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(
                "chi must be a non-empty vector of finite values".into(),
            ));
        }
        let total = compensated_sum(chi.iter().copied());
        if (total - 1.0).abs() > CHI_SUM_TOL {
            return Err(Error::InvalidArgument(format!(
                "chi sums to {total}, expected 1"
            )));
        }
        Ok(Self::Custom {
            fidelity,
            chi: Arc::new(chi),
        })
    }

    /// Circuit fidelity: 1 for noiseless, 0 for completely noisy.
    pub fn fidelity(&self) -> f64 {
        match self {
            Self::Noiseless => 1.0,
            Self::GlobalDepolarizing { fidelity } | Self::Custom { fidelity, .. } => *fidelity,
            Self::CompletelyNoisy => 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Noiseless => "noiseless",
            Self::GlobalDepolarizing { .. } => "depolarizing",
            Self::CompletelyNoisy => "completely-noisy",
            Self::Custom { .. } => "custom",
        }
    }
}

/// Experimental distribution `Q` induced by `noise` on ideal `p`.
pub fn experimental_distribution(
    p: &OutputDistribution,
    noise: &NoiseModel,
) -> Result<OutputDistribution> {
    let dims = p.dims();
    match noise {
        NoiseModel::Noiseless => Ok(p.clone()),
        NoiseModel::CompletelyNoisy => OutputDistribution::uniform(dims),
        NoiseModel::GlobalDepolarizing { fidelity } => {
            let f = *fidelity;
            let floor = (1.0 - f) / dims.dim_f64();
            OutputDistribution::from_probs(
                dims,
                p.probs().iter().map(|&px| f * px + floor).collect(),
            )
        }
        NoiseModel::Custom { fidelity, chi } => {
            if chi.len() != dims.len() {
                return Err(Error::Dimension(format!(
                    "chi has {} entries, distribution has N = {}",
                    chi.len(),
                    dims.dim()
                )));
            }
            let f = *fidelity;
            let mut q = Vec::with_capacity(dims.len());
            for (x, (&px, &cx)) in p.probs().iter().zip(chi.iter()).enumerate() {
                let v = f * px + (1.0 - f) * cx;
                if v < -NEGATIVE_Q_TOL {
                    return Err(Error::Distribution(format!(
                        "custom noise gives Q({}) = {v} < 0",
                        dims.format_bitstring(x as u64)
                    )));
                }
                q.push(v.max(0.0));
            }
            OutputDistribution::from_probs(dims, q)
        }
    }
}

/// Where a sample set came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Simulated { seed: u64 },
    Ingested { path: PathBuf },
}

/// Measured bitstrings as indices `j = sum_k x_k 2^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    dims: SystemDims,
    bitstrings: Vec<u64>,
    provenance: Provenance,
}

impl SampleSet {
    pub fn new(dims: SystemDims, bitstrings: Vec<u64>, provenance: Provenance) -> Result<Self> {
        if let Some(&x) = bitstrings.iter().find(|&&x| x >= dims.dim()) {
            return Err(Error::InvalidArgument(format!(
                "sample index {x} out of range for N = {}",
                dims.dim()
            )));
        }
        Ok(Self {
            dims,
            bitstrings,
            provenance,
        })
    }

    pub fn dims(&self) -> SystemDims {
        self.dims
    }

    pub fn bitstrings(&self) -> &[u64] {
        &self.bitstrings
    }

    pub fn len(&self) -> usize {
        self.bitstrings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bitstrings.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

fn alias_table(q: &OutputDistribution) -> Result<WeightedAliasIndex<f64>> {
    WeightedAliasIndex::new(q.probs().to_vec())
        .map_err(|e| Error::Distribution(format!("cannot build alias table: {e}")))
}

/// `t` i.i.d. draws from `q` (alias method), deterministic in `seed`.
pub fn sample_bitstrings(q: &OutputDistribution, t: usize, seed: u64) -> Result<SampleSet> {
    let provenance = Provenance::Simulated { seed };
    if t == 0 {
        return SampleSet::new(q.dims(), Vec::new(), provenance);
    }
    let table = alias_table(q)?;
    let mut rng = rng_from_seed(seed);
    let draws = (0..t).map(|_| table.sample(&mut rng) as u64).collect();
    SampleSet::new(q.dims(), draws, provenance)
}

/// `t` draws from the experimental distribution of `noise` on `p`.
///
/// Depolarizing noise uses the mixture form: with probability `F` draw from
/// `P`, otherwise uniformly. The law is identical to sampling `Q` directly.
pub fn sample_experimental(
    p: &OutputDistribution,
    noise: &NoiseModel,
    t: usize,
    seed: u64,
) -> Result<SampleSet> {
    let dims = p.dims();
    let provenance = Provenance::Simulated { seed };
    if t == 0 {
        return SampleSet::new(dims, Vec::new(), provenance);
    }
    let mut rng = rng_from_seed(seed);
    let n = dims.dim();
    let draws = match noise {
        NoiseModel::Noiseless => {
            let table = alias_table(p)?;
            (0..t).map(|_| table.sample(&mut rng) as u64).collect()
        }
        NoiseModel::CompletelyNoisy => (0..t).map(|_| rng.random_range(0..n)).collect(),
        NoiseModel::GlobalDepolarizing { fidelity } => {
            let table = alias_table(p)?;
            (0..t)
                .map(|_| mixture_draw(&mut rng, *fidelity, &table, n))
                .collect()
        }
        NoiseModel::Custom { .. } => {
            let q = experimental_distribution(p, noise)?;
            let table = alias_table(&q)?;
            (0..t).map(|_| table.sample(&mut rng) as u64).collect()
        }
    };
    SampleSet::new(dims, draws, provenance)
}

fn mixture_draw(rng: &mut Rng, f: f64, table: &WeightedAliasIndex<f64>, n: u64) -> u64 {
    if rng.random::<f64>() < f {
        table.sample(rng) as u64
    } else {
        rng.random_range(0..n)
    }
}

/// Ensemble normalization of `chi`: the mean over instances should be `1/N` at every `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiNormalizationReport {
    /// `max_x |mean_k chi_k(x) - 1/N|`.
    pub max_deviation: f64,
    /// Index attaining the maximum.
    pub argmax: u64,
    pub instances: usize,
    pub threshold: f64,
    pub violated: bool,
}

/// Check the normalization of `chi` across custom-noise instances.
pub fn chi_normalization_check(
    models: &[NoiseModel],
    threshold: f64,
) -> Result<ChiNormalizationReport> {
    let chis: Vec<&Vec<f64>> = models
        .iter()
        .map(|m| match m {
            NoiseModel::Custom { chi, .. } => Ok(chi.as_ref()),
            other => Err(Error::InvalidArgument(format!(
                "chi normalization needs custom noise models, got {}",
                other.name()
            ))),
        })
        .collect::<Result<_>>()?;
    let first = chis
        .first()
        .ok_or_else(|| Error::InvalidArgument("no noise instances supplied".into()))?;
    let len = first.len();
    if chis.iter().any(|c| c.len() != len) {
        return Err(Error::Dimension(
            "chi instances have different lengths".into(),
        ));
    }
    let target = 1.0 / len as f64;
    let k = chis.len() as f64;
    let mut best = (0u64, -1.0f64);
    for x in 0..len {
        let mut s = CompensatedSum::new();
        chis.iter().for_each(|c| s.add(c[x]));
        let dev = (s.value() / k - target).abs();
        if dev > best.1 {
            best = (x as u64, dev);
        }
    }
    Ok(ChiNormalizationReport {
        max_deviation: best.1,
        argmax: best.0,
        instances: chis.len(),
        threshold,
        violated: best.1 > threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;

    fn dims(n: u32) -> SystemDims {
        SystemDims::new(n).unwrap()
    }

    #[test]
    fn depolarizing_arithmetic() {
        let p = OutputDistribution::from_probs(dims(1), vec![1.0, 0.0]).unwrap();
        let q = experimental_distribution(&p, &NoiseModel::depolarizing(0.5).unwrap()).unwrap();
        assert_eq!(q.probs(), &[0.75, 0.25]);
        let q1 = experimental_distribution(&p, &NoiseModel::depolarizing(1.0).unwrap()).unwrap();
        assert_eq!(q1, p);
        assert!(NoiseModel::depolarizing(1.5).is_err());
    }

    #[test]
    fn completely_noisy_is_uniform() {
        let p = OutputDistribution::delta(dims(2), 1).unwrap();
        let q = experimental_distribution(&p, &NoiseModel::CompletelyNoisy).unwrap();
        assert_eq!(q.probs(), &[0.25; 4]);
    }

    #[test]
    fn custom_positivity() {
        let p = OutputDistribution::delta(dims(1), 0).unwrap();
        let bad = NoiseModel::custom(0.5, vec![-0.5, 1.5]).unwrap();
        // Q = [0.5 - 0.25, 0.75] is fine
        assert!(experimental_distribution(&p, &bad).is_ok());
        let worse = NoiseModel::custom(0.2, vec![-0.5, 1.5]).unwrap();
        assert!(matches!(
            experimental_distribution(&p, &worse),
            Err(Error::Distribution(_))
        ));
        assert!(NoiseModel::custom(0.5, vec![0.5, 0.6]).is_err());
        let short = NoiseModel::custom(0.5, vec![1.0]).unwrap();
        assert!(experimental_distribution(&p, &short).is_err());
    }

    #[test]
    fn sampling_basics() {
        let d = dims(2);
        let u = OutputDistribution::uniform(d).unwrap();
        assert!(sample_bitstrings(&u, 0, 1).unwrap().is_empty());
        let delta = OutputDistribution::delta(d, 3).unwrap();
        assert!(sample_bitstrings(&delta, 1000, 1)
            .unwrap()
            .bitstrings()
            .iter()
            .all(|&x| x == 3));
        let a = sample_bitstrings(&u, 100, 9).unwrap();
        let b = sample_bitstrings(&u, 100, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_frequencies() {
        let d = dims(2);
        let u = OutputDistribution::uniform(d).unwrap();
        let t = 100_000usize;
        let s = sample_bitstrings(&u, t, 4).unwrap();
        let mut counts = [0usize; 4];
        s.bitstrings().iter().for_each(|&x| counts[x as usize] += 1);
        let se = (0.25f64 * 0.75 / t as f64).sqrt();
        for c in counts {
            assert!((c as f64 / t as f64 - 0.25).abs() < 4.0 * se);
        }
    }

    #[test]
    fn chi_checks() {
        let n = 8usize;
        let uniform = NoiseModel::custom(0.5, vec![1.0 / n as f64; n]).unwrap();
        let r = chi_normalization_check(&[uniform], 1e-3).unwrap();
        assert!(r.max_deviation < 1e-15 && !r.violated);

        let mut delta = vec![0.0; n];
        delta[5] = 1.0;
        let r = chi_normalization_check(&[NoiseModel::custom(0.5, delta).unwrap()], 1e-3).unwrap();
        assert!((r.max_deviation - (1.0 - 1.0 / n as f64)).abs() < 1e-15);
        assert_eq!(r.argmax, 5);
        assert!(r.violated);

        assert!(chi_normalization_check(&[], 1e-3).is_err());
        assert!(chi_normalization_check(&[NoiseModel::Noiseless], 1e-3).is_err());
    }

    #[test]
    fn symmetric_chi_instances_average_out() {
        let base = vec![0.4, 0.3, 0.2, 0.1, 0.05, -0.05, 0.0, 0.0];
        let mut rng = rng_from_seed(3);
        let models: Vec<NoiseModel> = (0..1000)
            .map(|_| {
                let mut c = base.clone();
                c.shuffle(&mut rng);
                NoiseModel::custom(0.5, c).unwrap()
            })
            .collect();
        let r = chi_normalization_check(&models, 1.0).unwrap();
        // per-entry sd of a random entry of `base` is ~0.14
        assert!(r.max_deviation < 4.0 * 0.15 / (1000f64).sqrt());
    }
}
