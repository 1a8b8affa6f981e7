//! Correlation measures, sample estimators, deviation of ergodicity and
//! fidelity estimates.
//!
//! For a scheme `f` with companion `g(p) = f(p) / (N p)`, the correlation of an
//! ideal distribution `P` with an experimental one `Q` is
//! `C_f(P, Q) = sum_x g(P(x)) Q(x)`, estimated from samples `x_i ~ Q` by the
//! mean of `g(P(x_i))`. The deviation of ergodicity compares it with the Haar
//! mean of `f`.

mod scheme;

use serde::Serialize;

use crate::analytic::HaarMeanMode;
use crate::error::{Error, Result};
use crate::formats::{sample_line, serialize_f64_17, serialize_opt_f64_17};
use crate::noise::{Provenance, SampleSet};
use crate::statevector::{OutputDistribution, SystemDims};
use crate::summation::{CompensatedSum, RunningMoments};

pub use scheme::{normalization, SchemeFunction, SCHEME_NAMES};

/// Default confidence multiplier.
pub const DEFAULT_ALPHA: f64 = 10.0;

/// Minimum number of instances for [`chebyshev_violation_rate`].
pub const MIN_CHEBYSHEV_INSTANCES: usize = 100;

/// Access to ideal probabilities by bitstring index.
pub trait ProbabilityLookup {
    fn dims(&self) -> SystemDims;

    /// `None` when the bitstring is not covered.
    fn probability(&self, x: u64) -> Option<f64>;
}

impl ProbabilityLookup for OutputDistribution {
    fn dims(&self) -> SystemDims {
        OutputDistribution::dims(self)
    }

    fn probability(&self, x: u64) -> Option<f64> {
        self.probs().get(x as usize).copied()
    }
}

/// Sample estimate of a correlation with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    #[serde(serialize_with = "serialize_f64_17")]
    pub value: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub std_error: f64,
    /// Sample count; 0 marks an exact value computed from `Q`.
    pub samples: usize,
}

impl CorrelationEstimate {
    /// An exact correlation (no sampling error).
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            samples: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Within,
    Violated,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Within => "within",
            Self::Violated => "violated",
        }
    }
}

/// Deviation of ergodicity for one circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErgodicityReport {
    pub scheme: SchemeFunction,
    pub n_qubits: u32,
    #[serde(serialize_with = "serialize_f64_17")]
    pub haar_mean: f64,
    pub haar_mean_mode: HaarMeanMode,
    pub estimate: CorrelationEstimate,
    /// `|haar_mean - estimate.value|`.
    #[serde(serialize_with = "serialize_f64_17")]
    pub deviation: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub alpha: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub sigma_f: f64,
    /// `alpha * sigma_f / sqrt(N)`.
    #[serde(serialize_with = "serialize_f64_17")]
    pub threshold: f64,
    pub verdict: Verdict,
}

impl ErgodicityReport {
    /// Build a report from an estimate and the analytic Haar statistics.
    pub fn new(
        scheme: SchemeFunction,
        dims: SystemDims,
        estimate: CorrelationEstimate,
        alpha: f64,
        mode: HaarMeanMode,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        let n = dims.dim();
        let haar_mean = scheme.haar_mean(n, mode)?;
        let sigma_f = scheme.sigma_f(n, mode)?;
        let threshold = alpha * sigma_f / dims.dim_f64().sqrt();
        let deviation = (haar_mean - estimate.value).abs();
        let verdict = if deviation <= threshold {
            Verdict::Within
        } else {
            Verdict::Violated
        };
        Ok(Self {
            scheme,
            n_qubits: dims.qubits(),
            haar_mean,
            haar_mean_mode: mode,
            estimate,
            deviation,
            alpha,
            sigma_f,
            threshold,
            verdict,
        })
    }

    /// Flat record for JSON emission.
    pub fn record(&self, fidelity: Option<&FidelityEstimate>) -> ReportRecord {
        ReportRecord {
            scheme: self.scheme.to_string(),
            n: self.n_qubits,
            big_n: 1u64 << self.n_qubits,
            samples: self.estimate.samples,
            haar_mean: self.haar_mean,
            haar_mean_mode: self.haar_mean_mode,
            c_f_estimate: self.estimate.value,
            std_error: self.estimate.std_error,
            deviation: self.deviation,
            alpha: self.alpha,
            threshold: self.threshold,
            verdict: self.verdict,
            f_hat: fidelity.map(|f| f.f_hat),
            method: fidelity.map(|f| f.method),
        }
    }
}

/// JSON form of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRecord {
    pub scheme: String,
    pub n: u32,
    #[serde(rename = "N")]
    pub big_n: u64,
    #[serde(rename = "T")]
    pub samples: usize,
    #[serde(serialize_with = "serialize_f64_17")]
    pub haar_mean: f64,
    pub haar_mean_mode: HaarMeanMode,
    #[serde(serialize_with = "serialize_f64_17")]
    pub c_f_estimate: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub std_error: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub deviation: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub alpha: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub threshold: f64,
    pub verdict: Verdict,
    #[serde(serialize_with = "serialize_opt_f64_17")]
    pub f_hat: Option<f64>,
    pub method: Option<FidelityMethod>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityMethod {
    DepolarizingInversion,
    XebLinear,
    /// Logarithmic XEB value reported without a fidelity interpretation.
    XebLogLabelOnly,
}

impl FidelityMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::DepolarizingInversion => "depolarizing_inversion",
            Self::XebLinear => "xeb_linear",
            Self::XebLogLabelOnly => "xeb_log_label_only",
        }
    }
}

/// Fidelity estimate; never clipped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityEstimate {
    #[serde(serialize_with = "serialize_f64_17")]
    pub f_hat: f64,
    pub method: FidelityMethod,
    #[serde(serialize_with = "serialize_f64_17")]
    pub std_error: f64,
}

impl FidelityEstimate {
    /// True when the estimate falls outside `[0, 1]`.
    pub fn out_of_range(&self) -> bool {
        !(0.0..=1.0).contains(&self.f_hat)
    }
}

fn same_register(a: SystemDims, b: SystemDims) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!(
            "{}-qubit probabilities with {}-qubit data",
            a.qubits(),
            b.qubits()
        )));
    }
    Ok(())
}

/// `C_f(P, Q) = sum_x g(P(x)) Q(x)`; sites with `Q(x) = 0` contribute nothing.
pub fn correlation_c_f(
    p: &OutputDistribution,
    q: &OutputDistribution,
    scheme: &SchemeFunction,
) -> Result<f64> {
    same_register(p.dims(), q.dims())?;
    scheme.validate()?;
    let dims = p.dims();
    let n = dims.dim_f64();
    let singular = scheme.is_singular_at_zero();
    let mut acc = CompensatedSum::new();
    for (x, (&px, &qx)) in p.probs().iter().zip(q.probs()).enumerate() {
        if qx == 0.0 {
            continue;
        }
        if px == 0.0 && singular {
            return Err(Error::ZeroProbability {
                scheme: scheme.to_string(),
                bitstring: dims.format_bitstring(x as u64),
            });
        }
        acc.add(scheme.g(px, n) * qx);
    }
    Ok(acc.value())
}

/// Per-sample values `g(P(x_i))` in sample order.
fn sample_values<L: ProbabilityLookup + ?Sized>(
    p: &L,
    samples: &SampleSet,
    scheme: &SchemeFunction,
    value: impl Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    same_register(p.dims(), samples.dims())?;
    if samples.is_empty() {
        return Err(Error::InvalidArgument(
            "estimation needs at least one sample".into(),
        ));
    }
    let dims = samples.dims();
    let singular = scheme.is_singular_at_zero();
    samples
        .bitstrings()
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let px = p
                .probability(x)
                .ok_or_else(|| missing_probability(samples, k, dims.format_bitstring(x)))?;
            if px == 0.0 && singular {
                return Err(Error::ZeroProbability {
                    scheme: scheme.to_string(),
                    bitstring: dims.format_bitstring(x),
                });
            }
            Ok(value(px))
        })
        .collect()
}

/// Missing-probability error; for ingested samples it names the file line.
fn missing_probability(samples: &SampleSet, index: usize, bitstring: String) -> Error {
    if let Provenance::Ingested { path } = samples.provenance() {
        if let Some(line) = sample_line(path, index) {
            return Error::Parse {
                path: path.clone(),
                line,
                message: format!("missing ideal probability for bitstring {bitstring}"),
            };
        }
    }
    Error::MissingProbability { bitstring }
}

fn mean_with_error(values: &[f64]) -> CorrelationEstimate {
    let mut sum = CompensatedSum::new();
    let mut moments = RunningMoments::new();
    for &v in values {
        sum.add(v);
        moments.push(v);
    }
    CorrelationEstimate {
        value: sum.value() / values.len() as f64,
        std_error: moments.std_error(),
        samples: values.len(),
    }
}

/// Sample estimate `(1/T) sum_i g(P(x_i))` with standard error `sd / sqrt(T)`.
pub fn estimate_c_f<L: ProbabilityLookup + ?Sized>(
    p: &L,
    samples: &SampleSet,
    scheme: &SchemeFunction,
) -> Result<CorrelationEstimate> {
    scheme.validate()?;
    let n = p.dims().dim_f64();
    let values = sample_values(p, samples, scheme, |px| scheme.g(px, n))?;
    Ok(mean_with_error(&values))
}

/// Deviation of ergodicity from samples.
pub fn deviation_of_ergodicity<L: ProbabilityLookup + ?Sized>(
    p: &L,
    samples: &SampleSet,
    scheme: &SchemeFunction,
    alpha: f64,
    mode: HaarMeanMode,
) -> Result<ErgodicityReport> {
    let estimate = estimate_c_f(p, samples, scheme)?;
    ErgodicityReport::new(*scheme, samples.dims(), estimate, alpha, mode)
}

/// Deviation of ergodicity with the exact correlation `C_f(P, Q)`.
pub fn deviation_of_ergodicity_exact(
    p: &OutputDistribution,
    q: &OutputDistribution,
    scheme: &SchemeFunction,
    alpha: f64,
    mode: HaarMeanMode,
) -> Result<ErgodicityReport> {
    let value = correlation_c_f(p, q, scheme)?;
    ErgodicityReport::new(
        *scheme,
        p.dims(),
        CorrelationEstimate::exact(value),
        alpha,
        mode,
    )
}

/// `F = 1 - deviation / ((i-1)! (i-1))` for `Monomial(i)` under depolarizing noise.
pub fn fidelity_from_de_depolarizing(
    deviation: f64,
    i: u32,
    std_error: f64,
) -> Result<FidelityEstimate> {
    if i < 2 {
        return Err(Error::InvalidArgument(format!(
            "fidelity inversion needs degree i >= 2, got {i}"
        )));
    }
    let norm = normalization(i);
    Ok(FidelityEstimate {
        f_hat: 1.0 - deviation / norm,
        method: FidelityMethod::DepolarizingInversion,
        std_error: std_error / norm,
    })
}

/// Fidelity from a report; the normalization depends on the scheme.
///
/// `Monomial(i)` divides by `(i-1)! (i-1)`; `NormalizedMonomial(i)` is already
/// normalized. Other schemes have no inversion.
pub fn fidelity_from_report(report: &ErgodicityReport) -> Result<FidelityEstimate> {
    let se = report.estimate.std_error;
    match report.scheme {
        SchemeFunction::Monomial(i) => fidelity_from_de_depolarizing(report.deviation, i, se),
        SchemeFunction::NormalizedMonomial(i) => fidelity_from_de_depolarizing(
            report.deviation * normalization(i),
            i,
            se * normalization(i),
        ),
        other => Err(Error::InvalidArgument(format!(
            "no fidelity inversion for scheme {other}"
        ))),
    }
}

/// Linear XEB `F = (N/T) sum_i P(x_i) - 1`, computed as the `Monomial(2)` estimate minus one.
pub fn linear_xeb<L: ProbabilityLookup + ?Sized>(
    p: &L,
    samples: &SampleSet,
) -> Result<FidelityEstimate> {
    let est = estimate_c_f(p, samples, &SchemeFunction::Monomial(2))?;
    Ok(FidelityEstimate {
        f_hat: est.value - 1.0,
        method: FidelityMethod::XebLinear,
        std_error: est.std_error,
    })
}

/// Logarithmic XEB: the sample mean of `ln P(x_i)`.
pub fn log_xeb<L: ProbabilityLookup + ?Sized>(
    p: &L,
    samples: &SampleSet,
) -> Result<CorrelationEstimate> {
    let values = sample_values(p, samples, &SchemeFunction::PLogP, f64::ln)?;
    Ok(mean_with_error(&values))
}

/// Empirical rate of Chebyshev-bound violations across circuit instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChebyshevSummary {
    pub instances: usize,
    pub violations: usize,
    #[serde(serialize_with = "serialize_f64_17")]
    pub rate: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub alpha: f64,
    /// `min(1, 1/alpha^2)`.
    #[serde(serialize_with = "serialize_f64_17")]
    pub bound: f64,
    /// `4 sqrt(bound (1 - bound) / instances)`.
    #[serde(serialize_with = "serialize_f64_17")]
    pub margin: f64,
    pub within_bound: bool,
}

/// Fraction of exact-`C_f` reports whose verdict is violated, against `1/alpha^2`.
pub fn chebyshev_violation_rate(reports: &[ErgodicityReport]) -> Result<ChebyshevSummary> {
    if reports.len() < MIN_CHEBYSHEV_INSTANCES {
        return Err(Error::InvalidArgument(format!(
            "Chebyshev check needs at least {MIN_CHEBYSHEV_INSTANCES} instances, got {}",
            reports.len()
        )));
    }
    let alpha = reports[0].alpha;
    if reports.iter().any(|r| r.alpha != alpha) {
        return Err(Error::InvalidArgument(
            "reports use different alpha values".into(),
        ));
    }
    if reports.iter().any(|r| r.estimate.samples != 0) {
        return Err(Error::InvalidArgument(
            "Chebyshev check needs exact correlations (no sampling error)".into(),
        ));
    }
    let m = reports.len();
    let violations = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Violated)
        .count();
    let rate = violations as f64 / m as f64;
    let bound = (1.0 / (alpha * alpha)).min(1.0);
    let margin = 4.0 * (bound * (1.0 - bound) / m as f64).sqrt();
    Ok(ChebyshevSummary {
        instances: m,
        violations,
        rate,
        alpha,
        bound,
        margin,
        within_bound: rate <= bound + margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::Provenance;

    fn dims(n: u32) -> SystemDims {
        SystemDims::new(n).unwrap()
    }

    fn samples(d: SystemDims, xs: Vec<u64>) -> SampleSet {
        SampleSet::new(d, xs, Provenance::Simulated { seed: 0 }).unwrap()
    }

    #[test]
    fn delta_correlation() {
        let d = dims(3);
        let p = OutputDistribution::delta(d, 2).unwrap();
        let c = correlation_c_f(&p, &p, &SchemeFunction::Monomial(2)).unwrap();
        assert_eq!(c, 8.0);
    }

    #[test]
    fn zero_probability_handling() {
        let d = dims(1);
        let p = OutputDistribution::delta(d, 0).unwrap();
        let u = OutputDistribution::uniform(d).unwrap();
        // Q(x) = 0 where P(x) = 0 is fine
        assert!(correlation_c_f(&p, &p, &SchemeFunction::PLogP).is_ok());
        let err = correlation_c_f(&p, &u, &SchemeFunction::NegLog).unwrap_err();
        assert!(matches!(err, Error::ZeroProbability { ref bitstring, .. } if bitstring == "1"));
        assert!(correlation_c_f(&p, &u, &SchemeFunction::Monomial(3)).is_ok());
        let s = samples(d, vec![0, 1]);
        assert!(matches!(
            estimate_c_f(&p, &s, &SchemeFunction::PLogP),
            Err(Error::ZeroProbability { .. })
        ));
        assert!(log_xeb(&p, &s).is_err());
    }

    #[test]
    fn single_sample() {
        let d = dims(2);
        let p = OutputDistribution::from_probs(d, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let e = estimate_c_f(&p, &samples(d, vec![2]), &SchemeFunction::Monomial(2)).unwrap();
        assert!((e.value - 4.0 * 0.3).abs() < 1e-15);
        assert_eq!(e.std_error, 0.0);
        assert!(estimate_c_f(&p, &samples(d, vec![]), &SchemeFunction::Monomial(2)).is_err());
    }

    #[test]
    fn uniform_p_xeb() {
        let d = dims(3);
        let u = OutputDistribution::uniform(d).unwrap();
        let s = samples(d, vec![0, 3, 5, 5, 7]);
        assert_eq!(linear_xeb(&u, &s).unwrap().f_hat, 0.0);
        assert_eq!(log_xeb(&u, &s).unwrap().value, -(8f64).ln());
    }

    #[test]
    fn xeb_identity() {
        let d = dims(3);
        let p = OutputDistribution::from_probs(d, vec![0.05, 0.1, 0.15, 0.2, 0.05, 0.1, 0.3, 0.05])
            .unwrap();
        let s = samples(d, vec![6, 3, 1, 6, 0, 2, 6, 5]);
        let lin = linear_xeb(&p, &s).unwrap();
        let c = estimate_c_f(&p, &s, &SchemeFunction::Monomial(2)).unwrap();
        assert_eq!((lin.f_hat + 1.0).to_bits(), c.value.to_bits());
    }

    #[test]
    fn fidelity_inversion() {
        assert_eq!(
            fidelity_from_de_depolarizing(0.0, 2, 0.0).unwrap().f_hat,
            1.0
        );
        assert_eq!(
            fidelity_from_de_depolarizing(1.0, 2, 0.0).unwrap().f_hat,
            0.0
        );
        assert_eq!(
            fidelity_from_de_depolarizing(0.25, 3, 0.0).unwrap().f_hat,
            0.9375
        );
        assert!(fidelity_from_de_depolarizing(0.5, 1, 0.0).is_err());
        let f = fidelity_from_de_depolarizing(2.5, 2, 0.1).unwrap();
        assert!(f.out_of_range());
        assert_eq!(f.f_hat, -1.5);
    }

    #[test]
    fn report_invariants() {
        let d = dims(4);
        let est = CorrelationEstimate {
            value: 1.8,
            std_error: 0.01,
            samples: 100,
        };
        let r = ErgodicityReport::new(
            SchemeFunction::Monomial(2),
            d,
            est,
            10.0,
            HaarMeanMode::Exact,
        )
        .unwrap();
        assert!((r.haar_mean - 2.0 * 16.0 / 17.0).abs() < 1e-14);
        assert_eq!(r.deviation, (r.haar_mean - 1.8).abs());
        assert_eq!(r.verdict == Verdict::Within, r.deviation <= r.threshold);
        let json = serde_json::to_value(r.record(None)).unwrap();
        for key in [
            "scheme",
            "n",
            "N",
            "T",
            "haar_mean",
            "haar_mean_mode",
            "c_f_estimate",
            "std_error",
            "deviation",
            "alpha",
            "threshold",
            "verdict",
            "f_hat",
            "method",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["verdict"], "within");
        assert!(ErgodicityReport::new(
            SchemeFunction::Monomial(2),
            d,
            est,
            0.0,
            HaarMeanMode::Exact
        )
        .is_err());
    }

    #[test]
    fn chebyshev_requirements() {
        let d = dims(4);
        let report = |v: f64, alpha: f64| {
            ErgodicityReport::new(
                SchemeFunction::Monomial(1),
                d,
                CorrelationEstimate::exact(v),
                alpha,
                HaarMeanMode::Exact,
            )
            .unwrap()
        };
        let few: Vec<_> = (0..50).map(|_| report(1.0, 3.0)).collect();
        assert!(chebyshev_violation_rate(&few).is_err());
        let many: Vec<_> = (0..200)
            .map(|k| report(if k < 10 { 5.0 } else { 1.0 }, 1.0))
            .collect();
        let s = chebyshev_violation_rate(&many).unwrap();
        assert_eq!(s.violations, 10);
        assert_eq!(s.bound, 1.0);
        assert!(s.within_bound);
    }
}
