use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::{digamma, ln_gamma, ln_gamma_ratio, trigamma, HaarMeanMode};
use crate::error::{Error, Result};

/// Names accepted by [`SchemeFunction::from_str`]; `I` is an integer degree, `Q` a real exponent.
pub const SCHEME_NAMES: [&str; 5] = ["monomialI", "normmonomialI", "plogp", "neglog", "powerQ"];

/// Benchmarking function `f(p)` with its companion `g(p) = f(p) / (N p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SchemeFunction {
    /// `f(p) = (N p)^i`, `i >= 1`.
    Monomial(u32),
    /// `(N p)^i / ((i-1)! (i-1))`, `i >= 2`.
    NormalizedMonomial(u32),
    /// `f(p) = p ln p`.
    PLogP,
    /// `f(p) = -ln p`.
    NegLog,
    /// Raw power `f(p) = p^q`, `q > 0`.
    Power(f64),
}

impl SchemeFunction {
    pub fn monomial(i: u32) -> Result<Self> {
        if i == 0 {
            return Err(Error::InvalidArgument(
                "monomial degree must be at least 1".into(),
            ));
        }
        Ok(Self::Monomial(i))
    }

    pub fn normalized_monomial(i: u32) -> Result<Self> {
        if i < 2 {
            return Err(Error::InvalidArgument(
                "normalized monomial degree must be at least 2".into(),
            ));
        }
        Ok(Self::NormalizedMonomial(i))
    }

    pub fn power(q: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "power exponent must be positive, got {q}"
            )));
        }
        Ok(Self::Power(q))
    }

    /// Checks the degree/exponent invariants of a directly constructed value.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Monomial(i) => Self::monomial(i).map(|_| ()),
            Self::NormalizedMonomial(i) => Self::normalized_monomial(i).map(|_| ()),
            Self::Power(q) => Self::power(q).map(|_| ()),
            Self::PLogP | Self::NegLog => Ok(()),
        }
    }

    /// Polynomial degree for the monomial family.
    pub fn degree(&self) -> Option<u32> {
        match *self {
            Self::Monomial(i) | Self::NormalizedMonomial(i) => Some(i),
            _ => None,
        }
    }

    /// True when `g` diverges at `p = 0`, so a sampled zero-probability bitstring is an error.
    pub fn is_singular_at_zero(&self) -> bool {
        match *self {
            Self::PLogP | Self::NegLog => true,
            Self::Power(q) => q < 1.0,
            Self::Monomial(_) | Self::NormalizedMonomial(_) => false,
        }
    }

    /// `f(p)` for an `N`-outcome distribution.
    pub fn f(&self, p: f64, n_dim: f64) -> f64 {
        match *self {
            Self::Monomial(i) => (n_dim * p).powi(i as i32),
            Self::NormalizedMonomial(i) => (n_dim * p).powi(i as i32) / normalization(i),
            Self::PLogP => {
                if p == 0.0 {
                    0.0
                } else {
                    p * p.ln()
                }
            }
            Self::NegLog => -p.ln(),
            Self::Power(q) => p.powf(q),
        }
    }

    /// `g(p) = f(p) / (N p)` in closed form.
    pub fn g(&self, p: f64, n_dim: f64) -> f64 {
        match *self {
            Self::Monomial(i) => (n_dim * p).powi(i as i32 - 1),
            Self::NormalizedMonomial(i) => (n_dim * p).powi(i as i32 - 1) / normalization(i),
            Self::PLogP => p.ln() / n_dim,
            Self::NegLog => -p.ln() / (n_dim * p),
            Self::Power(q) => p.powf(q - 1.0) / n_dim,
        }
    }

    /// `E[f(P)]` for one output probability of an `N`-dimensional Haar unitary.
    pub fn haar_mean(&self, n_dim: u64, mode: HaarMeanMode) -> Result<f64> {
        self.validate()?;
        let n = n_dim as f64;
        match *self {
            Self::Monomial(i) => {
                Ok((f64::from(i) * n.ln() + ln_moment(f64::from(i), n, mode)?).exp())
            }
            Self::NormalizedMonomial(i) => {
                Ok(Self::Monomial(i).haar_mean(n_dim, mode)? / normalization(i))
            }
            Self::Power(q) => Ok(ln_moment(q, n, mode)?.exp()),
            Self::PLogP => {
                let l = LogShifts::new(n, mode)?;
                Ok(ln_moment(1.0, n, mode)?.exp() * (digamma(2.0)? - l.psi1))
            }
            Self::NegLog => {
                let l = LogShifts::new(n, mode)?;
                Ok(l.psi0 - digamma(1.0)?)
            }
        }
    }

    /// Standard deviation `sigma_f` of `f(P)` under the same law as [`Self::haar_mean`].
    pub fn sigma_f(&self, n_dim: u64, mode: HaarMeanMode) -> Result<f64> {
        self.validate()?;
        let n = n_dim as f64;
        match *self {
            Self::Monomial(i) => {
                let i = f64::from(i);
                Ok((i * n.ln() + 0.5 * ln_power_variance(i, n, mode)?).exp())
            }
            Self::NormalizedMonomial(i) => {
                Ok(Self::Monomial(i).sigma_f(n_dim, mode)? / normalization(i))
            }
            Self::Power(q) => Ok((0.5 * ln_power_variance(q, n, mode)?).exp()),
            Self::PLogP => {
                let l = LogShifts::new(n, mode)?;
                let m1 = ln_moment(1.0, n, mode)?.exp();
                let m2 = ln_moment(2.0, n, mode)?.exp();
                let mean = m1 * (digamma(2.0)? - l.psi1);
                let d = digamma(3.0)? - l.psi2;
                let second = m2 * (d * d + trigamma(3.0)? - l.tri2);
                Ok((second - mean * mean).max(0.0).sqrt())
            }
            Self::NegLog => {
                let l = LogShifts::new(n, mode)?;
                Ok((trigamma(1.0)? - l.tri0).sqrt())
            }
        }
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

/// `(i-1)! (i-1)`, the completely-noisy deviation of `Monomial(i)`.
pub fn normalization(i: u32) -> f64 {
    let fact: f64 = (1..i).map(f64::from).product();
    fact * f64::from(i.saturating_sub(1))
}

/// `ln E[P^q]` under the chosen law.
fn ln_moment(q: f64, n: f64, mode: HaarMeanMode) -> Result<f64> {
    let tail = match mode {
        HaarMeanMode::Exact => ln_gamma_ratio(n, q)?,
        HaarMeanMode::PorterThomas => q * n.ln(),
    };
    Ok(ln_gamma(q + 1.0)? - tail)
}

/// `ln Var[P^q]`, formed without subtracting the two moments directly.
fn ln_power_variance(q: f64, n: f64, mode: HaarMeanMode) -> Result<f64> {
    let m2 = ln_moment(2.0 * q, n, mode)?;
    let m1 = ln_moment(q, n, mode)?;
    Ok(m2 + (-(2.0 * m1 - m2).exp_m1()).ln())
}

/// Large-argument polygamma terms; Porter-Thomas replaces `psi(N+k)` by `ln N`
/// and drops the trigamma tails.
struct LogShifts {
    psi0: f64,
    psi1: f64,
    psi2: f64,
    tri0: f64,
    tri2: f64,
}

impl LogShifts {
    fn new(n: f64, mode: HaarMeanMode) -> Result<Self> {
        Ok(match mode {
            HaarMeanMode::Exact => Self {
                psi0: digamma(n)?,
                psi1: digamma(n + 1.0)?,
                psi2: digamma(n + 2.0)?,
                tri0: trigamma(n)?,
                tri2: trigamma(n + 2.0)?,
            },
            HaarMeanMode::PorterThomas => {
                let l = n.ln();
                Self {
                    psi0: l,
                    psi1: l,
                    psi2: l,
                    tri0: 0.0,
                    tri2: 0.0,
                }
            }
        })
    }
}

impl fmt::Display for SchemeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Monomial(i) => write!(f, "monomial{i}"),
            Self::NormalizedMonomial(i) => write!(f, "normmonomial{i}"),
            Self::PLogP => f.write_str("plogp"),
            Self::NegLog => f.write_str("neglog"),
            Self::Power(q) => write!(f, "power{q}"),
        }
    }
}

impl FromStr for SchemeFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let unknown = || {
            Error::InvalidArgument(format!(
                "unknown scheme '{s}' (expected one of {})",
                SCHEME_NAMES.join(", ")
            ))
        };
        let degree = |rest: &str| rest.parse::<u32>().map_err(|_| unknown());
        if lower == "plogp" {
            Ok(Self::PLogP)
        } else if lower == "neglog" {
            Ok(Self::NegLog)
        } else if let Some(rest) = lower.strip_prefix("normmonomial") {
            Self::normalized_monomial(degree(rest)?)
        } else if let Some(rest) = lower.strip_prefix("monomial") {
            Self::monomial(degree(rest)?)
        } else if let Some(rest) = lower.strip_prefix("power") {
            Self::power(rest.parse::<f64>().map_err(|_| unknown())?)
        } else {
            Err(unknown())
        }
    }
}

impl TryFrom<String> for SchemeFunction {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SchemeFunction> for String {
    fn from(s: SchemeFunction) -> Self {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::EULER_GAMMA;

    const EXACT: HaarMeanMode = HaarMeanMode::Exact;
    const PT: HaarMeanMode = HaarMeanMode::PorterThomas;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "monomial1",
            "monomial2",
            "normmonomial3",
            "plogp",
            "neglog",
            "power0.5",
        ] {
            let scheme: SchemeFunction = s.parse().unwrap();
            assert_eq!(scheme.to_string(), s);
        }
        assert!("monomial0".parse::<SchemeFunction>().is_err());
        assert!("normmonomial1".parse::<SchemeFunction>().is_err());
        assert!("power-1".parse::<SchemeFunction>().is_err());
        assert!("xeb".parse::<SchemeFunction>().is_err());
    }

    #[test]
    fn g_is_f_over_np() {
        let n = 64.0;
        for s in [
            SchemeFunction::Monomial(1),
            SchemeFunction::Monomial(3),
            SchemeFunction::NormalizedMonomial(4),
            SchemeFunction::PLogP,
            SchemeFunction::NegLog,
            SchemeFunction::Power(0.5),
        ] {
            for p in [1e-5, 0.01, 0.3, 1.0] {
                assert!(close(s.g(p, n), s.f(p, n) / (n * p), 1e-13), "{s} at {p}");
            }
        }
        // monomials are regular at zero, logs are not
        assert_eq!(SchemeFunction::Monomial(2).g(0.0, 8.0), 0.0);
        assert_eq!(SchemeFunction::Monomial(1).g(0.0, 8.0), 1.0);
        assert!(SchemeFunction::PLogP.g(0.0, 8.0).is_infinite());
        assert!(SchemeFunction::PLogP.is_singular_at_zero());
        assert!(!SchemeFunction::Monomial(2).is_singular_at_zero());
    }

    #[test]
    fn normalization_values() {
        assert_eq!(normalization(2), 1.0);
        assert_eq!(normalization(3), 4.0);
        assert_eq!(normalization(4), 18.0);
    }

    #[test]
    fn monomial_means() {
        let s = SchemeFunction::Monomial(2);
        assert!(close(s.haar_mean(4, EXACT).unwrap(), 1.6, 1e-14));
        assert!(close(s.haar_mean(4, PT).unwrap(), 2.0, 1e-14));
        assert!(close(s.sigma_f(1 << 20, PT).unwrap(), 20f64.sqrt(), 1e-13));
        let lin = SchemeFunction::Monomial(1);
        assert!(close(lin.haar_mean(1024, EXACT).unwrap(), 1.0, 1e-13));
        assert!(close(lin.haar_mean(1024, PT).unwrap(), 1.0, 1e-13));
        let p = SchemeFunction::Power(1.0);
        assert!(close(p.haar_mean(16, EXACT).unwrap(), 1.0 / 16.0, 1e-13));
        assert!(close(p.haar_mean(16, PT).unwrap(), 1.0 / 16.0, 1e-13));
        // exact Var[N P] = N/(N+1) - ... checked against Beta moments
        let n: f64 = 16.0;
        let var = n * n * (2.0 / (n * (n + 1.0)) - 1.0 / (n * n));
        assert!(close(lin.sigma_f(16, EXACT).unwrap(), var.sqrt(), 1e-12));
    }

    #[test]
    fn log_means() {
        let n = 1024u64;
        let nf = n as f64;
        assert!(close(
            SchemeFunction::NegLog.haar_mean(n, PT).unwrap(),
            nf.ln() + EULER_GAMMA,
            1e-14
        ));
        assert!(close(
            SchemeFunction::NegLog.sigma_f(n, PT).unwrap(),
            std::f64::consts::PI / 6f64.sqrt(),
            1e-14
        ));
        assert!(close(
            SchemeFunction::PLogP.haar_mean(n, PT).unwrap(),
            (1.0 - EULER_GAMMA - nf.ln()) / nf,
            1e-13
        ));
    }
}
