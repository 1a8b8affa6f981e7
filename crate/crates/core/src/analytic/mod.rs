//! Haar and Porter-Thomas moments of output probabilities.
//!
//! Under the Haar measure a single output probability of an `N`-dimensional
//! unitary follows Beta(1, N-1), and two distinct outputs have the joint
//! moment `Gamma(N) Gamma(q1+1) Gamma(q2+1) / Gamma(q1+q2+N)`. Porter-Thomas
//! (`N e^{-Np}`) is the large-`N` limit. Everything here is evaluated in log
//! space and exponentiated once.

pub mod quadrature;
pub mod special;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::SchemeFunction;

pub use special::{digamma, ln_gamma, ln_gamma_ratio, polygamma, trigamma, EULER_GAMMA};

/// Smallest replica index accepted by [`gi_covariance`].
pub const GI_MIN_INDEX: f64 = 1e-6;

/// Largest replica index accepted by [`gi_covariance`].
pub const GI_MAX_INDEX: f64 = 0.1;

/// Absolute tolerance of the quadrature fallback.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Numerical constants shared by the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticContext {
    pub euler_gamma: f64,
    pub rel_tol: f64,
}

impl Default for AnalyticContext {
    fn default() -> Self {
        Self {
            euler_gamma: EULER_GAMMA,
            rel_tol: 1e-12,
        }
    }
}

impl AnalyticContext {
    pub fn with_rel_tol(rel_tol: f64) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-6) {
            return Err(Error::InvalidArgument(format!(
                "rel_tol must lie in (0, 1e-6], got {rel_tol}"
            )));
        }
        Ok(Self {
            rel_tol,
            ..Self::default()
        })
    }
}

/// Exponents and dimension of a joint moment `E[P(x)^q1 P(y)^q2]`, `x != y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentQuery {
    q1: f64,
    q2: f64,
    n_dim: f64,
}

impl MomentQuery {
    pub fn new(q1: f64, q2: f64, n_dim: u64) -> Result<Self> {
        if !(q1 > 0.0 && q1.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "q1 must be positive, got {q1}"
            )));
        }
        if !(q2 >= 0.0 && q2.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "q2 must be non-negative, got {q2}"
            )));
        }
        if n_dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "N must be at least 2, got {n_dim}"
            )));
        }
        Ok(Self {
            q1,
            q2,
            n_dim: n_dim as f64,
        })
    }

    pub fn q1(&self) -> f64 {
        self.q1
    }

    pub fn q2(&self) -> f64 {
        self.q2
    }

    pub fn n_dim(&self) -> f64 {
        self.n_dim
    }
}

/// Which law the scheme means and spreads are taken under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaarMeanMode {
    /// Beta(1, N-1), the finite-`N` Haar law.
    #[default]
    Exact,
    /// The `N e^{-Np}` approximation.
    PorterThomas,
}

impl HaarMeanMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::PorterThomas => "porter_thomas",
        }
    }
}

impl std::fmt::Display for HaarMeanMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for HaarMeanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "porter_thomas" | "porter-thomas" | "pt" => Ok(Self::PorterThomas),
            _ => Err(Error::InvalidArgument(format!(
                "unknown Haar mean mode '{s}' (expected exact or porter-thomas)"
            ))),
        }
    }
}

fn require_dim(n_dim: u64) -> Result<f64> {
    if n_dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "N must be at least 2, got {n_dim}"
        )));
    }
    Ok(n_dim as f64)
}

/// `E[P(x)^q1 P(y)^q2]` for `x != y`; with `q2 = 0` the single moment `E[P^q1]`.
pub fn haar_joint_moment(q: &MomentQuery) -> Result<f64> {
    let n = q.n_dim;
    if let (Some(a), Some(b)) = (small_integer(q.q1), small_integer(q.q2)) {
        return Ok(integer_moment(a, n) * integer_moment(b, n + f64::from(a)));
    }
    let ln_m = ln_gamma(q.q1 + 1.0)? + ln_gamma(q.q2 + 1.0)? - ln_gamma_ratio(n, q.q1 + q.q2)?;
    Ok(ln_m.exp())
}

/// Single moment `E[P^q] = Gamma(q+1) Gamma(N) / Gamma(q+N)`.
pub fn haar_moment(q: f64, n_dim: u64) -> Result<f64> {
    haar_joint_moment(&MomentQuery::new(q, 0.0, n_dim)?)
}

/// `Cov(P(x)^q1, P(y)^q2)` for `x != y` under Haar.
///
/// Written as `m(q1) m(q2) expm1(k)` with
/// `k = R(N,q1) + R(N,q2) - R(N,q1+q2)` and `R(x,a) = ln Gamma(x+a) - ln Gamma(x)`,
/// so the small difference of the two Gamma ratios is never formed by subtraction.
pub fn haar_covariance(q: &MomentQuery) -> Result<f64> {
    if q.q2 <= 0.0 {
        return Err(Error::InvalidArgument(
            "covariance needs q2 > 0 (q2 = 0 is a constant)".into(),
        ));
    }
    let n = q.n_dim;
    if let (Some(a), Some(b)) = (small_integer(q.q1), small_integer(q.q2)) {
        // R(N,a) + R(N,b) - R(N,a+b) = -sum_{j<b} ln(1 + a/(N+j))
        let k: f64 = -(0..b)
            .map(|j| (f64::from(a) / (n + f64::from(j))).ln_1p())
            .sum::<f64>();
        return Ok(integer_moment(a, n) * integer_moment(b, n) * k.exp_m1());
    }
    let r1 = ln_gamma_ratio(n, q.q1)?;
    let r2 = ln_gamma_ratio(n, q.q2)?;
    let r12 = ln_gamma_ratio(n, q.q1 + q.q2)?;
    let ln_prod = ln_gamma(q.q1 + 1.0)? + ln_gamma(q.q2 + 1.0)? - r1 - r2;
    Ok(ln_prod.exp() * (r1 + r2 - r12).exp_m1())
}

/// Integer exponents small enough for direct products.
fn small_integer(q: f64) -> Option<u32> {
    (q.fract() == 0.0 && q <= 64.0).then_some(q as u32)
}

/// `a! / (x (x+1) ... (x+a-1))` as a running product.
fn integer_moment(a: u32, x: f64) -> f64 {
    (0..a).fold(1.0, |m, j| m * f64::from(j + 1) / (x + f64::from(j)))
}

/// Porter-Thomas moment `i! / N^i`.
pub fn pt_moment(i: u32, n_dim: u64) -> Result<f64> {
    let n = require_dim(n_dim)?;
    if i == 0 {
        return Err(Error::InvalidArgument(
            "moment order must be at least 1".into(),
        ));
    }
    let i = f64::from(i);
    Ok((ln_gamma(i + 1.0)? - i * n.ln()).exp())
}

/// Porter-Thomas spread `sqrt((2i)! - (i!)^2) / N^i` of `P^i`.
pub fn pt_sigma(i: u32, n_dim: u64) -> Result<f64> {
    let n = require_dim(n_dim)?;
    if i == 0 {
        return Err(Error::InvalidArgument(
            "moment order must be at least 1".into(),
        ));
    }
    let i = f64::from(i);
    let ln_2i = ln_gamma(2.0 * i + 1.0)?;
    let ln_i2 = 2.0 * ln_gamma(i + 1.0)?;
    let ln_var = ln_2i + (-(ln_i2 - ln_2i).exp_m1()).ln();
    Ok((0.5 * ln_var - i * n.ln()).exp())
}

fn require_unit(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Porter-Thomas density `N e^{-Np}`.
pub fn pt_pdf(p: f64, n_dim: u64) -> Result<f64> {
    let n = require_dim(n_dim)?;
    require_unit(p)?;
    Ok(n * (-n * p).exp())
}

/// Beta(1, N-1) density `(N-1)(1-p)^{N-2}`.
pub fn beta_pdf(p: f64, n_dim: u64) -> Result<f64> {
    let n = require_dim(n_dim)?;
    require_unit(p)?;
    Ok((n - 1.0) * (1.0 - p).powf(n - 2.0))
}

/// Beta(1, N-1) distribution function `1 - (1-p)^{N-1}`.
pub fn beta_cdf(p: f64, n_dim: u64) -> Result<f64> {
    let n = require_dim(n_dim)?;
    require_unit(p)?;
    if p == 1.0 {
        return Ok(1.0);
    }
    Ok(-((n - 1.0) * (-p).ln_1p()).exp_m1())
}

/// Analytic mean of `f(P)` for one output under Haar.
pub fn haar_mean_of_scheme(scheme: &SchemeFunction, n_dim: u64, mode: HaarMeanMode) -> Result<f64> {
    require_dim(n_dim)?;
    scheme.haar_mean(n_dim, mode)
}

/// Analytic standard deviation `sigma_f` of `f(P)` for one output under Haar.
pub fn sigma_f(scheme: &SchemeFunction, n_dim: u64, mode: HaarMeanMode) -> Result<f64> {
    require_dim(n_dim)?;
    scheme.sigma_f(n_dim, mode)
}

/// `E[f(P)]` by quadrature against the density of `mode`.
///
/// Fallback for scheme functions without a closed form; `f` may have an
/// integrable singularity at `p = 0`.
pub fn haar_mean_by_quadrature<F: Fn(f64) -> f64>(
    f: F,
    n_dim: u64,
    mode: HaarMeanMode,
) -> Result<f64> {
    let n = require_dim(n_dim)?;
    // The densities are concentrated on [0, ~40/N]; split there so the
    // adaptive rule sees the bulk at full resolution.
    let knee = (40.0 / n).min(1.0);
    let density = move |p: f64| match mode {
        HaarMeanMode::Exact => (n - 1.0) * ((n - 2.0) * (-p).ln_1p()).exp(),
        HaarMeanMode::PorterThomas => n * (-n * p).exp(),
    };
    let g = |p: f64| {
        let w = density(p);
        if w == 0.0 {
            0.0
        } else {
            f(p) * w
        }
    };
    let head = quadrature::integrate(g, 0.0, knee, 0.5 * QUADRATURE_TOL)?;
    let tail = if knee < 1.0 {
        quadrature::integrate(g, knee, 1.0, 0.5 * QUADRATURE_TOL)?
    } else {
        0.0
    };
    Ok(head + tail)
}

/// Replica covariance `Cov(g_i(P(x)), g_i(P(y)))`, `g_i(p) = (p^{i+1} - p)/i`.
///
/// As `i -> 0` this tends to the covariance of `p ln p` given by
/// [`plogp_covariance`].
pub fn gi_covariance(i: f64, n_dim: u64) -> Result<f64> {
    require_dim(n_dim)?;
    if !(i > 0.0 && i <= GI_MAX_INDEX) {
        return Err(Error::InvalidArgument(format!(
            "replica index must lie in (0, {GI_MAX_INDEX}], got {i}"
        )));
    }
    if i < GI_MIN_INDEX {
        return Err(Error::InvalidArgument(format!(
            "replica index {i} below {GI_MIN_INDEX}: the difference quotient loses all precision in double arithmetic; use plogp_covariance"
        )));
    }
    let n = n_dim as f64;
    // Ratios to the i = 0 moments: E[P^{1+s} Q^{1+t}] = M(1,1) exp(phi(s,t)), with
    // phi built from ln Gamma ratios that stay relatively accurate for small s, t.
    let a = ln_gamma_ratio(2.0, i)?;
    let phi_ii = 2.0 * a - ln_gamma_ratio(n + 2.0, 2.0 * i)?;
    let phi_i0 = a - ln_gamma_ratio(n + 2.0, i)?;
    let m11 = 1.0 / (n * (n + 1.0));
    let joint = m11 * (phi_ii.exp_m1() - 2.0 * phi_i0.exp_m1()) / (i * i);
    let mean = (a - ln_gamma_ratio(n + 1.0, i)?).exp_m1() / (n * i);
    Ok(joint - mean * mean)
}

/// Closed-form covariance of `P(x) ln P(x)` and `P(y) ln P(y)`, `x != y`.
pub fn plogp_covariance(n_dim: u64) -> Result<f64> {
    if n_dim < 4 {
        return Err(Error::InvalidArgument(format!(
            "plogp covariance requires N >= 4, got {n_dim}"
        )));
    }
    let n = n_dim as f64;
    let g = EULER_GAMMA;
    let psi_n1 = digamma(n + 1.0)?;
    let psi_n2 = digamma(n + 2.0)?;
    let psi1_n2 = trigamma(n + 2.0)?;
    let a = 1.0 - g - psi_n1;
    let b = 1.0 - g - psi_n2;
    // E[PlnP(x) PlnP(y)] - E[PlnP]^2
    let joint = (b * b - psi1_n2) / (n * (n + 1.0));
    let mean_sq = a * a / (n * n);
    Ok(joint - mean_sq)
}

/// Leading large-`N` behaviour of [`plogp_covariance`].
pub fn plogp_covariance_asymptotic(n_dim: u64) -> Result<f64> {
    let n = require_dim(n_dim)?;
    let l = n.ln();
    let g = EULER_GAMMA;
    Ok((-l * l - 2.0 * g * l + 4.0 * l - g * g + 4.0 * g - 4.0) / (n * n * n))
}
