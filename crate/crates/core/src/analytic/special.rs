//! Log-Gamma, digamma and trigamma for positive real arguments.
//!
//! Each function shifts its argument upward with the recurrence until the
//! asymptotic (Stirling / Bernoulli) series converges to double precision,
//! then undoes the shift.

use crate::error::{Error, Result};
use crate::summation::CompensatedSum;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Stirling series shift threshold.
const STIRLING_MIN: f64 = 15.0;

/// Polygamma series shift threshold.
const PSI_MIN: f64 = 10.0;

/// `B_{2k}` for k = 1..=8.
const BERNOULLI_2K: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

fn require_positive(name: &str, z: f64) -> Result<()> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{name} requires a finite positive argument, got {z}"
        )));
    }
    Ok(())
}

/// Tail of the Stirling series, `sum_k B_{2k} / (2k (2k-1) z^{2k-1})`, for `z >= 15`.
fn stirling_tail(z: f64) -> f64 {
    let zinv = 1.0 / z;
    let z2 = zinv * zinv;
    let mut term = zinv;
    let mut acc = 0.0;
    for (k, b) in BERNOULLI_2K.iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        acc += b / (two_k * (two_k - 1.0)) * term;
        term *= z2;
    }
    acc
}

/// `ln Gamma(z)` for `z > 0`.
pub fn ln_gamma(z: f64) -> Result<f64> {
    require_positive("ln_gamma", z)?;
    if z == 1.0 || z == 2.0 {
        return Ok(0.0);
    }
    let mut x = z;
    let mut shift = CompensatedSum::new();
    while x < STIRLING_MIN {
        shift.add(x.ln());
        x += 1.0;
    }
    let stirling = (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_tail(x);
    Ok(stirling - shift.value())
}

/// `ln Gamma(x + a) - ln Gamma(x)` without forming either term.
///
/// Accurate to a few ulps relative to the result even when `a` is tiny
/// compared with `x`, which the covariance formulas depend on.
pub fn ln_gamma_ratio(x: f64, a: f64) -> Result<f64> {
    require_positive("ln_gamma_ratio", x)?;
    require_positive("ln_gamma_ratio", x + a)?;
    if a == 0.0 {
        return Ok(0.0);
    }
    let mut lo = x;
    let mut shift = CompensatedSum::new();
    while lo < STIRLING_MIN || lo + a < STIRLING_MIN {
        // ln(lo + a) - ln(lo)
        shift.add((a / lo).ln_1p());
        lo += 1.0;
    }
    let hi = lo + a;
    // (hi - 1/2) ln hi - (lo - 1/2) ln lo - a, rearranged to avoid cancellation.
    let main = (lo - 0.5) * (a / lo).ln_1p() + a * hi.ln() - a;
    let tail = stirling_tail(hi) - stirling_tail(lo);
    Ok(main + tail - shift.value())
}

/// Digamma `psi(z) = d/dz ln Gamma(z)`.
pub fn digamma(z: f64) -> Result<f64> {
    require_positive("digamma", z)?;
    let mut x = z;
    let mut shift = CompensatedSum::new();
    while x < PSI_MIN {
        shift.add(1.0 / x);
        x += 1.0;
    }
    let x2inv = 1.0 / (x * x);
    let mut term = x2inv;
    let mut series = 0.0;
    for (k, b) in BERNOULLI_2K.iter().enumerate() {
        series += b / (2.0 * (k as f64 + 1.0)) * term;
        term *= x2inv;
    }
    Ok(x.ln() - 0.5 / x - series - shift.value())
}

/// Trigamma `psi'(z)`.
pub fn trigamma(z: f64) -> Result<f64> {
    require_positive("trigamma", z)?;
    let mut x = z;
    let mut shift = CompensatedSum::new();
    while x < PSI_MIN {
        shift.add(1.0 / (x * x));
        x += 1.0;
    }
    let xinv = 1.0 / x;
    let x2inv = xinv * xinv;
    let mut term = x2inv * xinv;
    let mut series = 0.0;
    for b in BERNOULLI_2K.iter() {
        series += b * term;
        term *= x2inv;
    }
    Ok(xinv + 0.5 * x2inv + series + shift.value())
}

/// Polygamma of order `m`; orders 0 and 1 are supported.
pub fn polygamma(m: u32, z: f64) -> Result<f64> {
    match m {
        0 => digamma(z),
        1 => trigamma(z),
        _ => Err(Error::InvalidArgument(format!(
            "polygamma of order {m} is not supported (only 0 and 1)"
        ))),
    }
}
