//! Summary statistics used by the harness and the test suites.

use crate::error::{Error, Result};
use crate::summation::{compensated_sum, RunningMoments};

/// Default batch count for batch-means standard errors.
pub const DEFAULT_BATCHES: usize = 10;

/// Mean and batch-means standard error of `values` split into `batches`
/// contiguous batches of (nearly) equal size.
pub fn batch_means(values: &[f64], batches: usize) -> Result<(f64, f64)> {
    if batches < 2 || values.len() < batches {
        return Err(Error::InvalidArgument(format!(
            "batch means needs at least {batches} >= 2 values, got {}",
            values.len()
        )));
    }
    let means: Vec<f64> = batch_ranges(values.len(), batches)
        .map(|(lo, hi)| compensated_sum(values[lo..hi].iter().copied()) / (hi - lo) as f64)
        .collect();
    Ok(mean_and_se(&means))
}

/// Index ranges of `batches` contiguous batches over `len` items.
pub fn batch_ranges(len: usize, batches: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..batches).map(move |b| (b * len / batches, (b + 1) * len / batches))
}

/// Mean of `values` and the standard error of that mean.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let mut m = RunningMoments::new();
    values.iter().for_each(|&v| m.push(v));
    (
        compensated_sum(values.iter().copied()) / values.len() as f64,
        m.std_error(),
    )
}

/// Median (mean of the two middle values for even length).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let c = cdf(x);
        d.max(c - i as f64 / n).max((i + 1) as f64 / n - c)
    })
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic critical value of the KS statistic at significance `alpha`
/// for effective sample size `n_eff` (`n` one-sample, `n m / (n + m)` two-sample).
pub fn ks_critical(alpha: f64, n_eff: f64) -> f64 {
    (-(0.5 * alpha).ln() / 2.0).sqrt() / n_eff.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batches_cover_everything() {
        let r: Vec<_> = batch_ranges(23, 10).collect();
        assert_eq!(r.first().unwrap().0, 0);
        assert_eq!(r.last().unwrap().1, 23);
        assert!(r.windows(2).all(|w| w[0].1 == w[1].0));
        let values: Vec<f64> = (0..100).map(f64::from).collect();
        let (m, se) = batch_means(&values, 10).unwrap();
        assert_eq!(m, 49.5);
        assert!(se > 0.0);
        assert!(batch_means(&values[..5], 10).is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn ks_values() {
        let grid: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_statistic(&grid, |x| x) <= 0.0005 + 1e-12);
        assert_eq!(ks_two_sample(&grid, &grid), 0.0);
        assert_eq!(ks_two_sample(&[0.0, 0.1], &[0.5, 0.6]), 1.0);
        assert!((ks_critical(0.01, 1.0) - 1.6276).abs() < 1e-3);
    }
}
