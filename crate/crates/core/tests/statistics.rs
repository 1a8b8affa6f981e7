//! Distributional checks with fixed seeds.

use ergoxeb::analytic::{beta_cdf, beta_pdf, pt_pdf, HaarMeanMode};
use ergoxeb::ensembles::{
    haar_state, haar_vector, member_distribution, sample_haar_unitary, EnsembleSpec,
};
use ergoxeb::estimators::{correlation_c_f, estimate_c_f, SchemeFunction};
use ergoxeb::harness::{run_covariance_verification, CovarianceConfig};
use ergoxeb::noise::{
    experimental_distribution, sample_bitstrings, sample_experimental, NoiseModel,
};
use ergoxeb::rng::mix64;
use ergoxeb::statevector::{GateBlock, SystemDims};
use ergoxeb::stats::{ks_critical, ks_statistic, ks_two_sample, mean_and_se};
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

#[test]
fn beta_law_of_single_probability() {
    let n_dim = 8;
    let draws: Vec<f64> = (0..10_000)
        .map(|k| haar_vector(n_dim, mix64(17, k))[0].norm_sqr())
        .collect();
    let d = ks_statistic(&draws, |p| beta_cdf(p, n_dim as u64).unwrap());
    assert!(d < ks_critical(0.01, draws.len() as f64), "KS {d}");
}

#[test]
fn beta_cdf_matches_statrs() {
    for n in [2u64, 8, 1024] {
        let reference = Beta::new(1.0, n as f64 - 1.0).unwrap();
        for p in [1e-4, 1e-3, 0.01, 0.2, 0.7] {
            let ours = beta_cdf(p, n).unwrap();
            assert!((ours - reference.cdf(p)).abs() < 1e-12, "N={n} p={p}");
        }
    }
}

#[test]
fn porter_thomas_approaches_beta() {
    let n = 1 << 14;
    let sup = (0..=1000)
        .map(|k| k as f64 * 10.0 / (1000.0 * n as f64))
        .map(|p| (pt_pdf(p, n).unwrap() / beta_pdf(p, n).unwrap() - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(sup < 5e-3, "sup {sup}");
}

#[test]
fn left_invariance_under_a_fixed_gate() {
    let dims = SystemDims::dense(3).unwrap();
    let u = sample_haar_unitary(SystemDims::dense(2).unwrap(), 99).unwrap();
    let gate = GateBlock::new(vec![0, 2], u).unwrap();
    let plain: Vec<f64> = (0..4000)
        .map(|k| {
            haar_state(dims, mix64(1, k))
                .unwrap()
                .distribution()
                .unwrap()
                .prob(5)
        })
        .collect();
    let rotated: Vec<f64> = (0..4000)
        .map(|k| {
            let mut s = haar_state(dims, mix64(2, k)).unwrap();
            s.apply(&gate).unwrap();
            s.distribution().unwrap().prob(5)
        })
        .collect();
    let d = ks_two_sample(&plain, &rotated);
    assert!(d < ks_critical(0.01, 2000.0), "KS {d}");
}

#[test]
fn sampler_matches_distribution() {
    let p = haar_state(SystemDims::dense(4).unwrap(), 3)
        .unwrap()
        .distribution()
        .unwrap();
    let t = 100_000;
    let s = sample_bitstrings(&p, t, 8).unwrap();
    let mut counts = [0u64; 16];
    s.bitstrings().iter().for_each(|&x| counts[x as usize] += 1);
    let chi2: f64 = counts
        .iter()
        .zip(p.probs())
        .map(|(&c, &q)| {
            let e = q * t as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let crit = ChiSquared::new(15.0).unwrap().inverse_cdf(0.999);
    assert!(chi2 < crit, "chi2 {chi2} >= {crit}");
}

#[test]
fn depolarized_sampler_matches_mixture() {
    let p = haar_state(SystemDims::dense(3).unwrap(), 4)
        .unwrap()
        .distribution()
        .unwrap();
    let noise = NoiseModel::depolarizing(0.3).unwrap();
    let q = experimental_distribution(&p, &noise).unwrap();
    let t = 100_000;
    let s = sample_experimental(&p, &noise, t, 5).unwrap();
    let mut counts = [0u64; 8];
    s.bitstrings().iter().for_each(|&x| counts[x as usize] += 1);
    let chi2: f64 = counts
        .iter()
        .zip(q.probs())
        .map(|(&c, &qx)| (c as f64 - qx * t as f64).powi(2) / (qx * t as f64))
        .sum();
    assert!(
        chi2 < ChiSquared::new(7.0).unwrap().inverse_cdf(0.999),
        "chi2 {chi2}"
    );
}

#[test]
fn sampled_correlation_is_unbiased() {
    let spec = EnsembleSpec::haar(SystemDims::dense(5).unwrap(), 12);
    let p = member_distribution(&spec, 0).unwrap();
    let noise = NoiseModel::depolarizing(0.4).unwrap();
    let q = experimental_distribution(&p, &noise).unwrap();
    for scheme in [
        SchemeFunction::Monomial(2),
        SchemeFunction::Monomial(3),
        SchemeFunction::NegLog,
    ] {
        let exact = correlation_c_f(&p, &q, &scheme).unwrap();
        let estimates: Vec<f64> = (0..200)
            .map(|k| {
                let s = sample_experimental(&p, &noise, 500, mix64(77, k)).unwrap();
                estimate_c_f(&p, &s, &scheme).unwrap().value
            })
            .collect();
        let (m, se) = mean_and_se(&estimates);
        assert!(
            (m - exact).abs() < 4.0 * se,
            "{scheme}: {m} vs {exact} (se {se})"
        );
    }
}

#[test]
fn monte_carlo_covariance_grid() {
    let grid: Vec<(f64, f64)> = (1..=3)
        .flat_map(|a| (1..=3).map(move |b| (f64::from(a), f64::from(b))))
        .collect();
    for n_dim in [4, 8] {
        let cfg = CovarianceConfig {
            n_dim,
            grid: grid.clone(),
            plogp: true,
            samples: 200_000,
            base_seed: n_dim,
        };
        let result = run_covariance_verification(&cfg).unwrap();
        for r in &result.rows {
            // 20 comparisons per size; 4.5 sigma keeps the family-wise rate small.
            assert!(r.cov_z.abs() < 4.5, "N={n_dim} {r:?}");
            assert!(r.joint_z.abs() < 4.5, "N={n_dim} {r:?}");
        }
    }
}

#[test]
fn porter_thomas_means_converge_to_exact() {
    let n = 1 << 20;
    for scheme in [
        SchemeFunction::Monomial(2),
        SchemeFunction::Monomial(3),
        SchemeFunction::NegLog,
        SchemeFunction::PLogP,
    ] {
        let exact = scheme.haar_mean(n, HaarMeanMode::Exact).unwrap();
        let pt = scheme.haar_mean(n, HaarMeanMode::PorterThomas).unwrap();
        assert!(
            (exact - pt).abs() <= 1e-5 * exact.abs(),
            "{scheme}: {exact} vs {pt}"
        );
    }
}
