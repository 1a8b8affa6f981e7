use ergoxeb::analytic::{haar_covariance, MomentQuery};
use ergoxeb::ensembles::{haar_state, sample_haar_unitary};
use ergoxeb::estimators::{correlation_c_f, estimate_c_f, linear_xeb, SchemeFunction};
use ergoxeb::formats::format_sig;
use ergoxeb::noise::{experimental_distribution, sample_bitstrings, NoiseModel};
use ergoxeb::statevector::{GateBlock, OutputDistribution, SystemDims};
use ergoxeb::stats::batch_means;
use proptest::prelude::*;

fn haar_distribution(n: u32, seed: u64) -> OutputDistribution {
    let dims = SystemDims::dense(n).unwrap();
    haar_state(dims, seed).unwrap().distribution().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn covariance_is_negative(q1 in 1e-3f64..=5.0, q2 in 1e-3f64..=5.0, n in 2u64..=256) {
        let c = haar_covariance(&MomentQuery::new(q1, q2, n).unwrap()).unwrap();
        prop_assert!(c < 0.0, "Cov({q1}, {q2}, {n}) = {c}");
    }

    #[test]
    fn gates_preserve_norm(
        n in 2u32..=6,
        seed in any::<u64>(),
        gate_seed in any::<u64>(),
        a in 0usize..6,
        b in 0usize..6,
        two in any::<bool>(),
    ) {
        let dims = SystemDims::dense(n).unwrap();
        let (a, b) = (a % n as usize, b % n as usize);
        let targets = if two && a != b { vec![a, b] } else { vec![a] };
        let k = targets.len() as u32;
        let u = sample_haar_unitary(SystemDims::dense(k).unwrap(), gate_seed).unwrap();
        let gate = GateBlock::new(targets, u).unwrap();
        let mut state = haar_state(dims, seed).unwrap();
        state.apply(&gate).unwrap();
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_is_affine(n in 1u32..=7, seed in any::<u64>(), f in 0.0f64..=1.0, i in 1u32..=4) {
        let p = haar_distribution(n, seed);
        let scheme = SchemeFunction::Monomial(i);
        let q = experimental_distribution(&p, &NoiseModel::depolarizing(f).unwrap()).unwrap();
        let u = OutputDistribution::uniform(p.dims()).unwrap();
        let lhs = correlation_c_f(&p, &q, &scheme).unwrap();
        let rhs = f * correlation_c_f(&p, &p, &scheme).unwrap()
            + (1.0 - f) * correlation_c_f(&p, &u, &scheme).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn linear_xeb_identity(n in 1u32..=8, seed in any::<u64>(), t in 1usize..500) {
        let p = haar_distribution(n, seed);
        let s = sample_bitstrings(&p, t, seed ^ 1).unwrap();
        let xeb = linear_xeb(&p, &s).unwrap();
        let c = estimate_c_f(&p, &s, &SchemeFunction::Monomial(2)).unwrap();
        prop_assert_eq!((xeb.f_hat + 1.0).to_bits(), c.value.to_bits());
    }

    #[test]
    fn seventeen_digits_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(format_sig(v, 17).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn scheme_names_round_trip(i in 2u32..50) {
        for s in [SchemeFunction::Monomial(i), SchemeFunction::NormalizedMonomial(i)] {
            prop_assert_eq!(s.to_string().parse::<SchemeFunction>().unwrap(), s);
        }
    }

    #[test]
    fn sampling_is_reproducible(n in 1u32..=6, seed in any::<u64>()) {
        let p = haar_distribution(n, seed);
        let a = sample_bitstrings(&p, 64, seed).unwrap();
        let b = sample_bitstrings(&p, 64, seed).unwrap();
        prop_assert_eq!(a.bitstrings(), b.bitstrings());
    }

    #[test]
    fn batch_means_of_constant(c in -1e6f64..1e6, len in 10usize..200) {
        let (m, se) = batch_means(&vec![c; len], 10).unwrap();
        prop_assert!((m - c).abs() <= 1e-12 * c.abs().max(1.0));
        prop_assert!(se <= 1e-9 * c.abs().max(1.0));
    }
}
