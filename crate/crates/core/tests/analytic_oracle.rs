//! Analytic layer against 50-digit reference values (see `oracle/gen_values.py`).
#![allow(clippy::excessive_precision)]

use ergoxeb::analytic::{
    digamma, gi_covariance, haar_covariance, haar_joint_moment, ln_gamma, plogp_covariance,
    plogp_covariance_asymptotic, trigamma, HaarMeanMode, MomentQuery,
};
use ergoxeb::estimators::SchemeFunction;

fn assert_rel(actual: f64, expected: f64, tol: f64, what: &str) {
    let rel = ((actual - expected) / expected).abs();
    assert!(
        rel <= tol,
        "{what}: got {actual:e}, expected {expected:e}, rel err {rel:e} > {tol:e}"
    );
}

#[test]
fn log_gamma_reference() {
    let cases = [
        (0.5, 0.572_364_942_924_700_087_07),
        (3.7, 1.428_072_326_665_387_921_9),
        (0.01, 4.599_479_878_042_021_722_5),
        (150.25, 601.261_504_032_499_725_98),
        (100_000.5, 1_051_293.465_435_139_38),
    ];
    for (z, v) in cases {
        assert_rel(ln_gamma(z).unwrap(), v, 1e-13, &format!("ln_gamma({z})"));
    }
}

#[test]
fn polygamma_reference() {
    assert_rel(
        digamma(0.3).unwrap(),
        -3.502_524_222_200_132_989,
        1e-13,
        "digamma(0.3)",
    );
    assert_rel(
        digamma(7.25).unwrap(),
        1.910_453_526_883_736_028_4,
        1e-13,
        "digamma(7.25)",
    );
    assert_rel(
        digamma(1025.0).unwrap(),
        6.931_960_007_376_600_972_8,
        1e-13,
        "digamma(1025)",
    );
    assert_rel(
        trigamma(0.3).unwrap(),
        12.245_364_546_107_730_465,
        1e-13,
        "trigamma(0.3)",
    );
    assert_rel(
        trigamma(7.25).unwrap(),
        0.147_879_233_158_932_169_65,
        1e-13,
        "trigamma(7.25)",
    );
    assert_rel(
        trigamma(1026.0).unwrap(),
        0.000_975_134_003_666_003_629_24,
        1e-13,
        "trigamma(1026)",
    );
}

#[test]
fn covariance_reference() {
    let cases = [
        (2.0, 2.0, 2, -0.077_777_777_777_777_777_778),
        (0.5, 1.5, 8, -0.001_512_089_020_690_919_588_2),
        (3.0, 1.0, 256, -1.599_336_987_183_675_266_2e-11),
        (0.01, 0.02, 256, -6.516_993_884_284_399_767_2e-7),
    ];
    for (a, b, n, v) in cases {
        let q = MomentQuery::new(a, b, n).unwrap();
        assert_rel(
            haar_covariance(&q).unwrap(),
            v,
            1e-11,
            &format!("cov({a},{b},{n})"),
        );
    }
    let q = MomentQuery::new(2.5, 0.5, 16).unwrap();
    assert_rel(
        haar_joint_moment(&q).unwrap(),
        0.000_601_561_093_288_486_756_75,
        1e-13,
        "moment(2.5,0.5,16)",
    );
}

#[test]
fn plogp_covariance_reference() {
    let cases = [
        (4, -6.962_000_907_798_849_028_7e-5),
        (8, -0.001_110_469_032_381_549_810_9),
        (16, -4.699_384_667_981_747_294_6e-4),
        (64, -2.856_845_802_569_010_824_2e-5),
        (1024, -2.824_855_895_662_407_212_1e-8),
    ];
    for (n, v) in cases {
        assert_rel(
            plogp_covariance(n).unwrap(),
            v,
            1e-9,
            &format!("plogp_cov({n})"),
        );
    }
    assert_rel(
        plogp_covariance_asymptotic(1024).unwrap(),
        -2.826_157_738_236_202_951_9e-8,
        1e-12,
        "asymptotic(1024)",
    );
}

#[test]
fn replica_covariance_reference() {
    let cases = [
        (
            8,
            [
                -0.001_108_577_948_069_020_968_5,
                -0.001_110_289_837_515_433_314_1,
                -0.001_110_451_213_358_318_946_6,
            ],
        ),
        (
            16,
            [
                -4.646_409_043_271_361_817_7e-4,
                -4.694_078_554_960_851_179_2e-4,
                -4.698_853_975_157_936_620_8e-4,
            ],
        ),
        (
            64,
            [
                -2.782_978_524_925_610_236_1e-5,
                -2.849_365_175_054_808_621_4e-5,
                -2.856_096_792_895_903_693_2e-5,
            ],
        ),
    ];
    for (n, values) in cases {
        for (i, v) in [1e-2, 1e-3, 1e-4].into_iter().zip(values) {
            assert_rel(
                gi_covariance(i, n).unwrap(),
                v,
                1e-8,
                &format!("gi_cov({i},{n})"),
            );
        }
    }
}

#[test]
fn log_scheme_reference() {
    let exact = HaarMeanMode::Exact;
    let pt = HaarMeanMode::PorterThomas;
    let s_plogp = SchemeFunction::PLogP;
    let s_neglog = SchemeFunction::NegLog;

    assert_rel(
        s_neglog.haar_mean(4, exact).unwrap(),
        1.833_333_333_333_333_333_3,
        1e-13,
        "E[-ln p] N=4",
    );
    assert_rel(
        s_plogp.haar_mean(4, exact).unwrap(),
        -0.270_833_333_333_333_333_33,
        1e-13,
        "E[p ln p] N=4",
    );
    assert_rel(
        s_plogp.sigma_f(4, exact).unwrap(),
        0.096_806_651_516_193_750_527,
        1e-11,
        "sd[p ln p] N=4",
    );
    assert_rel(
        s_neglog.sigma_f(4, exact).unwrap(),
        1.166_666_666_666_666_666_7,
        1e-13,
        "sd[-ln p] N=4",
    );

    assert_rel(
        s_neglog.haar_mean(1024, exact).unwrap(),
        7.508_199_109_778_133_833_4,
        1e-13,
        "E[-ln p] N=1024",
    );
    assert_rel(
        s_plogp.haar_mean(1024, exact).unwrap(),
        -0.006_356_616_867_459_115_071_7,
        1e-12,
        "E[p ln p] N=1024",
    );
    assert_rel(
        s_plogp.sigma_f(1024, exact).unwrap(),
        0.005_401_294_382_391_572_804_3,
        1e-10,
        "sd[p ln p] N=1024",
    );
    assert_rel(
        s_neglog.sigma_f(1024, exact).unwrap(),
        1.282_168_876_301_342_698_4,
        1e-12,
        "sd[-ln p] N=1024",
    );

    assert_rel(
        s_plogp.haar_mean(1024, pt).unwrap(),
        -0.006_356_140_107_911_119_096_5,
        1e-12,
        "PT E[p ln p]",
    );
    assert_rel(
        s_plogp.sigma_f(1024, pt).unwrap(),
        0.005_405_209_989_795_922_665_1,
        1e-10,
        "PT sd[p ln p]",
    );
}
