//! Closed-form expectations, variances and bounds against the quadrature
//! and Monte Carlo oracle.

use vlcsec_core::bounds_avg::{self, f_low, AvgConstraint};
use vlcsec_core::bounds_peak::{self, MaxentPdf, PeakConstraint};
use vlcsec_core::oracle::{self, InputDistribution, QuadratureSpec};
use vlcsec_core::quadrature::{integrate_with_breaks, Tolerance};
use vlcsec_core::{NoiseParams, Side, WiretapChannel};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

/// Channel with `H_Bς_B² = kb` and `H_Eς_E² = ke` at unit gains.
fn products(kb: f64, ke: f64) -> WiretapChannel {
    WiretapChannel::new(1.0, 1.0, NoiseParams::new(1.0, kb).unwrap(), NoiseParams::new(0.7, ke).unwrap()).unwrap()
}

#[test]
fn exponential_expectation_matches_quadrature() {
    for &mean in &[0.1, 10.0, 1e4] {
        for &kb in &[0.05, 1.5, 40.0] {
            for &ke in &[0.02, 0.9, 25.0] {
                let ch = products(kb, ke);
                let closed = bounds_avg::expect_log_ratio_exponential(&ch, mean).unwrap();
                let quad = oracle::expect_log_ratio(&InputDistribution::Exponential { mean }, &ch).unwrap();
                assert!(rel(closed, quad) < 1e-7, "mean={mean} kb={kb} ke={ke}: {closed} vs {quad}");
            }
        }
    }
}

#[test]
fn maxent_expectation_matches_quadrature() {
    for &alpha in &[0.2, 0.5, 0.8] {
        for &a in &[0.3, 30.0, 3e4] {
            for &(kb, ke) in &[(0.05, 0.02), (1.5, 0.9), (40.0, 25.0)] {
                let ch = products(kb, ke);
                let pdf = MaxentPdf::new(alpha, a).unwrap();
                let closed = bounds_peak::expect_log_ratio_maxent(&ch, &pdf).unwrap();
                let quad = oracle::expect_log_ratio(&InputDistribution::maxent(&pdf), &ch).unwrap();
                assert!(rel(closed, quad) < 1e-7, "alpha={alpha} a={a} kb={kb}: {closed} vs {quad}");
            }
        }
    }
}

#[test]
fn identical_channels_have_zero_log_ratio() {
    let ch = WiretapChannel::symmetric_noise(2.0, 2.0, NoiseParams::new(1.0, 1.5).unwrap()).unwrap();
    for d in [
        InputDistribution::Exponential { mean: 3.0 },
        InputDistribution::Uniform { a: 3.0 },
        InputDistribution::TruncExp { c: 0.4, a: 3.0 },
    ] {
        assert_eq!(oracle::expect_log_ratio(&d, &ch).unwrap(), 0.0);
    }
}

#[test]
fn conditional_entropy_expectations() {
    let ch = products(1.5, 0.9);
    let spec = QuadratureSpec::default();
    let mean = 4.0;
    let k = 1.5;
    let h = oracle::conditional_entropy(Side::Bob, &InputDistribution::Exponential { mean }, &ch, &spec).unwrap();
    let closed = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln()
        + 0.5 * -vlcsec_core::specfun::scaled_ei_neg(1.0 / (k * mean)).unwrap();
    assert!((h - closed).abs() < 1e-9);

    let a = 6.0;
    let h = oracle::conditional_entropy(Side::Bob, &InputDistribution::Uniform { a }, &ch, &spec).unwrap();
    let l = (k * a).ln_1p();
    let closed = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln() + 0.5 * (l - 1.0 + l / (a * k));
    assert!((h - closed).abs() < 1e-9);
}

#[test]
fn closed_variances_match_moments() {
    let ch = WiretapChannel::new(1.0, 0.2, NoiseParams::new(1.0, 1.5).unwrap(), NoiseParams::new(0.6, 2.5).unwrap()).unwrap();
    let tol = Tolerance::new(1e-13, 1e-300);
    for &s in &[0.5, 20.0, 3e3] {
        let d = InputDistribution::Exponential { mean: s };
        let closed = bounds_avg::eve_variance_exponential(&ch, s);
        assert!(rel(closed, oracle::output_variance(&d, Side::Eve, &ch)) < 1e-12);

        for &alpha in &[0.2, 0.5, 0.8] {
            let pdf = MaxentPdf::new(alpha, s).unwrap();
            let d = InputDistribution::maxent(&pdf);
            let closed = bounds_peak::eve_variance_maxent(&ch, &pdf);
            assert!(rel(closed, oracle::output_variance(&d, Side::Eve, &ch)) < 1e-12);
            // second moment of X by quadrature
            let m1 = d.expect(|x| x, &[], &tol).unwrap();
            let m2 = d.expect(|x| x * x, &[], &tol).unwrap();
            assert!(rel(m2 - m1 * m1, pdf.variance()) < 1e-7, "alpha={alpha} s={s}");
        }
    }
    let a = 8.0;
    let uni = InputDistribution::Uniform { a };
    let h = ch.h_e();
    let closed = h * h * a * a / 12.0 + a / 2.0 * h * ch.noise_e().product() + ch.noise_e().sigma2;
    assert!(rel(closed, oracle::output_variance(&uni, Side::Eve, &ch)) < 1e-12);
}

#[test]
fn monte_carlo_variances_within_five_standard_errors() {
    let ch = WiretapChannel::new(1.0, 0.3, NoiseParams::new(1.0, 1.5).unwrap(), NoiseParams::new(0.8, 2.0).unwrap()).unwrap();
    for d in [
        InputDistribution::Exponential { mean: 3.0 },
        InputDistribution::Uniform { a: 10.0 },
        InputDistribution::TruncExp { c: -0.3, a: 10.0 },
    ] {
        for side in [Side::Bob, Side::Eve] {
            let mc = oracle::mc_output_variance(&d, side, &ch, 1_000_000, 7, 4).unwrap();
            let exact = oracle::output_variance(&d, side, &ch);
            assert!((mc.estimate - exact).abs() < 5.0 * mc.std_error, "{d:?} {side:?}: {} vs {exact} (se {})", mc.estimate, mc.std_error);
        }
    }
}

#[test]
fn gaussian_ceiling_and_output_entropy_floor() {
    let ch = WiretapChannel::new(1.0, 0.25, NoiseParams::new(1.0, 1.5).unwrap(), NoiseParams::new(1.0, 1.5).unwrap()).unwrap();
    let spec = QuadratureSpec::default();
    let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    for d in [
        InputDistribution::Exponential { mean: 5.0 },
        InputDistribution::Uniform { a: 12.0 },
        InputDistribution::TruncExp { c: -0.2, a: 12.0 },
        InputDistribution::TruncExp { c: 0.3, a: 12.0 },
    ] {
        let he = oracle::marginal_entropy(Side::Eve, &d, &ch, &spec).unwrap();
        assert!(he <= 0.5 * (two_pi_e * oracle::output_variance(&d, Side::Eve, &ch)).ln() + 1e-9);
        let hb = oracle::marginal_entropy(Side::Bob, &d, &ch, &spec).unwrap();
        let floor = d.entropy().unwrap() + f_low(ch.h_b(), d.mean(), &ch.noise_b()).unwrap();
        assert!(hb >= floor - 1e-4, "{d:?}: {hb} < {floor}");
    }
}

#[test]
fn truncation_adequacy() {
    let ch = WiretapChannel::symmetric_noise(1.0, 0.1, NoiseParams::new(1.0, 1.5).unwrap()).unwrap();
    let base = QuadratureSpec::default();
    let wide = QuadratureSpec { y_truncation_sigmas: 16.0, ..base };
    for d in [InputDistribution::Exponential { mean: 3.0 }, InputDistribution::TruncExp { c: -0.01, a: 300.0 }] {
        let a = oracle::secrecy_rate(&d, &ch, &base).unwrap();
        let b = oracle::secrecy_rate(&d, &ch, &wide).unwrap();
        assert!((a - b).abs() < 1e-6, "{d:?}: {a} vs {b}");
    }
}

#[test]
fn marginal_entropy_of_point_mass_is_gaussian() {
    let ch = WiretapChannel::symmetric_noise(1.0, 0.5, NoiseParams::new(2.0, 1.5).unwrap()).unwrap();
    let h = oracle::marginal_entropy(Side::Bob, &InputDistribution::PointMass { x0: 3.0 }, &ch, &QuadratureSpec::default()).unwrap();
    let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    assert!((h - 0.5 * (two_pi_e * (1.0 + 1.5 * 3.0) * 2.0).ln()).abs() < 1e-14);
}

#[test]
fn sandwich_on_average_grid() {
    let spec = QuadratureSpec::default();
    let nz = NoiseParams::new(1.0, 1.5).unwrap();
    for &ratio in &[2.0, 10.0, 100.0] {
        let ch = WiretapChannel::symmetric_noise(1.0, 1.0 / ratio, nz).unwrap();
        for &p in &[-10.0, 0.0, 10.0, 20.0, 30.0] {
            let con = AvgConstraint::new(0.3, db(p)).unwrap();
            let lo = bounds_avg::lower_bound_avg(&ch, &con).unwrap();
            let r = oracle::secrecy_rate(&InputDistribution::Exponential { mean: con.mean() }, &ch, &spec).unwrap();
            assert!(r >= lo - 1e-4, "ratio={ratio} p={p}: {r} < {lo}");
        }
    }
}

#[test]
fn sandwich_on_peak_grid() {
    let spec = QuadratureSpec::default();
    let nz = NoiseParams::new(1.0, 1.5).unwrap();
    for &ratio in &[10.0, 1000.0] {
        let ch = WiretapChannel::symmetric_noise(1.0, 1.0 / ratio, nz).unwrap();
        for &alpha in &[0.2, 0.5, 0.8] {
            for &a in &[0.0, 10.0, 20.0, 30.0] {
                let con = PeakConstraint::from_alpha(0.9, alpha, db(a)).unwrap();
                let lo = bounds_peak::lower_bound_peak(&ch, &con).unwrap();
                let pdf = MaxentPdf::new(alpha, db(a)).unwrap();
                let r = oracle::secrecy_rate(&InputDistribution::maxent(&pdf), &ch, &spec).unwrap();
                assert!(r >= lo - 1e-4, "ratio={ratio} alpha={alpha} a={a}: {r} < {lo}");
            }
        }
    }
}

#[test]
fn monte_carlo_secrecy_rate_agrees() {
    let spec = QuadratureSpec::default();
    let nz = NoiseParams::new(1.0, 1.5).unwrap();
    let ch = WiretapChannel::symmetric_noise(1.0, 0.1, nz).unwrap();
    let points = [
        InputDistribution::Exponential { mean: 0.3 },
        InputDistribution::Exponential { mean: 3.0 },
        InputDistribution::Uniform { a: 10.0 },
        InputDistribution::TruncExp { c: -0.05, a: 30.0 },
        InputDistribution::TruncExp { c: 0.2, a: 10.0 },
    ];
    for d in points {
        let q = oracle::secrecy_rate(&d, &ch, &spec).unwrap();
        let mc = oracle::mc_secrecy_rate(&d, &ch, 20_000, 11, 4, &spec).unwrap();
        assert!((mc.estimate - q).abs() < 3.0 * mc.std_error, "{d:?}: mc {} ± {} vs {q}", mc.estimate, mc.std_error);
    }
}

#[test]
fn monte_carlo_point_mass_and_scaling() {
    let spec = QuadratureSpec::default();
    let ch = WiretapChannel::symmetric_noise(1.0, 0.1, NoiseParams::new(1.0, 1.5).unwrap()).unwrap();
    let pm = oracle::mc_secrecy_rate(&InputDistribution::PointMass { x0: 2.0 }, &ch, 20_000, 3, 2, &spec).unwrap();
    assert!(pm.estimate.abs() < 3.0 * pm.std_error);

    let d = InputDistribution::Exponential { mean: 2.0 };
    let small = oracle::mc_secrecy_rate(&d, &ch, 20_000, 5, 4, &spec).unwrap();
    let large = oracle::mc_secrecy_rate(&d, &ch, 40_000, 5, 4, &spec).unwrap();
    let ratio = large.std_error / small.std_error;
    assert!((ratio / std::f64::consts::FRAC_1_SQRT_2 - 1.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn monte_carlo_is_deterministic_per_seed_and_workers() {
    let spec = QuadratureSpec::default();
    let ch = WiretapChannel::symmetric_noise(1.0, 0.1, NoiseParams::new(1.0, 1.5).unwrap()).unwrap();
    let d = InputDistribution::Uniform { a: 4.0 };
    let a = oracle::mc_secrecy_rate(&d, &ch, 10_000, 99, 3, &spec).unwrap();
    let b = oracle::mc_secrecy_rate(&d, &ch, 10_000, 99, 3, &spec).unwrap();
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    let c = oracle::mc_secrecy_rate(&d, &ch, 10_000, 100, 3, &spec).unwrap();
    assert_ne!(a.estimate.to_bits(), c.estimate.to_bits());
    assert!(oracle::mc_secrecy_rate(&d, &ch, 500, 1, 1, &spec).is_err());
}

#[test]
fn peak_grid_normalization_by_quadrature() {
    let tol = Tolerance::new(1e-12, 1e-300);
    for i in 1..20 {
        let alpha = 0.05 * i as f64;
        for &a in &[1e-2, 1.0, 1e3, 1e6] {
            let pdf = MaxentPdf::new(alpha, a).unwrap();
            let pts = [0.0, 0.25 * a, 0.5 * a, 0.75 * a, a];
            let norm = integrate_with_breaks(|x| pdf.eval(x), &pts, &tol).unwrap().value;
            let mean = integrate_with_breaks(|x| x * pdf.eval(x), &pts, &tol).unwrap().value;
            assert!((norm - 1.0).abs() < 1e-8);
            assert!((mean / a - alpha).abs() < 1e-8);
        }
    }
}
