//! Secrecy-capacity bounds under non-negativity and average-intensity
//! constraints.
//!
//! All values are in nats per transmission. Functions returning a bare
//! `f64` give the raw (possibly negative) bound; [`bounds_avg`] and
//! [`bounds_avg_si`] package raw and clamped values together.

use std::f64::consts::{E, PI};

use crate::channel::{NoiseParams, WiretapChannel};
use crate::error::{Error, Result};
use crate::specfun::{EiKernel, StandardEi};

pub(crate) const LN_2PI_E: f64 = 2.837_877_066_409_345_5; // ln(2πe)

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvgConstraint {
    /// Dimming target ξ.
    pub xi: f64,
    /// Nominal optical intensity in W.
    pub p: f64,
}

impl AvgConstraint {
    pub fn new(xi: f64, p: f64) -> Result<Self> {
        if !(xi > 0.0 && xi <= 1.0) {
            return Err(Error::InvalidParameter { field: "xi", value: xi, reason: "must lie in (0, 1]" });
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidParameter { field: "p", value: p, reason: "must be finite and > 0" });
        }
        Ok(Self { xi, p })
    }

    /// Required mean intensity ξP.
    pub fn mean(&self) -> f64 {
        self.xi * self.p
    }
}

/// Which side of the upper-bound case split was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperBranch {
    CondHolds,
    CondFails,
}

impl UpperBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            UpperBranch::CondHolds => "cond_holds",
            UpperBranch::CondFails => "cond_fails",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyBounds {
    pub lower_raw: f64,
    pub upper_raw: f64,
    /// Clamped at 0, and forced to 0 when the main channel is no better
    /// than the eavesdropper's in any parameter.
    pub lower: f64,
    pub upper: f64,
    /// Upper-bound branch; `None` for bounds without a case split.
    pub branch: Option<UpperBranch>,
    pub zero_secrecy: bool,
}

impl SecrecyBounds {
    pub fn new(lower_raw: f64, upper_raw: f64, branch: Option<UpperBranch>, zero_secrecy: bool) -> Self {
        let (lower, upper) = if zero_secrecy {
            (0.0, 0.0)
        } else {
            (lower_raw.max(0.0), upper_raw.max(0.0))
        };
        Self { lower_raw, upper_raw, lower, upper, branch, zero_secrecy }
    }

    pub fn gap(&self) -> f64 {
        self.upper_raw - self.lower_raw
    }
}

/// Output-entropy excess of Bob's channel over the input entropy.
///
/// Uses the cancellation-free identity
/// `√(u(u+2s)) − (u+s) = −s²/(√(u(u+2s)) + u + s)` with `s = ς_B²σ_B²`,
/// `u = H_BξP`.
pub fn f_low(h_b: f64, xi_p: f64, noise_b: &NoiseParams) -> Result<f64> {
    if !(h_b > 0.0 && xi_p > 0.0 && noise_b.sigma2 > 0.0 && noise_b.varsigma2 > 0.0) {
        return Err(Error::domain("f_low", "all arguments must be positive"));
    }
    let s = noise_b.product();
    let u = h_b * xi_p;
    let head = 0.5 * (h_b * h_b + 2.0 * h_b * s / xi_p).ln();
    let root = (u * (u + 2.0 * s)).sqrt();
    Ok(head - s / (root + u + s))
}

/// `E[ln(1 + aX)]` for `X ~ Exp(mean)`.
pub fn expect_log1p_exponential(kernel: &dyn EiKernel, a: f64, mean: f64) -> Result<f64> {
    Ok(-kernel.scaled_ei_neg(1.0 / (a * mean))?)
}

/// `E[ln((1 + H_Eς_E²X)/(1 + H_Bς_B²X))]` for `X ~ Exp(mean)`.
pub fn expect_log_ratio_exponential(ch: &WiretapChannel, mean: f64) -> Result<f64> {
    expect_log_ratio_exponential_with(&StandardEi, ch, mean)
}

pub fn expect_log_ratio_exponential_with(kernel: &dyn EiKernel, ch: &WiretapChannel, mean: f64) -> Result<f64> {
    ch.require_eve("expect_log_ratio_exponential")?;
    let a_b = ch.h_b() * ch.noise_b().varsigma2;
    let a_e = ch.h_e() * ch.noise_e().varsigma2;
    Ok(kernel.scaled_ei_neg(1.0 / (a_b * mean))? - kernel.scaled_ei_neg(1.0 / (a_e * mean))?)
}

/// `var(Y) = H²var(X) + H·E(X)·ς²σ² + σ²` for a receiver with gain `h`.
pub fn output_variance(h: f64, noise: &NoiseParams, mean_x: f64, var_x: f64) -> f64 {
    h * h * var_x + h * mean_x * noise.product() + noise.sigma2
}

/// Eve's output variance under the exponential input.
pub fn eve_variance_exponential(ch: &WiretapChannel, mean: f64) -> f64 {
    output_variance(ch.h_e(), &ch.noise_e(), mean, mean * mean)
}

/// Raw lower bound for the signal-dependent channel. Requires `H_E > 0`.
pub fn lower_bound_avg(ch: &WiretapChannel, con: &AvgConstraint) -> Result<f64> {
    ch.require_eve("lower_bound_avg")?;
    let m = con.mean();
    let (nb, ne) = (ch.noise_b(), ch.noise_e());
    let var_e = eve_variance_exponential(ch, m);
    // H(X) = 1 + ln m for the exponential input
    let head = 0.5 * (1.0 + 2.0 * m.ln() + ne.sigma2.ln() - (2.0 * PI).ln() - nb.sigma2.ln() - var_e.ln());
    let fl = f_low(ch.h_b(), m, &nb)?;
    let ei = 0.5 * expect_log_ratio_exponential(ch, m)?;
    Ok(head + fl + ei)
}

/// Raw upper bound and the branch that produced it. Requires `H_E > 0`.
pub fn upper_bound_avg(ch: &WiretapChannel, con: &AvgConstraint) -> Result<(f64, UpperBranch)> {
    ch.require_eve("upper_bound_avg")?;
    let (h_b, h_e, mm) = (ch.h_b(), ch.h_e(), ch.m());
    let s_b = ch.noise_b().product();
    let s_e = ch.noise_e().product();
    let xp = con.mean();

    let rhs = h_e / h_b * ((h_b * s_b / (2.0 * PI * mm)).sqrt() + 0.5 * h_b * (xp / mm).sqrt());
    if 1.0 / (2.0 * PI).sqrt() >= rhs {
        let t1 = (4.0 * E * h_e * s_e / (PI * PI * mm)).sqrt();
        let t2 = (2.0 * E * xp * h_b * h_e * s_e / (mm * PI * s_b)).sqrt();
        Ok(((t1 + t2).ln(), UpperBranch::CondHolds))
    } else {
        Ok((0.5 * (4.0 * E * h_b * s_e / (PI * PI * h_e * s_b)).ln(), UpperBranch::CondFails))
    }
}

/// Lower bound with the signal-dependent noise switched off. Accepts `H_E = 0`.
pub fn lower_bound_avg_si(ch: &WiretapChannel, con: &AvgConstraint) -> Result<f64> {
    let m = con.mean();
    let (sb, se) = (ch.noise_b().sigma2, ch.noise_e().sigma2);
    let (h_b, h_e) = (ch.h_b(), ch.h_e());
    let den = h_e * h_e * m * m + se;
    Ok(0.5 * (1.0 + 2.0 * (h_b * m).ln() + se.ln() - (2.0 * PI).ln() - sb.ln() - den.ln()))
}

/// Upper bound with the signal-dependent noise switched off. Accepts `H_E = 0`,
/// for which the case-split condition always holds.
pub fn upper_bound_avg_si(ch: &WiretapChannel, con: &AvgConstraint) -> Result<(f64, UpperBranch)> {
    let m = con.mean();
    let (sb, se) = (ch.noise_b().sigma2, ch.noise_e().sigma2);
    let (h_b, h_e) = (ch.h_b(), ch.h_e());
    let (std_b, std_e) = (sb.sqrt(), se.sqrt());
    let inner = std_b / (2.0 * PI).sqrt() + 0.5 * h_b * m;
    let rhs = h_e / (h_e * h_e * sb + h_b * h_b * se).sqrt() * inner;
    if 1.0 / (2.0 * PI).sqrt() >= rhs {
        let den = (2.0 * PI * E * sb * (1.0 + h_e * h_e * sb / (h_b * h_b * se))).sqrt();
        Ok(((4.0 * E * inner / den).ln(), UpperBranch::CondHolds))
    } else {
        Ok(((2.0 * E.sqrt() * h_b * std_e / (PI * h_e * std_b)).ln(), UpperBranch::CondFails))
    }
}

pub fn bounds_avg(ch: &WiretapChannel, con: &AvgConstraint) -> Result<SecrecyBounds> {
    let lo = lower_bound_avg(ch, con)?;
    let (up, br) = upper_bound_avg(ch, con)?;
    Ok(SecrecyBounds::new(lo, up, Some(br), ch.main_not_better(true)))
}

pub fn bounds_avg_si(ch: &WiretapChannel, con: &AvgConstraint) -> Result<SecrecyBounds> {
    let lo = lower_bound_avg_si(ch, con)?;
    let (up, br) = upper_bound_avg_si(ch, con)?;
    Ok(SecrecyBounds::new(lo, up, Some(br), ch.main_not_better(false)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticAvg {
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
}

/// Limits of the two bounds as `P → ∞`.
pub fn asymptotic_bounds_avg(ch: &WiretapChannel) -> Result<AsymptoticAvg> {
    ch.require_eve("asymptotic_bounds_avg")?;
    let ratio = ch.h_b() * ch.noise_e().product() / (ch.h_e() * ch.noise_b().product());
    let lower = 0.5 * (E * ratio / (2.0 * PI)).ln();
    let upper = 0.5 * (4.0 * E * ratio / (PI * PI)).ln();
    Ok(AsymptoticAvg { lower, upper, gap: 0.5 * (8.0 / PI).ln() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noise() -> NoiseParams {
        NoiseParams::new(1.0, 1.5).unwrap()
    }

    fn table_channel(ratio: f64) -> WiretapChannel {
        WiretapChannel::symmetric_noise(1.0, 1.0 / ratio, noise()).unwrap()
    }

    fn db(x: f64) -> f64 {
        10f64.powf(x / 10.0)
    }

    #[test]
    fn ln_2pi_e_constant() {
        assert!((LN_2PI_E - (2.0 * PI * E).ln()).abs() < 1e-15);
    }

    #[test]
    fn f_low_direct_substitution() {
        let nz = NoiseParams::new(1.0, 1.0).unwrap();
        let v = f_low(1.0, 1.0, &nz).unwrap();
        assert!((v - (0.5 * 3f64.ln() - 2.0 + 3f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn f_low_large_intensity_limit_and_monotone() {
        let nz = noise();
        for &h in &[0.3, 1.0, 7.0] {
            let v = f_low(h, 1e14, &nz).unwrap();
            assert!((v - f64::ln(h)).abs() < 1e-10);
        }
        let mut prev = f64::INFINITY;
        for k in 0..200 {
            let xp = 10f64.powf(-3.0 + 0.06 * k as f64);
            let v = f_low(2.0, xp, &nz).unwrap();
            assert!(v <= prev, "xp={xp}");
            prev = v;
        }
    }

    #[test]
    fn f_low_rejects_nonpositive() {
        assert!(f_low(0.0, 1.0, &noise()).is_err());
        assert!(f_low(1.0, -1.0, &noise()).is_err());
    }

    #[test]
    fn table_one_gap() {
        for &ratio in &[10.0, 100.0, 1000.0] {
            let ch = table_channel(ratio);
            for &p in &[85.0, 90.0, 95.0, 100.0] {
                let con = AvgConstraint::new(0.3, db(p)).unwrap();
                let b = bounds_avg(&ch, &con).unwrap();
                assert!((b.gap() - 0.4674).abs() < 5e-4, "ratio={ratio} p={p} gap={}", b.gap());
                assert_eq!(b.branch, Some(UpperBranch::CondFails));
            }
        }
    }

    #[test]
    fn asymptotic_gap_and_convergence() {
        let ch = table_channel(100.0);
        let asy = asymptotic_bounds_avg(&ch).unwrap();
        assert!((asy.gap - 0.5 * (8.0 / PI).ln()).abs() < 1e-15);
        assert!((asy.gap - 0.46735).abs() < 1e-5);
        let con = AvgConstraint::new(0.3, db(100.0)).unwrap();
        assert!((lower_bound_avg(&ch, &con).unwrap() - asy.lower).abs() < 1e-3);
        assert!((upper_bound_avg(&ch, &con).unwrap().0 - asy.upper).abs() < 1e-3);
        let sym = asymptotic_bounds_avg(&table_channel(1.0)).unwrap();
        assert!((sym.lower - 0.5 * (E / (2.0 * PI)).ln()).abs() < 1e-15);
    }

    #[test]
    fn identical_channels_have_zero_clamped_secrecy() {
        let ch = table_channel(1.0);
        for k in 0..25 {
            let con = AvgConstraint::new(0.3, db(-20.0 + 5.0 * k as f64)).unwrap();
            let b = bounds_avg(&ch, &con).unwrap();
            assert!(b.lower_raw <= 0.0);
            assert_eq!((b.lower, b.upper), (0.0, 0.0));
        }
    }

    #[test]
    fn branch_switches_once_along_p() {
        let ch = table_channel(10.0);
        let mut flips = 0;
        let mut prev = None;
        for k in 0..241 {
            let con = AvgConstraint::new(0.3, db(-20.0 + 0.5 * k as f64)).unwrap();
            let (_, br) = upper_bound_avg(&ch, &con).unwrap();
            if prev.is_some_and(|p| p != br) {
                flips += 1;
            }
            prev = Some(br);
        }
        assert_eq!(flips, 1);
    }

    #[test]
    fn signal_independent_forms_with_blind_eve() {
        let ch = WiretapChannel::symmetric_noise(1.0, 0.0, noise()).unwrap();
        let con = AvgConstraint::new(0.5, 10.0).unwrap();
        let lo = lower_bound_avg_si(&ch, &con).unwrap();
        assert!((lo - 0.5 * (E * 25.0 / (2.0 * PI)).ln()).abs() < 1e-14);
        let (_, br) = upper_bound_avg_si(&ch, &con).unwrap();
        assert_eq!(br, UpperBranch::CondHolds);
        assert_eq!(lower_bound_avg(&ch, &con).unwrap_err().code(), "domain");
    }

    #[test]
    fn si_second_branch_value() {
        let ch = table_channel(10.0);
        let con = AvgConstraint::new(0.3, db(60.0)).unwrap();
        let (v, br) = upper_bound_avg_si(&ch, &con).unwrap();
        assert_eq!(br, UpperBranch::CondFails);
        assert!((v - (2.0 * E.sqrt() * 10.0 / PI).ln()).abs() < 1e-13);
    }

    #[test]
    fn lower_limit_matches_signal_independent_form() {
        let tiny = NoiseParams::new(1.0, 1e-8).unwrap();
        for &h_e in &[1.0, 0.1, 0.01] {
            let ch = WiretapChannel::symmetric_noise(1.0, h_e, tiny).unwrap();
            for &p in &[0.5, 3.0, 40.0] {
                let con = AvgConstraint::new(0.3, p).unwrap();
                let a = lower_bound_avg(&ch, &con).unwrap();
                let b = lower_bound_avg_si(&ch, &con).unwrap();
                assert!(((a - b) / b).abs() < 1e-3, "h_e={h_e} p={p}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn monotone_in_gain_ratio() {
        for &p in &[-10.0, 20.0, 60.0] {
            let con = AvgConstraint::new(0.3, db(p)).unwrap();
            let mut prev: Option<SecrecyBounds> = None;
            for k in 0..40 {
                let b = bounds_avg(&table_channel(1.5 * 1.25f64.powi(k)), &con).unwrap();
                if let Some(q) = prev {
                    assert!(b.lower_raw >= q.lower_raw - 1e-12);
                    assert!(b.upper_raw >= q.upper_raw - 1e-12);
                }
                prev = Some(b);
            }
        }
    }

    #[test]
    fn constraint_validation() {
        assert!(AvgConstraint::new(0.0, 1.0).is_err());
        assert!(AvgConstraint::new(1.2, 1.0).is_err());
        assert!(AvgConstraint::new(0.5, 0.0).is_err());
    }
}
