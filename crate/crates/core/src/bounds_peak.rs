//! Secrecy-capacity bounds when a peak-intensity constraint is added, and
//! the maxentropic (truncated-exponential) input family they are built on.
//!
//! The shape parameter is handled in the dimensionless form `u = cA`, which
//! keeps the solver and the PDF independent of the intensity scale.

use std::f64::consts::{E, PI};

use crate::bounds_avg::{f_low, output_variance, SecrecyBounds, LN_2PI_E};
use crate::channel::WiretapChannel;
use crate::error::{Error, Result};
use crate::specfun::{EiKernel, StandardEi};

/// Distance from 1/2 below which α is treated as exactly 1/2.
pub const SEAM_TOL: f64 = 1e-9;

const SMALL_U: f64 = 1e-2;
const SMALL_U_VAR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakConstraint {
    pub xi: f64,
    pub p: f64,
    /// Peak intensity in W.
    pub a: f64,
}

impl PeakConstraint {
    pub fn new(xi: f64, p: f64, a: f64) -> Result<Self> {
        if !(xi > 0.0 && xi <= 1.0) {
            return Err(Error::InvalidParameter { field: "xi", value: xi, reason: "must lie in (0, 1]" });
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidParameter { field: "p", value: p, reason: "must be finite and > 0" });
        }
        if !(a.is_finite() && a >= p) {
            return Err(Error::InvalidParameter { field: "a", value: a, reason: "must be finite and >= P" });
        }
        Ok(Self { xi, p, a })
    }

    /// Build from the peak and the average-to-peak ratio, with ξ given.
    pub fn from_alpha(xi: f64, alpha: f64, a: f64) -> Result<Self> {
        Self::new(xi, alpha * a / xi, a)
    }

    pub fn mean(&self) -> f64 {
        self.xi * self.p
    }

    pub fn alpha(&self) -> f64 {
        self.mean() / self.a
    }
}

/// `F(u) = 1/(1 − e^{−u}) − 1/u`, the normalized mean of the truncated
/// exponential with shape `u = cA`.
pub fn shape_mean(u: f64) -> f64 {
    if u.abs() < SMALL_U {
        let u2 = u * u;
        0.5 + u * (1.0 / 12.0 - u2 * (1.0 / 720.0 - u2 * (1.0 / 30240.0 - u2 / 1_209_600.0)))
    } else {
        1.0 / -(-u).exp_m1() - 1.0 / u
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha == 1.0 {
        return Err(Error::Unbounded("alpha = 1 degenerates to a point mass at the peak"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("solve_c", format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Dimensionless shape `u = cA` with `F(u) = α`.
pub fn solve_shape(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if (alpha - 0.5).abs() < SEAM_TOL {
        return Ok(0.0);
    }
    let sign = if alpha > 0.5 { 1.0 } else { -1.0 };
    // F is increasing; bracket in |u| then bisect to the last representable step
    let above = |u: f64| shape_mean(u) >= alpha;
    let (mut lo, mut hi) = (0.0_f64, sign);
    let mut guard = 0;
    while above(hi) != (sign > 0.0) {
        lo = hi;
        hi *= 2.0;
        guard += 1;
        if guard > 1100 {
            return Err(Error::NonConvergence { routine: "solve_c bracket", estimate: hi, error: f64::NAN, iterations: guard });
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if above(mid) == (sign > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (rl, rh) = ((shape_mean(lo) - alpha).abs(), (shape_mean(hi) - alpha).abs());
    Ok(if rl <= rh { lo } else { hi })
}

/// Shape parameter `c` (in 1/W) of the maxentropic input with mean `αA`.
/// Exactly 0 on the uniform seam; `sign(c) = sign(α − 1/2)`.
pub fn solve_c(alpha: f64, a: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::domain("solve_c", format!("peak must be positive, got {a}")));
    }
    Ok(solve_shape(alpha)? / a)
}

/// Maxentropic input on `[0, A]` under a mean constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxentPdf {
    pub a: f64,
    pub c: f64,
    pub alpha: f64,
}

impl MaxentPdf {
    pub fn new(alpha: f64, a: f64) -> Result<Self> {
        let c = solve_c(alpha, a)?;
        Ok(Self { a, c, alpha })
    }

    /// Direct construction from a shape parameter; `alpha` is derived.
    pub fn from_shape(c: f64, a: f64) -> Self {
        Self { a, c, alpha: shape_mean(c * a) }
    }

    pub fn u(&self) -> f64 {
        self.c * self.a
    }

    pub fn is_uniform(&self) -> bool {
        self.c == 0.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(0.0..=self.a).contains(&x) {
            return 0.0;
        }
        let c = self.c;
        if c == 0.0 {
            1.0 / self.a
        } else if c > 0.0 {
            c * (c * (x - self.a)).exp() / -(-c * self.a).exp_m1()
        } else {
            -c * (c * x).exp() / -(c * self.a).exp_m1()
        }
    }

    /// Distribution function, used for inverse-transform sampling.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.a {
            return 1.0;
        }
        let c = self.c;
        if c == 0.0 {
            x / self.a
        } else if c > 0.0 {
            // (e^{cx} − 1)/(e^{cA} − 1) rescaled by e^{−cA}
            ((c * (x - self.a)).exp() - (-c * self.a).exp()) / -(-c * self.a).exp_m1()
        } else {
            (c * x).exp_m1() / (c * self.a).exp_m1()
        }
    }

    pub fn quantile(&self, q: f64) -> f64 {
        let c = self.c;
        let x = if c == 0.0 {
            q * self.a
        } else if c > 0.0 {
            // x = A + ln(q + (1 − q)e^{−cA})/c
            self.a + (q + (1.0 - q) * (-c * self.a).exp()).ln() / c
        } else {
            (q * (c * self.a).exp_m1()).ln_1p() / c
        };
        x.clamp(0.0, self.a)
    }

    pub fn mean(&self) -> f64 {
        self.a * shape_mean(self.u())
    }

    /// Differential entropy in nats, evaluated in log space.
    pub fn entropy(&self) -> f64 {
        let (c, u) = (self.c, self.u());
        if c == 0.0 {
            self.a.ln()
        } else if c > 0.0 {
            u + (-(-u).exp_m1()).ln() - c.ln() - c * self.mean()
        } else {
            (-u.exp_m1()).ln() - (-c).ln() - c * self.mean()
        }
    }

    /// `var(X) = A²(1/u² − e^u/(e^u − 1)²)`.
    pub fn variance(&self) -> f64 {
        let u = self.u();
        let a2 = self.a * self.a;
        if u.abs() < SMALL_U_VAR {
            let u2 = u * u;
            a2 * (1.0 / 12.0 - u2 * (1.0 / 240.0 - u2 * (1.0 / 6048.0 - u2 * (1.0 / 172_800.0 - u2 / 5_322_240.0))))
        } else if u > 0.0 {
            let em = (-u).exp();
            let d = -(-u).exp_m1();
            a2 * (1.0 / (u * u) - em / (d * d))
        } else {
            let d = u.exp_m1();
            a2 * (1.0 / (u * u) - u.exp() / (d * d))
        }
    }

    /// The variance as printed in the closed form,
    /// `A(cA−2)/(c(1−e^{−cA})) + 2/c² − (αA)²`; loses digits for small `|cA|`.
    pub fn variance_textbook(&self) -> f64 {
        let (c, a) = (self.c, self.a);
        if c == 0.0 {
            return a * a / 12.0;
        }
        let m = self.mean();
        a * (c * a - 2.0) / (c * -(-c * a).exp_m1()) + 2.0 / (c * c) - m * m
    }
}

/// `E[ln(1 + kX)]` under the maxentropic PDF, with `k > 0`.
///
/// For `c ≠ 0`, integrating by parts gives
/// `[ln(1+kA)e^{cA} − e^{−c/k}(Ei(c/k + cA) − Ei(c/k))]/(e^{cA} − 1)`;
/// for `c > 0` numerator and denominator are divided by `e^{cA}` first.
pub fn expect_log1p_maxent(kernel: &dyn EiKernel, k: f64, pdf: &MaxentPdf) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::domain("expect_log1p_maxent", format!("coefficient must be positive, got {k}")));
    }
    let (c, a) = (pdf.c, pdf.a);
    let ka = k * a;
    let l = ka.ln_1p();
    if c == 0.0 {
        // ((1+kA)ln(1+kA) − kA)/(kA), written to stay accurate for small kA
        return Ok(if ka < 1e-4 {
            ka / 2.0 - ka * ka / 6.0 + ka * ka * ka / 12.0
        } else {
            l - 1.0 + l / ka
        });
    }
    let lo = c / k;
    let hi = lo + c * a;
    let u = c * a;
    if c > 0.0 {
        let tail = kernel.ei_diff_shifted(lo, hi, hi)?;
        Ok((l - tail) / -(-u).exp_m1())
    } else {
        let body = kernel.ei_diff_shifted(lo, hi, lo)?;
        Ok((body - l * u.exp()) / -u.exp_m1())
    }
}

/// `E[ln((1 + H_Eς_E²X)/(1 + H_Bς_B²X))]` under the maxentropic PDF.
pub fn expect_log_ratio_maxent(ch: &WiretapChannel, pdf: &MaxentPdf) -> Result<f64> {
    expect_log_ratio_maxent_with(&StandardEi, ch, pdf)
}

pub fn expect_log_ratio_maxent_with(kernel: &dyn EiKernel, ch: &WiretapChannel, pdf: &MaxentPdf) -> Result<f64> {
    ch.require_eve("expect_log_ratio_maxent")?;
    let k_b = ch.h_b() * ch.noise_b().varsigma2;
    let k_e = ch.h_e() * ch.noise_e().varsigma2;
    if pdf.is_uniform() {
        // direct form; the −1 terms of the two expectations cancel exactly
        let a = pdf.a;
        let (lb, le) = ((k_b * a).ln_1p(), (k_e * a).ln_1p());
        return Ok(le - lb - lb / (a * k_b) + le / (a * k_e));
    }
    Ok(expect_log1p_maxent(kernel, k_e, pdf)? - expect_log1p_maxent(kernel, k_b, pdf)?)
}

/// Eve's output variance under the maxentropic PDF.
pub fn eve_variance_maxent(ch: &WiretapChannel, pdf: &MaxentPdf) -> f64 {
    output_variance(ch.h_e(), &ch.noise_e(), pdf.mean(), pdf.variance())
}

fn maxent_for(con: &PeakConstraint) -> Result<MaxentPdf> {
    let alpha = con.alpha();
    if (alpha - 0.5).abs() < SEAM_TOL {
        Ok(MaxentPdf { a: con.a, c: 0.0, alpha })
    } else {
        MaxentPdf::new(alpha, con.a)
    }
}

/// Raw lower bound: the uniform form on the seam, the truncated-exponential
/// form elsewhere. Requires `H_E > 0`.
pub fn lower_bound_peak(ch: &WiretapChannel, con: &PeakConstraint) -> Result<f64> {
    ch.require_eve("lower_bound_peak")?;
    let pdf = maxent_for(con)?;
    let (nb, ne) = (ch.noise_b(), ch.noise_e());
    let fl = f_low(ch.h_b(), con.mean(), &nb)?;
    let var_e = if pdf.is_uniform() {
        let (a, h) = (con.a, ch.h_e());
        (h * h * a * a + 6.0 * a * h * ne.product() + 12.0 * ne.sigma2) / 12.0
    } else {
        output_variance(ch.h_e(), &ne, con.mean(), pdf.variance())
    };
    let ratio = expect_log_ratio_maxent(ch, &pdf)?;
    Ok(pdf.entropy() + fl + 0.5 * (ne.sigma2.ln() - nb.sigma2.ln()) + 0.5 * ratio - 0.5 * (LN_2PI_E + var_e.ln()))
}

/// Raw upper bound. Requires `H_E > 0`.
pub fn upper_bound_peak(ch: &WiretapChannel, con: &PeakConstraint) -> Result<f64> {
    ch.require_eve("upper_bound_peak")?;
    let (h_b, h_e) = (ch.h_b(), ch.h_e());
    let (s_b, s_e) = (ch.noise_b().product(), ch.noise_e().product());
    let a = con.a;
    let num = h_e * s_e * (h_b * a + s_b);
    let den = s_b * (h_e * h_e * a + h_e * h_e * s_b / h_b + ch.m());
    Ok(0.5 * (num.ln() - den.ln()))
}

/// Lower bound without signal-dependent noise. Accepts `H_E = 0`.
pub fn lower_bound_peak_si(ch: &WiretapChannel, con: &PeakConstraint) -> Result<f64> {
    let pdf = maxent_for(con)?;
    let (sb, se) = (ch.noise_b().sigma2, ch.noise_e().sigma2);
    let (h_b, h_e) = (ch.h_b(), ch.h_e());
    if pdf.is_uniform() {
        let (a, m) = (con.a, con.mean());
        let den = 2.0 * PI * E * sb * (m * m * h_e * h_e + 3.0 * se);
        return Ok(0.5 * (3.0 * h_b * h_b * se * a * a / den).ln());
    }
    // e^{−2cξP}((e^{cA}−1)/c)² is e^{2H(X)}
    let den_ln = LN_2PI_E + sb.ln() + (h_e * h_e * pdf.variance() + se).ln();
    Ok(0.5 * (se.ln() + 2.0 * h_b.ln() + 2.0 * pdf.entropy() - den_ln))
}

/// Upper bound without signal-dependent noise. Accepts `H_E = 0`.
pub fn upper_bound_peak_si(ch: &WiretapChannel, con: &PeakConstraint) -> Result<f64> {
    let (sb, se) = (ch.noise_b().sigma2, ch.noise_e().sigma2);
    let (h_b, h_e) = (ch.h_b(), ch.h_e());
    let am = con.a * con.mean();
    let num = (h_b * h_b * am + sb) * se;
    let den = (h_e * h_e * am + 2.0 * h_e * h_e / (h_b * h_b) * sb + se) * sb;
    Ok(0.5 * (num.ln() - den.ln()))
}

pub fn bounds_peak(ch: &WiretapChannel, con: &PeakConstraint) -> Result<SecrecyBounds> {
    let lo = lower_bound_peak(ch, con)?;
    let up = upper_bound_peak(ch, con)?;
    Ok(SecrecyBounds::new(lo, up, None, ch.main_not_better(true)))
}

pub fn bounds_peak_si(ch: &WiretapChannel, con: &PeakConstraint) -> Result<SecrecyBounds> {
    let lo = lower_bound_peak_si(ch, con)?;
    let up = upper_bound_peak_si(ch, con)?;
    Ok(SecrecyBounds::new(lo, up, None, ch.main_not_better(false)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticPeak {
    /// Only available on the uniform seam.
    pub lower: Option<f64>,
    pub upper: f64,
    pub gap: Option<f64>,
}

/// Limits as `A → ∞` at fixed α.
pub fn asymptotic_bounds_peak(ch: &WiretapChannel, alpha: f64) -> Result<AsymptoticPeak> {
    ch.require_eve("asymptotic_bounds_peak")?;
    check_alpha(alpha)?;
    let ratio = ch.h_b() * ch.noise_e().product() / (ch.h_e() * ch.noise_b().product());
    let upper = 0.5 * ratio.ln();
    if (alpha - 0.5).abs() < SEAM_TOL {
        let lower = 0.5 * (6.0 * ratio / (PI * E)).ln();
        Ok(AsymptoticPeak { lower: Some(lower), upper, gap: Some(0.5 * (PI * E / 6.0).ln()) })
    } else {
        Ok(AsymptoticPeak { lower: None, upper, gap: None })
    }
}
