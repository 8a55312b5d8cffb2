//! Exponential integral `Ei(x) = PV ∫_{-∞}^x e^t/t dt` and overflow-safe
//! scaled forms.
//!
//! Evaluation regimes:
//!
//! * `x < 0`: power series for `|x| ≤ 2`, continued fraction for `E1(|x|)`
//!   beyond (`Ei(-x) = -E1(x)`).
//! * `x > 0`: power series up to `x = 40` (all terms positive, no
//!   cancellation), asymptotic expansion of `e^{-x} Ei(x)` beyond.
//!
//! Every public function also has a slow quadrature path, selected with
//! [`EvalPath::Quadrature`], which the test oracles use as an independent
//! reference.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_semi_infinite, integrate_with_breaks, log_breaks, Tolerance};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

/// Largest `x` with `e^x` finite.
pub const EXP_ARG_MAX: f64 = 709.782_712_893_384;

const NEG_SERIES_MAX: f64 = 2.0;
const POS_SERIES_MAX: f64 = 40.0;

/// Selects the evaluation strategy of the special-function kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalPath {
    /// Series / continued fraction / asymptotic regimes.
    #[default]
    Fast,
    /// Direct adaptive quadrature of the defining integrals.
    Quadrature,
}

fn check_arg(func: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::domain(func, format!("argument {x} is not finite")));
    }
    if x == 0.0 {
        return Err(Error::domain(func, "Ei has a logarithmic singularity at 0"));
    }
    Ok(())
}

/// `Σ_{k≥1} x^k / (k·k!)`.
pub(crate) fn ein_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..4000 {
        let kf = k as f64;
        term *= x / kf;
        let add = term / kf;
        sum += add;
        if add.abs() <= f64::EPSILON * 0.5 * sum.abs() {
            break;
        }
    }
    sum
}

pub(crate) fn ei_series(x: f64) -> f64 {
    EULER_GAMMA + x.abs().ln() + ein_series(x)
}

/// `e^x E1(x)` for `x > 0` by the modified Lentz continued fraction.
pub(crate) fn e1_scaled_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..100_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() <= f64::EPSILON {
            break;
        }
    }
    h
}

/// `e^{-x} Ei(x)` for large positive `x` by the asymptotic series,
/// truncated at its smallest term.
pub(crate) fn ei_scaled_asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..1000 {
        let next = term * (k as f64) / x;
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= f64::EPSILON * 0.25 * sum {
            break;
        }
    }
    sum / x
}

/// Cauchy principal value exponential integral.
///
/// Fails with a domain error at `x = 0` and with an overflow error for
/// `x > 709.78`; use [`ei_scaled`] there.
pub fn ei(x: f64) -> Result<f64> {
    ei_with(x, EvalPath::Fast)
}

pub fn ei_with(x: f64, path: EvalPath) -> Result<f64> {
    check_arg("ei", x)?;
    if x > EXP_ARG_MAX {
        return Err(Error::Overflow { func: "ei", arg: x });
    }
    let v = match path {
        EvalPath::Fast => {
            if x < 0.0 && -x <= NEG_SERIES_MAX || x > 0.0 && x <= POS_SERIES_MAX {
                ei_series(x)
            } else if x < 0.0 {
                -e1_scaled_cf(-x) * x.exp()
            } else {
                ei_scaled_asymptotic(x) * x.exp()
            }
        }
        EvalPath::Quadrature => quad::ei(x)?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { func: "ei", arg: x })
    }
}

/// `e^{-x} Ei(x)` for any non-zero `x`; never overflows.
pub fn ei_scaled(x: f64) -> Result<f64> {
    ei_scaled_with(x, EvalPath::Fast)
}

pub fn ei_scaled_with(x: f64, path: EvalPath) -> Result<f64> {
    check_arg("ei_scaled", x)?;
    match path {
        EvalPath::Fast => Ok(if x < 0.0 {
            if -x <= NEG_SERIES_MAX {
                (-x).exp() * ei_series(x)
            } else {
                -e1_scaled_cf(-x)
            }
        } else if x <= POS_SERIES_MAX {
            (-x).exp() * ei_series(x)
        } else {
            ei_scaled_asymptotic(x)
        }),
        EvalPath::Quadrature => {
            if x < 0.0 {
                quad::scaled_ei_neg(-x)
            } else {
                quad::ei_scaled_pos(x)
            }
        }
    }
}

/// `e^x Ei(-x)` for `x > 0`, computed without forming `e^x`.
///
/// Always negative; tends to `γ + ln x` as `x → 0⁺` and to `-1/x` as
/// `x → ∞`.
pub fn scaled_ei_neg(x: f64) -> Result<f64> {
    scaled_ei_neg_with(x, EvalPath::Fast)
}

pub fn scaled_ei_neg_with(x: f64, path: EvalPath) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain("scaled_ei_neg", format!("argument must be positive and finite, got {x}")));
    }
    ei_scaled_with(-x, path)
}

fn check_pair(func: &'static str, a: f64, b: f64) -> Result<()> {
    check_arg(func, a)?;
    check_arg(func, b)?;
    if (a > 0.0) != (b > 0.0) {
        return Err(Error::domain(func, format!("arguments {a} and {b} have mixed signs")));
    }
    Ok(())
}

/// `e^{-a} (Ei(b) − Ei(a))` for same-signed non-zero `a`, `b`.
pub fn ei_diff_scaled(a: f64, b: f64) -> Result<f64> {
    ei_diff_shifted(a, b, a)
}

pub fn ei_diff_scaled_with(a: f64, b: f64, path: EvalPath) -> Result<f64> {
    ei_diff_shifted_with(a, b, a, path)
}

/// `e^{-shift} (Ei(b) − Ei(a))` for same-signed non-zero `a`, `b`.
///
/// The general form lets callers divide out a large exponential such as
/// `e^{cA}` before it is ever formed.
pub fn ei_diff_shifted(a: f64, b: f64, shift: f64) -> Result<f64> {
    ei_diff_shifted_with(a, b, shift, EvalPath::Fast)
}

pub fn ei_diff_shifted_with(a: f64, b: f64, shift: f64, path: EvalPath) -> Result<f64> {
    check_pair("ei_diff", a, b)?;
    if !shift.is_finite() {
        return Err(Error::domain("ei_diff", "shift must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }
    let v = match path {
        EvalPath::Quadrature => quad::ei_diff(a, b, shift)?,
        EvalPath::Fast => {
            let span = (b - a).abs();
            let near = span <= 0.5 * a.abs().min(b.abs());
            let in_series = |x: f64| if x < 0.0 { -x <= NEG_SERIES_MAX } else { x <= POS_SERIES_MAX };

            if near && span <= 1.0 {
                quad::ei_diff(a, b, shift)?
            } else if in_series(a) && in_series(b) {
                // γ cancels; ln(b/a) is exact in ratio form.
                let d = (b / a).ln() + ein_series(b) - ein_series(a);
                d * (-shift).exp()
            } else if span > 1.0 {
                let tb = (b - shift).exp() * ei_scaled(b)?;
                let ta = (a - shift).exp() * ei_scaled(a)?;
                tb - ta
            } else {
                quad::ei_diff(a, b, shift)?
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { func: "ei_diff", arg: b })
    }
}

/// The Ei-dependent primitives used by the closed-form expectations.
///
/// Swapping the kernel lets the verification harness run a negative
/// control against a deliberately wrong implementation.
pub trait EiKernel: Send + Sync {
    fn scaled_ei_neg(&self, x: f64) -> Result<f64>;
    fn ei_diff_shifted(&self, a: f64, b: f64, shift: f64) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StandardEi;

impl EiKernel for StandardEi {
    fn scaled_ei_neg(&self, x: f64) -> Result<f64> {
        scaled_ei_neg(x)
    }
    fn ei_diff_shifted(&self, a: f64, b: f64, shift: f64) -> Result<f64> {
        ei_diff_shifted(a, b, shift)
    }
}

/// Standard kernel with every result multiplied by `1 + rel_error`.
#[derive(Debug, Clone, Copy)]
pub struct PerturbedEi {
    pub rel_error: f64,
}

impl EiKernel for PerturbedEi {
    fn scaled_ei_neg(&self, x: f64) -> Result<f64> {
        Ok(scaled_ei_neg(x)? * (1.0 + self.rel_error))
    }
    fn ei_diff_shifted(&self, a: f64, b: f64, shift: f64) -> Result<f64> {
        Ok(ei_diff_shifted(a, b, shift)? * (1.0 + self.rel_error))
    }
}

/// Quadrature forms of the defining integrals.
mod quad {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::new(1e-14, 0.0).with_max_subdivisions(5000)
    }

    /// `(e^t − 1)/t`, analytic at 0.
    fn expm1_over(t: f64) -> f64 {
        if t == 0.0 {
            1.0
        } else {
            t.exp_m1() / t
        }
    }

    /// `-∫_0^∞ e^{-s}/(x+s) ds = e^x Ei(-x)`.
    pub(super) fn scaled_ei_neg(x: f64) -> Result<f64> {
        let mut near = if x < 1.0 { log_breaks(x, 1.0) } else { vec![] };
        near.insert(0, 0.0);
        let head = if x < 1.0 {
            integrate_with_breaks(|s| (-s).exp() / (x + s), &near, &tol())?.value
        } else {
            0.0
        };
        let start = if x < 1.0 { 1.0 } else { 0.0 };
        let tail = integrate_semi_infinite(|s| (-s).exp() / (x + s), start, 1.0, &[start + 1.0, start + 10.0], &tol())?
            .value;
        Ok(-(head + tail))
    }

    /// `e^{-x} Ei(x)` for `x > 0` from `Ei(x) = γ + ln x + ∫_0^x (e^t−1)/t dt`.
    pub(super) fn ei_scaled_pos(x: f64) -> Result<f64> {
        let scale = (-x).exp();
        let mut pts = vec![0.0];
        if x > 2.0 {
            let mut p = x - 1.0;
            let mut step = 1.0;
            let mut tail = Vec::new();
            while p > 0.0 {
                tail.push(p);
                step *= 2.0;
                p = x - step;
            }
            tail.reverse();
            pts.extend(tail);
        }
        pts.push(x);
        let body = integrate_with_breaks(
            |t| if t < 1.0 { scale * expm1_over(t) } else { ((t - x).exp() - scale) / t },
            &pts,
            &tol(),
        )?
        .value;
        Ok(scale * (EULER_GAMMA + x.ln()) + body)
    }

    pub(super) fn ei(x: f64) -> Result<f64> {
        if x > 0.0 {
            return Ok(ei_scaled_pos(x)? * x.exp());
        }
        let ax = -x;
        if ax <= 1.0 {
            let pts = {
                let mut p = log_breaks(ax, 1.0);
                p.iter_mut().for_each(|v| *v = -*v);
                p.reverse();
                p.push(0.0);
                p.retain(|&v| v >= x);
                p
            };
            let body = integrate_with_breaks(expm1_over, &pts, &tol())?.value;
            Ok(EULER_GAMMA + ax.ln() - body)
        } else {
            Ok(scaled_ei_neg(ax)? * x.exp())
        }
    }

    /// `∫_a^b e^{t−shift}/t dt`.
    pub(super) fn ei_diff(a: f64, b: f64, shift: f64) -> Result<f64> {
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let (alo, ahi) = if lo > 0.0 { (lo, hi) } else { (-hi, -lo) };
        let mut pts = log_breaks(alo, ahi);
        if lo < 0.0 {
            pts.iter_mut().for_each(|v| *v = -*v);
            pts.reverse();
        }
        // resolve the exponential growth with unit-width panels near the top
        let top = pts[pts.len() - 1];
        let mut extra = Vec::new();
        let mut step = 1.0;
        while top - step > pts[0] && step < 1e6 {
            extra.push(top - step);
            step *= 2.0;
        }
        pts.extend(extra);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let est = integrate_with_breaks(|t| (t - shift).exp() / t, &pts, &tol())?;
        Ok(sign * est.value)
    }
}
