//! Independent numerical evaluator of the secrecy rate and of every
//! expectation the closed forms rely on.
//!
//! Nothing here uses the exponential integral: marginal output densities
//! are nested adaptive quadratures, expectations are direct quadratures
//! against the input density, and the Monte Carlo estimator samples the
//! channel model itself.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;

use crate::bounds_avg::{output_variance as closed_output_variance, LN_2PI_E};
use crate::bounds_peak::MaxentPdf;
use crate::channel::{Side, WiretapChannel};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breaks, Tolerance};

/// Exponential inputs are integrated over `[0, EXP_TAIL·mean]`; the
/// discarded mass is `e^{-50} ≈ 2e-22`.
const EXP_TAIL: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputDistribution {
    Exponential { mean: f64 },
    Uniform { a: f64 },
    /// Density `c·e^{cx}/(e^{cA} − 1)` on `[0, A]`.
    TruncExp { c: f64, a: f64 },
    PointMass { x0: f64 },
}

impl InputDistribution {
    pub fn maxent(pdf: &MaxentPdf) -> Self {
        if pdf.is_uniform() {
            InputDistribution::Uniform { a: pdf.a }
        } else {
            InputDistribution::TruncExp { c: pdf.c, a: pdf.a }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field, value| Err(Error::InvalidParameter { field, value, reason: "must be finite and > 0" });
        match *self {
            InputDistribution::Exponential { mean } if !(mean > 0.0 && mean.is_finite()) => bad("mean", mean),
            InputDistribution::Uniform { a } | InputDistribution::TruncExp { a, .. } if !(a > 0.0 && a.is_finite()) => {
                bad("a", a)
            }
            InputDistribution::TruncExp { c, .. } if !c.is_finite() => bad("c", c),
            InputDistribution::PointMass { x0 } if !(x0 >= 0.0 && x0.is_finite()) => {
                Err(Error::InvalidParameter { field: "x0", value: x0, reason: "must be finite and >= 0" })
            }
            _ => Ok(()),
        }
    }

    fn truncexp(c: f64, a: f64) -> MaxentPdf {
        MaxentPdf::from_shape(c, a)
    }

    /// Density; zero outside the support. A point mass has no density and
    /// reports zero everywhere.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            InputDistribution::Exponential { mean } => {
                if x < 0.0 {
                    0.0
                } else {
                    (-x / mean).exp() / mean
                }
            }
            InputDistribution::Uniform { a } => {
                if (0.0..=a).contains(&x) {
                    1.0 / a
                } else {
                    0.0
                }
            }
            InputDistribution::TruncExp { c, a } => Self::truncexp(c, a).eval(x),
            InputDistribution::PointMass { .. } => 0.0,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            InputDistribution::Exponential { mean } => mean,
            InputDistribution::Uniform { a } => a / 2.0,
            InputDistribution::TruncExp { c, a } => Self::truncexp(c, a).mean(),
            InputDistribution::PointMass { x0 } => x0,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            InputDistribution::Exponential { mean } => mean * mean,
            InputDistribution::Uniform { a } => a * a / 12.0,
            InputDistribution::TruncExp { c, a } => Self::truncexp(c, a).variance(),
            InputDistribution::PointMass { .. } => 0.0,
        }
    }

    /// Differential entropy; `None` for the point mass.
    pub fn entropy(&self) -> Option<f64> {
        match *self {
            InputDistribution::Exponential { mean } => Some(1.0 + mean.ln()),
            InputDistribution::Uniform { a } => Some(a.ln()),
            InputDistribution::TruncExp { c, a } => Some(Self::truncexp(c, a).entropy()),
            InputDistribution::PointMass { .. } => None,
        }
    }

    /// Integration range; the exponential's is truncated at `EXP_TAIL` means.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            InputDistribution::Exponential { mean } => (0.0, EXP_TAIL * mean),
            InputDistribution::Uniform { a } | InputDistribution::TruncExp { a, .. } => (0.0, a),
            InputDistribution::PointMass { x0 } => (x0, x0),
        }
    }

    pub fn quantile(&self, q: f64) -> f64 {
        match *self {
            InputDistribution::Exponential { mean } => -mean * (-q).ln_1p(),
            InputDistribution::Uniform { a } => q * a,
            InputDistribution::TruncExp { c, a } => Self::truncexp(c, a).quantile(q),
            InputDistribution::PointMass { x0 } => x0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            InputDistribution::Exponential { mean } => Exp::new(1.0 / mean).expect("validated mean").sample(rng),
            InputDistribution::Uniform { a } => rng.random::<f64>() * a,
            InputDistribution::TruncExp { c, a } => Self::truncexp(c, a).quantile(rng.random::<f64>()),
            InputDistribution::PointMass { x0 } => x0,
        }
    }

    /// Break points for integrating against this density: support ends,
    /// a spread of quantiles, and decades of each supplied length scale.
    fn breaks(&self, scales: &[f64]) -> Vec<f64> {
        let (lo, hi) = self.support();
        let mut pts = vec![lo, hi];
        for q in [1e-6, 1e-3, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999, 1.0 - 1e-6] {
            pts.push(self.quantile(q));
        }
        for &s in scales {
            let mut x = s;
            while x < hi && x > 0.0 {
                if x > lo {
                    pts.push(x);
                }
                x *= 10.0;
            }
        }
        tidy(pts, lo, hi)
    }

    /// `E[g(X)]` by adaptive quadrature. `scales` hints at lengths over
    /// which `g` varies.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G, scales: &[f64], tol: &Tolerance) -> Result<f64> {
        self.validate()?;
        if let InputDistribution::PointMass { x0 } = *self {
            return Ok(g(x0));
        }
        let pts = self.breaks(scales);
        Ok(integrate_with_breaks(|x| g(x) * self.eval(x), &pts, tol)?.value)
    }
}

fn tidy(mut pts: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    pts.retain(|p| p.is_finite() && *p >= lo && *p <= hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Output-range half-width in conditional standard deviations.
    pub y_truncation_sigmas: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-12, max_subdivisions: 4000, y_truncation_sigmas: 12.0 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter { field: "rel_tol/abs_tol", value: self.rel_tol.min(self.abs_tol), reason: "must be > 0" });
        }
        if !(self.y_truncation_sigmas >= 8.0) {
            return Err(Error::InvalidParameter { field: "y_truncation_sigmas", value: self.y_truncation_sigmas, reason: "must be >= 8" });
        }
        Ok(())
    }

    fn outer(&self) -> Tolerance {
        Tolerance::new(self.rel_tol, self.abs_tol).with_max_subdivisions(self.max_subdivisions)
    }

    fn inner(&self) -> Tolerance {
        Tolerance::new(self.rel_tol / 10.0, 1e-300).with_max_subdivisions(self.max_subdivisions)
    }
}

/// Gaussian density of `y` given input `x` at the chosen receiver.
pub fn conditional_pdf(y: f64, x: f64, side: Side, ch: &WiretapChannel) -> f64 {
    let h = ch.gain(side);
    let nz = ch.noise(side);
    let var = (1.0 + h * nz.varsigma2 * x) * nz.sigma2;
    let d = y - h * x;
    (-0.5 * d * d / var).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// `H(Y|X) = ½ln(2πeσ²) + ½E[ln(1 + Hς²X)]`.
pub fn conditional_entropy(side: Side, dist: &InputDistribution, ch: &WiretapChannel, spec: &QuadratureSpec) -> Result<f64> {
    let h = ch.gain(side);
    let nz = ch.noise(side);
    let k = h * nz.varsigma2;
    let base = 0.5 * (LN_2PI_E + nz.sigma2.ln());
    if k == 0.0 {
        return Ok(base);
    }
    let e = dist.expect(|x| (k * x).ln_1p(), &[1.0 / k], &spec.outer())?;
    Ok(base + 0.5 * e)
}

/// Output density `f_Y(y) = E[conditional_pdf(y, X)]`.
pub fn marginal_density(y: f64, side: Side, dist: &InputDistribution, ch: &WiretapChannel, spec: &QuadratureSpec) -> Result<f64> {
    if let InputDistribution::PointMass { x0 } = *dist {
        return Ok(conditional_pdf(y, x0, side, ch));
    }
    let h = ch.gain(side);
    if h == 0.0 {
        return Ok(conditional_pdf(y, 0.0, side, ch));
    }
    let nz = ch.noise(side);
    let (lo, hi) = dist.support();
    let mut pts = dist.breaks(&[]);
    // the kernel in x is centred near y/H with width √var/H
    let xs = (y / h).clamp(lo, hi);
    let w = ((1.0 + h * nz.varsigma2 * xs) * nz.sigma2).sqrt() / h;
    for k in [0.0, 1.0, 2.0, 4.0, 8.0, 14.0] {
        pts.push(xs - k * w);
        pts.push(xs + k * w);
    }
    let pts = tidy(pts, lo, hi);
    let est = integrate_with_breaks(|x| conditional_pdf(y, x, side, ch) * dist.eval(x), &pts, &spec.inner())?;
    Ok(est.value.max(0.0))
}

fn y_breaks(side: Side, dist: &InputDistribution, ch: &WiretapChannel, spec: &QuadratureSpec) -> Vec<f64> {
    let h = ch.gain(side);
    let nz = ch.noise(side);
    let (xlo, xhi) = dist.support();
    let s0 = nz.sigma2.sqrt();
    let smax = ((1.0 + h * nz.varsigma2 * xhi) * nz.sigma2).sqrt();
    let k = spec.y_truncation_sigmas;
    let (lo, hi) = (h * xlo - k * smax, h * xhi + k * smax);
    let mut pts = vec![lo, hi];
    for j in [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0] {
        pts.push(h * xlo + j * s0);
        pts.push(h * xhi + j * s0);
    }
    for q in [1e-3, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999] {
        pts.push(h * dist.quantile(q));
    }
    tidy(pts, lo, hi)
}

/// `H(Y) = −∫ f_Y ln f_Y dy` over the truncated output range.
pub fn marginal_entropy(side: Side, dist: &InputDistribution, ch: &WiretapChannel, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    dist.validate()?;
    let h = ch.gain(side);
    let nz = ch.noise(side);
    if let InputDistribution::PointMass { x0 } = *dist {
        return Ok(0.5 * (LN_2PI_E + ((1.0 + h * nz.varsigma2 * x0) * nz.sigma2).ln()));
    }
    if h == 0.0 {
        return Ok(0.5 * (LN_2PI_E + nz.sigma2.ln()));
    }
    let pts = y_breaks(side, dist, ch, spec);
    let mut failure = None;
    let est = integrate_with_breaks(
        |y| match marginal_density(y, side, dist, ch, spec) {
            Ok(f) if f > 0.0 => -f * f.ln(),
            Ok(_) => 0.0,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        &pts,
        &spec.outer(),
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(est.value),
    }
}

/// `I(X;Y_B) − I(X;Y_E)` for the given input, in nats.
pub fn secrecy_rate(dist: &InputDistribution, ch: &WiretapChannel, spec: &QuadratureSpec) -> Result<f64> {
    Ok(mutual_information(Side::Bob, dist, ch, spec)? - mutual_information(Side::Eve, dist, ch, spec)?)
}

pub fn mutual_information(side: Side, dist: &InputDistribution, ch: &WiretapChannel, spec: &QuadratureSpec) -> Result<f64> {
    if matches!(dist, InputDistribution::PointMass { .. }) || ch.gain(side) == 0.0 {
        return Ok(0.0);
    }
    Ok(marginal_entropy(side, dist, ch, spec)? - conditional_entropy(side, dist, ch, spec)?)
}

/// `E[ln((1 + H_Eς_E²X)/(1 + H_Bς_B²X))]` by direct quadrature.
pub fn expect_log_ratio(dist: &InputDistribution, ch: &WiretapChannel) -> Result<f64> {
    let k_b = ch.h_b() * ch.noise_b().varsigma2;
    let k_e = ch.h_e() * ch.noise_e().varsigma2;
    let mut scales = vec![1.0 / k_b];
    if k_e > 0.0 {
        scales.push(1.0 / k_e);
    }
    let tol = Tolerance::new(1e-12, 1e-300).with_max_subdivisions(4000);
    dist.expect(|x| (k_e * x).ln_1p() - (k_b * x).ln_1p(), &scales, &tol)
}

/// Output variance from the input's analytic moments.
pub fn output_variance(dist: &InputDistribution, side: Side, ch: &WiretapChannel) -> f64 {
    closed_output_variance(ch.gain(side), &ch.noise(side), dist.mean(), dist.variance())
}

/// A Monte Carlo estimate with its standard error and provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub workers: usize,
}

/// SplitMix64 finalizer; decorrelates per-worker seeds.
fn derive_seed(seed: u64, worker: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(worker + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn chunks(n: usize, workers: usize) -> Vec<(u64, usize)> {
    let workers = workers.max(1);
    (0..workers).map(|w| (w as u64, n / workers + usize::from(w < n % workers))).collect()
}

/// Draws one channel output for input `x`.
pub fn sample_output<R: Rng + ?Sized>(rng: &mut R, x: f64, side: Side, ch: &WiretapChannel) -> f64 {
    let h = ch.gain(side);
    let nz = ch.noise(side);
    let z: f64 = StandardNormal.sample(rng);
    h * x + ((1.0 + h * nz.varsigma2 * x) * nz.sigma2).sqrt() * z
}

/// Sample mean and variance of `f` over `n` draws, merged in worker order.
fn mc_moments<F>(n: usize, seed: u64, workers: usize, f: F) -> Result<(f64, f64)>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let parts: Vec<Result<(f64, f64, usize)>> = chunks(n, workers)
        .into_par_iter()
        .map(|(w, m)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, w));
            let (mut mean, mut m2) = (0.0, 0.0);
            for i in 0..m {
                let v = f(&mut rng)?;
                let d = v - mean;
                mean += d / (i + 1) as f64;
                m2 += d * (v - mean);
            }
            Ok((mean, m2, m))
        })
        .collect();
    let (mut mean, mut m2, mut count) = (0.0, 0.0, 0usize);
    for p in parts {
        let (pm, pm2, pn) = p?;
        if pn == 0 {
            continue;
        }
        let tot = count + pn;
        let d = pm - mean;
        mean += d * pn as f64 / tot as f64;
        m2 += pm2 + d * d * (count as f64) * (pn as f64) / tot as f64;
        count = tot;
    }
    Ok((mean, m2 / (count.max(2) - 1) as f64))
}

/// Stochastic estimate of [`secrecy_rate`].
///
/// Each draw contributes `−ln f_{Y_B}(y_B) − h_B(x) + ln f_{Y_E}(y_E) + h_E(x)`
/// where `h_k(x)` is the conditional Gaussian entropy and the marginals are
/// evaluated by quadrature. Deterministic for fixed `(seed, workers)`.
pub fn mc_secrecy_rate(
    dist: &InputDistribution,
    ch: &WiretapChannel,
    n_samples: usize,
    seed: u64,
    workers: usize,
    spec: &QuadratureSpec,
) -> Result<McEstimate> {
    dist.validate()?;
    if n_samples < 10_000 {
        return Err(Error::InvalidParameter { field: "n_samples", value: n_samples as f64, reason: "must be >= 10000" });
    }
    let term = |side: Side, x: f64, y: f64| -> Result<f64> {
        let nz = ch.noise(side);
        let cond = 0.5 * (LN_2PI_E + ((1.0 + ch.gain(side) * nz.varsigma2 * x) * nz.sigma2).ln());
        let f = marginal_density(y, side, dist, ch, spec)?;
        Ok(-f.max(f64::MIN_POSITIVE).ln() - cond)
    };
    let (mean, var) = mc_moments(n_samples, seed, workers, |rng| {
        let x = dist.sample(rng);
        let yb = sample_output(rng, x, Side::Bob, ch);
        let ye = sample_output(rng, x, Side::Eve, ch);
        Ok(term(Side::Bob, x, yb)? - term(Side::Eve, x, ye)?)
    })?;
    Ok(McEstimate { estimate: mean, std_error: (var / n_samples as f64).sqrt(), n_samples, seed, workers })
}

/// Sample variance of simulated outputs, with the standard error of the
/// variance estimator.
pub fn mc_output_variance(
    dist: &InputDistribution,
    side: Side,
    ch: &WiretapChannel,
    n_samples: usize,
    seed: u64,
    workers: usize,
) -> Result<McEstimate> {
    dist.validate()?;
    // first pass: variance; second pass: spread of squared deviations
    let sample = |rng: &mut ChaCha8Rng| {
        let x = dist.sample(rng);
        Ok(sample_output(rng, x, side, ch))
    };
    let (mean, var) = mc_moments(n_samples, seed, workers, sample)?;
    let (_, spread) = mc_moments(n_samples, seed, workers, |rng| {
        let y = sample(rng)?;
        Ok((y - mean) * (y - mean))
    })?;
    Ok(McEstimate { estimate: var, std_error: (spread / n_samples as f64).sqrt(), n_samples, seed, workers })
}
