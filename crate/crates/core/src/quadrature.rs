//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature.
//!
//! The integrator keeps a priority queue of panels ordered by their error
//! estimate and bisects the worst one until the summed error meets
//! `max(abs, rel * |I|)`. Panel error estimates follow the QUADPACK `qk21`
//! heuristic, including its round-off floor, so requests tighter than the
//! attainable precision terminate instead of spinning.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Abscissae of the 21-point Kronrod rule on [-1, 1] (non-negative half,
/// descending). Odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_296,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Weights of the embedded 10-point Gauss rule, paired with `XGK[1], XGK[3], ..`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Stopping criteria for [`integrate`] and friends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_subdivisions: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-10,
            abs: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        Tolerance {
            rel,
            abs,
            ..Tolerance::default()
        }
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }
}

/// Integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One application of the 21-point Kronrod rule with QUADPACK's error estimate.
fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_k = f_center * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    Panel {
        a,
        b,
        value,
        error,
        abs_value: res_abs,
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<Estimate> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Integrates `f` over `[points[0], points[last]]`, seeding the panel queue
/// with the given break points. Points must be finite and non-decreasing;
/// zero-width segments are dropped.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    tol: &Tolerance,
) -> Result<Estimate> {
    if points.len() < 2 {
        return Err(Error::domain("integrate", "need at least two break points"));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::domain("integrate", "break points must be finite"));
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("integrate", "break points must be non-decreasing"));
    }
    if !(tol.rel >= 0.0 && tol.abs >= 0.0) || (tol.rel == 0.0 && tol.abs == 0.0) {
        return Err(Error::domain("integrate", "tolerances must be non-negative and not both zero"));
    }

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod21(&mut f, w[0], w[1]));
            evaluations += 21;
        }
    }
    if heap.is_empty() {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            subdivisions: 0,
        });
    }

    let mut subdivisions = heap.len();
    // Panels too narrow to split further keep contributing their error.
    let mut frozen: Vec<Panel> = Vec::new();

    loop {
        let (value, error, abs_value) = heap
            .iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0, 0.0), |(v, e, s), p| (v + p.value, e + p.error, s + p.abs_value));

        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonConvergence {
                routine: "integrate",
                estimate: value,
                error,
                iterations: subdivisions,
            });
        }

        let target = tol.abs.max(tol.rel * value.abs());
        let roundoff_floor = 100.0 * f64::EPSILON * abs_value;
        if error <= target || error <= roundoff_floor {
            return Ok(Estimate {
                value,
                error,
                evaluations,
                subdivisions,
            });
        }

        let worst = match heap.pop() {
            Some(p) => p,
            None => {
                return Err(Error::NonConvergence {
                    routine: "integrate",
                    estimate: value,
                    error,
                    iterations: subdivisions,
                })
            }
        };

        let mid = 0.5 * (worst.a + worst.b);
        if subdivisions >= tol.max_subdivisions {
            return Err(Error::NonConvergence {
                routine: "integrate",
                estimate: value,
                error,
                iterations: subdivisions,
            });
        }
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) <= 4.0 * f64::EPSILON * mid.abs() {
            frozen.push(worst);
            continue;
        }

        heap.push(kronrod21(&mut f, worst.a, mid));
        heap.push(kronrod21(&mut f, mid, worst.b));
        evaluations += 42;
        subdivisions += 1;
    }
}

/// Integrates `f` over `[a, ∞)` via the substitution `x = a + scale·t/(1−t)`.
///
/// `breaks` are given in the original variable and should sit where the
/// integrand has structure; `scale` should be the natural length scale of
/// the integrand's decay.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    scale: f64,
    breaks: &[f64],
    tol: &Tolerance,
) -> Result<Estimate> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::domain("integrate_semi_infinite", "scale must be positive"));
    }
    let mut ts: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    ts.push(0.0);
    ts.extend(
        breaks
            .iter()
            .filter(|&&x| x > a && x.is_finite())
            .map(|&x| {
                let d = (x - a) / scale;
                d / (1.0 + d)
            })
            .filter(|&t| t > 0.0 && t < 1.0),
    );
    ts.push(1.0);
    ts.sort_by(f64::total_cmp);
    ts.dedup();

    integrate_with_breaks(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let one_minus = 1.0 - t;
            let x = a + scale * t / one_minus;
            let jac = scale / (one_minus * one_minus);
            let v = f(x) * jac;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        &ts,
        tol,
    )
}

/// Geometric break points `lo, lo·r, lo·r², .. , hi` covering `[lo, hi]`
/// with `lo, hi > 0`, at most one per decade.
pub fn log_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let mut v = vec![lo];
    if lo > 0.0 && hi > lo {
        let mut x = lo * 10.0;
        while x < hi {
            v.push(x);
            x *= 10.0;
        }
    }
    if hi > lo {
        v.push(hi);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        assert!((s - 2.0).abs() < 1e-15);
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn polynomial_exact_single_panel() {
        // K21 integrates degree-31 polynomials exactly.
        let p = kronrod21(&mut |x: f64| x.powi(30) + 3.0 * x.powi(7) - 1.0, -1.0, 1.0);
        let exact = 2.0 / 31.0 - 2.0;
        assert!((p.value - exact).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_log_singularity() {
        // ∫_0^1 ln x dx = -1
        let est = integrate(|x: f64| x.ln(), 0.0, 1.0, &Tolerance::new(1e-11, 0.0)).unwrap();
        assert!((est.value + 1.0).abs() < 1e-10, "{est:?}");
    }

    #[test]
    fn semi_infinite_exponential() {
        let est = integrate_semi_infinite(
            |x: f64| (-x / 3.0).exp() / 3.0,
            0.0,
            3.0,
            &[],
            &Tolerance::new(1e-12, 0.0),
        )
        .unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn narrow_peak_found_with_breaks() {
        let mu = 0.731;
        let s = 1e-4;
        let g = |x: f64| (-(x - mu) * (x - mu) / (2.0 * s * s)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt());
        let est = integrate_with_breaks(g, &[0.0, mu - 10.0 * s, mu, mu + 10.0 * s, 2.0], &Tolerance::new(1e-12, 0.0))
            .unwrap();
        assert!((est.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn rejects_bad_breaks() {
        assert!(integrate_with_breaks(|x| x, &[1.0, 0.0], &Tolerance::default()).is_err());
        assert!(integrate_with_breaks(|x| x, &[0.0], &Tolerance::default()).is_err());
    }

    #[test]
    fn budget_exhaustion_reports_non_convergence() {
        let tol = Tolerance::new(1e-14, 0.0).with_max_subdivisions(3);
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &tol).unwrap_err();
        assert_eq!(err.code(), "non_convergence");
    }
}
