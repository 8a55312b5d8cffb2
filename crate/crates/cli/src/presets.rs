//! Named reproductions of the reference figures.
//!
//! Common parameters: σ² = 1 and ς² = 1.5 at both receivers, H_B = 1,
//! H_E = H_B/ratio. Intensities are in dB relative to 1 W.

use vlcsec_core::NoiseParams;

use crate::sweep::{Axis, Fixed, Mode, Range, SweepConfig};

pub const NAMES: [&str; 10] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig7a", "fig7b", "fig8", "fig9"];

/// Samples per density curve in the fig6 preset.
pub const PDF_POINTS: usize = 201;

#[derive(Debug, Clone)]
pub struct Curve {
    pub label: String,
    pub config: SweepConfig,
}

#[derive(Debug, Clone)]
pub struct PdfCurve {
    pub label: String,
    pub alpha: f64,
    pub a: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone)]
pub enum Preset {
    Sweep(Vec<Curve>),
    Pdf(Vec<PdfCurve>),
}

fn base(ratio: f64) -> Fixed {
    let nz = NoiseParams::new(1.0, 1.5).expect("positive");
    Fixed { xi: 0.3, intensity_db: 0.0, a_over_p: None, h_b: 1.0, h_e: 1.0 / ratio, noise_b: nz, noise_e: nz }
}

fn curve(label: String, axis: Axis, range: Range, fixed: Fixed, mode: Mode) -> Curve {
    let config = SweepConfig::new(axis, range, fixed, mode).expect("preset parameters are valid");
    Curve { label, config }
}

const P_RANGE: Range = Range { start: -20.0, stop: 100.0, steps: 121 };
const A_RANGE: Range = Range { start: -20.0, stop: 80.0, steps: 101 };
// crosses ratio 1 exactly at the 11th point
const RATIO_RANGE: Range = Range { start: 0.1, stop: 1000.0, steps: 41 };
const XI_RANGE: Range = Range { start: 0.01, stop: 1.0, steps: 100 };
const RATIOS: [f64; 3] = [10.0, 100.0, 1000.0];

fn fig7(alpha_label: &str, xi: f64, a_over_p: f64) -> Vec<Curve> {
    RATIOS
        .iter()
        .map(|&r| {
            let f = Fixed { xi, a_over_p: Some(a_over_p), ..base(r) };
            curve(format!("{alpha_label}ratio{r}"), Axis::ADb, A_RANGE, f, Mode::Peak)
        })
        .collect()
}

pub fn preset(name: &str) -> Option<Preset> {
    let curves = match name {
        "fig2" => RATIOS
            .iter()
            .map(|&r| curve(format!("ratio{r}"), Axis::PDb, P_RANGE, base(r), Mode::Avg))
            .collect(),
        "fig3" => [10.0, 20.0, 30.0]
            .iter()
            .map(|&p| {
                let f = Fixed { intensity_db: p, ..base(1.0) };
                curve(format!("p{p}db"), Axis::Ratio, RATIO_RANGE, f, Mode::Avg)
            })
            .collect(),
        "fig4" => [20.0, 40.0, 60.0]
            .iter()
            .map(|&p| {
                let f = Fixed { intensity_db: p, ..base(1000.0) };
                curve(format!("p{p}db"), Axis::Xi, XI_RANGE, f, Mode::Avg)
            })
            .collect(),
        "fig5" => vec![
            curve("avg".into(), Axis::PDb, P_RANGE, base(1000.0), Mode::Avg),
            curve("avg_si".into(), Axis::PDb, P_RANGE, base(1000.0), Mode::AvgSi),
        ],
        "fig6" => {
            return Some(Preset::Pdf(
                [0.1, 0.3, 0.5, 0.7, 0.9]
                    .iter()
                    .map(|&alpha| PdfCurve { label: format!("alpha{alpha}"), alpha, a: 1e6, n_points: PDF_POINTS })
                    .collect(),
            ))
        }
        "fig7a" => fig7("", 0.3, 1.5),
        "fig7b" => fig7("", 0.5, 1.0),
        "fig7" => {
            let mut v = fig7("alpha0.2_", 0.3, 1.5);
            v.extend(fig7("alpha0.5_", 0.5, 1.0));
            v
        }
        "fig8" => [10.0, 20.0, 30.0]
            .iter()
            .map(|&a| {
                let f = Fixed { intensity_db: a, a_over_p: Some(1.5), ..base(1.0) };
                curve(format!("a{a}db"), Axis::Ratio, RATIO_RANGE, f, Mode::Peak)
            })
            .collect(),
        "fig9" => {
            let f = Fixed { a_over_p: Some(1.0), ..base(1000.0) };
            vec![
                curve("peak".into(), Axis::ADb, A_RANGE, f, Mode::Peak),
                curve("peak_si".into(), Axis::ADb, A_RANGE, f, Mode::PeakSi),
            ]
        }
        _ => return None,
    };
    Some(Preset::Sweep(curves))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for name in NAMES {
            assert!(preset(name).is_some(), "{name}");
        }
        assert!(preset("fig1").is_none());
    }

    #[test]
    fn fig7_alphas() {
        let Some(Preset::Sweep(a)) = preset("fig7a") else { panic!() };
        let f = a[0].config.fixed;
        assert!((f.xi / f.a_over_p.unwrap() - 0.2).abs() < 1e-15);
        let Some(Preset::Sweep(b)) = preset("fig7b") else { panic!() };
        let f = b[0].config.fixed;
        assert_eq!(f.xi / f.a_over_p.unwrap(), 0.5);
    }
}
