//! One-dimensional parameter sweeps over the bound functions.

use std::io::Write;

use clap::ValueEnum;
use rayon::prelude::*;
use vlcsec_core::bounds_avg::{self, AvgConstraint};
use vlcsec_core::bounds_peak::{self, PeakConstraint};
use vlcsec_core::{Error, NoiseParams, SecrecyBounds, UpperBranch, WiretapChannel};

use crate::fmt::g12;
use crate::from_db;

pub const HEADER: [&str; 7] = ["axis_value", "lower_raw", "upper_raw", "lower", "upper", "branch", "gap"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    /// Nominal optical intensity P in dB (average-constraint modes).
    PDb,
    /// Peak optical intensity A in dB (peak-constraint modes).
    ADb,
    /// H_B/H_E on a geometric grid; H_E = H_B/ratio.
    Ratio,
    /// Dimming target ξ.
    Xi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Avg,
    Peak,
    AvgSi,
    PeakSi,
    /// P → ∞ or A → ∞ limits; peak regime when A/P is set.
    Asymptotic,
}

impl Mode {
    fn is_peak(self, fixed: &Fixed) -> bool {
        match self {
            Mode::Peak | Mode::PeakSi => true,
            Mode::Avg | Mode::AvgSi => false,
            Mode::Asymptotic => fixed.a_over_p.is_some(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

/// Parameters held constant along the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed {
    pub xi: f64,
    /// P in dB for average modes, A in dB for peak modes.
    pub intensity_db: f64,
    /// Peak-to-average ratio A/P; α = ξ/(A/P). Required in peak modes.
    pub a_over_p: Option<f64>,
    pub h_b: f64,
    pub h_e: f64,
    pub noise_b: NoiseParams,
    pub noise_e: NoiseParams,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid sweep configuration: {0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub axis: Axis,
    pub range: Range,
    pub fixed: Fixed,
    pub mode: Mode,
}

/// Computed fields of one grid point. `lower` is absent where no
/// closed-form lower bound exists (peak asymptote off the uniform seam).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Values {
    pub lower_raw: Option<f64>,
    pub upper_raw: f64,
    pub lower: Option<f64>,
    pub upper: f64,
    pub branch: Option<UpperBranch>,
    pub gap: Option<f64>,
}

impl From<SecrecyBounds> for Values {
    fn from(b: SecrecyBounds) -> Self {
        Self {
            lower_raw: Some(b.lower_raw),
            upper_raw: b.upper_raw,
            lower: Some(b.lower),
            upper: b.upper,
            branch: b.branch,
            gap: Some(b.gap()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub axis_value: f64,
    pub outcome: Result<Values, Error>,
}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

impl SweepConfig {
    pub fn new(axis: Axis, range: Range, fixed: Fixed, mode: Mode) -> Result<Self, ConfigError> {
        if range.steps < 2 {
            return Err(bad("steps must be >= 2"));
        }
        if !(range.start.is_finite() && range.stop.is_finite() && range.start < range.stop) {
            return Err(bad("range requires finite start < stop"));
        }
        if axis == Axis::Ratio && range.start <= 0.0 {
            return Err(bad("ratio axis requires start > 0"));
        }
        let peak = mode.is_peak(&fixed);
        match (axis, peak) {
            (Axis::PDb, true) => return Err(bad("peak modes sweep A: use axis a-db")),
            (Axis::ADb, false) => return Err(bad("average modes sweep P: use axis p-db")),
            _ => {}
        }
        if axis != Axis::Xi && !(fixed.xi > 0.0 && fixed.xi <= 1.0) {
            return Err(bad(format!("xi = {} must lie in (0, 1]", fixed.xi)));
        }
        if !fixed.intensity_db.is_finite() {
            return Err(bad("intensity must be finite"));
        }
        if peak {
            match fixed.a_over_p {
                Some(r) if r >= 1.0 && r.is_finite() => {
                    if axis != Axis::Xi && fixed.xi / r >= 1.0 {
                        return Err(bad(format!("alpha = xi/(A/P) = {} must be < 1", fixed.xi / r)));
                    }
                }
                Some(r) => return Err(bad(format!("A/P = {r} must be >= 1"))),
                None => return Err(bad("peak modes require A/P")),
            }
        }
        if !(fixed.h_b.is_finite() && fixed.h_b > 0.0) {
            return Err(bad("H_B must be finite and > 0"));
        }
        if axis != Axis::Ratio && !(fixed.h_e.is_finite() && fixed.h_e >= 0.0) {
            return Err(bad("H_E must be finite and >= 0"));
        }
        NoiseParams::new(fixed.noise_b.sigma2, fixed.noise_b.varsigma2).map_err(|e| bad(format!("Bob noise: {e}")))?;
        NoiseParams::new(fixed.noise_e.sigma2, fixed.noise_e.varsigma2).map_err(|e| bad(format!("Eve noise: {e}")))?;
        Ok(Self { axis, range, fixed, mode })
    }

    /// Axis values; geometric for the ratio axis, linear otherwise.
    /// Interior points are computed from the endpoints, never accumulated.
    pub fn grid(&self) -> Vec<f64> {
        let Range { start, stop, steps } = self.range;
        let last = (steps - 1) as f64;
        (0..steps)
            .map(|i| {
                if i == steps - 1 {
                    return stop;
                }
                let t = i as f64 / last;
                match self.axis {
                    Axis::Ratio => {
                        let (a, b) = (start.log10(), stop.log10());
                        10f64.powf(a + (b - a) * i as f64 / last)
                    }
                    _ => start + (stop - start) * t,
                }
            })
            .collect()
    }

    /// Evaluates every grid point in parallel; rows come back in grid order.
    pub fn run(&self) -> Vec<Row> {
        self.grid()
            .into_par_iter()
            .map(|v| Row { axis_value: v, outcome: self.point(v) })
            .collect()
    }

    fn point(&self, v: f64) -> Result<Values, Error> {
        let mut f = self.fixed;
        match self.axis {
            Axis::PDb | Axis::ADb => f.intensity_db = v,
            Axis::Ratio => f.h_e = f.h_b / v,
            Axis::Xi => f.xi = v,
        }
        let ch = WiretapChannel::new(f.h_b, f.h_e, f.noise_b, f.noise_e)?;
        let level = from_db(f.intensity_db);
        let peak = || -> Result<PeakConstraint, Error> {
            let r = f.a_over_p.expect("validated");
            PeakConstraint::new(f.xi, level / r, level)
        };
        match self.mode {
            Mode::Avg => Ok(bounds_avg::bounds_avg(&ch, &AvgConstraint::new(f.xi, level)?)?.into()),
            Mode::AvgSi => Ok(bounds_avg::bounds_avg_si(&ch, &AvgConstraint::new(f.xi, level)?)?.into()),
            Mode::Peak => Ok(bounds_peak::bounds_peak(&ch, &peak()?)?.into()),
            Mode::PeakSi => Ok(bounds_peak::bounds_peak_si(&ch, &peak()?)?.into()),
            Mode::Asymptotic => asymptotic(&ch, &f),
        }
    }
}

fn asymptotic(ch: &WiretapChannel, f: &Fixed) -> Result<Values, Error> {
    let zero = ch.main_not_better(true);
    let clamp = |x: f64| if zero { 0.0 } else { x.max(0.0) };
    let (lower_raw, upper_raw, gap) = match f.a_over_p {
        None => {
            AvgConstraint::new(f.xi, 1.0)?;
            let a = bounds_avg::asymptotic_bounds_avg(ch)?;
            (Some(a.lower), a.upper, Some(a.gap))
        }
        Some(r) => {
            let a = bounds_peak::asymptotic_bounds_peak(ch, f.xi / r)?;
            (a.lower, a.upper, a.gap)
        }
    };
    Ok(Values { lower_raw, upper_raw, lower: lower_raw.map(clamp), upper: clamp(upper_raw), branch: None, gap })
}

fn opt(x: Option<f64>) -> String {
    x.map(g12).unwrap_or_default()
}

/// Writes the header and one record per row.
pub fn write_csv<W: Write>(rows: &[Row], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        let axis = g12(row.axis_value);
        match &row.outcome {
            Ok(v) => w.write_record([
                axis,
                opt(v.lower_raw),
                g12(v.upper_raw),
                opt(v.lower),
                g12(v.upper),
                v.branch.map(|b| b.as_str()).unwrap_or("na").to_string(),
                opt(v.gap),
            ])?,
            Err(e) => {
                w.write_record([axis, format!("error={}", e.code()), String::new(), String::new(), String::new(), String::new(), String::new()])?
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// True when any row failed because an iterative routine did not converge.
pub fn any_nonconvergence(rows: &[Row]) -> bool {
    rows.iter().any(|r| matches!(r.outcome, Err(Error::NonConvergence { .. })))
}
