//! Flat `key = number` scenario files.
//!
//! ```text
//! # LED and receivers
//! m = 1
//! area = 1e-4
//! filter_gain = 1
//! concentrator_gain = 1
//! fov_deg = 60
//! bob.distance = 2.5
//! bob.phi_deg = 10
//! bob.psi_deg = 10
//! bob.sigma2 = 1
//! bob.varsigma2 = 1.5
//! eve.gain = 1e-7      # given directly instead of geometry
//! eve.sigma2 = 1
//! eve.varsigma2 = 1.5
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use vlcsec_core::channel::{los_gain, Geometry, LambertianParams};
use vlcsec_core::{NoiseParams, WiretapChannel};

const LED_KEYS: [&str; 5] = ["m", "area", "filter_gain", "concentrator_gain", "fov_deg"];
const RECEIVER_KEYS: [&str; 6] = ["distance", "phi_deg", "psi_deg", "sigma2", "varsigma2", "gain"];

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("invalid `{key}`{}: {source}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Invalid { key: String, line: Option<usize>, source: vlcsec_core::Error },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Receiver {
    pub gain: f64,
    pub noise: NoiseParams,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub bob: Receiver,
    pub eve: Receiver,
}

/// Summary printed by `vlcsec gain`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainReport {
    pub h_b: f64,
    pub h_e: f64,
    pub ratio: f64,
    pub m: f64,
    pub n: f64,
    pub degenerate_eve: bool,
}

struct Entries(BTreeMap<String, (f64, usize)>);

impl Entries {
    fn get(&self, key: &str) -> Option<(f64, usize)> {
        self.0.get(key).copied()
    }

    fn require(&self, key: &str) -> Result<(f64, usize), ScenarioError> {
        self.get(key).ok_or_else(|| ScenarioError::Missing(key.to_string()))
    }
}

fn known(key: &str) -> bool {
    if LED_KEYS.contains(&key) {
        return true;
    }
    match key.split_once('.') {
        Some((who, field)) => (who == "bob" || who == "eve") && RECEIVER_KEYS.contains(&field),
        None => false,
    }
}

fn tokenize(text: &str) -> Result<Entries, ScenarioError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| ScenarioError::Syntax { line, msg: format!("expected `key = number`, got `{body}`") })?;
        let key = key.trim();
        let value = value.trim();
        if !known(key) {
            return Err(ScenarioError::Syntax { line, msg: format!("unknown key `{key}`") });
        }
        let v: f64 = value
            .parse()
            .map_err(|_| ScenarioError::Syntax { line, msg: format!("`{value}` is not a number") })?;
        if !v.is_finite() {
            return Err(ScenarioError::Syntax { line, msg: format!("`{key}` must be finite") });
        }
        if map.insert(key.to_string(), (v, line)).is_some() {
            return Err(ScenarioError::Syntax { line, msg: format!("duplicate key `{key}`") });
        }
    }
    Ok(Entries(map))
}

fn led(e: &Entries) -> Result<LambertianParams, ScenarioError> {
    let mut vals = [0.0; 5];
    for (slot, key) in vals.iter_mut().zip(LED_KEYS) {
        *slot = e.require(key)?.0;
    }
    let [m, area, filter_gain, concentrator_gain, fov_deg] = vals;
    LambertianParams::new(m, area, filter_gain, concentrator_gain, fov_deg.to_radians()).map_err(|source| {
        let key = match &source {
            vlcsec_core::Error::InvalidParameter { field: "fov", .. } => "fov_deg",
            vlcsec_core::Error::InvalidParameter { field, .. } => field,
            _ => "m",
        };
        ScenarioError::Invalid { key: key.to_string(), line: e.get(key).map(|(_, l)| l), source }
    })
}

fn receiver(e: &Entries, who: &str) -> Result<Receiver, ScenarioError> {
    let key = |f: &str| format!("{who}.{f}");
    let (sigma2, ls) = e.require(&key("sigma2"))?;
    let (varsigma2, lv) = e.require(&key("varsigma2"))?;
    let noise = NoiseParams::new(sigma2, varsigma2).map_err(|source| {
        let (k, l) = match &source {
            vlcsec_core::Error::InvalidParameter { field: "sigma2", .. } => (key("sigma2"), ls),
            _ => (key("varsigma2"), lv),
        };
        ScenarioError::Invalid { key: k, line: Some(l), source }
    })?;

    if let Some((gain, line)) = e.get(&key("gain")) {
        if gain < 0.0 {
            let k = key("gain");
            return Err(ScenarioError::Invalid {
                key: k,
                line: Some(line),
                source: vlcsec_core::Error::InvalidParameter { field: "gain", value: gain, reason: "must be >= 0" },
            });
        }
        return Ok(Receiver { gain, noise });
    }
    let lam = led(e)?;
    let (d, ld) = e.require(&key("distance"))?;
    let (phi, lp) = e.require(&key("phi_deg"))?;
    let (psi, lq) = e.require(&key("psi_deg"))?;
    let geom = Geometry::new(d, phi.to_radians(), psi.to_radians()).map_err(|source| {
        let (k, l) = match &source {
            vlcsec_core::Error::InvalidParameter { field: "phi", .. } => (key("phi_deg"), lp),
            vlcsec_core::Error::InvalidParameter { field: "psi", .. } => (key("psi_deg"), lq),
            _ => (key("distance"), ld),
        };
        ScenarioError::Invalid { key: k.clone(), line: Some(l), source }
    })?;
    Ok(Receiver { gain: los_gain(&geom, &lam), noise })
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let e = tokenize(text)?;
        Ok(Self { bob: receiver(&e, "bob")?, eve: receiver(&e, "eve")? })
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn channel(&self) -> Result<WiretapChannel, ScenarioError> {
        WiretapChannel::new(self.bob.gain, self.eve.gain, self.bob.noise, self.eve.noise).map_err(|source| {
            let key = match &source {
                vlcsec_core::Error::InvalidParameter { field: "h_e", .. } => "eve.gain",
                _ => "bob.gain",
            };
            ScenarioError::Invalid { key: key.to_string(), line: None, source }
        })
    }

    pub fn gain_report(&self) -> Result<GainReport, ScenarioError> {
        let ch = self.channel()?;
        Ok(GainReport {
            h_b: ch.h_b(),
            h_e: ch.h_e(),
            ratio: if ch.h_e() > 0.0 { ch.h_b() / ch.h_e() } else { f64::INFINITY },
            m: ch.m(),
            n: ch.n(),
            degenerate_eve: ch.h_e() == 0.0,
        })
    }
}
