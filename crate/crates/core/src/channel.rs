//! Wiretap channel parameters and the line-of-sight Lambertian gain.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

fn positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter { field, value, reason: "must be finite and > 0" })
    }
}

/// LED emission and photodiode receiver characteristics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambertianParams {
    /// Lambertian emission order.
    pub m: f64,
    /// Photodiode area in m².
    pub area: f64,
    pub filter_gain: f64,
    pub concentrator_gain: f64,
    /// Receiver field of view in radians.
    pub fov: f64,
}

impl LambertianParams {
    pub fn new(m: f64, area: f64, filter_gain: f64, concentrator_gain: f64, fov: f64) -> Result<Self> {
        positive("m", m)?;
        positive("area", area)?;
        positive("filter_gain", filter_gain)?;
        positive("concentrator_gain", concentrator_gain)?;
        positive("fov", fov)?;
        if fov > FRAC_PI_2 {
            return Err(Error::InvalidParameter { field: "fov", value: fov, reason: "must not exceed pi/2" });
        }
        Ok(Self { m, area, filter_gain, concentrator_gain, fov })
    }
}

/// Placement of one receiver relative to the LED.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Link distance in m.
    pub distance: f64,
    /// Irradiance angle in radians.
    pub phi: f64,
    /// Incidence angle in radians.
    pub psi: f64,
}

impl Geometry {
    pub fn new(distance: f64, phi: f64, psi: f64) -> Result<Self> {
        positive("distance", distance)?;
        if !(0.0..FRAC_PI_2).contains(&phi) {
            return Err(Error::InvalidParameter { field: "phi", value: phi, reason: "must lie in [0, pi/2)" });
        }
        if !(0.0..PI).contains(&psi) {
            return Err(Error::InvalidParameter { field: "psi", value: psi, reason: "must lie in [0, pi)" });
        }
        Ok(Self { distance, phi, psi })
    }
}

/// LoS DC gain; exactly zero when the incidence angle exceeds the FOV.
pub fn los_gain(geom: &Geometry, lam: &LambertianParams) -> f64 {
    if geom.psi > lam.fov {
        return 0.0;
    }
    let d2 = geom.distance * geom.distance;
    (lam.m + 1.0) * lam.area / (2.0 * PI * d2)
        * lam.filter_gain
        * lam.concentrator_gain
        * geom.phi.cos().powf(lam.m)
        * geom.psi.cos()
}

/// Signal-independent variance σ² and signal-dependent ratio ς².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub sigma2: f64,
    pub varsigma2: f64,
}

impl NoiseParams {
    pub fn new(sigma2: f64, varsigma2: f64) -> Result<Self> {
        positive("sigma2", sigma2)?;
        positive("varsigma2", varsigma2)?;
        Ok(Self { sigma2, varsigma2 })
    }

    /// ς²σ², the slope of the conditional variance in the received intensity.
    pub fn product(&self) -> f64 {
        self.varsigma2 * self.sigma2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Bob,
    Eve,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WiretapChannel {
    h_b: f64,
    h_e: f64,
    noise_b: NoiseParams,
    noise_e: NoiseParams,
    m: f64,
    n: f64,
}

impl WiretapChannel {
    pub fn new(h_b: f64, h_e: f64, noise_b: NoiseParams, noise_e: NoiseParams) -> Result<Self> {
        positive("h_b", h_b)?;
        if !(h_e.is_finite() && h_e >= 0.0) {
            return Err(Error::InvalidParameter { field: "h_e", value: h_e, reason: "must be finite and >= 0" });
        }
        // re-validate: the fields are public on NoiseParams
        NoiseParams::new(noise_b.sigma2, noise_b.varsigma2)?;
        NoiseParams::new(noise_e.sigma2, noise_e.varsigma2)?;
        let m = h_e * h_e * noise_b.product() / h_b + h_e * noise_e.product();
        let n = h_e * h_e * noise_b.sigma2 / (h_b * h_b) + noise_e.sigma2;
        Ok(Self { h_b, h_e, noise_b, noise_e, m, n })
    }

    /// Both receivers share the same noise description.
    pub fn symmetric_noise(h_b: f64, h_e: f64, noise: NoiseParams) -> Result<Self> {
        Self::new(h_b, h_e, noise, noise)
    }

    pub fn h_b(&self) -> f64 {
        self.h_b
    }

    pub fn h_e(&self) -> f64 {
        self.h_e
    }

    pub fn noise_b(&self) -> NoiseParams {
        self.noise_b
    }

    pub fn noise_e(&self) -> NoiseParams {
        self.noise_e
    }

    pub fn gain(&self, side: Side) -> f64 {
        match side {
            Side::Bob => self.h_b,
            Side::Eve => self.h_e,
        }
    }

    pub fn noise(&self, side: Side) -> NoiseParams {
        match side {
            Side::Bob => self.noise_b,
            Side::Eve => self.noise_e,
        }
    }

    /// `M = H_E²ς_B²σ_B²/H_B + H_Eς_E²σ_E²`.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// `N = H_E²σ_B²/H_B² + σ_E²`.
    pub fn n(&self) -> f64 {
        self.n
    }

    /// True when Bob is at least as disadvantaged as Eve in every parameter,
    /// in which case the secrecy capacity is zero. With `signal_dependent`
    /// false the ς² values are not compared.
    pub fn main_not_better(&self, signal_dependent: bool) -> bool {
        let base = self.h_b <= self.h_e && self.noise_b.sigma2 >= self.noise_e.sigma2;
        base && (!signal_dependent || self.noise_b.varsigma2 >= self.noise_e.varsigma2)
    }

    pub(crate) fn require_eve(&self, func: &'static str) -> Result<()> {
        if self.h_e > 0.0 {
            Ok(())
        } else {
            Err(Error::domain(func, "H_E = 0 (degenerate eavesdropper): signal-dependent closed forms diverge"))
        }
    }
}
