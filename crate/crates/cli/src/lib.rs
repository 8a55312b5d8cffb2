//! Front end for the secrecy-bound library: scenario files, parameter
//! sweeps, figure presets, the reference gap tables and the verification harness.

pub mod fmt;
pub mod pdf;
pub mod presets;
pub mod scenario;
pub mod sweep;
pub mod tables;
pub mod verify;

/// `10·log10(W / 1 W)` inverted.
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
