//! Secrecy-capacity bounds for a visible-light wiretap channel whose noise
//! variance grows with the transmitted intensity.
//!
//! * [`specfun`]: exponential integral and its overflow-safe scaled forms.
//! * [`channel`]: gains, noise parameters and the Lambertian LoS model.
//! * [`bounds_avg`], [`bounds_peak`]: closed-form lower/upper bounds.
//! * [`oracle`]: quadrature and Monte Carlo reference evaluator.

pub mod bounds_avg;
pub mod bounds_peak;
pub mod channel;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod specfun;

pub use bounds_avg::{AvgConstraint, SecrecyBounds, UpperBranch};
pub use bounds_peak::{MaxentPdf, PeakConstraint};
pub use channel::{Geometry, LambertianParams, NoiseParams, Side, WiretapChannel};
pub use error::{Error, Result};
pub use oracle::{InputDistribution, QuadratureSpec};
