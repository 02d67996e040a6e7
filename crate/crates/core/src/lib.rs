//! Coverage analytics and Monte Carlo simulation for uplink NOMA clusters
//! with terrestrial and aerial IoT devices.

// `!(x > 0)` is used on purpose: it rejects NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aerial;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod laplace;
pub mod montecarlo;
pub mod report;
pub mod terrestrial;
pub mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Real;
pub use channel::{path_loss, sample_nakagami_power, sample_rayleigh_power, ChannelDraw};
pub use report::{CoverageReport, Method, ReportMeta};
pub use geometry::{NetworkConfig, NetworkConfigBuilder, Tier, ZoneGeometry};

pub type Config = NetworkConfig<f64>;
pub type Config32 = NetworkConfig<f32>;
pub type Zone = ZoneGeometry<f64>;
pub type Report = CoverageReport<f64>;
