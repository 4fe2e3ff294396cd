//! Explicit Stein-Chen error bounds for Poisson and Poisson-process
//! approximations of extremes, with exact and Monte Carlo oracles.
//!
//! - [`distributions`]: marginal laws, Marshall-Olkin exponential and geometric laws
//! - [`stein_bounds`]: Poisson approximation bounds and total-variation oracles
//! - [`maxima_evt`]: extreme-value cdfs, Kolmogorov bounds for maxima, exceedance-process bounds
//! - [`point_process`]: configurations, matching distance, Poisson and immigration-death sampling
//! - [`copulas`]: bivariate copulas, tail dependence, Marshall-Olkin decomposition
//! - [`archimedean_tail`]: Archimedean generators, tail constants and exceedance intensities
//! - [`mo_geometric`]: lattice and continuous intensities for Marshall-Olkin geometric exceedances

pub mod archimedean_tail;
pub mod assignment;
pub mod copulas;
pub mod distributions;
pub mod error;
pub mod maxima_evt;
pub mod mo_geometric;
pub mod numeric;
pub mod point_process;
pub mod report;
pub mod rng;
pub mod stein_bounds;

pub use error::{Error, Result};
pub use report::BoundReport;
