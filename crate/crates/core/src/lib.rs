//! Monthly economic-activity forecasting with stacked multi-layer perceptrons.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! - [`timeseries`]: monthly series, CSV ingestion, Laspeyres index, synthetic data
//! - [`preprocess`]: moving/block averages, differences, lags, cycle detection,
//!   aligned feature matrices and the eight built-in network presets
//! - [`mlp`]: the perceptron, back-propagation and per-pattern training
//! - [`metrics`]: directional efficiency indicators and equity curves
//! - [`lagscan`]: optimal-lag detection by modified Sharpe ratio
//! - [`search`]: architecture search and random-restart retraining
//! - [`ensemble`]: eight sub-networks stacked under a master network
//! - [`cli`]: configuration-driven orchestration behind the `econet` binary

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod fsio;
pub mod lagscan;
pub mod metrics;
pub mod mlp;
pub mod preprocess;
pub mod search;
pub mod timeseries;

pub use error::{Error, Result};
