//! Uplink capacity of a macrocell with one femtocell access point under
//! open and closed femtocell access.
//!
//! Closed forms live in [`analytic`], [`tdma`] and [`cdma`]; [`montecarlo`]
//! simulates the same network model as an independent check and covers the
//! cases without closed forms. [`experiments`] drives parameter sweeps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cdma;
pub mod cli;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod model;
pub mod montecarlo;
pub mod policy;
pub mod rates;
pub mod rng;
pub mod special;
pub mod tdma;

pub use analytic::{cdf_interference, cdf_sum_mc, cdf_sum_upper, order_tail, CdfSegments, Estimate, SumCdfEstimator};
pub use error::{Error, Result};
pub use model::{
    home_interference_factor, interference_factor, sample_realization, InterferenceRealization, NetworkConfig, Position,
};
pub use montecarlo::{estimate, find_open_cutoff, AccessOutcome, EventDistribution, McOptions, McResult};
pub use policy::{AllocationPolicy, AllocationRule};
pub use rates::{Access, RateReport, Scheme, SirTargets};
pub use rng::{Stream, DEFAULT_SEED};
