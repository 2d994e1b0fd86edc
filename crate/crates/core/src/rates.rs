//! Types shared by the TDMA and CDMA evaluators.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{invalid_arg, Error};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Orthogonal access (TDMA, or OFDMA per subband).
    Tdma,
    Cdma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Access {
    Open,
    Closed,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Tdma => "tdma",
            Scheme::Cdma => "cdma",
        })
    }
}

impl fmt::Display for Access {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Access::Open => "open",
            Access::Closed => "closed",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "tdma" | "ofdma" => Ok(Scheme::Tdma),
            "cdma" => Ok(Scheme::Cdma),
            _ => Err(invalid_arg(format!("unknown scheme `{s}`"))),
        }
    }
}

impl FromStr for Access {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "open" => Ok(Access::Open),
            "closed" => Ok(Access::Closed),
            _ => Err(invalid_arg(format!("unknown access mode `{s}`"))),
        }
    }
}

/// SIR thresholds at one handoff level `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SirTargets {
    /// Home user.
    pub gamma_f: f64,
    /// Each handed-off user.
    pub gamma_h: f64,
    /// Each user left at the macrocell.
    pub gamma_c: f64,
    pub scheme: Scheme,
}

/// Home-user ergodic rate and cellular sum throughput.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateReport {
    pub c0: f64,
    pub csum: f64,
    /// Part of `csum` earned by users left at the macrocell.
    pub csum_macro: f64,
    pub se_c0: f64,
    pub se_csum: f64,
    pub se_csum_macro: f64,
    pub n: usize,
    pub k: usize,
    pub scheme: Scheme,
    pub access: Access,
}

impl RateReport {
    /// A report from closed forms (zero standard errors).
    pub fn exact(c0: f64, csum: f64, csum_macro: f64, n: usize, k: usize, scheme: Scheme, access: Access) -> Self {
        RateReport { c0, csum, csum_macro, se_c0: 0.0, se_csum: 0.0, se_csum_macro: 0.0, n, k, scheme, access }
    }
}

/// `2^x - 1` without cancellation for small `x`.
pub(crate) fn pow2m1(x: f64) -> f64 {
    (x * std::f64::consts::LN_2).exp_m1()
}
