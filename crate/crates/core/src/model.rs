//! Network geometry, channel model and random user placement.
//!
//! The macrocell base station sits at the origin, the femtocell access point
//! (FAP) at `(D, 0)`. Cellular users are uniform on the disk of radius `R`;
//! the home user sits at distance `d` from the FAP and is treated as being at
//! distance `D` from the macrocell base station.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Users closer than this to either base station are resampled.
pub const DEGENERATE_DISTANCE: f64 = 1e-9;

/// Physical and protocol parameters of the two-tier network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Macrocell radius `R` (m).
    #[serde(rename = "R")]
    pub radius: f64,
    /// Macrocell BS to FAP distance `D` (m).
    #[serde(rename = "D")]
    pub fap_distance: f64,
    /// Home user to FAP distance `d` (m).
    #[serde(rename = "d")]
    pub home_distance: f64,
    /// Outdoor and cross-wall path-loss exponent.
    pub alpha: f64,
    /// Indoor path-loss exponent.
    pub beta: f64,
    /// Target receive power at the FAP.
    #[serde(rename = "P_f")]
    pub p_femto: f64,
    /// Target receive power at the macrocell BS.
    #[serde(rename = "P_c")]
    pub p_macro: f64,
    /// CDMA spreading factor `G`.
    #[serde(rename = "G")]
    pub spreading: f64,
    /// Per-user rate requirement `C` (bps/Hz).
    #[serde(rename = "C")]
    pub rate: f64,
    /// Femtocell backhaul capacity `C_b` (bps/Hz).
    #[serde(rename = "C_b")]
    pub backhaul: f64,
}

/// Config-file keys, in canonical order.
pub const CONFIG_KEYS: [&str; 10] = ["R", "D", "d", "alpha", "beta", "P_f", "P_c", "G", "C", "C_b"];

impl Default for NetworkConfig {
    fn default() -> Self {
        Self::reference()
    }
}

impl NetworkConfig {
    /// The reference parameter set: R = 300 m, D = 150 m, d = 5 m,
    /// exponents 4 and 2, unit receive powers, G = 64, C = 0.5, C_b = 2.
    pub const fn reference() -> Self {
        NetworkConfig {
            radius: 300.0,
            fap_distance: 150.0,
            home_distance: 5.0,
            alpha: 4.0,
            beta: 2.0,
            p_femto: 1.0,
            p_macro: 1.0,
            spreading: 64.0,
            rate: 0.5,
            backhaul: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let all = [
            self.radius,
            self.fap_distance,
            self.home_distance,
            self.alpha,
            self.beta,
            self.p_femto,
            self.p_macro,
            self.spreading,
            self.rate,
            self.backhaul,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("all parameters must be finite".into());
        }
        if !(0.0 < self.home_distance && self.home_distance < self.fap_distance && self.fap_distance < self.radius) {
            return bad(format!(
                "need 0 < d < D < R, got d={}, D={}, R={}",
                self.home_distance, self.fap_distance, self.radius
            ));
        }
        if !(self.alpha > self.beta && self.beta > 0.0) {
            return bad(format!("need alpha > beta > 0, got alpha={}, beta={}", self.alpha, self.beta));
        }
        for (name, v) in [
            ("P_f", self.p_femto),
            ("P_c", self.p_macro),
            ("G", self.spreading),
            ("C", self.rate),
            ("C_b", self.backhaul),
        ] {
            if v <= 0.0 {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "R" => self.radius,
            "D" => self.fap_distance,
            "d" => self.home_distance,
            "alpha" => self.alpha,
            "beta" => self.beta,
            "P_f" => self.p_femto,
            "P_c" => self.p_macro,
            "G" => self.spreading,
            "C" => self.rate,
            "C_b" => self.backhaul,
            _ => return None,
        })
    }

    /// Sets one parameter by its config-file key. Does not validate.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "R" => &mut self.radius,
            "D" => &mut self.fap_distance,
            "d" => &mut self.home_distance,
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "P_f" => &mut self.p_femto,
            "P_c" => &mut self.p_macro,
            "G" => &mut self.spreading,
            "C" => &mut self.rate,
            "C_b" => &mut self.backhaul,
            _ => return Err(Error::InvalidConfig(format!("unknown key `{key}`"))),
        };
        *slot = value;
        Ok(())
    }

    /// Parses `key = value` lines on top of the reference parameters.
    /// Blank lines and `#` comments are ignored; unknown keys are errors.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = Self::reference();
        cfg.apply_kv_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub(crate) fn apply_kv_str(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::ConfigParse { line: idx + 1, message };
            let (k, v) =
                line.split_once('=').ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
            let key = k.trim();
            let value: f64 = v.trim().parse().map_err(|_| parse_err(format!("`{}` is not a number", v.trim())))?;
            self.set(key, value).map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(())
    }

    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        for key in CONFIG_KEYS {
            // `{}` on f64 prints the shortest representation that round-trips.
            let _ = writeln!(out, "{key} = {}", self.get(key).unwrap_or(f64::NAN));
        }
        out
    }

    /// Rate actually delivered to a femtocell user holding share `share` of
    /// the backhaul: `min(C, share * C_b)`.
    pub fn femto_rate(&self, share: f64) -> f64 {
        self.rate.min(share * self.backhaul)
    }
}

/// Cartesian position in metres; macrocell BS at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn dist_to_macro(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist_to_fap(&self, cfg: &NetworkConfig) -> f64 {
        (self.x - cfg.fap_distance).hypot(self.y)
    }
}

/// Ratio `h/g` of the user's path gain to the FAP over its gain to the
/// macrocell BS. Both links of a cellular user use exponent `alpha`.
pub fn interference_factor(p: Position, cfg: &NetworkConfig) -> Result<f64> {
    let to_macro2 = p.x * p.x + p.y * p.y;
    let dx = p.x - cfg.fap_distance;
    let to_fap2 = dx * dx + p.y * p.y;
    const EPS2: f64 = DEGENERATE_DISTANCE * DEGENERATE_DISTANCE;
    if to_macro2 < EPS2 || to_fap2 < EPS2 {
        return Err(Error::DegeneratePlacement { x: p.x, y: p.y });
    }
    Ok(pow_half(to_macro2 / to_fap2, cfg.alpha))
}

/// `q^(a/2)`, exact repeated multiplication when `a/2` is a small integer.
fn pow_half(q: f64, a: f64) -> f64 {
    let h = 0.5 * a;
    if h.fract() == 0.0 && h.abs() <= 8.0 {
        q.powi(h as i32)
    } else {
        q.powf(h)
    }
}

/// Interference factor `I_0 = d^-beta / D^-alpha` of the home user.
pub fn home_interference_factor(cfg: &NetworkConfig) -> f64 {
    cfg.fap_distance.powf(cfg.alpha) / cfg.home_distance.powf(cfg.beta)
}

/// Uniform point on the macrocell disk, by rejection from the bounding square.
pub fn sample_position<R: Rng + ?Sized>(cfg: &NetworkConfig, rng: &mut R) -> Position {
    loop {
        let x = 2.0 * rng.random::<f64>() - 1.0;
        let y = 2.0 * rng.random::<f64>() - 1.0;
        if x * x + y * y <= 1.0 {
            return Position::new(cfg.radius * x, cfg.radius * y);
        }
    }
}

/// Samples one non-degenerate user; returns its position and factor.
pub fn sample_user<R: Rng + ?Sized>(cfg: &NetworkConfig, rng: &mut R) -> (Position, f64) {
    loop {
        let p = sample_position(cfg, rng);
        if let Ok(i) = interference_factor(p, cfg) {
            return (p, i);
        }
    }
}

/// Fills `buf` with `n` i.i.d. factors sorted ascending. Used by the
/// replication loops, which do not need positions or the permutation.
pub(crate) fn sample_sorted_factors<R: Rng + ?Sized>(n: usize, cfg: &NetworkConfig, rng: &mut R, buf: &mut Vec<f64>) {
    buf.clear();
    buf.extend((0..n).map(|_| sample_user(cfg, rng).1));
    buf.sort_unstable_by(f64::total_cmp);
}

/// One drop of `N` cellular users.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceRealization {
    positions: Vec<Position>,
    factors: Vec<f64>,
    ordered: Vec<f64>,
    perm: Vec<usize>,
    i0: f64,
}

impl InterferenceRealization {
    /// Builds a realization from explicit factors (positions left empty).
    pub fn from_factors(factors: Vec<f64>, i0: f64) -> Result<Self> {
        if factors.is_empty() {
            return Err(crate::error::invalid_arg("a realization needs at least one user"));
        }
        if factors.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
            return Err(crate::error::invalid_arg("interference factors must be finite and >= 0"));
        }
        Ok(Self::assemble(Vec::new(), factors, i0))
    }

    fn assemble(positions: Vec<Position>, factors: Vec<f64>, i0: f64) -> Self {
        let mut perm: Vec<usize> = (0..factors.len()).collect();
        perm.sort_by(|&a, &b| factors[a].total_cmp(&factors[b]));
        let ordered = perm.iter().map(|&j| factors[j]).collect();
        InterferenceRealization { positions, factors, ordered, perm, i0 }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    /// Factors sorted ascending: `ordered()[N-1]` is the strongest interferer.
    pub fn ordered(&self) -> &[f64] {
        &self.ordered
    }

    /// `perm()[k]` is the original index of the user with rank `k`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn i0(&self) -> f64 {
        self.i0
    }

    /// Whether the home user out-interferes every cellular user. Holds with
    /// probability `F_I(I_0)^N`, not surely: a user within a couple of
    /// metres of the FAP exceeds `I_0` under the reference parameters.
    pub fn home_dominates(&self) -> bool {
        self.ordered.last().is_none_or(|&m| self.i0 >= m)
    }
}

/// Samples `n` users i.i.d. uniform on the disk.
pub fn sample_realization<R: Rng + ?Sized>(
    n: usize,
    cfg: &NetworkConfig,
    rng: &mut R,
) -> Result<InterferenceRealization> {
    if n == 0 {
        return Err(crate::error::invalid_arg("n must be at least 1"));
    }
    let (positions, factors): (Vec<_>, Vec<_>) = (0..n).map(|_| sample_user(cfg, rng)).unzip();
    Ok(InterferenceRealization::assemble(positions, factors, home_interference_factor(cfg)))
}
