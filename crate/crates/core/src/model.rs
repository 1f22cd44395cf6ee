//! Parameters, derived coefficients, closed-form thresholds and the endemic
//! equilibrium of the bird/mosquito system.
//!
//! Birds `U` diffuse with rate `D1` and are advected with speed `mu`;
//! mosquitoes `V` only diffuse (rate `D2`). Infection couples the two:
//!
//! ```text
//! U_t = D1 U_xx - mu U_x + a1 (N1 - U) V - gamma U
//! V_t = D2 V_xx          + a2 (N2 - V) U - d V
//! ```
//!
//! on the moving interval `(g(t), h(t))`, with `a1 = alpha1 beta / N1` and
//! `a2 = alpha2 beta / N1`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Raw epidemiological and transport coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RawParams {
    /// Bird diffusion rate `D1` (length^2/time).
    pub diffusion_birds: f64,
    /// Mosquito diffusion rate `D2` (length^2/time).
    pub diffusion_mosquitoes: f64,
    /// Bird advection rate `mu` (length/time), may be negative.
    pub advection: f64,
    /// Transmission probability per bite to birds, `alpha1`.
    pub transmission_to_birds: f64,
    /// Transmission probability per bite to mosquitoes, `alpha2`.
    pub transmission_to_mosquitoes: f64,
    /// Biting rate `beta` (1/time).
    pub biting_rate: f64,
    /// Bird recovery rate `gamma` (1/time).
    pub recovery_rate: f64,
    /// Mosquito death rate `d` (1/time).
    pub death_rate: f64,
    /// Bird carrying capacity `N1`.
    pub capacity_birds: f64,
    /// Mosquito carrying capacity `N2`.
    pub capacity_mosquitoes: f64,
    /// Boundary expanding capability `nu` in the Stefan condition.
    pub expansion: f64,
    /// Initial half-width `h0` of the infected habitat.
    pub half_width: f64,
}

impl RawParams {
    /// Configuration keys, in the order they are echoed in reports.
    pub const KEYS: [&'static str; 12] = [
        "D1", "D2", "mu", "alpha1", "alpha2", "beta", "gamma", "d", "N1", "N2", "nu", "h0",
    ];

    /// Field lookup by configuration key.
    pub fn get(&self, key: &str) -> Option<f64> {
        let p = self;
        Some(match key {
            "D1" => p.diffusion_birds,
            "D2" => p.diffusion_mosquitoes,
            "mu" => p.advection,
            "alpha1" => p.transmission_to_birds,
            "alpha2" => p.transmission_to_mosquitoes,
            "beta" => p.biting_rate,
            "gamma" => p.recovery_rate,
            "d" => p.death_rate,
            "N1" => p.capacity_birds,
            "N2" => p.capacity_mosquitoes,
            "nu" => p.expansion,
            "h0" => p.half_width,
            _ => return None,
        })
    }

    pub fn get_mut(&mut self, key: &str) -> Option<&mut f64> {
        let p = self;
        Some(match key {
            "D1" => &mut p.diffusion_birds,
            "D2" => &mut p.diffusion_mosquitoes,
            "mu" => &mut p.advection,
            "alpha1" => &mut p.transmission_to_birds,
            "alpha2" => &mut p.transmission_to_mosquitoes,
            "beta" => &mut p.biting_rate,
            "gamma" => &mut p.recovery_rate,
            "d" => &mut p.death_rate,
            "N1" => &mut p.capacity_birds,
            "N2" => &mut p.capacity_mosquitoes,
            "nu" => &mut p.expansion,
            "h0" => &mut p.half_width,
            _ => return None,
        })
    }

    /// Checks finiteness and sign constraints. `nu = 0` is accepted: it
    /// freezes the boundaries, which is a meaningful degenerate run.
    pub fn validate(&self) -> Result<()> {
        for key in Self::KEYS {
            let value = self.get(key).unwrap();
            if !value.is_finite() {
                return Err(invalid(key, format!("must be finite, got {value}")));
            }
        }
        let positive = [
            ("D1", self.diffusion_birds),
            ("D2", self.diffusion_mosquitoes),
            ("gamma", self.recovery_rate),
            ("d", self.death_rate),
            ("N1", self.capacity_birds),
            ("N2", self.capacity_mosquitoes),
            ("h0", self.half_width),
        ];
        for (key, value) in positive {
            if value <= 0.0 {
                return Err(invalid(key, format!("must be > 0, got {value}")));
            }
        }
        for (key, value) in [("beta", self.biting_rate), ("nu", self.expansion)] {
            if value < 0.0 {
                return Err(invalid(key, format!("must be >= 0, got {value}")));
            }
        }
        for (key, value) in [
            ("alpha1", self.transmission_to_birds),
            ("alpha2", self.transmission_to_mosquitoes),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(invalid(key, format!("must lie in [0, 1], got {value}")));
            }
        }
        Ok(())
    }
}

fn invalid(key: &str, reason: String) -> Error {
    // KEYS holds every accepted name; map back to the static str.
    let name = RawParams::KEYS.iter().find(|k| **k == key).copied().unwrap_or("?");
    Error::InvalidParam { name, reason }
}

/// Quantities computed once from [`RawParams`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedParams {
    /// `a1 = alpha1 beta / N1`.
    pub a1: f64,
    /// `a2 = alpha2 beta / N1`.
    pub a2: f64,
    /// `a1 a2 N1 N2`, the strength of the bird-mosquito infection loop.
    pub loop_gain: f64,
    /// Bulk reproduction ratio `a1 a2 N1 N2 / (gamma d)` (not square-rooted).
    pub r_bulk: f64,
    /// `2 sqrt(D1 (a1 a2 N1 N2 / d - gamma))`, zero when the radicand is negative.
    pub mu_star: f64,
    /// `2 sqrt(D1 (a1 a2 N1 N2 / gamma - d))`, the variant with `gamma` and `d` swapped.
    pub mu_star_swapped: f64,
    /// Endemic bird density; zero when no endemic state exists.
    pub u_star: f64,
    /// Endemic mosquito density; zero when no endemic state exists.
    pub v_star: f64,
    /// Far-field reproduction number `R0(mu)` at the configured advection.
    pub r0_far_field: f64,
}

/// Selects which critical-advection formula is used for hypothesis checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MuStarConvention {
    /// `2 sqrt(D1 (a1 a2 N1 N2 / d - gamma))`.
    #[default]
    Definition,
    /// `2 sqrt(D1 (a1 a2 N1 N2 / gamma - d))`.
    Swapped,
}

impl std::str::FromStr for MuStarConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "definition" => Ok(Self::Definition),
            "swapped" => Ok(Self::Swapped),
            other => Err(Error::Config(format!(
                "mu_star_convention must be `definition` or `swapped`, got `{other}`"
            ))),
        }
    }
}

/// Risk index with and without the outer square root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskIndex {
    pub value: f64,
    /// The ratio under the square root; crosses 1 exactly when `value` does.
    pub inner: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    /// `a1 a2 N1 N2 > gamma d`.
    pub high_risk: bool,
    /// `|mu| < mu*` for the selected convention.
    pub small_advection: bool,
}

impl Hypothesis {
    pub fn holds(&self) -> bool {
        self.high_risk && self.small_advection
    }
}

/// Validated raw parameters together with their derived quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Model {
    pub raw: RawParams,
    pub derived: DerivedParams,
}

impl Model {
    pub fn new(raw: RawParams) -> Result<Self> {
        let derived = derive_params(&raw)?;
        Ok(Self { raw, derived })
    }

    /// Risk index on `(left, right)` with advection `mu`.
    pub fn r0_closed_form(&self, left: f64, right: f64, mu: f64) -> Result<RiskIndex> {
        if !(left < right) {
            return Err(Error::Domain(format!(
                "interval requires left < right, got ({left}, {right})"
            )));
        }
        let k = (PI / (right - left)).powi(2);
        let d1 = self.raw.diffusion_birds;
        let bird = d1 * k + mu * mu / (4.0 * d1) + self.raw.recovery_rate;
        let mosquito = self.raw.diffusion_mosquitoes * k + self.raw.death_rate;
        let inner = self.derived.loop_gain / (bird * mosquito);
        Ok(RiskIndex {
            value: inner.sqrt(),
            inner,
        })
    }

    /// Spatial-temporal risk index at the current fronts.
    pub fn risk_index(&self, g: f64, h: f64, mu: f64) -> Result<RiskIndex> {
        self.r0_closed_form(g, h, mu)
    }

    /// Risk index on the initial habitat `(-h0, h0)` at the configured advection.
    pub fn initial_risk(&self) -> RiskIndex {
        let h0 = self.raw.half_width;
        self.r0_closed_form(-h0, h0, self.raw.advection)
            .expect("h0 > 0 is validated")
    }

    /// Far-field reproduction number `R0(mu)` for arbitrary advection.
    pub fn r0_far_field(&self, mu: f64) -> f64 {
        far_field(&self.raw, self.derived.loop_gain, mu)
    }

    pub fn mu_star(&self, convention: MuStarConvention) -> f64 {
        match convention {
            MuStarConvention::Definition => self.derived.mu_star,
            MuStarConvention::Swapped => self.derived.mu_star_swapped,
        }
    }

    pub fn check_hypothesis(&self, convention: MuStarConvention) -> Hypothesis {
        let loss = self.raw.recovery_rate * self.raw.death_rate;
        Hypothesis {
            high_risk: self.derived.loop_gain > loss,
            small_advection: self.raw.advection.abs() < self.mu_star(convention),
        }
    }

    /// Endemic equilibrium `(U*, V*)`, if the bulk system supports one.
    pub fn endemic(&self) -> Option<(f64, f64)> {
        (self.derived.loop_gain > self.raw.recovery_rate * self.raw.death_rate)
            .then_some((self.derived.u_star, self.derived.v_star))
    }

    /// Largest eigenvalue of the homogeneous system linearized at zero.
    pub fn linear_growth_rate(&self) -> f64 {
        let (gamma, d) = (self.raw.recovery_rate, self.raw.death_rate);
        let half_gap = 0.5 * (gamma - d);
        -0.5 * (gamma + d) + (half_gap * half_gap + self.derived.loop_gain).sqrt()
    }

    /// `2 sqrt(D1 r)` with `r` the linear growth rate; the natural unit of
    /// front speed for this system. Zero when there is no growth.
    pub fn speed_scale(&self) -> f64 {
        2.0 * (self.raw.diffusion_birds * self.linear_growth_rate().max(0.0)).sqrt()
    }

    /// Same model with a single raw parameter replaced.
    pub fn with_param(&self, key: &str, value: f64) -> Result<Self> {
        let mut raw = self.raw.clone();
        *raw.get_mut(key)
            .ok_or_else(|| Error::Config(format!("unknown parameter `{key}`")))? = value;
        Self::new(raw)
    }
}

fn far_field(raw: &RawParams, loop_gain: f64, mu: f64) -> f64 {
    let bird = mu * mu / (4.0 * raw.diffusion_birds) + raw.recovery_rate;
    (loop_gain / (bird * raw.death_rate)).sqrt()
}

pub fn derive_params(raw: &RawParams) -> Result<DerivedParams> {
    raw.validate()?;
    let (n1, n2) = (raw.capacity_birds, raw.capacity_mosquitoes);
    let (gamma, d) = (raw.recovery_rate, raw.death_rate);
    let d1 = raw.diffusion_birds;

    let a1 = raw.transmission_to_birds * raw.biting_rate / n1;
    let a2 = raw.transmission_to_mosquitoes * raw.biting_rate / n1;
    let loop_gain = a1 * a2 * n1 * n2;
    let excess = loop_gain - gamma * d;

    let (u_star, v_star) = if excess > 0.0 {
        (
            excess / (a1 * a2 * n2 + a2 * gamma),
            excess / (a1 * a2 * n1 + a1 * d),
        )
    } else {
        (0.0, 0.0)
    };

    let threshold = |radicand: f64| {
        if radicand > 0.0 {
            2.0 * radicand.sqrt()
        } else {
            0.0
        }
    };

    Ok(DerivedParams {
        a1,
        a2,
        loop_gain,
        r_bulk: loop_gain / (gamma * d),
        mu_star: threshold(d1 * (loop_gain / d - gamma)),
        mu_star_swapped: threshold(d1 * (loop_gain / gamma - d)),
        u_star,
        v_star,
        r0_far_field: far_field(raw, loop_gain, raw.advection),
    })
}

/// Reference parameter sets used throughout the tests and bundled configs.
pub mod presets {
    use super::RawParams;

    /// Low-transmission set (`beta = 0.3`, `d = 0.3`, `nu = 2`).
    pub fn low_transmission(advection: f64) -> RawParams {
        RawParams {
            diffusion_birds: 6.0,
            diffusion_mosquitoes: 1.0,
            advection,
            transmission_to_birds: 0.88,
            transmission_to_mosquitoes: 0.16,
            biting_rate: 0.3,
            recovery_rate: 0.6,
            death_rate: 0.3,
            capacity_birds: 1.0,
            capacity_mosquitoes: 20.0,
            expansion: 2.0,
            half_width: 15.0,
        }
    }

    /// High-transmission set (`beta = 0.5`, `d = 0.029`, `nu = 4`).
    pub fn high_transmission(advection: f64) -> RawParams {
        RawParams {
            biting_rate: 0.5,
            death_rate: 0.029,
            expansion: 4.0,
            ..low_transmission(advection)
        }
    }
}
