//! `key = value` run configuration.
//!
//! Blank lines and text after `#` are ignored. Every key must be known and
//! may appear once. The twelve model coefficients are required; everything
//! else has a default.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::dynamics::Thresholds;
use crate::error::{Error, Result};
use crate::model::{Model, MuStarConvention, RawParams};
use crate::stefan::{DtPolicy, InitialProfile, SimControls, StopCriteria, DEFAULT_NY};
use crate::wavespeed;
use crate::eigen;

/// Optional keys with their meaning, in documentation order.
pub const OPTIONAL_KEYS: [(&str, &str); 27] = [
    ("profile", "initial profile: `cosine` (default) or `custom`"),
    ("amp_u", "cosine amplitude of U0 (default 0.1 N1)"),
    ("amp_v", "cosine amplitude of V0 (default 0.1 N2)"),
    ("custom_u", "comma-separated interior samples of U0"),
    ("custom_v", "comma-separated interior samples of V0"),
    ("n_y", "interior grid points (default 401)"),
    ("dt", "`auto` (default) or a fixed step"),
    ("dt_safety", "auto-dt safety factor (default 0.5)"),
    ("dt_cap", "auto-dt upper bound (default 0.02)"),
    ("t_max", "horizon (default 200)"),
    ("snapshot_every", "snapshot cadence (default t_max / 50)"),
    ("extinct_below", "stop once both suprema fall below this level"),
    ("max_width", "stop once h - g exceeds this width"),
    ("mu_star_convention", "`definition` (default) or `swapped`"),
    ("decay_fraction", "vanishing level as a fraction of max(N1, N2) (default 1e-3)"),
    ("confirm_fraction", "confirmation window as a fraction of the horizon (default 0.1)"),
    ("stall_relative", "largest relative growth of h - g in the window (default 1e-3)"),
    ("capture_relative", "midpoint distance from (U*, V*) for spreading (default 0.02)"),
    ("motion_fraction", "front speed as a fraction of the speed scale (default 0.01)"),
    ("eigen_check", "compare numeric and closed-form risk at t = 0 (default true)"),
    ("eigen_n", "grid points for eigenvalue checks (default 401)"),
    ("speeds", "fit tail front speeds (default true)"),
    ("monitor", "run the comparison monitor against the ODE (default true)"),
    ("wave", "compute c_nu and the speed sandwich (default false)"),
    ("wave_S", "traveling-wave truncation length (default 40 sqrt(D1 / gamma))"),
    ("wave_n", "traveling-wave grid intervals (default 4001)"),
    ("out_dir", "output directory when --out-dir is not given"),
];

/// Raw key/value pairs, validated for known and unique keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

fn known(key: &str) -> bool {
    RawParams::KEYS.contains(&key) || OPTIONAL_KEYS.iter().any(|(k, _)| *k == key)
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    lineno + 1
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            if !known(key) {
                return Err(Error::Config(format!("line {}: unknown key `{key}`", lineno + 1)));
            }
            if value.is_empty() {
                return Err(Error::Config(format!("line {}: empty value for `{key}`", lineno + 1)));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        if entries.is_empty() {
            return Err(Error::Config("config is empty".into()));
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Sets `key`, which must be a known key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !known(key) {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Canonical text form; parses back to an equal map.
    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Analyses {
    pub eigen_check: bool,
    pub speeds: bool,
    pub monitor: bool,
    pub wave: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub raw: RawParams,
    pub profile: InitialProfile,
    pub controls: SimControls,
    pub convention: MuStarConvention,
    pub thresholds: Thresholds,
    pub analyses: Analyses,
    pub eigen_n: usize,
    /// `None` means [`wavespeed::default_length`].
    pub wave_length: Option<f64>,
    pub wave_n: usize,
    pub out_dir: Option<PathBuf>,
}

fn number(map: &ConfigMap, key: &str) -> Result<Option<f64>> {
    map.get(key)
        .map(|v| {
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("`{key}`: expected a number, got `{v}`")))
        })
        .transpose()
}

fn number_or(map: &ConfigMap, key: &str, default: f64) -> Result<f64> {
    Ok(number(map, key)?.unwrap_or(default))
}

fn count_or(map: &ConfigMap, key: &str, default: usize) -> Result<usize> {
    map.get(key).map_or(Ok(default), |v| {
        v.parse::<usize>()
            .map_err(|_| Error::Config(format!("`{key}`: expected a non-negative integer, got `{v}`")))
    })
}

fn flag_or(map: &ConfigMap, key: &str, default: bool) -> Result<bool> {
    match map.get(key) {
        None => Ok(default),
        Some("true") => Ok(true),
        Some("false") => Ok(false),
        Some(v) => Err(Error::Config(format!("`{key}`: expected true or false, got `{v}`"))),
    }
}

fn list(map: &ConfigMap, key: &str) -> Result<Vec<f64>> {
    let Some(v) = map.get(key) else {
        return Err(Error::Config(format!("custom profile needs `{key}`")));
    };
    v.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("`{key}`: bad sample `{}`", s.trim())))
        })
        .collect()
}

/// Parameter errors raised while building a run are configuration errors.
fn as_config(e: Error) -> Error {
    match e {
        Error::Domain(msg) => Error::Config(msg),
        other => other,
    }
}

impl RunConfig {
    pub fn from_map(map: &ConfigMap) -> Result<Self> {
        let mut raw = RawParams {
            diffusion_birds: 0.0,
            diffusion_mosquitoes: 0.0,
            advection: 0.0,
            transmission_to_birds: 0.0,
            transmission_to_mosquitoes: 0.0,
            biting_rate: 0.0,
            recovery_rate: 0.0,
            death_rate: 0.0,
            capacity_birds: 0.0,
            capacity_mosquitoes: 0.0,
            expansion: 0.0,
            half_width: 0.0,
        };
        let missing: Vec<&str> = RawParams::KEYS.iter().copied().filter(|k| map.get(k).is_none()).collect();
        if !missing.is_empty() {
            return Err(Error::Config(format!("missing required keys: {}", missing.join(", "))));
        }
        for key in RawParams::KEYS {
            *raw.get_mut(key).unwrap() = number(map, key)?.unwrap();
        }
        let model = Model::new(raw.clone())?;

        let profile = match map.get("profile").unwrap_or("cosine") {
            "cosine" => InitialProfile::Cosine {
                amp_u: number_or(map, "amp_u", 0.1 * raw.capacity_birds)?,
                amp_v: number_or(map, "amp_v", 0.1 * raw.capacity_mosquitoes)?,
            },
            "custom" => InitialProfile::Custom {
                u: list(map, "custom_u")?,
                v: list(map, "custom_v")?,
            },
            other => {
                return Err(Error::Config(format!(
                    "`profile`: expected cosine or custom, got `{other}`"
                )))
            }
        };
        profile.validate(&model)?;

        let dt = match map.get("dt").unwrap_or("auto") {
            "auto" => DtPolicy::Auto {
                safety: number_or(map, "dt_safety", 0.5)?,
                cap: number_or(map, "dt_cap", 0.02)?,
            },
            _ => DtPolicy::Fixed(number(map, "dt")?.unwrap()),
        };
        let controls = SimControls {
            n_y: count_or(map, "n_y", DEFAULT_NY)?,
            dt,
            t_max: number_or(map, "t_max", 200.0)?,
            snapshot_every: number(map, "snapshot_every")?,
            stop: StopCriteria {
                extinct_below: number(map, "extinct_below")?,
                max_width: number(map, "max_width")?,
            },
        };
        controls.validate().map_err(as_config)?;

        let convention = map
            .get("mu_star_convention")
            .map_or(Ok(MuStarConvention::default()), str::parse)?;

        let defaults = Thresholds::default();
        let thresholds = Thresholds {
            decay_fraction: number_or(map, "decay_fraction", defaults.decay_fraction)?,
            confirm_fraction: number_or(map, "confirm_fraction", defaults.confirm_fraction)?,
            stall_relative: number_or(map, "stall_relative", defaults.stall_relative)?,
            capture_relative: number_or(map, "capture_relative", defaults.capture_relative)?,
            motion_fraction: number_or(map, "motion_fraction", defaults.motion_fraction)?,
            speed_scale: None,
        };
        if !(thresholds.confirm_fraction > 0.0 && thresholds.confirm_fraction <= 1.0) {
            return Err(Error::Config("`confirm_fraction` must lie in (0, 1]".into()));
        }

        let analyses = Analyses {
            eigen_check: flag_or(map, "eigen_check", true)?,
            speeds: flag_or(map, "speeds", true)?,
            monitor: flag_or(map, "monitor", true)?,
            wave: flag_or(map, "wave", false)?,
        };
        let eigen_n = count_or(map, "eigen_n", 401)?;
        if eigen_n < eigen::MIN_GRID {
            return Err(Error::Config(format!("`eigen_n` must be >= {}", eigen::MIN_GRID)));
        }
        let wave_n = count_or(map, "wave_n", wavespeed::DEFAULT_POINTS)?;
        if wave_n < wavespeed::MIN_POINTS {
            return Err(Error::Config(format!("`wave_n` must be >= {}", wavespeed::MIN_POINTS)));
        }
        let wave_length = number(map, "wave_S")?;
        if wave_length.is_some_and(|s| !(s > 0.0)) {
            return Err(Error::Config("`wave_S` must be > 0".into()));
        }

        Ok(Self {
            raw,
            profile,
            controls,
            convention,
            thresholds,
            analyses,
            eigen_n,
            wave_length,
            wave_n,
            out_dir: map.get("out_dir").map(PathBuf::from),
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_map(&ConfigMap::parse(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_map(&ConfigMap::load(path)?)
    }

    pub fn model(&self) -> Result<Model> {
        Model::new(self.raw.clone())
    }
}
