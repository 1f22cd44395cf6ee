//! Run orchestration behind the `wnv` command line: single runs, parameter
//! sweeps, threshold reports and traveling-wave speeds.

pub mod config;
pub mod output;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{
    classify, comparison_monitor, speed_sandwich_check, spreading_speeds, MonitorReport, Outcome,
    SandwichReport, SpeedEstimate, Verdict,
};
use crate::eigen::{principal_lambda0, r0_numeric};
use crate::error::{Error, Result};
use crate::model::{DerivedParams, Hypothesis, Model, MuStarConvention, RawParams, RiskIndex};
use crate::oracle::homogeneous_ode;
use crate::stefan::{simulate, Trajectory};
use crate::wavespeed::{self, WaveProfile};

pub use config::{ConfigMap, RunConfig};

/// Numeric versus closed-form risk index on the initial interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenCheck {
    pub n_grid: usize,
    pub r0_numeric: f64,
    pub closed_form: f64,
    /// `|numeric - closed| / closed`; the closed form is exact only at `mu = 0`.
    pub relative_gap: f64,
    pub lambda0: f64,
}

fn eigen_check(model: &Model, n: usize) -> Result<EigenCheck> {
    let h0 = model.raw.half_width;
    let mu = model.raw.advection;
    let numeric = r0_numeric(model, -h0, h0, mu, n)?;
    let lambda = principal_lambda0(model, -h0, h0, mu, n)?;
    let closed = model.initial_risk().value;
    Ok(EigenCheck {
        n_grid: n,
        r0_numeric: numeric.value,
        closed_form: closed,
        relative_gap: (numeric.value - closed).abs() / closed,
        lambda0: lambda.value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveSummary {
    pub c_nu: f64,
    pub c_upper: Option<f64>,
    pub sandwich: Option<SandwichReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub params: RawParams,
    pub derived: DerivedParams,
    pub convention: MuStarConvention,
    pub hypothesis: Hypothesis,
    /// Risk index on `(-h0, h0)`, identical to `Model::risk_index(-h0, h0, mu)`.
    pub risk_initial: RiskIndex,
    pub steps: usize,
    pub horizon: f64,
    pub final_g: f64,
    pub final_h: f64,
    pub outcome: Outcome,
    pub eigen: Option<EigenCheck>,
    pub speeds: Option<SpeedEstimate>,
    pub monitor: Option<MonitorReport>,
    pub wave: Option<WaveSummary>,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: RunConfig,
    pub model: Model,
    pub trajectory: Trajectory,
    pub summary: RunSummary,
}

/// Simulates one configuration and runs the enabled analyses. Failures of
/// optional analyses become warnings; only the simulation itself can fail.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let model = config.model()?;
    let trajectory = simulate(&model, &config.profile, &config.controls)?;
    let outcome = classify(&trajectory, &model, &config.thresholds);
    let mut warnings = Vec::new();

    let hypothesis = model.check_hypothesis(config.convention);
    if !hypothesis.high_risk {
        warnings.push("a1 a2 N1 N2 <= gamma d: no endemic state".into());
    }
    if !hypothesis.small_advection {
        warnings.push(format!(
            "|mu| = {} is not below mu* = {} ({:?} convention)",
            model.raw.advection.abs(),
            model.mu_star(config.convention),
            config.convention
        ));
    }

    let eigen = if config.analyses.eigen_check {
        eigen_check(&model, config.eigen_n)
            .map_err(|e| warnings.push(format!("eigen check skipped: {e}")))
            .ok()
    } else {
        None
    };

    let speeds = if config.analyses.speeds {
        spreading_speeds(&trajectory)
            .map_err(|e| warnings.push(format!("speed fit skipped: {e}")))
            .ok()
    } else {
        None
    };
    if let Some(w) = speeds.as_ref().and_then(|s| s.warning.clone()) {
        warnings.push(w);
    }

    let monitor = if config.analyses.monitor {
        homogeneous_ode(&model, config.profile.sup(), &trajectory.times, 0.01)
            .and_then(|ode| comparison_monitor(&trajectory, &model, &ode))
            .map_err(|e| warnings.push(format!("comparison monitor skipped: {e}")))
            .ok()
    } else {
        None
    };
    if monitor.as_ref().is_some_and(|m| !m.pass) {
        warnings.push("comparison monitor failed".into());
    }

    let wave = if config.analyses.wave {
        let length = config.wave_length.unwrap_or_else(|| wavespeed::default_length(&model));
        wavespeed::c_nu(&model, model.raw.expansion, length, config.wave_n)
            .map(|w| WaveSummary {
                c_nu: w.c_nu,
                c_upper: w.c_upper,
                sandwich: speeds.as_ref().map(|s| speed_sandwich_check(s, w.c_nu)),
            })
            .map_err(|e| warnings.push(format!("wave speed skipped: {e}")))
            .ok()
    } else {
        None
    };

    let last = trajectory.len() - 1;
    let summary = RunSummary {
        params: model.raw.clone(),
        derived: model.derived.clone(),
        convention: config.convention,
        hypothesis,
        risk_initial: model.initial_risk(),
        steps: last,
        horizon: trajectory.horizon(),
        final_g: trajectory.g[last],
        final_h: trajectory.h[last],
        outcome,
        eigen,
        speeds,
        monitor,
        wave,
        warnings,
        files: Vec::new(),
    };
    Ok(RunReport {
        config: config.clone(),
        model,
        trajectory,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    /// `None` on success, otherwise the failure message.
    pub failure: Option<String>,
    pub verdict: Option<Verdict>,
    pub risk_initial: Option<RiskIndex>,
    pub final_g: Option<f64>,
    pub final_h: Option<f64>,
    pub sup_u: Option<f64>,
    pub sup_v: Option<f64>,
    pub left_speed: Option<f64>,
    pub right_speed: Option<f64>,
    pub t_decided: Option<f64>,
}

impl SweepRow {
    fn failed(value: f64, e: &Error) -> Self {
        Self {
            value,
            failure: Some(e.to_string()),
            verdict: None,
            risk_initial: None,
            final_g: None,
            final_h: None,
            sup_u: None,
            sup_v: None,
            left_speed: None,
            right_speed: None,
            t_decided: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub param: String,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.failure.is_some()).count()
    }
}

fn sweep_row(base: &ConfigMap, param: &str, value: f64) -> SweepRow {
    let mut map = base.clone();
    let outcome = map
        .set(param, &value.to_string())
        .and_then(|_| RunConfig::from_map(&map))
        .and_then(|cfg| run(&cfg));
    match outcome {
        Ok(report) => {
            let t = &report.trajectory;
            let last = t.len() - 1;
            let s = &report.summary;
            SweepRow {
                value,
                failure: None,
                verdict: Some(s.outcome.verdict),
                risk_initial: Some(s.risk_initial),
                final_g: Some(t.g[last]),
                final_h: Some(t.h[last]),
                sup_u: Some(t.sup_u[last]),
                sup_v: Some(t.sup_v[last]),
                left_speed: s.speeds.as_ref().map(|x| x.left_speed),
                right_speed: s.speeds.as_ref().map(|x| x.right_speed),
                t_decided: s.outcome.t_decided,
            }
        }
        Err(e) => SweepRow::failed(value, &e),
    }
}

/// Runs `base` once per value of `param` on `jobs` worker threads. Rows
/// come back in input order; failed runs are kept as failure rows.
pub fn sweep(base: &ConfigMap, param: &str, values: &[f64], jobs: usize) -> Result<SweepTable> {
    if !RawParams::KEYS.contains(&param) && !config::OPTIONAL_KEYS.iter().any(|(k, _)| *k == param) {
        return Err(Error::Config(format!("cannot sweep unknown key `{param}`")));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
    let rows = pool.install(|| values.par_iter().map(|v| sweep_row(base, param, *v)).collect());
    Ok(SweepTable {
        param: param.to_string(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub params: RawParams,
    pub a1: f64,
    pub a2: f64,
    pub r_bulk: f64,
    pub mu_star_definition: f64,
    pub mu_star_swapped: f64,
    pub convention: MuStarConvention,
    /// Risk index on `(-h0, h0)` at the configured advection.
    pub risk_initial: RiskIndex,
    /// Risk index on `(-h0, h0)` without advection.
    pub risk_initial_mu0: RiskIndex,
    pub r0_far_field: f64,
    pub endemic: Option<(f64, f64)>,
    pub hypothesis: Hypothesis,
    pub eigen: Option<EigenCheck>,
    pub eigen_note: Option<String>,
}

/// Closed-form thresholds plus a numeric eigenvalue check; no simulation.
pub fn report_thresholds(config: &RunConfig) -> Result<ThresholdReport> {
    let model = config.model()?;
    let h0 = model.raw.half_width;
    let d = &model.derived;
    let (eigen, eigen_note) = match eigen_check(&model, config.eigen_n) {
        Ok(e) => (Some(e), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(ThresholdReport {
        params: model.raw.clone(),
        a1: d.a1,
        a2: d.a2,
        r_bulk: d.r_bulk,
        mu_star_definition: d.mu_star,
        mu_star_swapped: d.mu_star_swapped,
        convention: config.convention,
        risk_initial: model.initial_risk(),
        risk_initial_mu0: model.risk_index(-h0, h0, 0.0)?,
        r0_far_field: d.r0_far_field,
        endemic: model.endemic(),
        hypothesis: model.check_hypothesis(config.convention),
        eigen,
        eigen_note,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveReport {
    pub nu: f64,
    pub length: f64,
    pub n: usize,
    pub c_nu: f64,
    pub c_upper: Option<f64>,
    pub uprime0: f64,
    pub newton_residual: f64,
    /// Bracketing scan as `(c, nu u'(0) - c)`; `NaN` marks an inadmissible speed.
    pub samples: Vec<(f64, f64)>,
    #[serde(skip)]
    pub profile: WaveProfile,
}

/// `c_nu` for the configured `nu`.
pub fn report_wavespeed(config: &RunConfig) -> Result<WaveReport> {
    let model = config.model()?;
    let length = config.wave_length.unwrap_or_else(|| wavespeed::default_length(&model));
    let w = wavespeed::c_nu(&model, model.raw.expansion, length, config.wave_n)?;
    Ok(WaveReport {
        nu: model.raw.expansion,
        length,
        n: config.wave_n,
        c_nu: w.c_nu,
        c_upper: w.c_upper,
        uprime0: w.profile.uprime0,
        newton_residual: w.profile.newton_residual,
        samples: w.samples,
        profile: w.profile,
    })
}

/// Bundled configurations as `(name, text)`.
pub const BUNDLED: [(&str, &str); 3] = [
    ("vanishing", include_str!("../../configs/vanishing.cfg")),
    ("spreading", include_str!("../../configs/spreading.cfg")),
    ("advection", include_str!("../../configs/advection.cfg")),
];

pub fn bundled(name: &str) -> Option<RunConfig> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| RunConfig::parse(text).expect("bundled configs parse"))
}
