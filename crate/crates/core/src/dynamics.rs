//! Outcome classification, spreading-speed fits and runtime monitors over
//! finished trajectories.
//!
//! Vanishing and spreading are limits as `t -> oo`; here they are decided
//! on a confirmation window at the end of a finite run, and a run that
//! meets neither test is reported as [`Verdict::Undetermined`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Model;
use crate::oracle::OdeTrajectory;
use crate::stefan::{Trajectory, OVERSHOOT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Vanishing,
    Spreading,
    Undetermined,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Vanishing => "Vanishing",
            Verdict::Spreading => "Spreading",
            Verdict::Undetermined => "Undetermined",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Decay level as a fraction of `max(N1, N2)`.
    pub decay_fraction: f64,
    /// Confirmation window as a fraction of the horizon.
    pub confirm_fraction: f64,
    /// Maximal relative growth of `h - g` over the window for vanishing.
    pub stall_relative: f64,
    /// Relative distance of the midpoint from `(U*, V*)` for spreading.
    pub capture_relative: f64,
    /// Minimal front speed as a fraction of `speed_scale`.
    pub motion_fraction: f64,
    /// Reference front speed; `None` uses [`Model::speed_scale`].
    pub speed_scale: Option<f64>,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            decay_fraction: 1e-3,
            confirm_fraction: 0.1,
            stall_relative: 1e-3,
            capture_relative: 0.02,
            motion_fraction: 0.01,
            speed_scale: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub sup_u: f64,
    pub sup_v: f64,
    pub width: f64,
    /// Mean `-g'` over the confirmation window.
    pub left_speed: f64,
    /// Mean `h'` over the confirmation window.
    pub right_speed: f64,
    pub risk: f64,
    pub risk_inner: f64,
    /// Final front velocities below `1e-4` of their peak.
    pub velocities_decayed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub verdict: Verdict,
    pub evidence: Evidence,
    /// Earliest end of a confirmation window meeting the verdict's test.
    pub t_decided: Option<f64>,
}

pub fn classify(traj: &Trajectory, model: &Model, thresholds: &Thresholds) -> Outcome {
    let n = traj.len();
    if n == 0 {
        return Outcome {
            verdict: Verdict::Undetermined,
            evidence: Evidence {
                sup_u: f64::NAN,
                sup_v: f64::NAN,
                width: f64::NAN,
                left_speed: f64::NAN,
                right_speed: f64::NAN,
                risk: f64::NAN,
                risk_inner: f64::NAN,
                velocities_decayed: false,
            },
            t_decided: None,
        };
    }
    let last = n - 1;
    let horizon = traj.horizon();
    let window = thresholds.confirm_fraction * horizon;
    let start = window_start(traj, horizon - window);

    let span = traj.times[last] - traj.times[start];
    let (left_speed, right_speed) = if span > 0.0 {
        (
            (traj.g[start] - traj.g[last]) / span,
            (traj.h[last] - traj.h[start]) / span,
        )
    } else {
        (0.0, 0.0)
    };
    let peak_velocity = traj
        .gprime
        .iter()
        .chain(&traj.hprime)
        .fold(0.0f64, |a, v| a.max(v.abs()));
    let final_velocity = traj.gprime[last].abs().max(traj.hprime[last].abs());
    let evidence = Evidence {
        sup_u: traj.sup_u[last],
        sup_v: traj.sup_v[last],
        width: traj.width(last),
        left_speed,
        right_speed,
        risk: traj.risk[last],
        risk_inner: traj.risk_inner[last],
        velocities_decayed: final_velocity <= 1e-4 * peak_velocity,
    };

    if traj.sup_u[0] == 0.0 && traj.sup_v[0] == 0.0 {
        // Identically zero data stays zero.
        return Outcome {
            verdict: Verdict::Vanishing,
            evidence,
            t_decided: Some(traj.times[0]),
        };
    }

    let raw = &model.raw;
    let decay = thresholds.decay_fraction * raw.capacity_birds.max(raw.capacity_mosquitoes);
    let decayed = |k: usize| traj.sup_u[k] < decay && traj.sup_v[k] < decay;
    let stalled = |from: usize, to: usize| {
        let w0 = traj.width(from);
        (traj.width(to) - w0) / w0 < thresholds.stall_relative
    };

    let motion = thresholds.motion_fraction * thresholds.speed_scale.unwrap_or(model.speed_scale());
    let endemic = model.endemic();
    let captured = |k: usize| match endemic {
        Some((us, vs)) => {
            ((traj.mid_u[k] - us) / us).abs() <= thresholds.capture_relative
                && ((traj.mid_v[k] - vs) / vs).abs() <= thresholds.capture_relative
                && -traj.gprime[k] >= motion
                && traj.hprime[k] >= motion
        }
        None => false,
    };

    let vanishing = first_confirmed(traj, window, &decayed, Some(&stalled));
    let spreading = first_confirmed(traj, window, &captured, None);

    let holds_at_end = |test: &dyn Fn(usize) -> bool, extra: Option<&dyn Fn(usize, usize) -> bool>| {
        (start..=last).all(test) && extra.map_or(true, |f| f(start, last))
    };

    let (verdict, t_decided) = if holds_at_end(&decayed, Some(&stalled)) {
        (Verdict::Vanishing, vanishing)
    } else if holds_at_end(&captured, None) {
        (Verdict::Spreading, spreading)
    } else {
        (Verdict::Undetermined, None)
    };
    Outcome {
        verdict,
        evidence,
        t_decided,
    }
}

/// First sample index with `times[k] >= t`.
fn window_start(traj: &Trajectory, t: f64) -> usize {
    traj.times.partition_point(|s| *s < t).min(traj.len() - 1)
}

/// Earliest time `t_e` such that `test` holds on every sample in
/// `[t_e - window, t_e]` (and `pair(start, end)` holds, if given).
fn first_confirmed(
    traj: &Trajectory,
    window: f64,
    test: &dyn Fn(usize) -> bool,
    pair: Option<&dyn Fn(usize, usize) -> bool>,
) -> Option<f64> {
    let mut last_violation: Option<f64> = None;
    for k in 0..traj.len() {
        let t = traj.times[k];
        if !test(k) {
            last_violation = Some(t);
            continue;
        }
        let from = t - window;
        if from < traj.times[0] {
            continue;
        }
        if last_violation.is_some_and(|v| v >= from) {
            continue;
        }
        let start = window_start(traj, from);
        if pair.map_or(true, |f| f(start, k)) {
            return Some(t);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedEstimate {
    /// Slope of `-g(t)` over the tail window.
    pub left_speed: f64,
    /// Slope of `h(t)` over the tail window.
    pub right_speed: f64,
    pub window: (f64, f64),
    /// Largest deviation of either front from its linear fit, divided by
    /// the window length (a speed).
    pub fit_residual: f64,
    /// Set when a fit residual exceeds 5% of its slope.
    pub warning: Option<String>,
}

/// Fraction of the horizon used for the tail fit.
pub const TAIL_FRACTION: f64 = 0.3;

/// Least-squares front speeds over the final 30% of the run.
pub fn spreading_speeds(traj: &Trajectory) -> Result<SpeedEstimate> {
    if traj.len() < 2 {
        return Err(Error::Domain("speed fit needs at least two samples".into()));
    }
    let horizon = traj.horizon();
    let t0 = traj.times[0];
    let from = horizon - TAIL_FRACTION * (horizon - t0);
    let start = window_start(traj, from).min(traj.len() - 2);
    let ts = &traj.times[start..];
    let span = horizon - ts[0];
    let left: Vec<f64> = traj.g[start..].iter().map(|g| -g).collect();
    let (left_speed, left_dev) = linear_fit(ts, &left);
    let (right_speed, right_dev) = linear_fit(ts, &traj.h[start..]);
    let (left_res, right_res) = (left_dev / span, right_dev / span);

    let mut notes = Vec::new();
    for (side, slope, res) in [("left", left_speed, left_res), ("right", right_speed, right_res)] {
        if res > 0.05 * slope.abs() {
            notes.push(format!(
                "{side} fit residual {res:.3e} exceeds 5% of slope {slope:.3e}; asymptotic regime not reached"
            ));
        }
    }
    Ok(SpeedEstimate {
        left_speed,
        right_speed,
        window: (ts[0], horizon),
        fit_residual: left_res.max(right_res),
        warning: (!notes.is_empty()).then(|| notes.join("; ")),
    })
}

/// Slope and max absolute residual of the least-squares line through `(t, x)`.
fn linear_fit(t: &[f64], x: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let xm = x.iter().sum::<f64>() / n;
    let (sxy, sxx) = t.iter().zip(x).fold((0.0, 0.0), |(a, b), (ti, xi)| {
        (a + (ti - tm) * (xi - xm), b + (ti - tm) * (ti - tm))
    });
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let residual = t
        .iter()
        .zip(x)
        .map(|(ti, xi)| (xi - (xm + slope * (ti - tm))).abs())
        .fold(0.0, f64::max);
    (slope, residual)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorReport {
    /// `max_t (sup_y W - u(t))`.
    pub max_excess_u: f64,
    /// `max_t (sup_y Z - v(t))`.
    pub max_excess_v: f64,
    pub tolerance_u: f64,
    pub tolerance_v: f64,
    /// `0 <= W <= N1` and `0 <= Z <= N2` at every recorded step.
    pub bounds_ok: bool,
    pub pass: bool,
}

/// Compares the PDE suprema against the homogeneous ODE upper solution
/// sampled on the same times.
pub fn comparison_monitor(
    traj: &Trajectory,
    model: &Model,
    oracle: &OdeTrajectory,
) -> Result<MonitorReport> {
    if oracle.times.len() != traj.len()
        || oracle
            .times
            .iter()
            .zip(&traj.times)
            .any(|(a, b)| (a - b).abs() > 1e-9 * (1.0 + b.abs()))
    {
        return Err(Error::Domain(
            "oracle trajectory must be sampled on the simulation times".into(),
        ));
    }
    let (n1, n2) = (model.raw.capacity_birds, model.raw.capacity_mosquitoes);
    let excess = |sup: &[f64], bound: &[f64]| {
        sup.iter()
            .zip(bound)
            .map(|(s, b)| s - b)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let max_excess_u = excess(&traj.sup_u, &oracle.u);
    let max_excess_v = excess(&traj.sup_v, &oracle.v);
    let bounds_ok = (0..traj.len()).all(|k| {
        traj.inf_u[k] >= 0.0
            && traj.inf_v[k] >= 0.0
            && traj.sup_u[k] <= n1 * (1.0 + OVERSHOOT)
            && traj.sup_v[k] <= n2 * (1.0 + OVERSHOOT)
    });
    let (tolerance_u, tolerance_v) = (1e-4 * n1, 1e-4 * n2);
    Ok(MonitorReport {
        max_excess_u,
        max_excess_v,
        tolerance_u,
        tolerance_v,
        bounds_ok,
        pass: bounds_ok && max_excess_u <= tolerance_u && max_excess_v <= tolerance_v,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub c_nu: f64,
    pub slack: f64,
    /// `c_nu (1 + slack) - left_speed`; nonnegative when the left bound holds.
    pub left_margin: f64,
    /// `right_speed (1 + slack) - c_nu`; nonnegative when the right bound holds.
    pub right_margin: f64,
    pub left_ok: bool,
    pub right_ok: bool,
    pub pass: bool,
}

pub const SANDWICH_SLACK: f64 = 0.05;

/// Checks `left_speed <= c_nu <= right_speed` with relative slack.
pub fn speed_sandwich_check(speeds: &SpeedEstimate, c_nu: f64) -> SandwichReport {
    let slack = SANDWICH_SLACK;
    let left_margin = c_nu * (1.0 + slack) - speeds.left_speed;
    let right_margin = speeds.right_speed * (1.0 + slack) - c_nu;
    let (left_ok, right_ok) = (left_margin >= 0.0, right_margin >= 0.0);
    SandwichReport {
        c_nu,
        slack,
        left_margin,
        right_margin,
        left_ok,
        right_ok,
        pass: left_ok && right_ok,
    }
}

/// `h` non-decreasing and `g` non-increasing at every step.
pub fn fronts_monotone(traj: &Trajectory) -> bool {
    traj.h.windows(2).all(|w| w[1] >= w[0]) && traj.g.windows(2).all(|w| w[1] <= w[0])
}

/// Risk index non-decreasing in time up to `tol`.
pub fn risk_monotone(traj: &Trajectory, tol: f64) -> bool {
    traj.risk.windows(2).all(|w| w[1] >= w[0] - tol)
}

/// Largest relative mirror asymmetry over the run: `| |g| - h | / h` on every
/// step and `|W(y) - W(-y)| / sup W` on every snapshot (same for `Z`).
pub fn symmetry_defect(traj: &Trajectory) -> f64 {
    let fronts = traj
        .g
        .iter()
        .zip(&traj.h)
        .map(|(g, h)| (g.abs() - h).abs() / h)
        .fold(0.0, f64::max);
    let fields = traj
        .snapshots
        .iter()
        .map(|s| {
            let n = s.n_y();
            let (su, sv) = s.sup();
            (0..n)
                .map(|j| {
                    let du = if su > 0.0 { (s.w[j] - s.w[n - 1 - j]).abs() / su } else { 0.0 };
                    let dv = if sv > 0.0 { (s.z[j] - s.z[n - 1 - j]).abs() / sv } else { 0.0 };
                    du.max(dv)
                })
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    fronts.max(fields)
}
