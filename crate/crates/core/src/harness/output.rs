//! CSV and JSON writers. Numbers use Rust's shortest round-trip formatting,
//! so identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{RunReport, SweepTable, ThresholdReport, WaveReport};
use crate::error::Result;
use crate::model::MuStarConvention;
use crate::stefan::{FieldState, Trajectory};

pub const TRAJECTORY_HEADER: &str = "t,g,h,gprime,hprime,supU,supV,riskF_sqrt,riskF_inner";
pub const SNAPSHOT_HEADER: &str = "y,x,U,V";
pub const SWEEP_HEADER: &str = "value,status,verdict,riskF0_sqrt,riskF0_inner,g,h,supU,supV,left_speed,right_speed,t_decided";

/// Shortest round-trip form; scientific notation outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(96 * traj.len());
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for k in 0..traj.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            num(traj.times[k]),
            num(traj.g[k]),
            num(traj.h[k]),
            num(traj.gprime[k]),
            num(traj.hprime[k]),
            num(traj.sup_u[k]),
            num(traj.sup_v[k]),
            num(traj.risk[k]),
            num(traj.risk_inner[k])
        );
    }
    out
}

/// Snapshot including the boundary nodes `y = -1` and `y = 1`.
pub fn snapshot_csv(state: &FieldState) -> String {
    let mut out = String::new();
    out.push_str(SNAPSHOT_HEADER);
    out.push('\n');
    let n = state.n_y();
    let _ = writeln!(out, "-1,{},0,0", num(state.g));
    for j in 0..n {
        let y = state.y(j);
        let _ = writeln!(
            out,
            "{},{},{},{}",
            num(y),
            num(state.x_of(y)),
            num(state.w[j]),
            num(state.z[j])
        );
    }
    let _ = writeln!(out, "1,{},0,0", num(state.h));
    out
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in &table.rows {
        let status = match &r.failure {
            None => "ok".to_string(),
            Some(msg) => format!("FAILED: {}", msg.replace([',', '\n'], ";")),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            num(r.value),
            status,
            r.verdict.map_or_else(String::new, |v| v.to_string()),
            opt(r.risk_initial.map(|x| x.value)),
            opt(r.risk_initial.map(|x| x.inner)),
            opt(r.final_g),
            opt(r.final_h),
            opt(r.sup_u),
            opt(r.sup_v),
            opt(r.left_speed),
            opt(r.right_speed),
            opt(r.t_decided)
        );
    }
    out
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes the trajectory, snapshots and `summary.json` into `dir` and
/// records the file names in the summary.
pub fn write_run(report: &mut RunReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut files = vec!["trajectory.csv".to_string()];
    fs::write(dir.join("trajectory.csv"), trajectory_csv(&report.trajectory))?;
    for (k, snap) in report.trajectory.snapshots.iter().enumerate() {
        let name = format!("snapshot_{k:04}.csv");
        fs::write(dir.join(&name), snapshot_csv(snap))?;
        files.push(name);
    }
    files.push("summary.json".into());
    report.summary.files = files;
    fs::write(dir.join("summary.json"), json(&report.summary))?;
    Ok(())
}

pub fn write_sweep(table: &SweepTable, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("sweep.csv"), sweep_csv(table))?;
    Ok(())
}

pub fn write_thresholds(report: &ThresholdReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("thresholds.json"), json(report))?;
    Ok(())
}

pub fn write_wave(report: &WaveReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let p = &report.profile;
    let mut csv = String::from("s,u,v\n");
    for i in 0..p.s_grid.len() {
        let _ = writeln!(csv, "{},{},{}", num(p.s_grid[i]), num(p.u[i]), num(p.v[i]));
    }
    fs::write(dir.join("wave_profile.csv"), csv)?;
    fs::write(dir.join("wave.json"), json(report))?;
    Ok(())
}

/// Plain-text threshold report, one `name = value` per line.
pub fn thresholds_text(r: &ThresholdReport) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(out, "{k:<22} = {v}");
    };
    line("a1", r.a1.to_string());
    line("a2", r.a2.to_string());
    line("R_bulk", format!("{:.6}", r.r_bulk));
    line("mu_star_definition", format!("{:.6}", r.mu_star_definition));
    line("mu_star_swapped", format!("{:.6}", r.mu_star_swapped));
    line("R0F(0)_sqrt", format!("{:.6}", r.risk_initial.value));
    line("R0F(0)_inner", format!("{:.6}", r.risk_initial.inner));
    line("R0F(0)_sqrt_mu0", format!("{:.6}", r.risk_initial_mu0.value));
    line("R0F(0)_inner_mu0", format!("{:.6}", r.risk_initial_mu0.inner));
    line("R0_far_field", format!("{:.6}", r.r0_far_field));
    match r.endemic {
        Some((u, v)) => {
            line("U*", format!("{u:.6}"));
            line("V*", format!("{v:.6}"));
        }
        None => line("endemic", "none".into()),
    }
    line("high_risk", r.hypothesis.high_risk.to_string());
    let convention = match r.convention {
        MuStarConvention::Definition => "definition",
        MuStarConvention::Swapped => "swapped",
    };
    line("mu_star_convention", convention.into());
    line("small_advection", r.hypothesis.small_advection.to_string());
    match (&r.eigen, &r.eigen_note) {
        (Some(e), _) => {
            line("R0_numeric", format!("{:.6}", e.r0_numeric));
            line("R0_numeric_gap", format!("{:.3e}", e.relative_gap));
            line("lambda0", format!("{:.6e}", e.lambda0));
        }
        (None, Some(note)) => line("R0_numeric", format!("unavailable ({note})")),
        (None, None) => {}
    }
    out
}
