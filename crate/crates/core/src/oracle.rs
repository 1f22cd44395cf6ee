//! Independent reference solutions used to cross-check the main solvers.
//!
//! [`homogeneous_ode`] integrates the spatially constant system with RK4; by
//! comparison it bounds the PDE solution from above when started from the
//! suprema of the initial data. [`reference_explicit_pde`] is a fully
//! explicit, finer-grid integrator of the moving-boundary problem sharing no
//! stepping code with [`crate::stefan`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Model;
use crate::stefan::{FieldState, InitialProfile, Trajectory, DEFAULT_NY};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OdeTrajectory {
    pub times: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

fn ode_rhs(model: &Model, u: f64, v: f64) -> (f64, f64) {
    let raw = &model.raw;
    let (a1, a2) = (model.derived.a1, model.derived.a2);
    (
        a1 * (raw.capacity_birds - u) * v - raw.recovery_rate * u,
        a2 * (raw.capacity_mosquitoes - v) * u - raw.death_rate * v,
    )
}

fn rk4(model: &Model, (u, v): (f64, f64), dt: f64) -> (f64, f64) {
    let k1 = ode_rhs(model, u, v);
    let k2 = ode_rhs(model, u + 0.5 * dt * k1.0, v + 0.5 * dt * k1.1);
    let k3 = ode_rhs(model, u + 0.5 * dt * k2.0, v + 0.5 * dt * k2.1);
    let k4 = ode_rhs(model, u + dt * k3.0, v + dt * k3.1);
    (
        u + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        v + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    )
}

/// Solves `u' = a1 (N1 - u) v - gamma u`, `v' = a2 (N2 - v) u - d v` and
/// samples it at `times` (non-decreasing, starting at the initial time),
/// using RK4 substeps no longer than `max_dt`.
pub fn homogeneous_ode(model: &Model, initial: (f64, f64), times: &[f64], max_dt: f64) -> Result<OdeTrajectory> {
    if !(max_dt > 0.0 && max_dt.is_finite()) {
        return Err(Error::Domain(format!("max_dt must be > 0, got {max_dt}")));
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Domain("sample times must be non-decreasing".into()));
    }
    let mut out = OdeTrajectory::default();
    let Some(&t0) = times.first() else {
        return Ok(out);
    };
    let mut state = initial;
    let mut t = t0;
    for &target in times {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / max_dt).ceil() as usize;
            let dt = span / steps as f64;
            for _ in 0..steps {
                state = rk4(model, state, dt);
            }
        }
        t = target;
        for (field, v) in [("u", state.0), ("v", state.1)] {
            if !v.is_finite() {
                return Err(Error::NonFinite { t, field });
            }
        }
        out.times.push(t);
        out.u.push(state.0);
        out.v.push(state.1);
    }
    Ok(out)
}

/// Uniformly sampled ODE solution on `[0, t_max]` with step `dt`.
pub fn homogeneous_ode_uniform(model: &Model, initial: (f64, f64), t_max: f64, dt: f64) -> Result<OdeTrajectory> {
    if !(dt > 0.0 && t_max >= 0.0) {
        return Err(Error::Domain(format!("need dt > 0 and t_max >= 0, got {dt}, {t_max}")));
    }
    let steps = (t_max / dt).round().max(1.0) as usize;
    let times: Vec<f64> = (0..=steps).map(|k| t_max * k as f64 / steps as f64).collect();
    homogeneous_ode(model, initial, &times, dt)
}

/// Smallest grid accepted by [`reference_explicit_pde`]: twice as fine as
/// the default production grid.
pub const MIN_REFERENCE_NY: usize = 2 * (DEFAULT_NY + 1) - 1;

/// Fully explicit forward-Euler solution on a fine grid, with central
/// differences for every spatial term. Records every step and keeps
/// snapshots at `snapshot_every` intervals and at `t_max`.
pub fn reference_explicit_pde(
    model: &Model,
    profile: &InitialProfile,
    t_max: f64,
    n_y: usize,
    snapshot_every: f64,
) -> Result<Trajectory> {
    if n_y < MIN_REFERENCE_NY {
        return Err(Error::Domain(format!(
            "reference grid needs n_y >= {MIN_REFERENCE_NY}, got {n_y}"
        )));
    }
    if !(t_max > 0.0 && snapshot_every > 0.0) {
        return Err(Error::Domain("t_max and snapshot_every must be > 0".into()));
    }
    let raw = &model.raw;
    let (a1, a2) = (model.derived.a1, model.derived.a2);
    let (d1, d2) = (raw.diffusion_birds, raw.diffusion_mosquitoes);
    let (n1, n2) = (raw.capacity_birds, raw.capacity_mosquitoes);
    let (mu, nu) = (raw.advection, raw.expansion);

    let mut s = profile.initial_state(model, n_y)?;
    let n = n_y;
    let dy = 2.0 / (n + 1) as f64;
    let ys: Vec<f64> = (1..=n).map(|j| -1.0 + j as f64 * dy).collect();

    let fronts = |s: &FieldState| {
        let sa = 2.0 / (s.h - s.g);
        let wl = (4.0 * s.w[0] - s.w[1]) / (2.0 * dy);
        let wr = (s.w[n - 2] - 4.0 * s.w[n - 1]) / (2.0 * dy);
        (-nu * sa * wl, -nu * sa * wr)
    };

    let mut traj = Trajectory::default();
    let mut flux = fronts(&s);
    traj.record(model, &s, flux);
    traj.snapshots.push(s.clone());
    let mut next_snapshot = snapshot_every;
    let mut w_new = vec![0.0; n];
    let mut z_new = vec![0.0; n];

    while s.t < t_max {
        let width = s.h - s.g;
        let sa = 2.0 / width;
        let a = sa * sa;
        let (gp, hp) = flux;
        let b_max = ((hp - gp).abs() + (hp + gp).abs()) / width;
        let diffusive = 0.4 * dy * dy / (d1.max(d2) * a);
        let advective = 0.5 * dy / (mu.abs() * sa + b_max + 1e-12);
        let mut dt = diffusive.min(advective);
        if s.t + dt > t_max {
            dt = t_max - s.t;
        }
        for j in 0..n {
            let b = -(ys[j] * (hp - gp) + (hp + gp)) / width;
            let at = |f: &[f64], k: isize| -> f64 {
                if k < 0 || k as usize >= n { 0.0 } else { f[k as usize] }
            };
            let jj = j as isize;
            let (w, z) = (s.w[j], s.z[j]);
            let (wl, wr) = (at(&s.w, jj - 1), at(&s.w, jj + 1));
            let (zl, zr) = (at(&s.z, jj - 1), at(&s.z, jj + 1));
            let w_yy = (wl - 2.0 * w + wr) / (dy * dy);
            let z_yy = (zl - 2.0 * z + zr) / (dy * dy);
            let w_y = (wr - wl) / (2.0 * dy);
            let z_y = (zr - zl) / (2.0 * dy);
            w_new[j] = w + dt
                * (d1 * a * w_yy - (mu * sa + b) * w_y + a1 * (n1 - w) * z - raw.recovery_rate * w);
            z_new[j] = z + dt * (d2 * a * z_yy - b * z_y + a2 * (n2 - z) * w - raw.death_rate * z);
        }
        s.t += dt;
        s.g += dt * gp;
        s.h += dt * hp;
        std::mem::swap(&mut s.w, &mut w_new);
        std::mem::swap(&mut s.z, &mut z_new);
        for (field, values) in [("W", &s.w), ("Z", &s.z)] {
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { t: s.t, field });
            }
        }
        for v in s.w.iter_mut().chain(s.z.iter_mut()) {
            *v = v.max(0.0);
        }
        flux = fronts(&s);
        traj.record(model, &s, flux);
        if s.t >= next_snapshot || s.t >= t_max {
            traj.snapshots.push(s.clone());
            while next_snapshot <= s.t {
                next_snapshot += snapshot_every;
            }
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets::low_transmission;
    use crate::model::RawParams;

    fn model() -> Model {
        Model::new(low_transmission(0.0)).unwrap()
    }

    fn final_value(m: &Model, dt: f64) -> (f64, f64) {
        let o = homogeneous_ode_uniform(m, (0.3, 2.0), 4.0, dt).unwrap();
        (*o.u.last().unwrap(), *o.v.last().unwrap())
    }

    #[test]
    fn rk4_fourth_order() {
        let m = model();
        let exact = final_value(&m, 1e-3);
        let e1 = (final_value(&m, 0.1).1 - exact.1).abs();
        let e2 = (final_value(&m, 0.05).1 - exact.1).abs();
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
    }

    #[test]
    fn equilibrium_is_stationary() {
        let m = model();
        let (us, vs) = m.endemic().unwrap();
        let o = homogeneous_ode_uniform(&m, (us, vs), 50.0, 0.05).unwrap();
        for (u, v) in o.u.iter().zip(&o.v) {
            assert!((u - us).abs() < 1e-12 && (v - vs).abs() < 1e-12);
        }
    }

    #[test]
    fn converges_to_endemic_state() {
        let m = model();
        let (us, vs) = m.endemic().unwrap();
        let o = homogeneous_ode_uniform(&m, (0.01, 0.01), 400.0, 0.05).unwrap();
        assert!((o.u.last().unwrap() - us).abs() < 1e-8);
        assert!((o.v.last().unwrap() - vs).abs() < 1e-8);
    }

    #[test]
    fn decays_without_endemic_state() {
        let mut raw: RawParams = low_transmission(0.0);
        raw.biting_rate = 0.05;
        let m = Model::new(raw).unwrap();
        assert!(m.endemic().is_none());
        let o = homogeneous_ode_uniform(&m, (1.0, 20.0), 200.0, 0.05).unwrap();
        assert!(*o.u.last().unwrap() < 1e-6 && *o.v.last().unwrap() < 1e-6);
    }

    #[test]
    fn samples_on_requested_times() {
        let m = model();
        let times = [0.0, 0.013, 0.5, 0.5, 2.0];
        let o = homogeneous_ode(&m, (0.2, 0.1), &times, 0.01).unwrap();
        assert_eq!(o.times, times);
        assert_eq!(o.u[2], o.u[3]);
        assert!(homogeneous_ode(&m, (0.2, 0.1), &[1.0, 0.5], 0.01).is_err());
    }

    #[test]
    fn reference_rejects_coarse_grid() {
        let m = model();
        let p = InitialProfile::Cosine { amp_u: 0.1, amp_v: 0.1 };
        assert!(reference_explicit_pde(&m, &p, 1.0, DEFAULT_NY, 0.5).is_err());
    }

    #[test]
    fn reference_keeps_zero_and_symmetry() {
        let m = model();
        let zero = InitialProfile::Cosine { amp_u: 0.0, amp_v: 0.0 };
        let t = reference_explicit_pde(&m, &zero, 0.2, MIN_REFERENCE_NY, 0.1).unwrap();
        assert!(t.snapshots.last().unwrap().is_zero());
        let p = InitialProfile::Cosine { amp_u: 0.5, amp_v: 1.0 };
        let t = reference_explicit_pde(&m, &p, 0.2, MIN_REFERENCE_NY, 0.1).unwrap();
        let last = t.snapshots.last().unwrap();
        assert!((last.g + last.h).abs() < 1e-12);
        assert_eq!(last.t, 0.2);
    }
}
