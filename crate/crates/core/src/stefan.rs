//! Front-fixed integrator for the moving-boundary system.
//!
//! The map `y = (2x - (h + g)) / (h - g)` sends `(g(t), h(t))` onto
//! `(-1, 1)`. With `W(y, t) = U(x, t)` and `Z(y, t) = V(x, t)`:
//!
//! ```text
//! W_t - D1 A W_yy + (mu sqrt(A) + B) W_y = a1 (N1 - W) Z - gamma W
//! Z_t - D2 A Z_yy +             B  Z_y = a2 (N2 - Z) W - d Z
//! sqrt(A) = 2 / (h - g),   B = -(y (h' - g') + (h' + g')) / (h - g)
//! ```
//!
//! and the Stefan conditions become `h' = -nu sqrt(A) W_y(1)`,
//! `g' = -nu sqrt(A) W_y(-1)`. Each step treats diffusion implicitly and
//! everything else explicitly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::solve_tridiagonal;
use crate::model::Model;

pub const DEFAULT_NY: usize = 401;
pub const MIN_NY: usize = 8;
/// Negative values above `-NEGATIVE_CLAMP * N` are rounding noise.
pub const NEGATIVE_CLAMP: f64 = 1e-12;
/// Allowed overshoot above the carrying capacity, relative to it.
pub const OVERSHOOT: f64 = 1e-8;

/// Solution on the fixed grid `y_j = -1 + j dy`, `j = 1..=n_y`, plus fronts.
/// Boundary values `W(+-1) = Z(+-1) = 0` are implicit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldState {
    pub t: f64,
    pub g: f64,
    pub h: f64,
    pub w: Vec<f64>,
    pub z: Vec<f64>,
}

impl FieldState {
    pub fn n_y(&self) -> usize {
        self.w.len()
    }

    pub fn dy(&self) -> f64 {
        2.0 / (self.n_y() + 1) as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        -1.0 + (j + 1) as f64 * self.dy()
    }

    /// Physical coordinate of fixed-grid point `y`.
    pub fn x_of(&self, y: f64) -> f64 {
        0.5 * ((self.h - self.g) * y + self.h + self.g)
    }

    pub fn sqrt_a(&self) -> f64 {
        2.0 / (self.h - self.g)
    }

    /// Values at `y = 0`, the middle of the infected interval.
    pub fn midpoint(&self) -> (f64, f64) {
        let n = self.n_y();
        if n % 2 == 1 {
            (self.w[n / 2], self.z[n / 2])
        } else {
            (
                0.5 * (self.w[n / 2 - 1] + self.w[n / 2]),
                0.5 * (self.z[n / 2 - 1] + self.z[n / 2]),
            )
        }
    }

    pub fn sup(&self) -> (f64, f64) {
        (fold(&self.w, f64::max), fold(&self.z, f64::max))
    }

    pub fn inf(&self) -> (f64, f64) {
        (fold(&self.w, f64::min), fold(&self.z, f64::min))
    }

    pub fn is_zero(&self) -> bool {
        self.w.iter().chain(&self.z).all(|v| *v == 0.0)
    }
}

/// Max/min over interior points and the zero boundary values.
fn fold(values: &[f64], f: fn(f64, f64) -> f64) -> f64 {
    values.iter().cloned().fold(0.0, f)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum InitialProfile {
    /// `U0 = amp_u cos(pi x / (2 h0))`, `V0 = amp_v cos(pi x / (2 h0))`.
    Cosine { amp_u: f64, amp_v: f64 },
    /// Samples at equally spaced interior points of `(-h0, h0)`, linearly
    /// interpolated onto the solver grid. Endpoint values are zero.
    Custom { u: Vec<f64>, v: Vec<f64> },
}

impl InitialProfile {
    /// Checks `0 <= U0 <= N1`, `0 <= V0 <= N2`.
    pub fn validate(&self, model: &Model) -> Result<()> {
        let (n1, n2) = (model.raw.capacity_birds, model.raw.capacity_mosquitoes);
        let check = |name: &'static str, values: &[f64], cap: f64| -> Result<()> {
            if values.is_empty() {
                return Err(Error::InvalidParam {
                    name,
                    reason: "needs at least one sample".into(),
                });
            }
            match values.iter().find(|v| !(v.is_finite() && **v >= 0.0 && **v <= cap)) {
                Some(bad) => Err(Error::InvalidParam {
                    name,
                    reason: format!("initial value {bad} outside [0, {cap}]"),
                }),
                None => Ok(()),
            }
        };
        match self {
            InitialProfile::Cosine { amp_u, amp_v } => {
                check("amp_u", &[*amp_u], n1)?;
                check("amp_v", &[*amp_v], n2)
            }
            InitialProfile::Custom { u, v } => {
                check("custom_u", u, n1)?;
                check("custom_v", v, n2)
            }
        }
    }

    /// Initial state on `n_y` interior points.
    pub fn initial_state(&self, model: &Model, n_y: usize) -> Result<FieldState> {
        self.validate(model)?;
        if n_y < MIN_NY {
            return Err(Error::Domain(format!("n_y must be >= {MIN_NY}, got {n_y}")));
        }
        let dy = 2.0 / (n_y + 1) as f64;
        let ys = (1..=n_y).map(|j| -1.0 + j as f64 * dy);
        let (w, z) = match self {
            InitialProfile::Cosine { amp_u, amp_v } => ys
                .map(|y| {
                    let c = (0.5 * std::f64::consts::PI * y).cos();
                    (amp_u * c, amp_v * c)
                })
                .unzip(),
            InitialProfile::Custom { u, v } => {
                ys.map(|y| (interpolate(u, y), interpolate(v, y))).unzip()
            }
        };
        let h0 = model.raw.half_width;
        Ok(FieldState {
            t: 0.0,
            g: -h0,
            h: h0,
            w,
            z,
        })
    }

    /// Suprema of the initial data.
    pub fn sup(&self) -> (f64, f64) {
        match self {
            InitialProfile::Cosine { amp_u, amp_v } => (*amp_u, *amp_v),
            InitialProfile::Custom { u, v } => (fold(u, f64::max), fold(v, f64::max)),
        }
    }
}

/// Piecewise-linear interpolation of interior samples (zero at `y = +-1`).
fn interpolate(samples: &[f64], y: f64) -> f64 {
    let m = samples.len();
    let pos = (y + 1.0) * 0.5 * (m + 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    let at = |k: usize| {
        if k == 0 || k > m {
            0.0
        } else {
            samples[k - 1]
        }
    };
    (1.0 - frac) * at(i) + frac * at(i + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DtPolicy {
    /// `dt = min(safety dy / (|mu| sqrt(A) + max|B| + eps), cap)`, recomputed every step.
    Auto { safety: f64, cap: f64 },
    Fixed(f64),
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy::Auto {
            safety: 0.5,
            cap: 0.02,
        }
    }
}

/// Early-termination criteria checked after every step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StopCriteria {
    /// Stop once both suprema fall below this absolute level.
    pub extinct_below: Option<f64>,
    /// Stop once `h - g` exceeds this width.
    pub max_width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimControls {
    pub n_y: usize,
    pub dt: DtPolicy,
    pub t_max: f64,
    /// Snapshot cadence in time units; `None` means `t_max / 50`.
    pub snapshot_every: Option<f64>,
    pub stop: StopCriteria,
}

impl SimControls {
    pub fn new(t_max: f64) -> Self {
        Self {
            n_y: DEFAULT_NY,
            dt: DtPolicy::default(),
            t_max,
            snapshot_every: None,
            stop: StopCriteria::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_y < MIN_NY {
            return Err(Error::Domain(format!("n_y must be >= {MIN_NY}, got {}", self.n_y)));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::Domain(format!("t_max must be > 0, got {}", self.t_max)));
        }
        match self.dt {
            DtPolicy::Auto { safety, cap } => {
                if !(safety > 0.0 && safety <= 1.0 && cap > 0.0 && cap.is_finite()) {
                    return Err(Error::Domain(format!(
                        "auto dt needs 0 < safety <= 1 and cap > 0, got safety {safety}, cap {cap}"
                    )));
                }
            }
            DtPolicy::Fixed(dt) => {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(Error::Domain(format!("dt must be > 0, got {dt}")));
                }
            }
        }
        if let Some(every) = self.snapshot_every {
            if !(every > 0.0) {
                return Err(Error::Domain(format!("snapshot cadence must be > 0, got {every}")));
            }
        }
        Ok(())
    }
}

/// Time series of diagnostics, one entry per accepted step (plus `t = 0`).
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub gprime: Vec<f64>,
    pub hprime: Vec<f64>,
    pub sup_u: Vec<f64>,
    pub sup_v: Vec<f64>,
    pub inf_u: Vec<f64>,
    pub inf_v: Vec<f64>,
    pub mid_u: Vec<f64>,
    pub mid_v: Vec<f64>,
    /// Risk index at the current fronts.
    pub risk: Vec<f64>,
    /// Same, without the square root.
    pub risk_inner: Vec<f64>,
    pub snapshots: Vec<FieldState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn width(&self, k: usize) -> f64 {
        self.h[k] - self.g[k]
    }

    pub fn record(&mut self, model: &Model, state: &FieldState, flux: (f64, f64)) {
        let (su, sv) = state.sup();
        let (iu, iv) = state.inf();
        let (mu_, mv) = state.midpoint();
        let risk = model
            .risk_index(state.g, state.h, model.raw.advection)
            .expect("recorded states satisfy g < h");
        self.times.push(state.t);
        self.g.push(state.g);
        self.h.push(state.h);
        self.gprime.push(flux.0);
        self.hprime.push(flux.1);
        self.sup_u.push(su);
        self.sup_v.push(sv);
        self.inf_u.push(iu);
        self.inf_v.push(iv);
        self.mid_u.push(mu_);
        self.mid_v.push(mv);
        self.risk.push(risk.value);
        self.risk_inner.push(risk.inner);
    }
}

/// `(A, B)` of the front-fixing transformation at fixed-grid point `y`.
pub fn metric_terms(g: f64, h: f64, gprime: f64, hprime: f64, y: f64) -> Result<(f64, f64)> {
    if !(g < h) {
        return Err(Error::Domain(format!("metric needs g < h, got g = {g}, h = {h}")));
    }
    let width = h - g;
    let a = (2.0 / width).powi(2);
    let b = -(y * (hprime - gprime) + (hprime + gprime)) / width;
    Ok((a, b))
}

/// Front velocities `(g', h')` from the Stefan conditions, using
/// second-order one-sided differences for `W_y` at `y = -1` and `y = 1`.
pub fn boundary_flux(state: &FieldState, nu: f64) -> (f64, f64) {
    let n = state.n_y();
    let dy = state.dy();
    let w = &state.w;
    // W(+-1) = 0 drops the boundary term of each stencil.
    let wy_left = (4.0 * w[0] - w[1]) / (2.0 * dy);
    let wy_right = (w[n - 2] - 4.0 * w[n - 1]) / (2.0 * dy);
    let s = state.sqrt_a();
    (-nu * s * wy_left, -nu * s * wy_right)
}

/// Largest frame-advection speed `|mu| sqrt(A) + max_y |B|` in `y`-units.
pub fn transport_speed(state: &FieldState, mu: f64, flux: (f64, f64)) -> f64 {
    let (gp, hp) = flux;
    let b_max = ((hp - gp).abs() + (hp + gp).abs()) / (state.h - state.g);
    mu.abs() * state.sqrt_a() + b_max
}

fn auto_dt(state: &FieldState, mu: f64, flux: (f64, f64), safety: f64, cap: f64) -> f64 {
    let speed = transport_speed(state, mu, flux);
    (safety * state.dy() / (speed + 1e-12)).min(cap)
}

/// One semi-implicit step, computing the front velocities from `state`.
pub fn step(state: &FieldState, model: &Model, dt: f64) -> Result<FieldState> {
    let flux = boundary_flux(state, model.raw.expansion);
    advance(state, model, dt, flux)
}

fn advance(state: &FieldState, model: &Model, dt: f64, flux: (f64, f64)) -> Result<FieldState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("dt must be > 0, got {dt}")));
    }
    let raw = &model.raw;
    let (a1, a2) = (model.derived.a1, model.derived.a2);
    let (n1, n2) = (raw.capacity_birds, raw.capacity_mosquitoes);
    let n = state.n_y();
    let dy = state.dy();
    let (gp, hp) = flux;
    let t_new = state.t + dt;

    let g_new = state.g + dt * gp;
    let h_new = state.h + dt * hp;
    for (field, v) in [("g", g_new), ("h", h_new)] {
        if !v.is_finite() {
            return Err(Error::NonFinite { t: t_new, field });
        }
    }
    if !(g_new < h_new) {
        return Err(Error::Stability {
            t: t_new,
            detail: format!("fronts crossed (g = {g_new}, h = {h_new})"),
        });
    }

    let width = state.h - state.g;
    let sqrt_a_old = state.sqrt_a();
    let a_new = (2.0 / (h_new - g_new)).powi(2);
    let drift = raw.advection * sqrt_a_old;

    let mut rhs_w = vec![0.0; n];
    let mut rhs_z = vec![0.0; n];
    for j in 0..n {
        let y = state.y(j);
        let b = -(y * (hp - gp) + (hp + gp)) / width;
        let (w, z) = (state.w[j], state.z[j]);
        let w_l = if j > 0 { state.w[j - 1] } else { 0.0 };
        let w_r = if j + 1 < n { state.w[j + 1] } else { 0.0 };
        let z_l = if j > 0 { state.z[j - 1] } else { 0.0 };
        let z_r = if j + 1 < n { state.z[j + 1] } else { 0.0 };
        let w_y = (w_r - w_l) / (2.0 * dy);
        let z_y = (z_r - z_l) / (2.0 * dy);
        let react_w = a1 * (n1 - w) * z - raw.recovery_rate * w;
        let react_z = a2 * (n2 - z) * w - raw.death_rate * z;
        rhs_w[j] = w + dt * (react_w - (drift + b) * w_y);
        rhs_z[j] = z + dt * (react_z - b * z_y);
    }

    implicit_diffusion(&mut rhs_w, dt * raw.diffusion_birds * a_new / (dy * dy));
    implicit_diffusion(&mut rhs_z, dt * raw.diffusion_mosquitoes * a_new / (dy * dy));

    clamp(&mut rhs_w, n1, t_new, "W")?;
    clamp(&mut rhs_z, n2, t_new, "Z")?;

    Ok(FieldState {
        t: t_new,
        g: g_new,
        h: h_new,
        w: rhs_w,
        z: rhs_z,
    })
}

/// Solves `(I - r Delta) u = rhs` with homogeneous Dirichlet ends.
fn implicit_diffusion(rhs: &mut [f64], r: f64) {
    let n = rhs.len();
    let lower = vec![-r; n];
    let diag = vec![1.0 + 2.0 * r; n];
    let upper = vec![-r; n];
    solve_tridiagonal(&lower, &diag, &upper, rhs);
}

fn clamp(values: &mut [f64], cap: f64, t: f64, field: &'static str) -> Result<()> {
    let floor = -NEGATIVE_CLAMP * cap;
    let ceiling = cap * (1.0 + OVERSHOOT);
    for (j, v) in values.iter_mut().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { t, field });
        }
        if *v < 0.0 {
            if *v < floor {
                return Err(Error::Stability {
                    t,
                    detail: format!("{field}[{j}] = {v:e} below zero"),
                });
            }
            *v = 0.0;
        } else if *v > ceiling {
            return Err(Error::Stability {
                t,
                detail: format!("{field}[{j}] = {v} above capacity {cap}"),
            });
        }
    }
    Ok(())
}

/// Integrates from the initial profile until `t_max` or a stop criterion.
pub fn simulate(model: &Model, profile: &InitialProfile, controls: &SimControls) -> Result<Trajectory> {
    controls.validate()?;
    let mut state = profile.initial_state(model, controls.n_y)?;
    let nu = model.raw.expansion;
    let mu = model.raw.advection;
    let t_max = controls.t_max;
    let cadence = controls.snapshot_every.unwrap_or(t_max / 50.0);

    let mut traj = Trajectory::default();
    let mut flux = boundary_flux(&state, nu);
    traj.record(model, &state, flux);
    traj.snapshots.push(state.clone());
    let mut next_snapshot = cadence;

    let end = t_max * (1.0 - 1e-12);
    while state.t < end {
        let mut dt = match controls.dt {
            DtPolicy::Auto { safety, cap } => auto_dt(&state, mu, flux, safety, cap),
            DtPolicy::Fixed(dt) => {
                let courant = dt * transport_speed(&state, mu, flux) / state.dy();
                if courant > 1.0 {
                    return Err(Error::Stability {
                        t: state.t,
                        detail: format!("advective Courant number {courant:.3} > 1"),
                    });
                }
                dt
            }
        };
        if state.t + dt > t_max || t_max - (state.t + dt) < 1e-9 * dt {
            dt = t_max - state.t;
        }
        state = advance(&state, model, dt, flux)?;
        if state.t >= end {
            state.t = t_max;
        }
        flux = boundary_flux(&state, nu);
        traj.record(model, &state, flux);

        if state.t >= next_snapshot * (1.0 - 1e-12) || state.t >= end {
            traj.snapshots.push(state.clone());
            while next_snapshot <= state.t * (1.0 + 1e-12) {
                next_snapshot += cadence;
            }
        }

        let (su, sv) = state.sup();
        if let Some(level) = controls.stop.extinct_below {
            if su < level && sv < level {
                break;
            }
        }
        if let Some(width) = controls.stop.max_width {
            if state.h - state.g > width {
                break;
            }
        }
    }
    if traj.snapshots.last().map(|s| s.t) != Some(state.t) {
        traj.snapshots.push(state);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets::low_transmission;
    use approx::assert_relative_eq;

    fn model(mu: f64) -> Model {
        Model::new(low_transmission(mu)).unwrap()
    }

    fn quadratic_state(n: usize, c: f64, h0: f64) -> FieldState {
        let dy = 2.0 / (n + 1) as f64;
        let w: Vec<f64> = (1..=n)
            .map(|j| {
                let y = -1.0 + j as f64 * dy;
                c * (1.0 - y * y)
            })
            .collect();
        FieldState {
            t: 0.0,
            g: -h0,
            h: h0,
            z: w.clone(),
            w,
        }
    }

    #[test]
    fn metric_terms_cases() {
        let (a, b) = metric_terms(-15.0, 15.0, 0.0, 0.0, 0.3).unwrap();
        assert_relative_eq!(a, 1.0 / 225.0, max_relative = 1e-15);
        assert_eq!(b, 0.0);

        let (_, b0) = metric_terms(-15.0, 15.0, -1.0, 1.0, 0.0).unwrap();
        assert_eq!(b0, 0.0);
        let (_, b1) = metric_terms(-15.0, 15.0, -1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(b1, -2.0 / 30.0, max_relative = 1e-15);

        let (a_wide, _) = metric_terms(-30.0, 30.0, -1.0, 1.0, 0.5).unwrap();
        let (a_narrow, _) = metric_terms(-15.0, 15.0, -1.0, 1.0, 0.5).unwrap();
        assert_relative_eq!(a_wide, a_narrow / 4.0, max_relative = 1e-15);

        assert!(metric_terms(1.0, 1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn flux_of_zero_field() {
        let state = FieldState {
            t: 0.0,
            g: -15.0,
            h: 15.0,
            w: vec![0.0; 41],
            z: vec![0.0; 41],
        };
        assert_eq!(boundary_flux(&state, 2.0), (0.0, 0.0));
    }

    #[test]
    fn flux_exact_on_quadratics() {
        let (c, h0, nu) = (0.7, 15.0, 2.0);
        for n in [8, 31, 400] {
            let (gp, hp) = boundary_flux(&quadratic_state(n, c, h0), nu);
            assert_relative_eq!(hp, 2.0 * c * nu / h0, max_relative = 1e-10);
            assert_relative_eq!(gp, -2.0 * c * nu / h0, max_relative = 1e-10);
        }
    }

    #[test]
    fn mirror_symmetric_flux() {
        let n = 51;
        let mut state = quadratic_state(n, 1.0, 10.0);
        for j in 0..=n / 2 {
            let y = state.y(j);
            let w = (1.0 - y * y) * (1.0 + 0.3 * y * y) * (2.0 * y).cos().abs();
            state.w[j] = w;
            state.w[n - 1 - j] = w;
        }
        let (gp, hp) = boundary_flux(&state, 3.0);
        assert_eq!(hp, -gp);
    }

    #[test]
    fn zero_state_is_fixed() {
        let m = model(3.0);
        let state = FieldState {
            t: 1.0,
            g: -15.0,
            h: 15.0,
            w: vec![0.0; 101],
            z: vec![0.0; 101],
        };
        let next = step(&state, &m, 0.01).unwrap();
        assert_eq!(next.w, state.w);
        assert_eq!(next.z, state.z);
        assert_eq!((next.g, next.h), (state.g, state.h));
        assert_relative_eq!(next.t, 1.01);
    }

    #[test]
    fn equilibrium_interior_is_stationary() {
        let m = model(0.0);
        let (us, vs) = m.endemic().unwrap();
        let n = 401;
        let state = FieldState {
            t: 0.0,
            g: -15.0,
            h: 15.0,
            w: vec![us; n],
            z: vec![vs; n],
        };
        let dt = 0.01;
        let next = step(&state, &m, dt).unwrap();
        let (mu_, mv) = next.midpoint();
        assert!(((mu_ - us) / us).abs() < 1e-6 * dt);
        assert!(((mv - vs) / vs).abs() < 1e-6 * dt);
    }

    #[test]
    fn fronts_move_outward() {
        let m = model(3.0);
        let profile = InitialProfile::Cosine {
            amp_u: 0.1,
            amp_v: 2.0,
        };
        let s0 = profile.initial_state(&m, DEFAULT_NY).unwrap();
        let s1 = step(&s0, &m, 0.01).unwrap();
        assert!(s1.h > s0.h);
        assert!(s1.g < s0.g);
    }

    #[test]
    fn frozen_fronts_without_expansion() {
        let mut raw = low_transmission(0.0);
        raw.expansion = 0.0;
        let m = Model::new(raw).unwrap();
        let profile = InitialProfile::Cosine {
            amp_u: 0.1,
            amp_v: 2.0,
        };
        let mut controls = SimControls::new(5.0);
        controls.n_y = 101;
        let traj = simulate(&m, &profile, &controls).unwrap();
        assert!(traj.g.iter().all(|g| *g == -15.0));
        assert!(traj.h.iter().all(|h| *h == 15.0));
        assert_relative_eq!(traj.horizon(), 5.0);
    }

    #[test]
    fn stability_failure_reported() {
        let m = model(0.0);
        let state = FieldState {
            t: 0.0,
            g: -15.0,
            h: 15.0,
            w: vec![0.1; 21],
            z: vec![2.0; 21],
        };
        // Explicit reaction with a huge step overshoots the capacity.
        match step(&state, &m, 50.0) {
            Err(Error::Stability { .. }) => {}
            other => panic!("expected stability error, got {other:?}"),
        }
    }

    #[test]
    fn profile_validation() {
        let m = model(0.0);
        let bad = InitialProfile::Cosine {
            amp_u: 1.5,
            amp_v: 2.0,
        };
        assert!(bad.validate(&m).is_err());
        let bad = InitialProfile::Custom {
            u: vec![0.1, -0.1],
            v: vec![1.0, 1.0],
        };
        assert!(bad.validate(&m).is_err());
        let ok = InitialProfile::Custom {
            u: vec![0.1, 0.2, 0.1],
            v: vec![1.0, 2.0, 1.0],
        };
        let s = ok.initial_state(&m, 9).unwrap();
        // y = 0 sits exactly on the middle sample
        assert_relative_eq!(s.w[4], 0.2, max_relative = 1e-12);
        assert!(s.w.iter().all(|w| *w > 0.0 && *w <= 0.2));
    }

    #[test]
    fn snapshot_cadence() {
        let m = model(3.0);
        let profile = InitialProfile::Cosine {
            amp_u: 0.1,
            amp_v: 2.0,
        };
        let mut controls = SimControls::new(2.0);
        controls.n_y = 101;
        controls.snapshot_every = Some(0.5);
        let traj = simulate(&m, &profile, &controls).unwrap();
        let times: Vec<f64> = traj.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(times.len(), 5, "{times:?}");
        assert_eq!(times[0], 0.0);
        assert_eq!(*times.last().unwrap(), 2.0);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    }
}
