//! Semi-wave profiles and the free-boundary speed `c_nu`.
//!
//! On the truncated half-line `[0, S]`:
//!
//! ```text
//! D1 u'' - c u' + a1 (N1 - u) v - gamma u = 0
//! D2 v'' - c v' + a2 (N2 - v) u - d v     = 0
//! u(0) = v(0) = 0,  (u, v)(S) = (U*, V*)
//! ```
//!
//! `c_nu` is the root of `F(c) = nu u'_c(0) - c`. Profiles that fail to
//! converge, lose monotonicity or have their front pushed against the far
//! end `s = S` mark the upper edge of the admissible speed range.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::BlockTridiagonal;
use crate::model::Model;

pub const MIN_POINTS: usize = 201;
pub const DEFAULT_POINTS: usize = 4001;
pub const NEWTON_MAX_ITERATIONS: usize = 100;
/// Newton tolerance relative to [`reaction_scale`].
pub const NEWTON_TOLERANCE: f64 = 1e-9;
/// Bisection width for `c_nu`.
pub const ROOT_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveProfile {
    pub c: f64,
    pub s_grid: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub uprime0: f64,
    /// Newton converged to a monotone profile whose front lies in `[0, S/2]`.
    pub converged: bool,
    pub newton_residual: f64,
    pub iterations: usize,
}

impl WaveProfile {
    /// Smallest forward difference of `u` and `v` over the grid.
    pub fn min_increment(&self) -> f64 {
        self.u
            .windows(2)
            .chain(self.v.windows(2))
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Default truncation length `40 sqrt(D1 / gamma)`.
pub fn default_length(model: &Model) -> f64 {
    40.0 * (model.raw.diffusion_birds / model.raw.recovery_rate).sqrt()
}

/// Magnitude of the reaction terms at capacity.
pub fn reaction_scale(model: &Model) -> f64 {
    let raw = &model.raw;
    let (n1, n2) = (raw.capacity_birds, raw.capacity_mosquitoes);
    (model.derived.a1 * n1 * n2)
        .max(model.derived.a2 * n1 * n2)
        .max(raw.recovery_rate * n1)
        .max(raw.death_rate * n2)
}

fn endemic(model: &Model) -> Result<(f64, f64)> {
    model.endemic().ok_or(Error::NoEquilibrium {
        product: model.derived.loop_gain,
        loss: model.raw.recovery_rate * model.raw.death_rate,
    })
}

/// Solves the profile at speed `c` by damped Newton from the exponential
/// ramp `(U*, V*) (1 - exp(-s / l))`, `l = sqrt(D1 / gamma)`.
pub fn solve_profile(model: &Model, c: f64, length: f64, n: usize) -> Result<WaveProfile> {
    let (us, vs) = endemic(model)?;
    let ell = (model.raw.diffusion_birds / model.raw.recovery_rate).sqrt();
    let hs = length / n as f64;
    let ramp: Vec<[f64; 2]> = (0..=n)
        .map(|i| {
            let r = 1.0 - (-(i as f64 * hs) / ell).exp();
            [us * r, vs * r]
        })
        .collect();
    solve_from(model, c, length, n, ramp)
}

fn check_inputs(c: f64, length: f64, n: usize) -> Result<()> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidParam {
            name: "c",
            reason: format!("must be finite and >= 0, got {c}"),
        });
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidParam {
            name: "wave_S",
            reason: format!("must be > 0, got {length}"),
        });
    }
    if n < MIN_POINTS {
        return Err(Error::InvalidParam {
            name: "wave_n",
            reason: format!("must be >= {MIN_POINTS}, got {n}"),
        });
    }
    Ok(())
}

/// Newton iteration from `guess`, which holds `n + 1` nodes including both ends.
fn solve_from(model: &Model, c: f64, length: f64, n: usize, guess: Vec<[f64; 2]>) -> Result<WaveProfile> {
    check_inputs(c, length, n)?;
    let (us, vs) = endemic(model)?;
    let raw = &model.raw;
    let (a1, a2) = (model.derived.a1, model.derived.a2);
    let (n1, n2) = (raw.capacity_birds, raw.capacity_mosquitoes);
    let (d1, d2) = (raw.diffusion_birds, raw.diffusion_mosquitoes);
    let (gamma, d) = (raw.recovery_rate, raw.death_rate);
    let hs = length / n as f64;
    let m = n - 1;

    let mut x: Vec<[f64; 2]> = guess[1..n].to_vec();
    let at = |x: &[[f64; 2]], i: usize| -> [f64; 2] {
        if i == 0 {
            [0.0, 0.0]
        } else if i == n {
            [us, vs]
        } else {
            x[i - 1]
        }
    };
    let residual = |x: &[[f64; 2]]| -> Vec<[f64; 2]> {
        (1..n)
            .map(|i| {
                let (l, p, r) = (at(x, i - 1), at(x, i), at(x, i + 1));
                let (u, v) = (p[0], p[1]);
                [
                    d1 * (l[0] - 2.0 * u + r[0]) / (hs * hs) - c * (r[0] - l[0]) / (2.0 * hs)
                        + a1 * (n1 - u) * v
                        - gamma * u,
                    d2 * (l[1] - 2.0 * v + r[1]) / (hs * hs) - c * (r[1] - l[1]) / (2.0 * hs)
                        + a2 * (n2 - v) * u
                        - d * v,
                ]
            })
            .collect()
    };
    let norm = |r: &[[f64; 2]]| r.iter().fold(0.0f64, |a, v| a.max(v[0].abs()).max(v[1].abs()));

    let tol = NEWTON_TOLERANCE * reaction_scale(model);
    let lo = [d1 / (hs * hs) + c / (2.0 * hs), d2 / (hs * hs) + c / (2.0 * hs)];
    let up = [d1 / (hs * hs) - c / (2.0 * hs), d2 / (hs * hs) - c / (2.0 * hs)];
    let mut jac = BlockTridiagonal::zeros(m);
    for i in 0..m {
        jac.lower[i] = [[lo[0], 0.0], [0.0, lo[1]]];
        jac.upper[i] = [[up[0], 0.0], [0.0, up[1]]];
    }

    let mut res = residual(&x);
    let mut res_norm = norm(&res);
    let mut iterations = 0;
    while res_norm > tol {
        if iterations == NEWTON_MAX_ITERATIONS || !res_norm.is_finite() {
            return Err(Error::NewtonDivergence {
                iterations,
                residual: res_norm,
            });
        }
        iterations += 1;
        for (i, p) in x.iter().enumerate() {
            let (u, v) = (p[0], p[1]);
            jac.diag[i] = [
                [-2.0 * d1 / (hs * hs) - a1 * v - gamma, a1 * (n1 - u)],
                [a2 * (n2 - v), -2.0 * d2 / (hs * hs) - a2 * u - d],
            ];
        }
        let Some(delta) = jac.solve(&res) else {
            return Err(Error::NewtonDivergence {
                iterations,
                residual: res_norm,
            });
        };
        let mut damping = 1.0;
        loop {
            let trial: Vec<[f64; 2]> = x
                .iter()
                .zip(&delta)
                .map(|(p, q)| [p[0] - damping * q[0], p[1] - damping * q[1]])
                .collect();
            let trial_res = residual(&trial);
            let trial_norm = norm(&trial_res);
            if trial_norm < res_norm || damping < 1e-6 {
                x = trial;
                res = trial_res;
                res_norm = trial_norm;
                break;
            }
            damping *= 0.5;
        }
    }

    let mut u = Vec::with_capacity(n + 1);
    let mut v = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let p = at(&x, i);
        u.push(p[0]);
        v.push(p[1]);
    }
    let s_grid: Vec<f64> = (0..=n).map(|i| i as f64 * hs).collect();
    let uprime0 = (4.0 * u[1] - u[2]) / (2.0 * hs);
    let converged = is_monotone(&u, us) && is_monotone(&v, vs) && front_inside(&u, &v, us, vs);
    Ok(WaveProfile {
        c,
        s_grid,
        u,
        v,
        uprime0,
        converged,
        newton_residual: res_norm,
        iterations,
    })
}

/// Strictly increasing below the plateau; past it, increments may only
/// vanish to round-off.
fn is_monotone(f: &[f64], top: f64) -> bool {
    let noise = 1e-12 * top;
    let saturated = top * (1.0 - 1e-8);
    f.windows(2)
        .all(|w| w[1] - w[0] > 0.0 || (w[0] >= saturated && w[1] - w[0] >= -noise))
}

/// Both components pass half their plateau value on the first half of the grid.
fn front_inside(u: &[f64], v: &[f64], us: f64, vs: f64) -> bool {
    let half = u.len() / 2;
    u[half] >= 0.5 * us && v[half] >= 0.5 * vs
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveSpeed {
    pub c_nu: f64,
    pub profile: WaveProfile,
    /// Smallest sampled speed without an admissible profile, if one was hit.
    pub c_upper: Option<f64>,
    /// Sampled `(c, F(c))` pairs from the bracketing scan.
    pub samples: Vec<(f64, f64)>,
}

/// Root of `nu u'_c(0) = c` by an upward scan followed by bisection.
pub fn c_nu(model: &Model, nu: f64, length: f64, n: usize) -> Result<WaveSpeed> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidParam {
            name: "nu",
            reason: format!("c_nu needs nu > 0, got {nu}"),
        });
    }
    endemic(model)?;
    let scale = model.speed_scale();
    let step = scale / 32.0;
    let c_max = 20.0 * scale;

    let admissible = |c: f64, guess: Option<&WaveProfile>| -> Option<WaveProfile> {
        let out = match guess {
            Some(p) => solve_from(model, c, length, n, p.u.iter().zip(&p.v).map(|(a, b)| [*a, *b]).collect()),
            None => solve_profile(model, c, length, n),
        };
        out.ok().filter(|p| p.converged)
    };
    let f = |p: &WaveProfile| nu * p.uprime0 - p.c;

    let mut samples = Vec::new();
    let Some(mut lo) = admissible(0.0, None) else {
        return Err(Error::NoBracket { samples });
    };
    samples.push((0.0, f(&lo)));
    if f(&lo) <= 0.0 {
        return Err(Error::NoBracket { samples });
    }

    // hi is either a profile with F < 0 or an inadmissible speed.
    let mut hi_c = None;
    let mut c_upper = None;
    let mut k = 1;
    while hi_c.is_none() {
        let c = k as f64 * step;
        if c > c_max {
            return Err(Error::NoBracket { samples });
        }
        match admissible(c, Some(&lo)) {
            Some(p) => {
                let fc = f(&p);
                samples.push((c, fc));
                if fc <= 0.0 {
                    hi_c = Some(c);
                } else {
                    lo = p;
                }
            }
            None => {
                samples.push((c, f64::NAN));
                c_upper = Some(c);
                hi_c = Some(c);
            }
        }
        k += 1;
    }
    let mut hi_c = hi_c.unwrap_or(c_max);

    while hi_c - lo.c > ROOT_TOLERANCE {
        let mid = 0.5 * (lo.c + hi_c);
        match admissible(mid, Some(&lo)) {
            Some(p) if f(&p) > 0.0 => lo = p,
            Some(_) => hi_c = mid,
            None => {
                c_upper = Some(c_upper.map_or(mid, |u: f64| u.min(mid)));
                hi_c = mid;
            }
        }
    }
    Ok(WaveSpeed {
        c_nu: lo.c,
        profile: lo,
        c_upper,
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftedSpeed {
    /// Shift applied to both `gamma` and `d`.
    pub shift: f64,
    pub c_nu: Option<f64>,
}

/// `c_nu` with `gamma` and `d` both shifted by `-2 omega`, `0` and `+2 omega`.
/// Shifts that leave the parameter range or lose the endemic state give `None`.
pub fn shifted_speeds(model: &Model, nu: f64, omega: f64, length: f64, n: usize) -> Vec<ShiftedSpeed> {
    [-2.0 * omega, 0.0, 2.0 * omega]
        .into_iter()
        .map(|shift| {
            let shifted = model
                .with_param("gamma", model.raw.recovery_rate + shift)
                .and_then(|m| m.with_param("d", m.raw.death_rate + shift));
            let c_nu = shifted
                .ok()
                .and_then(|m| c_nu(&m, nu, length, n).ok())
                .map(|w| w.c_nu);
            ShiftedSpeed { shift, c_nu }
        })
        .collect()
}
