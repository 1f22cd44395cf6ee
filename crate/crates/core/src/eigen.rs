//! Principal eigenvalue `lambda0` and numerical reproduction number `R0^D`
//! of the linearized Dirichlet problem on a fixed interval.
//!
//! Both are discretized with second-order central differences on a uniform
//! grid of `n` interior points. The bird operator is
//! `L1 = -D1 d2/dx2 + mu d/dx + gamma`, the mosquito operator
//! `L2 = -D2 d2/dx2 + d`. The coupled matrix
//!
//! ```text
//! M = [ L1        -a1 N1 ]
//!     [ -a2 N2    L2     ]
//! ```
//!
//! is a Z-matrix, so its eigenvalue of smallest real part is real with a
//! positive eigenvector, and `lambda0 < 0` iff the spectral radius of the
//! next-generation operator `diag(L1, L2)^{-1} [[0, a1 N1], [a2 N2, 0]]`
//! exceeds one.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, solve_tridiagonal, tridiagonal_apply, BlockTridiagonal};
use crate::model::Model;

pub const MIN_GRID: usize = 16;
pub const MAX_ITERATIONS: usize = 500;
/// Power-iteration cap.
pub const POWER_MAX_ITERATIONS: usize = 20_000;
/// Residual tolerance, relative to the eigenvalue scale.
pub const TOLERANCE: f64 = 1e-10;
/// Grid used by the dense fallback.
pub const DENSE_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EigenKind {
    Lambda0,
    ReproductionNumber,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenResult {
    pub kind: EigenKind,
    pub value: f64,
    /// Bird component on the interior grid.
    pub phi: Vec<f64>,
    /// Mosquito component on the interior grid.
    pub psi: Vec<f64>,
    pub n_grid: usize,
    pub interval: (f64, f64),
    pub residual: f64,
    pub iterations: usize,
}

impl EigenResult {
    /// Interior grid abscissae.
    pub fn grid(&self) -> Vec<f64> {
        interior_grid(self.interval.0, self.interval.1, self.n_grid)
    }
}

pub fn interior_grid(left: f64, right: f64, n: usize) -> Vec<f64> {
    let dx = (right - left) / (n + 1) as f64;
    (1..=n).map(|i| left + i as f64 * dx).collect()
}

/// Tridiagonal coefficients `(lower, diag, upper)` of one scalar operator.
struct Tridiagonal {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Tridiagonal {
    fn new(n: usize, dx: f64, diffusion: f64, advection: f64, decay: f64) -> Self {
        let off = diffusion / (dx * dx);
        let adv = advection / (2.0 * dx);
        Self {
            lower: vec![-off - adv; n],
            diag: vec![2.0 * off + decay; n],
            upper: vec![-off + adv; n],
        }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        solve_tridiagonal(&self.lower, &self.diag, &self.upper, &mut x);
        x
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        tridiagonal_apply(&self.lower, &self.diag, &self.upper, x)
    }
}

struct Discretization {
    bird: Tridiagonal,
    mosquito: Tridiagonal,
    a1n1: f64,
    a2n2: f64,
}

fn discretize(model: &Model, left: f64, right: f64, mu: f64, n: usize) -> Result<Discretization> {
    if !(left < right) {
        return Err(Error::Domain(format!(
            "interval requires left < right, got ({left}, {right})"
        )));
    }
    if n < MIN_GRID {
        return Err(Error::Domain(format!("n_grid must be >= {MIN_GRID}, got {n}")));
    }
    if !mu.is_finite() {
        return Err(Error::Domain(format!("advection must be finite, got {mu}")));
    }
    let raw = &model.raw;
    let dx = (right - left) / (n + 1) as f64;
    let peclet = mu.abs() * dx / (2.0 * raw.diffusion_birds);
    if peclet >= 1.0 {
        return Err(Error::Domain(format!(
            "cell Peclet number {peclet:.3} >= 1; central advection needs a finer grid"
        )));
    }
    Ok(Discretization {
        bird: Tridiagonal::new(n, dx, raw.diffusion_birds, mu, raw.recovery_rate),
        mosquito: Tridiagonal::new(n, dx, raw.diffusion_mosquitoes, 0.0, raw.death_rate),
        a1n1: model.derived.a1 * raw.capacity_birds,
        a2n2: model.derived.a2 * raw.capacity_mosquitoes,
    })
}

fn coupled_matrix(disc: &Discretization, shift: f64) -> BlockTridiagonal {
    let n = disc.bird.diag.len();
    let mut m = BlockTridiagonal::zeros(n);
    for i in 0..n {
        m.diag[i] = [
            [disc.bird.diag[i] - shift, -disc.a1n1],
            [-disc.a2n2, disc.mosquito.diag[i] - shift],
        ];
        m.lower[i] = [[disc.bird.lower[i], 0.0], [0.0, disc.mosquito.lower[i]]];
        m.upper[i] = [[disc.bird.upper[i], 0.0], [0.0, disc.mosquito.upper[i]]];
    }
    m
}

fn sine_profile(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| (PI * i as f64 / (n + 1) as f64).sin())
        .collect()
}

/// Min and max of `y_i / x_i`; bounds on the Perron eigenvalue when `x > 0`.
fn ratio_bounds(x: &[[f64; 2]], y: &[[f64; 2]]) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (xi, yi) in x.iter().zip(y) {
        for c in 0..2 {
            if !(xi[c] > 0.0) {
                return None;
            }
            let r = yi[c] / xi[c];
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    Some((lo, hi))
}

/// Scales so that `max(phi) = 1`; if the bird component is negligible (a
/// decoupled problem whose principal mode lives in the mosquito block) it
/// scales by `max(psi)` instead.
fn normalize(x: &mut [[f64; 2]]) {
    let mut peak = [0.0f64; 2];
    for xi in x.iter() {
        for c in 0..2 {
            if xi[c].abs() > peak[c].abs() {
                peak[c] = xi[c];
            }
        }
    }
    let s = if peak[0].abs() > 1e-8 * peak[1].abs() {
        peak[0]
    } else {
        peak[1]
    };
    for xi in x.iter_mut() {
        xi[0] /= s;
        xi[1] /= s;
    }
}

fn split(x: &[[f64; 2]]) -> (Vec<f64>, Vec<f64>) {
    x.iter().map(|v| (v[0], v[1])).unzip()
}

fn check_positive(phi: &[f64], psi: &[f64]) -> Result<()> {
    if phi.iter().chain(psi).all(|v| *v > 0.0) {
        Ok(())
    } else {
        Err(Error::MixedSign)
    }
}

/// Principal eigenvalue of `M`, the eigenvalue of smallest real part.
///
/// Inverse iteration on `M - sigma I`. The shift is refreshed every step to
/// just below the Collatz–Wielandt lower bound `min_i (Mx)_i / x_i`, which
/// never exceeds `lambda0` for a positive iterate. That keeps `M - sigma I`
/// a nonsingular M-matrix, so its inverse is nonnegative and its dominant
/// eigenvalue is `1 / (lambda0 - sigma)`.
pub fn principal_lambda0(
    model: &Model,
    left: f64,
    right: f64,
    mu: f64,
    n_grid: usize,
) -> Result<EigenResult> {
    let disc = discretize(model, left, right, mu, n_grid)?;
    let raw = &model.raw;
    let k = (PI / (right - left)).powi(2);
    let decoupled = (raw.diffusion_birds * k + raw.recovery_rate)
        .min(raw.diffusion_mosquitoes * k + raw.death_rate);
    let initial_shift = decoupled - (disc.a1n1 * disc.a2n2).sqrt();
    let scale_floor = raw.recovery_rate.min(raw.death_rate);

    match inverse_iteration(&disc, initial_shift, scale_floor, true) {
        Err(Error::EigenNoConvergence { .. }) => {
            // Stalled: bracket from a coarse dense solve and retry with a
            // fixed, safely lower shift.
            let coarse = dense_lambda0(model, left, right, mu, DENSE_GRID)?;
            let margin = 0.5 * coarse.abs().max(scale_floor);
            inverse_iteration(&disc, initial_shift.min(coarse - margin), scale_floor, false)
        }
        other => other,
    }
    .map(|(value, x, residual, iterations)| {
        let (phi, psi) = split(&x);
        EigenResult {
            kind: EigenKind::Lambda0,
            value,
            phi,
            psi,
            n_grid,
            interval: (left, right),
            residual,
            iterations,
        }
    })
}

fn inverse_iteration(
    disc: &Discretization,
    initial_shift: f64,
    scale_floor: f64,
    adaptive: bool,
) -> Result<(f64, Vec<[f64; 2]>, f64, usize)> {
    let n = disc.bird.diag.len();
    let base = coupled_matrix(disc, 0.0);
    let mut x: Vec<[f64; 2]> = sine_profile(n).into_iter().map(|s| [s, s]).collect();
    let mut shift = initial_shift;
    let mut residual = f64::INFINITY;

    for iter in 0..=MAX_ITERATIONS {
        let y = base.apply(&x);
        let (lo, hi) = ratio_bounds(&x, &y).ok_or(Error::MixedSign)?;
        let (num, den) = x.iter().zip(&y).fold((0.0, 0.0), |(a, b), (xi, yi)| {
            (a + xi[0] * yi[0] + xi[1] * yi[1], b + xi[0] * xi[0] + xi[1] * xi[1])
        });
        let lambda = num / den;
        let peak = x.iter().fold(0.0f64, |a, v| a.max(v[0].abs()).max(v[1].abs()));
        residual = x
            .iter()
            .zip(&y)
            .fold(0.0f64, |a, (xi, yi)| {
                a.max((yi[0] - lambda * xi[0]).abs())
                    .max((yi[1] - lambda * xi[1]).abs())
            })
            / peak;
        let scale = lambda.abs().max(scale_floor);
        if residual <= TOLERANCE * scale {
            normalize(&mut x);
            let (phi, psi) = split(&x);
            check_positive(&phi, &psi)?;
            return Ok((lambda, x, residual / scale, iter));
        }
        if iter == MAX_ITERATIONS {
            break;
        }
        let below = lo - (0.1 * (hi - lo).max(0.0)).max(1e-12 * scale);
        if iter == 0 {
            shift = initial_shift.min(below);
        } else if adaptive {
            shift = below;
        }
        let mut shifted = base.clone();
        for block in shifted.diag.iter_mut() {
            block[0][0] -= shift;
            block[1][1] -= shift;
        }
        x = shifted.solve(&x).ok_or_else(|| Error::EigenNoConvergence {
            iterations: iter,
            residual,
        })?;
        if x.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
            return Err(Error::EigenNoConvergence {
                iterations: iter,
                residual,
            });
        }
        normalize(&mut x);
    }
    Err(Error::EigenNoConvergence {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

/// Largest `R0^D` admitting a positive eigenpair of
/// `L1 phi = (a1 N1 / R) psi`, `L2 psi = (a2 N2 / R) phi`.
///
/// Power iteration on `L1^{-1} L2^{-1}` acting on the bird component; its
/// spectral radius is `R^2 / (a1 N1 a2 N2)`.
pub fn r0_numeric(
    model: &Model,
    left: f64,
    right: f64,
    mu: f64,
    n_grid: usize,
) -> Result<EigenResult> {
    let disc = discretize(model, left, right, mu, n_grid)?;
    if disc.a1n1 == 0.0 || disc.a2n2 == 0.0 {
        return Err(Error::NoInfectionLoop {
            a1n1: disc.a1n1,
            a2n2: disc.a2n2,
        });
    }
    let mut phi = sine_profile(n_grid);
    let mut gap = f64::INFINITY;
    let mut rho = 0.0;
    let mut iterations = POWER_MAX_ITERATIONS;
    for iter in 0..POWER_MAX_ITERATIONS {
        let next = disc.bird.solve(&disc.mosquito.solve(&phi));
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (p, q) in phi.iter().zip(&next) {
            if !(*q > 0.0) {
                return Err(Error::MixedSign);
            }
            let r = q / p;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        rho = 0.5 * (lo + hi);
        gap = (hi - lo) / hi;
        let peak = next.iter().cloned().fold(0.0, f64::max);
        phi = next.into_iter().map(|v| v / peak).collect();
        if gap <= TOLERANCE {
            iterations = iter + 1;
            break;
        }
    }
    if gap > TOLERANCE {
        return Err(Error::EigenNoConvergence {
            iterations: POWER_MAX_ITERATIONS,
            residual: gap,
        });
    }

    let value = (disc.a1n1 * disc.a2n2 * rho).sqrt();
    let psi: Vec<f64> = disc
        .mosquito
        .solve(&phi)
        .into_iter()
        .map(|v| v * disc.a2n2 / value)
        .collect();
    check_positive(&phi, &psi)?;

    let lhs1 = disc.bird.apply(&phi);
    let lhs2 = disc.mosquito.apply(&psi);
    let r1: Vec<f64> = lhs1
        .iter()
        .zip(&psi)
        .map(|(l, p)| l - disc.a1n1 / value * p)
        .collect();
    let r2: Vec<f64> = lhs2
        .iter()
        .zip(&phi)
        .map(|(l, p)| l - disc.a2n2 / value * p)
        .collect();
    let scale = max_abs(&lhs1).max(max_abs(&lhs2));
    let residual = max_abs(&r1).max(max_abs(&r2)) / scale;

    Ok(EigenResult {
        kind: EigenKind::ReproductionNumber,
        value,
        phi,
        psi,
        n_grid,
        interval: (left, right),
        residual,
        iterations,
    })
}

/// Smallest real part over the full spectrum of the coupled matrix, by a
/// dense eigensolve. Only sensible for small grids.
pub fn dense_lambda0(model: &Model, left: f64, right: f64, mu: f64, n_grid: usize) -> Result<f64> {
    let disc = discretize(model, left, right, mu, n_grid)?;
    let n = n_grid;
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        let (b, q) = (2 * i, 2 * i + 1);
        m[(b, b)] = disc.bird.diag[i];
        m[(q, q)] = disc.mosquito.diag[i];
        m[(b, q)] = -disc.a1n1;
        m[(q, b)] = -disc.a2n2;
        if i > 0 {
            m[(b, b - 2)] = disc.bird.lower[i];
            m[(q, q - 2)] = disc.mosquito.lower[i];
        }
        if i + 1 < n {
            m[(b, b + 2)] = disc.bird.upper[i];
            m[(q, q + 2)] = disc.mosquito.upper[i];
        }
    }
    let spectrum = m.complex_eigenvalues();
    Ok(spectrum.iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets::low_transmission;
    use crate::model::RawParams;

    fn model(mu: f64) -> Model {
        Model::new(low_transmission(mu)).unwrap()
    }

    fn decoupled() -> Model {
        let raw = RawParams {
            biting_rate: 0.0,
            ..low_transmission(0.0)
        };
        Model::new(raw).unwrap()
    }

    #[test]
    fn decoupled_matches_sturm_liouville() {
        let m = decoupled();
        let h0 = 15.0;
        let k = (PI / (2.0 * h0)).powi(2);
        let exact = (6.0 * k + 0.6f64).min(k + 0.3);
        let mut prev_err = f64::INFINITY;
        for n in [50, 100, 200] {
            let r = principal_lambda0(&m, -h0, h0, 0.0, n).unwrap();
            let err = (r.value - exact).abs();
            assert!(err < 1e-3, "n={n} err={err}");
            assert!(err < prev_err);
            prev_err = err;
        }
    }

    #[test]
    fn decoupled_has_no_infection_loop() {
        let m = decoupled();
        assert!(matches!(
            r0_numeric(&m, -15.0, 15.0, 0.0, 101),
            Err(Error::NoInfectionLoop { .. })
        ));
        let raw = RawParams {
            transmission_to_birds: 0.0,
            ..low_transmission(0.0)
        };
        let m = Model::new(raw).unwrap();
        assert!(matches!(
            r0_numeric(&m, -15.0, 15.0, 0.0, 101),
            Err(Error::NoInfectionLoop { .. })
        ));
    }

    #[test]
    fn lambda0_matches_dense_spectrum() {
        for mu in [0.0, 1.5, 3.0] {
            let m = model(mu);
            let it = principal_lambda0(&m, -15.0, 15.0, mu, 40).unwrap();
            let dense = dense_lambda0(&m, -15.0, 15.0, mu, 40).unwrap();
            assert!((it.value - dense).abs() < 1e-8, "mu={mu}: {} vs {dense}", it.value);
        }
    }

    #[test]
    fn negative_lambda_when_reproduction_above_one() {
        let m = model(0.0);
        let r = principal_lambda0(&m, -15.0, 15.0, 0.0, 201).unwrap();
        assert!(r.value < 0.0);
        assert!(r.phi.iter().chain(&r.psi).all(|v| *v > 0.0));
        assert!((r.phi.iter().cloned().fold(0.0, f64::max) - 1.0).abs() < 1e-12);
        assert!(r.residual <= TOLERANCE);
    }

    #[test]
    fn r0_numeric_residual_and_positivity() {
        let m = model(3.0);
        let r = r0_numeric(&m, -15.0, 15.0, 3.0, 201).unwrap();
        assert_eq!(r.kind, EigenKind::ReproductionNumber);
        assert!(r.residual < 1e-8, "residual {}", r.residual);
        assert!(r.phi.iter().chain(&r.psi).all(|v| *v > 0.0));
        // sign agreement with lambda0
        let l = principal_lambda0(&m, -15.0, 15.0, 3.0, 201).unwrap();
        assert_eq!(l.value < 0.0, r.value > 1.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = model(0.0);
        assert!(matches!(
            principal_lambda0(&m, 1.0, -1.0, 0.0, 50),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            principal_lambda0(&m, -1.0, 1.0, 0.0, 8),
            Err(Error::Domain(_))
        ));
        // Peclet >= 1
        assert!(matches!(
            r0_numeric(&m, -500.0, 500.0, 20.0, 20),
            Err(Error::Domain(_))
        ));
    }
}
