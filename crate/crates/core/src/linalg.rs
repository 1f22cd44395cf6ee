//! Banded solvers shared by the time stepper, the eigen solvers and the
//! traveling-wave Newton iteration.

/// 2x2 block stored row-major.
pub type Block = [[f64; 2]; 2];

pub const ZERO_BLOCK: Block = [[0.0; 2]; 2];

/// Solves a tridiagonal system in place (Thomas algorithm).
///
/// `lower[i]` couples row `i` to `i - 1` (`lower[0]` unused), `upper[i]`
/// couples row `i` to `i + 1` (last entry unused). No pivoting: callers
/// only pass diagonally dominant or M-matrix systems.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = rhs.len();
    debug_assert!(lower.len() == n && diag.len() == n && upper.len() == n);
    if n == 0 {
        return;
    }
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    c[0] = upper[0] / beta;
    rhs[0] /= beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / beta;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Multiplies a tridiagonal matrix by `x`.
pub fn tridiagonal_apply(lower: &[f64], diag: &[f64], upper: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let mut s = diag[i] * x[i];
            if i > 0 {
                s += lower[i] * x[i - 1];
            }
            if i + 1 < n {
                s += upper[i] * x[i + 1];
            }
            s
        })
        .collect()
}

/// Block tridiagonal matrix with 2x2 blocks, one block row per grid point.
#[derive(Debug, Clone)]
pub struct BlockTridiagonal {
    pub lower: Vec<Block>,
    pub diag: Vec<Block>,
    pub upper: Vec<Block>,
}

impl BlockTridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![ZERO_BLOCK; n],
            diag: vec![ZERO_BLOCK; n],
            upper: vec![ZERO_BLOCK; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &[[f64; 2]]) -> Vec<[f64; 2]> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut s = mat_vec(&self.diag[i], &x[i]);
                if i > 0 {
                    s = add(s, mat_vec(&self.lower[i], &x[i - 1]));
                }
                if i + 1 < n {
                    s = add(s, mat_vec(&self.upper[i], &x[i + 1]));
                }
                s
            })
            .collect()
    }

    /// Block Thomas elimination. Returns `None` if a pivot block is singular.
    pub fn solve(&self, rhs: &[[f64; 2]]) -> Option<Vec<[f64; 2]>> {
        let n = rhs.len();
        debug_assert_eq!(n, self.len());
        if n == 0 {
            return Some(Vec::new());
        }
        // c[i] = piv_i^{-1} upper_i, y[i] = piv_i^{-1} (rhs_i - lower_i y_{i-1})
        let mut c = vec![ZERO_BLOCK; n];
        let mut y = vec![[0.0; 2]; n];
        let mut inv = invert(&self.diag[0])?;
        c[0] = mat_mul(&inv, &self.upper[0]);
        y[0] = mat_vec(&inv, &rhs[0]);
        for i in 1..n {
            let piv = sub_block(&self.diag[i], &mat_mul(&self.lower[i], &c[i - 1]));
            inv = invert(&piv)?;
            c[i] = mat_mul(&inv, &self.upper[i]);
            let r = sub(rhs[i], mat_vec(&self.lower[i], &y[i - 1]));
            y[i] = mat_vec(&inv, &r);
        }
        for i in (0..n - 1).rev() {
            y[i] = sub(y[i], mat_vec(&c[i], &y[i + 1]));
        }
        Some(y)
    }
}

fn invert(m: &Block) -> Option<Block> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    if det == 0.0 || !det.is_finite() || det.abs() <= f64::EPSILON * scale * scale {
        return None;
    }
    Some([
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ])
}

fn mat_mul(a: &Block, b: &Block) -> Block {
    let mut out = ZERO_BLOCK;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat_vec(a: &Block, x: &[f64; 2]) -> [f64; 2] {
    [
        a[0][0] * x[0] + a[0][1] * x[1],
        a[1][0] * x[0] + a[1][1] * x[1],
    ]
}

fn sub_block(a: &Block, b: &Block) -> Block {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

fn add(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

/// Max-norm of a slice.
pub fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}
