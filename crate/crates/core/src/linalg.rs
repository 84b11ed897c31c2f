//! Finite-difference Laplacian and the implicit solves of one time step.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tolerances for the per-component linear solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSolverConfig {
    /// Relative residual target of the 2D conjugate-gradient solve.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LinearSolverConfig {
    fn default() -> Self {
        LinearSolverConfig {
            tol: 1e-12,
            max_iter: 10_000,
        }
    }
}

/// Central second difference `delta_h^2 u` on interior points; boundary
/// entries of the result are zero.
pub fn apply_laplacian(u: &[Complex64], grid: &Grid) -> Vec<Complex64> {
    let mut out = vec![ZERO; grid.len()];
    let sx = grid.stride();
    let ihx2 = 1.0 / grid.spacing(0).powi(2);
    let ihy2 = if grid.dim() == 2 {
        1.0 / grid.spacing(1).powi(2)
    } else {
        0.0
    };
    for idx in grid.interior() {
        let mut v = (u[idx + sx] + u[idx - sx] - u[idx] * 2.0) * ihx2;
        if grid.dim() == 2 {
            v += (u[idx + 1] + u[idx - 1] - u[idx] * 2.0) * ihy2;
        }
        out[idx] = v;
    }
    out
}

/// `h^d sum_faces |D_h u|^2`, with forward differences across every cell face.
/// Summation by parts gives `-h^d sum_interior conj(u) delta_h^2 u`.
pub fn gradient_norm_sqr(u: &[Complex64], grid: &Grid) -> f64 {
    let vol = grid.cell_volume();
    let mut sum = 0.0;
    if grid.dim() == 1 {
        let ih2 = 1.0 / grid.spacing(0).powi(2);
        for w in u.windows(2) {
            sum += (w[1] - w[0]).norm_sqr() * ih2;
        }
    } else {
        let nx = grid.axis(0).points();
        let ny = grid.axis(1).points();
        let ihx2 = 1.0 / grid.spacing(0).powi(2);
        let ihy2 = 1.0 / grid.spacing(1).powi(2);
        for i in 0..nx {
            for j in 0..ny {
                let idx = grid.flatten(i, j);
                if i + 1 < nx {
                    sum += (u[idx + ny] - u[idx]).norm_sqr() * ihx2;
                }
                if j + 1 < ny {
                    sum += (u[idx + 1] - u[idx]).norm_sqr() * ihy2;
                }
            }
        }
    }
    sum * vol
}

/// Solves `(diag - delta_h^2 / 2) u = rhs` on the interior with zero
/// boundary values. One dimension uses the Thomas algorithm; two dimensions
/// use Jacobi-preconditioned conjugate gradients warm-started from `guess`.
pub fn solve_component_system(
    diag: &[f64],
    rhs: &[Complex64],
    grid: &Grid,
    guess: Option<&[Complex64]>,
    cfg: &LinearSolverConfig,
) -> Result<Vec<Complex64>> {
    for idx in grid.interior() {
        if !(diag[idx] > 0.0) {
            return Err(Error::NonPositiveDiagonal {
                component: usize::MAX,
                point: idx,
                value: diag[idx],
            });
        }
    }
    if grid.dim() == 1 {
        Ok(thomas(diag, rhs, grid))
    } else {
        pcg(diag, rhs, grid, guess, cfg)
    }
}

fn thomas(diag: &[f64], rhs: &[Complex64], grid: &Grid) -> Vec<Complex64> {
    let n = grid.len();
    let ih2 = 1.0 / grid.spacing(0).powi(2);
    let off = -0.5 * ih2;
    let m = n - 2;
    let mut c = vec![0.0; m];
    let mut d = vec![ZERO; m];
    // forward sweep over interior points 1..n-1
    let mut prev_c = 0.0;
    let mut prev_d = ZERO;
    for k in 0..m {
        let b = diag[k + 1] + ih2;
        let denom = b - off * prev_c;
        c[k] = off / denom;
        d[k] = (rhs[k + 1] - prev_d * off) / denom;
        prev_c = c[k];
        prev_d = d[k];
    }
    let mut u = vec![ZERO; n];
    let mut next = ZERO;
    for k in (0..m).rev() {
        let v = d[k] - next * c[k];
        u[k + 1] = v;
        next = v;
    }
    u
}

fn apply_2d(diag: &[f64], u: &[Complex64], grid: &Grid, out: &mut [Complex64]) {
    let ny = grid.stride();
    let ihx2 = 1.0 / grid.spacing(0).powi(2);
    let ihy2 = 1.0 / grid.spacing(1).powi(2);
    let centre = ihx2 + ihy2;
    for idx in grid.interior() {
        out[idx] = u[idx] * (diag[idx] + centre)
            - (u[idx + ny] + u[idx - ny]) * (0.5 * ihx2)
            - (u[idx + 1] + u[idx - 1]) * (0.5 * ihy2);
    }
}

fn dot(a: &[Complex64], b: &[Complex64], grid: &Grid) -> Complex64 {
    grid.interior().map(|i| a[i].conj() * b[i]).sum()
}

fn pcg(
    diag: &[f64],
    rhs: &[Complex64],
    grid: &Grid,
    guess: Option<&[Complex64]>,
    cfg: &LinearSolverConfig,
) -> Result<Vec<Complex64>> {
    let n = grid.len();
    let centre = 1.0 / grid.spacing(0).powi(2) + 1.0 / grid.spacing(1).powi(2);
    let mut inv_d = vec![0.0; n];
    for idx in grid.interior() {
        inv_d[idx] = 1.0 / (diag[idx] + centre);
    }
    let mut x = vec![ZERO; n];
    if let Some(g) = guess {
        for idx in grid.interior() {
            x[idx] = g[idx];
        }
    }
    let mut ax = vec![ZERO; n];
    apply_2d(diag, &x, grid, &mut ax);
    let mut r = vec![ZERO; n];
    for idx in grid.interior() {
        r[idx] = rhs[idx] - ax[idx];
    }
    let bnorm = dot(rhs, rhs, grid).re.sqrt();
    if bnorm == 0.0 {
        return Ok(vec![ZERO; n]);
    }
    let mut z = vec![ZERO; n];
    for idx in grid.interior() {
        z[idx] = r[idx] * inv_d[idx];
    }
    let mut p = z.clone();
    let mut rz = dot(&r, &z, grid).re;
    let mut q = vec![ZERO; n];
    let mut rnorm = dot(&r, &r, grid).re.sqrt();
    for iter in 0..cfg.max_iter {
        if rnorm <= cfg.tol * bnorm {
            return Ok(x);
        }
        apply_2d(diag, &p, grid, &mut q);
        let pq = dot(&p, &q, grid).re;
        let alpha = rz / pq;
        for idx in grid.interior() {
            x[idx] += p[idx] * alpha;
            r[idx] -= q[idx] * alpha;
            z[idx] = r[idx] * inv_d[idx];
        }
        let rz_new = dot(&r, &z, grid).re;
        rnorm = dot(&r, &r, grid).re.sqrt();
        if !rnorm.is_finite() {
            return Err(Error::LinearSolver {
                iterations: iter + 1,
                residual: rnorm / bnorm,
            });
        }
        let beta = rz_new / rz;
        rz = rz_new;
        for idx in grid.interior() {
            p[idx] = z[idx] + p[idx] * beta;
        }
    }
    if rnorm <= cfg.tol * bnorm {
        return Ok(x);
    }
    Err(Error::LinearSolver {
        iterations: cfg.max_iter,
        residual: rnorm / bnorm,
    })
}
