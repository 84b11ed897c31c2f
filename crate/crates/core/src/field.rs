use num_complex::Complex64;

use crate::grid::Grid;

/// Magnetic quantum numbers in storage order.
pub const ELLS: [i32; 5] = [2, 1, 0, -1, -2];

/// Storage index of component `ell`.
pub const fn slot(ell: i32) -> usize {
    (2 - ell) as usize
}

/// Five complex scalar fields `phi_2, ..., phi_-2` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    grid: Grid,
    comps: [Vec<Complex64>; 5],
}

impl SpinorField {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        SpinorField {
            comps: std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n]),
            grid,
        }
    }

    /// Builds a field from component vectors, zeroing boundary entries.
    /// Each vector must hold `grid.len()` values.
    pub fn from_components(grid: Grid, mut comps: [Vec<Complex64>; 5]) -> Self {
        for c in comps.iter_mut() {
            assert_eq!(c.len(), grid.len(), "component length does not match grid");
            for idx in 0..grid.len() {
                if grid.is_boundary(idx) {
                    c[idx] = Complex64::new(0.0, 0.0);
                }
            }
        }
        SpinorField { grid, comps }
    }

    /// Samples `f(x) -> [phi_2, ..., phi_-2]` on the interior.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[f64]) -> [Complex64; 5]) -> Self {
        let mut out = SpinorField::zeros(grid);
        let idxs: Vec<usize> = out.grid.interior().collect();
        let d = out.grid.dim();
        for idx in idxs {
            let x = out.grid.point(idx);
            let v = f(&x[..d]);
            for (k, val) in v.into_iter().enumerate() {
                out.comps[k][idx] = val;
            }
        }
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn component(&self, k: usize) -> &[Complex64] {
        &self.comps[k]
    }

    pub fn component_mut(&mut self, k: usize) -> &mut [Complex64] {
        &mut self.comps[k]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 5] {
        &self.comps
    }

    pub fn into_components(self) -> [Vec<Complex64>; 5] {
        self.comps
    }

    /// The five values at one grid point.
    #[inline]
    pub fn at(&self, idx: usize) -> [Complex64; 5] {
        std::array::from_fn(|k| self.comps[k][idx])
    }

    /// Component reversal `phi_l -> phi_-l`, mapping magnetization `M` to `-M`.
    pub fn mirrored(&self) -> Self {
        let mut comps = self.comps.clone();
        comps.reverse();
        SpinorField {
            grid: self.grid.clone(),
            comps,
        }
    }

    /// Multiplies component `k` by `factors[k]`.
    pub fn scaled(&self, factors: &[Complex64; 5]) -> Self {
        let mut out = self.clone();
        for (c, &s) in out.comps.iter_mut().zip(factors) {
            c.iter_mut().for_each(|z| *z *= s);
        }
        out
    }

    /// `self + eps * other`, used by directional-derivative checks.
    pub fn axpy(&self, eps: f64, other: &SpinorField) -> Self {
        let mut out = self.clone();
        for (c, o) in out.comps.iter_mut().zip(&other.comps) {
            for (z, w) in c.iter_mut().zip(o) {
                *z += w * eps;
            }
        }
        out
    }

    /// `max_{l,j} |self - other|`.
    pub fn max_abs_diff(&self, other: &SpinorField) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }
}

/// Density, spin density and singlet amplitude at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalObservables {
    pub rho: f64,
    pub f_plus: Complex64,
    pub f_z: f64,
    pub a00: Complex64,
}

const SQRT6: f64 = 2.449_489_742_783_178;
const SQRT5: f64 = 2.236_067_977_499_79;

#[inline]
pub fn local_observables(p: &[Complex64; 5]) -> LocalObservables {
    let [p2, p1, p0, m1, m2] = *p;
    let n2 = p2.norm_sqr();
    let n1 = p1.norm_sqr();
    let n0 = p0.norm_sqr();
    let nm1 = m1.norm_sqr();
    let nm2 = m2.norm_sqr();
    LocalObservables {
        rho: n2 + n1 + n0 + nm1 + nm2,
        f_plus: (p2.conj() * p1 + m1.conj() * m2) * 2.0 + (p1.conj() * p0 + p0.conj() * m1) * SQRT6,
        f_z: 2.0 * (n2 - nm2) + n1 - nm1,
        a00: (p2 * m2 * 2.0 - p1 * m1 * 2.0 + p0 * p0) / SQRT5,
    }
}

/// Pointwise observables of a whole field.
#[derive(Debug, Clone, PartialEq)]
pub struct Observables {
    pub rho: Vec<f64>,
    pub f_plus: Vec<Complex64>,
    pub f_z: Vec<f64>,
    pub a00: Vec<Complex64>,
}

pub fn observables(phi: &SpinorField) -> Observables {
    let n = phi.grid().len();
    let mut out = Observables {
        rho: Vec::with_capacity(n),
        f_plus: Vec::with_capacity(n),
        f_z: Vec::with_capacity(n),
        a00: Vec::with_capacity(n),
    };
    for idx in 0..n {
        let o = local_observables(&phi.at(idx));
        out.rho.push(o.rho);
        out.f_plus.push(o.f_plus);
        out.f_z.push(o.f_z);
        out.a00.push(o.a00);
    }
    out
}
