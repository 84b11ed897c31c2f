//! Discrete energy, Euler-Lagrange gradient and its implicit/explicit split.

use num_complex::Complex64;

use crate::field::{local_observables, SpinorField, ELLS};
use crate::grid::Grid;
use crate::linalg::{apply_laplacian, gradient_norm_sqr};
use crate::params::ModelParams;

const SQRT6: f64 = 2.449_489_742_783_178;
const HALF_SQRT6: f64 = SQRT6 / 2.0;
const INV_SQRT5: f64 = 0.447_213_595_499_958;

/// Discrete masses of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Masses {
    pub total: f64,
    pub magnetization: f64,
    /// Per-component masses in storage order `2, 1, 0, -1, -2`.
    pub components: [f64; 5],
}

pub fn component_masses(phi: &SpinorField) -> [f64; 5] {
    let grid = phi.grid();
    let vol = grid.cell_volume();
    std::array::from_fn(|k| {
        let c = phi.component(k);
        grid.interior().map(|i| c[i].norm_sqr()).sum::<f64>() * vol
    })
}

pub fn masses(phi: &SpinorField) -> Masses {
    let components = component_masses(phi);
    Masses {
        total: components.iter().sum(),
        magnetization: components.iter().zip(ELLS).map(|(n, l)| n * l as f64).sum(),
        components,
    }
}

/// Potential plus interaction energy density at one point.
#[inline]
pub fn local_energy_density(p: &[Complex64; 5], v: f64, b: &ModelParams) -> f64 {
    let o = local_observables(p);
    v * o.rho
        + 0.5 * b.beta0 * o.rho * o.rho
        + 0.5 * b.beta1 * (o.f_plus.norm_sqr() + o.f_z * o.f_z)
        + 0.5 * b.beta2 * o.a00.norm_sqr()
}

/// `G_l - (V + beta0 rho) phi_l`: the spin-exchange and singlet parts of the
/// gradient at one point.
#[inline]
pub fn local_spin_gradient(p: &[Complex64; 5], beta1: f64, beta2: f64) -> [Complex64; 5] {
    let o = local_observables(p);
    let [p2, p1, p0, m1, m2] = *p;
    let fp = o.f_plus;
    let fm = fp.conj();
    let fz = o.f_z;
    let s = beta2 * INV_SQRT5 * o.a00;
    [
        p2 * (2.0 * beta1 * fz) + fm * p1 * beta1 + s * m2.conj(),
        p1 * (beta1 * fz) + (fm * p0 * HALF_SQRT6 + fp * p2) * beta1 - s * m1.conj(),
        (fp * p1 + fm * m1) * (HALF_SQRT6 * beta1) + s * p0.conj(),
        m1 * (-beta1 * fz) + (fp * p0 * HALF_SQRT6 + fm * m2) * beta1 - s * p1.conj(),
        m2 * (-2.0 * beta1 * fz) + fp * m1 * beta1 + s * p2.conj(),
    ]
}

/// Real coefficients `a_l` and remainders `f_l` with
/// `a_l phi_l + f_l = local_spin_gradient(p)_l`. Both vanish identically on
/// the components of nematic and cyclic closed-form states that are zero.
#[inline]
pub fn local_split(p: &[Complex64; 5], beta1: f64, beta2: f64) -> ([f64; 5], [Complex64; 5]) {
    let o = local_observables(p);
    let [p2, p1, p0, m1, m2] = *p;
    let [n2, n1, n0, nm1, nm2] = p.map(|z| z.norm_sqr());
    let fp = o.f_plus;
    let fm = fp.conj();
    let fz = o.f_z;
    let a_s = o.a00 * INV_SQRT5;
    let a = [
        beta1 * (2.0 * n1 + 2.0 * fz) + 0.4 * beta2 * nm2,
        beta1 * (2.0 * n2 + fz + 3.0 * n0) + 0.4 * beta2 * nm1,
        3.0 * beta1 * (n1 + nm1) + 0.2 * beta2 * n0,
        beta1 * (2.0 * nm2 - fz + 3.0 * n0) + 0.4 * beta2 * n1,
        beta1 * (2.0 * nm1 - 2.0 * fz) + 0.4 * beta2 * n2,
    ];
    let f = [
        (fm - p1.conj() * p2 * 2.0) * p1 * beta1 + (a_s - p2 * m2 * 0.4) * m2.conj() * beta2,
        ((fp - p2.conj() * p1 * 2.0) * p2 + (fm * HALF_SQRT6 - p0.conj() * p1 * 3.0) * p0) * beta1
            + (-a_s - p1 * m1 * 0.4) * m1.conj() * beta2,
        ((fp * HALF_SQRT6 - p1.conj() * p0 * 3.0) * p1 + (fm * HALF_SQRT6 - m1.conj() * p0 * 3.0) * m1)
            * beta1
            + (a_s - p0 * p0 * 0.2) * p0.conj() * beta2,
        ((fm - m2.conj() * m1 * 2.0) * m2 + (fp * HALF_SQRT6 - p0.conj() * m1 * 3.0) * p0) * beta1
            + (-a_s - m1 * p1 * 0.4) * p1.conj() * beta2,
        (fp - m1.conj() * m2 * 2.0) * m1 * beta1 + (a_s - m2 * p2 * 0.4) * p2.conj() * beta2,
    ];
    (a, f)
}

/// Pointwise split coefficients of a whole field, together with `rho`.
#[derive(Debug, Clone)]
pub struct Splitting {
    pub rho: Vec<f64>,
    pub a: [Vec<f64>; 5],
    pub f: [Vec<Complex64>; 5],
}

/// Least-squares Lagrange multipliers of a near-stationary field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multipliers {
    pub mu: f64,
    pub lambda: f64,
    /// Discrete L2 norm of `G_l - (mu + l lambda) phi_l`.
    pub residual: f64,
    /// False when the normal equations were singular and `lambda` was set to 0.
    pub lambda_determined: bool,
}

/// Energy functional of a fixed model on a fixed grid, with the potential
/// sampled once.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    grid: Grid,
    params: ModelParams,
    v: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(grid: &Grid, params: &ModelParams) -> Self {
        let v = grid.sample(|x| params.potential.eval(x));
        Hamiltonian {
            grid: grid.clone(),
            params: params.clone(),
            v,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Potential values at every stored point.
    pub fn potential(&self) -> &[f64] {
        &self.v
    }

    pub fn energy(&self, phi: &SpinorField) -> f64 {
        let g = &self.grid;
        let kinetic: f64 = phi
            .components()
            .iter()
            .map(|c| 0.5 * gradient_norm_sqr(c, g))
            .sum();
        let local: f64 = g
            .interior()
            .map(|i| local_energy_density(&phi.at(i), self.v[i], &self.params))
            .sum::<f64>()
            * g.cell_volume();
        kinetic + local
    }

    /// `G_l = dE/d conj(phi_l)` per unit cell volume, so that the first
    /// variation of the energy is `2 Re <G, dPhi>_h`.
    pub fn gradient(&self, phi: &SpinorField) -> SpinorField {
        let g = &self.grid;
        let b = &self.params;
        let mut comps: [Vec<Complex64>; 5] =
            std::array::from_fn(|k| apply_laplacian(phi.component(k), g).into_iter().map(|z| z * -0.5).collect());
        for i in g.interior() {
            let p = phi.at(i);
            let rho: f64 = p.iter().map(|z| z.norm_sqr()).sum();
            let diag = self.v[i] + b.beta0 * rho;
            let spin = local_spin_gradient(&p, b.beta1, b.beta2);
            for k in 0..5 {
                comps[k][i] += p[k] * diag + spin[k];
            }
        }
        SpinorField::from_components(g.clone(), comps)
    }

    pub fn split(&self, phi: &SpinorField) -> Splitting {
        let g = &self.grid;
        let n = g.len();
        let mut out = Splitting {
            rho: vec![0.0; n],
            a: std::array::from_fn(|_| vec![0.0; n]),
            f: std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n]),
        };
        for i in g.interior() {
            let p = phi.at(i);
            out.rho[i] = p.iter().map(|z| z.norm_sqr()).sum();
            let (a, f) = local_split(&p, self.params.beta1, self.params.beta2);
            for k in 0..5 {
                out.a[k][i] = a[k];
                out.f[k][i] = f[k];
            }
        }
        out
    }

    /// Fits `G_l ~ (mu + l lambda) phi_l` in the least-squares sense.
    /// Returns `None` for a field with no mass.
    pub fn multipliers(&self, phi: &SpinorField) -> Option<Multipliers> {
        let g = &self.grid;
        let grad = self.gradient(phi);
        let vol = g.cell_volume();
        let mut nl = [0.0; 5];
        let mut rl = [0.0; 5];
        for k in 0..5 {
            let (c, gk) = (phi.component(k), grad.component(k));
            for i in g.interior() {
                nl[k] += c[i].norm_sqr();
                rl[k] += (c[i].conj() * gk[i]).re;
            }
            nl[k] *= vol;
            rl[k] *= vol;
        }
        let ell = ELLS.map(f64::from);
        let s0: f64 = nl.iter().sum();
        if !(s0 > 0.0) {
            return None;
        }
        let s1: f64 = (0..5).map(|k| ell[k] * nl[k]).sum();
        let s2: f64 = (0..5).map(|k| ell[k] * ell[k] * nl[k]).sum();
        let r0: f64 = rl.iter().sum();
        let r1: f64 = (0..5).map(|k| ell[k] * rl[k]).sum();
        // s0 s2 - s1^2 is the mass-weighted variance of l times s0^2
        let det = s0 * s2 - s1 * s1;
        let (mu, lambda, determined) = if det > 1e-12 * s0 * s0 {
            ((r0 * s2 - r1 * s1) / det, (s0 * r1 - s1 * r0) / det, true)
        } else {
            (r0 / s0, 0.0, false)
        };
        let mut res = 0.0;
        for k in 0..5 {
            let m = mu + ell[k] * lambda;
            let (c, gk) = (phi.component(k), grad.component(k));
            for i in g.interior() {
                res += (gk[i] - c[i] * m).norm_sqr();
            }
        }
        Some(Multipliers {
            mu,
            lambda,
            residual: (res * vol).sqrt(),
            lambda_determined: determined,
        })
    }
}

pub fn total_energy(phi: &SpinorField, params: &ModelParams) -> f64 {
    Hamiltonian::new(phi.grid(), params).energy(phi)
}

pub fn el_gradient(phi: &SpinorField, params: &ModelParams) -> SpinorField {
    Hamiltonian::new(phi.grid(), params).gradient(phi)
}

pub fn split_af(phi: &SpinorField, params: &ModelParams) -> Splitting {
    Hamiltonian::new(phi.grid(), params).split(phi)
}

pub fn el_residual(phi: &SpinorField, params: &ModelParams) -> Option<Multipliers> {
    Hamiltonian::new(phi.grid(), params).multipliers(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_point(rng: &mut ChaCha8Rng) -> [Complex64; 5] {
        std::array::from_fn(|_| cz(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_field(grid: &Grid, rng: &mut ChaCha8Rng) -> SpinorField {
        SpinorField::from_fn(grid.clone(), |x| {
            let env = (-0.5 * x.iter().map(|t| t * t).sum::<f64>()).exp();
            random_point(rng).map(|z| z * env)
        })
    }

    fn params(b1: f64, b2: f64) -> ModelParams {
        ModelParams::new(10.0, b1, b2, 0.5, PotentialSpec::harmonic()).unwrap()
    }

    #[test]
    fn zero_field() {
        let g = Grid::line(-4.0, 4.0, 32).unwrap();
        let z = SpinorField::zeros(g);
        assert_eq!(total_energy(&z, &params(-1.0, 2.0)), 0.0);
        let m = masses(&z);
        assert_eq!((m.total, m.magnetization, m.components), (0.0, 0.0, [0.0; 5]));
        assert!(el_residual(&z, &params(1.0, 1.0)).is_none());
    }

    #[test]
    fn single_component_energy_by_quadrature() {
        let g = Grid::line(-4.0, 4.0, 64).unwrap();
        let h = g.spacing(0);
        let prof: Vec<f64> = g.sample(|x| (-x[0] * x[0]).exp() * (1.0 + 0.3 * x[0]) * (16.0 - x[0] * x[0]));
        let phi = SpinorField::from_fn(g.clone(), |x| {
            let i = ((x[0] + 4.0) / h).round() as usize;
            [cz(0.0, 0.0), cz(0.0, 0.0), cz(prof[i], 0.0), cz(0.0, 0.0), cz(0.0, 0.0)]
        });
        let p = params(-3.0, 7.0);
        // independent: trapezoid-free face sum and rectangle rule
        let mut kin = 0.0;
        for i in 0..prof.len() - 1 {
            kin += 0.5 * ((prof[i + 1] - prof[i]) / h).powi(2) * h;
        }
        let mut pot = 0.0;
        for i in 1..prof.len() - 1 {
            let x = -4.0 + i as f64 * h;
            let g2 = prof[i] * prof[i];
            pot += (0.5 * x * x * g2 + (p.beta0 / 2.0 + p.beta2 / 10.0) * g2 * g2) * h;
        }
        let e = total_energy(&phi, &p);
        assert!((e - (kin + pot)).abs() < 1e-12 * e.abs(), "{e} vs {}", kin + pot);
    }

    #[test]
    fn scalar_reduction_of_gradient() {
        let g = Grid::line(-4.0, 4.0, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let base = random_field(&g, &mut rng);
        let phi = base.scaled(&[0.0, 0.0, 1.0, 0.0, 0.0].map(|s| cz(s, 0.0)));
        let p = params(0.0, 0.0);
        let grad = el_gradient(&phi, &p);
        let lap = apply_laplacian(phi.component(2), &g);
        for i in g.interior() {
            let x = g.point(i)[0];
            let u = phi.component(2)[i];
            let want = -lap[i] * 0.5 + u * (0.5 * x * x) + u * (p.beta0 * u.norm_sqr());
            assert!((grad.component(2)[i] - want).norm() < 1e-12);
            for k in [0, 1, 3, 4] {
                assert_eq!(grad.component(k)[i], cz(0.0, 0.0));
            }
        }
    }

    #[test]
    fn split_single_component() {
        let gv = cz(0.8, -0.3);
        let z = cz(0.0, 0.0);
        let (b1, b2) = (1.7, -2.3);
        let (a, f) = local_split(&[z, z, gv, z, z], b1, b2);
        assert!((a[2] - 0.2 * b2 * gv.norm_sqr()).abs() < 1e-15);
        let want = gv * gv * INV_SQRT5 * INV_SQRT5 * gv.conj() * b2 - gv * (0.2 * b2 * gv.norm_sqr());
        assert!((f[2] - want).norm() < 1e-15);
        let (a0, f0) = local_split(&[gv; 5], 0.0, 0.0);
        assert_eq!(a0, [0.0; 5]);
        assert!(f0.iter().all(|w| *w == z));
    }

    #[test]
    fn split_identity_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let p = random_point(&mut rng);
            let (b1, b2) = (rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
            let g = local_spin_gradient(&p, b1, b2);
            let (a, f) = local_split(&p, b1, b2);
            let scale = (b1.abs() + b2.abs()) * p.iter().map(|z| z.norm_sqr()).sum::<f64>().powf(1.5);
            for k in 0..5 {
                assert!((p[k] * a[k] + f[k] - g[k]).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn split_vanishes_on_dead_components() {
        let z = cz(0.0, 0.0);
        let nem = [cz(0.7, 0.1), z, z, z, cz(0.5, -0.2)];
        let cyc = [cz(0.6, 0.0), z, z, cz(0.4, 0.3), z];
        for p in [nem, cyc] {
            let (_, f) = local_split(&p, 3.0, -1.5);
            assert!(f.iter().all(|w| w.norm() < 1e-15), "{f:?}");
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for grid in [Grid::line(-3.0, 3.0, 24).unwrap(), Grid::square(-3.0, 3.0, 10).unwrap()] {
            let phi = random_field(&grid, &mut rng);
            let dphi = random_field(&grid, &mut rng);
            let p = params(-1.3, 2.2);
            let h = Hamiltonian::new(&grid, &p);
            let grad = h.gradient(&phi);
            let vol = grid.cell_volume();
            let lin: f64 = (0..5)
                .map(|k| {
                    grid.interior()
                        .map(|i| (grad.component(k)[i].conj() * dphi.component(k)[i]).re)
                        .sum::<f64>()
                })
                .sum::<f64>()
                * vol
                * 2.0;
            let mut errs = vec![];
            for eps in [1e-2, 1e-3] {
                let fd = (h.energy(&phi.axpy(eps, &dphi)) - h.energy(&phi.axpy(-eps, &dphi))) / (2.0 * eps);
                errs.push((fd - lin).abs());
            }
            assert!(errs[1] < errs[0] / 50.0, "{errs:?}");
        }
    }

    #[test]
    fn multipliers_of_discrete_eigenvector() {
        // beta = 0, box potential: sin modes are exact eigenvectors of -lap/2
        let n = 32;
        let g = Grid::line(0.0, 1.0, n).unwrap();
        let hh = 1.0 / n as f64;
        let lam = |k: f64| (1.0 - (k * std::f64::consts::PI * hh).cos()) / (hh * hh);
        let p = ModelParams::new(0.0, 0.0, 0.0, 0.5, PotentialSpec::Box).unwrap();
        let s = |k: f64, x: f64| (k * std::f64::consts::PI * x).sin();
        // component l = 1 uses mode 1, l = -1 uses mode 2: mu + l lambda = eigenvalue
        let phi = SpinorField::from_fn(g.clone(), |x| {
            [cz(0.0, 0.0), cz(s(1.0, x[0]), 0.0), cz(0.0, 0.0), cz(0.0, 0.5 * s(2.0, x[0])), cz(0.0, 0.0)]
        });
        let m = el_residual(&phi, &p).unwrap();
        assert!(m.lambda_determined);
        assert!((m.mu - 0.5 * (lam(1.0) + lam(2.0))).abs() < 1e-9);
        assert!((m.lambda - 0.5 * (lam(1.0) - lam(2.0))).abs() < 1e-9);
        assert!(m.residual < 1e-9);

        let single = phi.scaled(&[0.0, 1.0, 0.0, 0.0, 0.0].map(|v| cz(v, 0.0)));
        let m1 = el_residual(&single, &p).unwrap();
        assert!(!m1.lambda_determined);
        assert_eq!(m1.lambda, 0.0);
        assert!((m1.mu - lam(1.0)).abs() < 1e-9);
    }

    #[test]
    fn far_from_stationary_residual_is_large() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = Grid::line(-3.0, 3.0, 32).unwrap();
        let phi = random_field(&g, &mut rng);
        let m = el_residual(&phi, &params(1.0, 1.0)).unwrap();
        assert!(m.residual > 1.0);
    }
}
