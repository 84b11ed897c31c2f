//! Five-constant projection back onto the mass and magnetization constraints.

use num_complex::Complex64;

use crate::energy::component_masses;
use crate::error::{Error, Result};
use crate::field::{SpinorField, ELLS};

/// Weights below this fraction of the total are treated as exact zeros.
pub const ZERO_WEIGHT_RATIO: f64 = 1e-30;

const CASE_TOL: f64 = 1e-14;

/// Squared norms `w_l = ||phi_l||^2` of a pre-projection field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionWeights {
    /// Storage order `2, 1, 0, -1, -2`.
    pub w: [f64; 5],
    pub m: f64,
}

impl ProjectionWeights {
    pub fn new(w: [f64; 5], m: f64) -> Self {
        ProjectionWeights { w, m }
    }

    pub fn from_field(phi: &SpinorField, m: f64) -> Self {
        ProjectionWeights {
            w: component_masses(phi),
            m,
        }
    }
}

/// Which branch of the constant formula produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionCase {
    /// `M = 1` with all weight in `l = 1`.
    SingleOne,
    /// `M = 0` with all weight in `l = 0`.
    SingleZero,
    /// Weight on both sides of `M`; constants follow from the quartic root.
    Quartic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionConstants {
    /// Storage order `2, 1, 0, -1, -2`.
    pub sigma: [f64; 5],
    /// Positive root of the quartic, when that branch was taken.
    pub lambda: Option<f64>,
    pub case: ProjectionCase,
}

impl ProjectionConstants {
    pub fn identity() -> Self {
        ProjectionConstants {
            sigma: [1.0; 5],
            lambda: Some(1.0),
            case: ProjectionCase::Quartic,
        }
    }
}

/// The quartic `g(lambda) = sum_l (l - M) w_l lambda^(l+2)`, stored by power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartic {
    /// `coeffs[p]` multiplies `lambda^p`, `p = l + 2`.
    pub coeffs: [f64; 5],
}

impl Quartic {
    pub fn new(w: &[f64; 5], m: f64) -> Self {
        let mut coeffs = [0.0; 5];
        for (k, &l) in ELLS.iter().enumerate() {
            coeffs[(l + 2) as usize] = (l as f64 - m) * w[k];
        }
        Quartic { coeffs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (1..5).rev().fold(0.0, |acc, p| acc * x + p as f64 * self.coeffs[p])
    }

    /// Derivative of `g(lambda) / lambda^j` with `j` the lowest nonzero power.
    /// Positive at the root whenever the root exists.
    pub fn reduced_derivative(&self, x: f64) -> f64 {
        let j = self.coeffs.iter().position(|&c| c != 0.0).unwrap_or(0);
        (j + 1..5)
            .map(|p| (p - j) as f64 * self.coeffs[p] * x.powi((p - j - 1) as i32))
            .sum()
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.abs()))
    }
}

/// Solves for the five projection constants.
pub fn solve_sigma(weights: &ProjectionWeights) -> Result<ProjectionConstants> {
    let m = weights.m;
    for (index, &value) in weights.w.iter().enumerate() {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::NegativeWeight { index, value });
        }
    }
    let total: f64 = weights.w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::MagnetizationUnreachable("all weights vanish".into()));
    }
    let w: [f64; 5] = weights
        .w
        .map(|x| if x < ZERO_WEIGHT_RATIO * total { 0.0 } else { x / total });
    let active: Vec<i32> = ELLS.iter().zip(&w).filter(|(_, &x)| x > 0.0).map(|(&l, _)| l).collect();

    if active == [1] && (m - 1.0).abs() < CASE_TOL {
        let s1 = 1.0 / weights.w[1].sqrt();
        return Ok(ProjectionConstants {
            sigma: ELLS.map(|l| s1.powi(l)),
            lambda: None,
            case: ProjectionCase::SingleOne,
        });
    }
    if active == [0] && m.abs() < CASE_TOL {
        let s0 = 1.0 / weights.w[2].sqrt();
        return Ok(ProjectionConstants {
            sigma: ELLS.map(|l| s0.powi(1 - l)),
            lambda: None,
            case: ProjectionCase::SingleZero,
        });
    }
    let below = active.iter().any(|&l| (l as f64) < m);
    let above = active.iter().any(|&l| (l as f64) > m);
    if !(below && above) {
        return Err(Error::MagnetizationUnreachable(format!(
            "occupied components {active:?} cannot produce M = {m}"
        )));
    }
    let q = Quartic::new(&w, m);
    let lam = positive_root(&q);
    let norm: f64 = ELLS.iter().zip(&w).map(|(&l, &x)| lam.powi(l) * x).sum();
    let s0 = 1.0 / (norm * total).sqrt();
    Ok(ProjectionConstants {
        sigma: ELLS.map(|l| s0 * lam.powf(l as f64 / 2.0)),
        lambda: Some(lam),
        case: ProjectionCase::Quartic,
    })
}

/// Unique positive root of a quartic that is negative near zero and positive
/// at infinity. Brackets geometrically from 1, bisects, then polishes with
/// safeguarded Newton.
fn positive_root(q: &Quartic) -> f64 {
    let g1 = q.eval(1.0);
    if g1 == 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (1.0, 1.0);
    if g1 < 0.0 {
        while q.eval(hi) < 0.0 {
            lo = hi;
            hi *= 10.0;
        }
    } else {
        while q.eval(lo) > 0.0 {
            hi = lo;
            lo /= 10.0;
        }
    }
    while hi - lo > 1e-3 * hi {
        let mid = 0.5 * (lo + hi);
        let gm = q.eval(mid);
        if gm == 0.0 {
            return mid;
        }
        if gm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let gx = q.eval(x);
        if gx == 0.0 {
            return x;
        }
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = q.derivative(x);
        let mut next = x - gx / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 1e-14 * x || hi - lo <= 1e-15 * hi {
            break;
        }
    }
    x
}

/// `phi_l <- sigma_l phi_l`.
pub fn project(phi: &SpinorField, sigma: &ProjectionConstants) -> SpinorField {
    phi.scaled(&sigma.sigma.map(|s| Complex64::new(s, 0.0)))
}

/// Solves for the constants of `phi` and applies them.
pub fn project_onto_constraints(phi: &SpinorField, m: f64) -> Result<(SpinorField, ProjectionConstants)> {
    let sigma = solve_sigma(&ProjectionWeights::from_field(phi, m))?;
    Ok((project(phi, &sigma), sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_constraints(w: &[f64; 5], m: f64, s: &[f64; 5]) {
        let n: f64 = (0..5).map(|k| s[k] * s[k] * w[k]).sum();
        let mm: f64 = (0..5).map(|k| ELLS[k] as f64 * s[k] * s[k] * w[k]).sum();
        assert!((n - 1.0).abs() < 1e-12, "mass {n}");
        assert!((mm - m).abs() < 1e-12, "magnetization {mm} vs {m}");
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        assert!(rel(s[0] * s[4], s[2] * s[2]));
        assert!(rel(s[1] * s[3], s[2] * s[2]));
        assert!(rel(s[0] * s[2], s[1] * s[1]));
    }

    #[test]
    fn identity_when_already_constrained() {
        let w = [0.1, 0.2, 0.3, 0.25, 0.15];
        let m: f64 = (0..5).map(|k| ELLS[k] as f64 * w[k]).sum();
        let s = solve_sigma(&ProjectionWeights::new(w, m)).unwrap();
        assert!((s.lambda.unwrap() - 1.0).abs() < 1e-14);
        assert!(s.sigma.iter().all(|x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn single_zero_component_case() {
        let s = solve_sigma(&ProjectionWeights::new([0.0, 0.0, 4.0, 0.0, 0.0], 0.0)).unwrap();
        assert_eq!(s.case, ProjectionCase::SingleZero);
        assert_eq!(s.sigma, [2.0, 1.0, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn single_one_component_case() {
        let s = solve_sigma(&ProjectionWeights::new([0.0, 0.25, 0.0, 0.0, 0.0], 1.0)).unwrap();
        assert_eq!(s.case, ProjectionCase::SingleOne);
        assert_eq!(s.sigma, [4.0, 2.0, 1.0, 0.5, 0.25]);
    }

    #[test]
    fn two_sided_example_against_bisection() {
        let w = [0.3, 0.0, 0.3, 0.0, 0.4];
        let m = 0.5;
        let g = |x: f64| 1.5 * 0.3 * x.powi(4) - 0.5 * 0.3 * x * x - 2.5 * 0.4;
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        let s = solve_sigma(&ProjectionWeights::new(w, m)).unwrap();
        assert!((s.lambda.unwrap() - lo).abs() < 1e-12 * lo);
        check_constraints(&w, m, &s.sigma);
    }

    #[test]
    fn unreachable_and_negative() {
        assert!(matches!(
            solve_sigma(&ProjectionWeights::new([0.0, 0.0, 0.5, 0.5, 0.0], 0.5)),
            Err(Error::MagnetizationUnreachable(_))
        ));
        assert!(matches!(
            solve_sigma(&ProjectionWeights::new([0.0, 1.0, 0.0, 0.0, 0.0], 0.5)),
            Err(Error::MagnetizationUnreachable(_))
        ));
        assert!(matches!(
            solve_sigma(&ProjectionWeights::new([0.1, -1.0, 0.0, 0.0, 0.0], 0.5)),
            Err(Error::NegativeWeight { index: 1, .. })
        ));
    }

    #[test]
    fn tiny_weights_treated_as_zero() {
        // a 1e-40 contamination below M must not make the case feasible
        let w = [0.0, 1.0, 0.0, 0.0, 1e-40];
        assert!(solve_sigma(&ProjectionWeights::new(w, 1.5)).is_err());
    }

    fn weights() -> impl Strategy<Value = ([f64; 5], f64)> {
        (
            prop::array::uniform5(prop_oneof![Just(0.0), 1e-6..10.0f64]),
            0.0..1.999f64,
        )
            .prop_filter("both sides of M occupied", |(w, m)| {
                let below = (0..5).any(|k| (ELLS[k] as f64) < *m && w[k] > 0.0);
                let above = (0..5).any(|k| (ELLS[k] as f64) > *m && w[k] > 0.0);
                below && above
            })
    }

    proptest! {
        #[test]
        fn constraints_hold(( w, m) in weights()) {
            let s = solve_sigma(&ProjectionWeights::new(w, m)).unwrap();
            check_constraints(&w, m, &s.sigma);
            let lam = s.lambda.unwrap();
            let total: f64 = w.iter().sum();
            let q = Quartic::new(&w.map(|x| x / total), m);
            prop_assert!(q.eval(lam).abs() <= 1e-12 * q.max_coeff() * lam.powi(4).max(1.0));
            prop_assert!(q.reduced_derivative(lam) > 0.0);
        }

        #[test]
        fn scaling_covariance((w, m) in weights(), c in 1e-3..1e3f64) {
            let a = solve_sigma(&ProjectionWeights::new(w, m)).unwrap();
            let b = solve_sigma(&ProjectionWeights::new(w.map(|x| x * c), m)).unwrap();
            let (la, lb) = (a.lambda.unwrap(), b.lambda.unwrap());
            prop_assert!((la - lb).abs() <= 1e-12 * la);
            prop_assert!((b.sigma[2] * c.sqrt() - a.sigma[2]).abs() <= 1e-12 * a.sigma[2]);
        }

        #[test]
        fn projection_is_idempotent((w, m) in weights()) {
            let s = solve_sigma(&ProjectionWeights::new(w, m)).unwrap();
            let w2: [f64; 5] = std::array::from_fn(|k| w[k] * s.sigma[k] * s.sigma[k]);
            let s2 = solve_sigma(&ProjectionWeights::new(w2, m)).unwrap();
            for k in 0..5 {
                prop_assert!((s2.sigma[k] - 1.0).abs() < 1e-12);
            }
        }
    }
}
