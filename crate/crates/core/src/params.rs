use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;

/// Interaction strengths, target magnetization and trap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Target magnetization, always in `[0, 2)` once constructed.
    pub m: f64,
    pub potential: PotentialSpec,
}

impl ModelParams {
    pub fn new(beta0: f64, beta1: f64, beta2: f64, m: f64, potential: PotentialSpec) -> Result<Self> {
        for (name, v) in [("beta0", beta0), ("beta1", beta1), ("beta2", beta2), ("M", m)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} is not finite")));
            }
        }
        if !(0.0..2.0).contains(&m) {
            return Err(Error::InvalidParameter(format!(
                "magnetization M = {m} must lie in [0, 2); mirror negative values first"
            )));
        }
        Ok(ModelParams {
            beta0,
            beta1,
            beta2,
            m,
            potential,
        })
    }

    /// Accepts `M` in `(-2, 2)`. Negative magnetization is mapped to `-M`;
    /// the returned flag tells the caller to mirror results back with
    /// [`crate::SpinorField::mirrored`].
    pub fn with_signed_magnetization(
        beta0: f64,
        beta1: f64,
        beta2: f64,
        m: f64,
        potential: PotentialSpec,
    ) -> Result<(Self, bool)> {
        let mirrored = m < 0.0;
        let p = ModelParams::new(beta0, beta1, beta2, m.abs(), potential)?;
        Ok((p, mirrored))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn magnetization_range() {
        assert!(ModelParams::new(100.0, 1.0, -2.0, 2.0, PotentialSpec::Box).is_err());
        assert!(ModelParams::new(100.0, 1.0, -2.0, -0.5, PotentialSpec::Box).is_err());
        let (p, flip) =
            ModelParams::with_signed_magnetization(100.0, 1.0, -2.0, -0.5, PotentialSpec::Box).unwrap();
        assert!(flip);
        assert_eq!(p.m, 0.5);
        assert!(ModelParams::new(f64::NAN, 0.0, 0.0, 0.0, PotentialSpec::Box).is_err());
    }
}
