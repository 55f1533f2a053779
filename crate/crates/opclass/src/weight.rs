//! Good weights and the norm data of the weighted Wiener algebra.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the weight continues past the stored prefix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// `omega_n = 1` for all `n` (the plain Wiener algebra).
    Unit,
    /// Explicit prefix, constant beyond it.
    Explicit,
    /// `omega_n = 1 + |T^n|^2` for some power-bounded operator; the prefix
    /// holds the computed values, beyond it the weight is bounded by the
    /// recorded eventual value.
    OperatorInduced,
}

/// A positive weight sequence: `omega_n >= 1`, submultiplicative, with
/// subexponential growth. Stored as a finite prefix plus an eventual bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodWeight {
    pub kind: WeightKind,
    #[serde(default)]
    pub prefix: Vec<f64>,
    /// Value (and upper bound) of `omega_n` for `n` beyond the prefix.
    #[serde(default = "one")]
    pub eventual: f64,
}

fn one() -> f64 {
    1.0
}

impl GoodWeight {
    pub fn unit() -> Self {
        GoodWeight {
            kind: WeightKind::Unit,
            prefix: Vec::new(),
            eventual: 1.0,
        }
    }

    pub fn explicit(prefix: Vec<f64>, eventual: f64) -> Self {
        GoodWeight {
            kind: WeightKind::Explicit,
            prefix,
            eventual,
        }
    }

    /// Weight induced by cached operator power norms: `omega_n = 1 + |T^n|^2`.
    /// `eventual` must upper-bound the continuation (power boundedness).
    pub fn operator_induced(power_norms: &[f64]) -> Self {
        let prefix: Vec<f64> = power_norms.iter().map(|n| 1.0 + n * n).collect();
        let eventual = prefix.iter().cloned().fold(1.0, f64::max);
        GoodWeight {
            kind: WeightKind::OperatorInduced,
            prefix,
            eventual,
        }
    }

    pub fn value(&self, n: usize) -> f64 {
        match self.kind {
            WeightKind::Unit => 1.0,
            _ => self.prefix.get(n).copied().unwrap_or(self.eventual),
        }
    }

    /// Upper bound for `omega_n` over all `n > start`.
    pub fn sup_beyond(&self, start: usize) -> f64 {
        match self.kind {
            WeightKind::Unit => 1.0,
            _ => {
                let mut sup = self.eventual;
                for n in (start + 1)..self.prefix.len() {
                    sup = sup.max(self.prefix[n]);
                }
                sup
            }
        }
    }

    /// Checks (GW1)-(GW3) on the stored range; (GW3) is checked as
    /// `omega_n <= (1 + delta)^n`.
    pub fn check(&self, delta: f64) -> Result<()> {
        if matches!(self.kind, WeightKind::Unit) {
            return Ok(());
        }
        let len = self.prefix.len();
        for (n, &w) in self.prefix.iter().enumerate() {
            if !(w >= 1.0) || !w.is_finite() {
                return Err(Error::Input(format!("weight value {w} at {n} violates omega_n >= 1")));
            }
            if n > 0 && w > (1.0 + delta).powi(n as i32) {
                return Err(Error::Input(format!(
                    "weight grows faster than (1+{delta})^n at index {n}"
                )));
            }
        }
        if self.eventual < 1.0 {
            return Err(Error::Input("eventual weight below 1".into()));
        }
        for n in 0..len {
            for m in 0..len - n {
                if self.value(n) * self.value(m) < self.value(n + m) - 1e-12 {
                    return Err(Error::Input(format!(
                        "weight fails submultiplicativity at ({n},{m})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Two series may be combined only over the same weight.
    pub fn compatible(&self, other: &GoodWeight) -> bool {
        self == other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_weight_is_good() {
        let w = GoodWeight::unit();
        assert!(w.check(0.0).is_ok());
        assert_eq!(w.value(1000), 1.0);
    }

    #[test]
    fn operator_induced_weight_is_submultiplicative() {
        // 1 + |T^{n+m}|^2 <= (1 + |T^n|^2)(1 + |T^m|^2) holds whenever the
        // power norms themselves are submultiplicative.
        let norms = [1.0, 2.0, 4.0, 8.0, 16.0];
        let w = GoodWeight::operator_induced(&norms);
        for n in 0..norms.len() {
            for m in 0..norms.len() - n {
                assert!(w.value(n) * w.value(m) >= w.value(n + m));
            }
        }
    }

    #[test]
    fn growth_violation_detected() {
        let w = GoodWeight::explicit(vec![1.0, 50.0], 50.0);
        assert!(w.check(0.5).is_err());
    }
}
