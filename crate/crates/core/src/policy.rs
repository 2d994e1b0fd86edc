//! Femtocell resource split between the home user and handed-off users.

use serde::Serialize;

use crate::error::{Error, Result};

const TOL: f64 = 1e-12;

/// How `lambda_L` and `mu_L` are chosen for `1 <= L <= K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum AllocationRule {
    /// `lambda_L = 1 - L/N`, `mu_L = 1/N`: every user of the FAP gets the
    /// time share it would get at the macrocell BS.
    Proportional,
    /// `lambda_L = lambda`, `mu_L = (1 - lambda)/L`: the backhaul is fully
    /// used whatever the number of handed-off users.
    FixedLambda { lambda: f64 },
    /// Explicit per-level values, indexed by `L = 0..=K`.
    Explicit { lambda: Vec<f64>, mu: Vec<f64> },
}

/// The sequences `lambda_L`, `mu_L` and the admission cap `K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationPolicy {
    pub k: usize,
    pub rule: AllocationRule,
}

impl AllocationPolicy {
    pub fn proportional(k: usize) -> Self {
        AllocationPolicy { k, rule: AllocationRule::Proportional }
    }

    pub fn fixed_lambda(k: usize, lambda: f64) -> Self {
        AllocationPolicy { k, rule: AllocationRule::FixedLambda { lambda } }
    }

    pub fn explicit(lambda: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() || lambda.len() != mu.len() {
            return Err(Error::InvalidPolicy(format!(
                "lambda and mu need equal nonzero length, got {} and {}",
                lambda.len(),
                mu.len()
            )));
        }
        let k = lambda.len() - 1;
        let p = AllocationPolicy { k, rule: AllocationRule::Explicit { lambda, mu } };
        p.validate(k + 1)?;
        Ok(p)
    }

    /// The same allocation rule with the admission cap replaced; `K = 0` is
    /// closed access.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        if let AllocationRule::Explicit { lambda, .. } = &self.rule {
            if k + 1 > lambda.len() {
                return Err(Error::InvalidPolicy(format!(
                    "explicit policy defines levels up to {}, asked for K = {k}",
                    lambda.len() - 1
                )));
            }
        }
        Ok(AllocationPolicy { k, rule: self.rule.clone() })
    }

    /// `lambda_L` for `N` cellular users.
    pub fn lambda(&self, l: usize, n: usize) -> f64 {
        if l == 0 {
            return 1.0;
        }
        match &self.rule {
            AllocationRule::Proportional => 1.0 - l as f64 / n as f64,
            AllocationRule::FixedLambda { lambda } => *lambda,
            AllocationRule::Explicit { lambda, .. } => lambda[l],
        }
    }

    /// `mu_L` for `N` cellular users.
    pub fn mu(&self, l: usize, n: usize) -> f64 {
        if l == 0 {
            return 0.0;
        }
        match &self.rule {
            AllocationRule::Proportional => 1.0 / n as f64,
            AllocationRule::FixedLambda { lambda } => (1.0 - lambda) / l as f64,
            AllocationRule::Explicit { mu, .. } => mu[l],
        }
    }

    /// Checks the budget, range and monotonicity constraints for `N` users.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidPolicy(m));
        if n == 0 {
            return bad("N must be at least 1".into());
        }
        if let AllocationRule::Explicit { lambda, mu } = &self.rule {
            if lambda.len() != mu.len() || lambda.len() < self.k + 1 {
                return bad(format!("explicit policy needs K + 1 = {} levels", self.k + 1));
            }
            if (lambda[0] - 1.0).abs() > TOL || mu[0].abs() > TOL {
                return bad("level 0 must have lambda = 1 and mu = 0".into());
            }
        }
        if let AllocationRule::FixedLambda { lambda } = &self.rule {
            if !(0.0..=1.0).contains(lambda) {
                return bad(format!("lambda must lie in [0, 1], got {lambda}"));
            }
        }
        let mut prev = 1.0;
        for l in 0..=self.k.min(n) {
            let (lam, mu) = (self.lambda(l, n), self.mu(l, n));
            if !(lam.is_finite() && mu.is_finite()) || lam < -TOL || mu < -TOL || lam > 1.0 + TOL {
                return bad(format!("level {l}: lambda={lam}, mu={mu} out of range"));
            }
            if lam + l as f64 * mu > 1.0 + TOL {
                return bad(format!("level {l}: lambda + L*mu = {} exceeds 1", lam + l as f64 * mu));
            }
            if lam > prev + TOL {
                return bad(format!("lambda increases at level {l}"));
            }
            prev = lam;
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        match &self.rule {
            AllocationRule::Proportional => format!("proportional(K={})", self.k),
            AllocationRule::FixedLambda { lambda } => format!("fixed_lambda({lambda}, K={})", self.k),
            AllocationRule::Explicit { .. } => format!("explicit(K={})", self.k),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn level_zero_is_fixed() {
        for p in [AllocationPolicy::proportional(3), AllocationPolicy::fixed_lambda(2, 0.4)] {
            assert_eq!(p.lambda(0, 20), 1.0);
            assert_eq!(p.mu(0, 20), 0.0);
        }
    }

    #[test]
    fn proportional_values() {
        let p = AllocationPolicy::proportional(3);
        assert!((p.lambda(2, 20) - 0.9).abs() < 1e-15);
        assert!((p.mu(2, 20) - 0.05).abs() < 1e-15);
        assert!(p.validate(20).is_ok());
    }

    #[test]
    fn fixed_lambda_uses_whole_backhaul() {
        let p = AllocationPolicy::fixed_lambda(3, 0.4);
        for l in 1..=3 {
            assert!((p.lambda(l, 9) + l as f64 * p.mu(l, 9) - 1.0).abs() < 1e-15);
        }
        assert!(AllocationPolicy::fixed_lambda(1, 1.2).validate(5).is_err());
    }

    #[test]
    fn explicit_checks() {
        assert!(AllocationPolicy::explicit(vec![1.0, 0.6], vec![0.0, 0.4]).is_ok());
        assert!(AllocationPolicy::explicit(vec![1.0, 0.6], vec![0.0, 0.5]).is_err());
        assert!(AllocationPolicy::explicit(vec![0.9, 0.6], vec![0.0, 0.1]).is_err());
        assert!(AllocationPolicy::explicit(vec![1.0, 0.5, 0.6], vec![0.0, 0.1, 0.1]).is_err());
        let p = AllocationPolicy::explicit(vec![1.0, 0.6], vec![0.0, 0.4]).unwrap();
        assert!(p.with_k(2).is_err());
        assert_eq!(p.with_k(0).unwrap().k, 0);
    }

    proptest! {
        #[test]
        fn proportional_always_valid(k in 0usize..10, n in 1usize..300) {
            let p = AllocationPolicy::proportional(k);
            prop_assert!(p.validate(n).is_ok());
        }

        #[test]
        fn fixed_lambda_valid_in_range(k in 0usize..10, n in 1usize..300, lam in 0.0f64..=1.0) {
            prop_assert!(AllocationPolicy::fixed_lambda(k, lam).validate(n).is_ok());
        }
    }
}
