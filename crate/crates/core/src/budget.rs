//! Explicit limits for every exponential object the toolkit can build.
//!
//! Each guard fails with a [`BudgetExceeded`] naming the object, the size it
//! would need and the configured limit, so oversized requests never hang.

use crate::error::BudgetExceeded;

/// Environment variable that caps the estimated size of materialized objects.
pub const BUDGET_BYTES_ENV: &str = "QCSP_BUDGET_BYTES";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Operation tables enumerated by polymorphism and WNU searches.
    pub max_tables: u128,
    /// Points of A^n a closure may index (the bitset covers all of A^n).
    pub max_closure: u128,
    /// Matrix copies produced by expansion transforms (zeta, universal removal, ...).
    pub max_copies: u128,
    /// Elements of a power domain A^k.
    pub max_power_domain: u128,
    /// Tuples of a materialized relation.
    pub max_tuples: u128,
    /// Atoms of a produced sentence or instance.
    pub max_atoms: u128,
    /// Game-tree nodes the oracle may expand.
    pub max_oracle_nodes: u128,
    /// Cap on the estimated size in bytes of any materialized object.
    pub max_bytes: Option<u128>,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            max_tables: 1 << 22,
            max_closure: 1 << 24,
            max_copies: 4096,
            max_power_domain: 65536,
            max_tuples: 1 << 22,
            max_atoms: 1 << 22,
            max_oracle_nodes: 200_000_000,
            max_bytes: None,
        }
    }
}

impl Budgets {
    /// Defaults, with `max_bytes` taken from `QCSP_BUDGET_BYTES` when set.
    pub fn from_env() -> Result<Self, String> {
        let mut budgets = Self::default();
        if let Ok(raw) = std::env::var(BUDGET_BYTES_ENV) {
            let bytes: u128 = raw
                .trim()
                .parse()
                .map_err(|_| format!("{BUDGET_BYTES_ENV}: expected a positive integer, got `{raw}`"))?;
            if bytes == 0 {
                return Err(format!("{BUDGET_BYTES_ENV} must be positive"));
            }
            budgets.max_bytes = Some(bytes);
        }
        Ok(budgets)
    }

    pub fn check(&self, what: &str, required: u128, limit: u128) -> Result<(), BudgetExceeded> {
        if required > limit {
            return Err(BudgetExceeded {
                what: what.to_string(),
                required,
                limit,
            });
        }
        Ok(())
    }

    /// Checks an item count against `limit` and its estimated byte size against `max_bytes`.
    pub fn check_items(
        &self,
        what: &str,
        count: u128,
        limit: u128,
        bytes_per_item: u128,
    ) -> Result<(), BudgetExceeded> {
        self.check(what, count, limit)?;
        if let Some(max_bytes) = self.max_bytes {
            self.check(
                &format!("{what} (bytes)"),
                count.saturating_mul(bytes_per_item),
                max_bytes,
            )?;
        }
        Ok(())
    }
}

/// `base^exp` saturating at `u128::MAX`.
pub fn saturating_pow(base: u128, exp: u128) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
        if acc == u128::MAX || acc == 0 {
            break;
        }
    }
    acc
}
