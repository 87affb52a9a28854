//! Enumeration budgets. Operations that enumerate refuse up front instead of
//! sampling when the work would exceed these limits.

use crate::error::{Error, Result};

pub const BUDGET_ENV: &str = "NMDS_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Affine x-candidates scanned during point enumeration.
    pub field_points: u64,
    /// k-subsets of a group or point list.
    pub subsets: u64,
    /// Messages swept by brute-force weight enumeration.
    pub codewords: u64,
    /// Column subsets examined by the structural NMDS check.
    pub column_subsets: u64,
    /// Size of a t-subset coverage table.
    pub coverage: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            field_points: 1 << 24,
            subsets: 100_000_000,
            codewords: 100_000_000,
            column_subsets: 10_000_000,
            coverage: 100_000_000,
        }
    }
}

impl Budget {
    /// Every limit set to `limit`.
    pub fn uniform(limit: u64) -> Self {
        Budget {
            field_points: limit,
            subsets: limit,
            codewords: limit,
            column_subsets: limit,
            coverage: limit,
        }
    }

    /// Defaults, unless `NMDS_BUDGET` holds an integer that then replaces every limit.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().replace('_', "").parse::<u64>().ok())
            .map(Budget::uniform)
            .unwrap_or_default()
    }
}

pub(crate) fn check(what: &'static str, needed: Option<u64>, budget: u64) -> Result<()> {
    match needed {
        Some(n) if n <= budget => Ok(()),
        Some(n) => Err(Error::BudgetExceeded {
            what,
            needed: n.to_string(),
            budget,
        }),
        None => Err(Error::BudgetExceeded {
            what,
            needed: "more than 2^64".into(),
            budget,
        }),
    }
}
