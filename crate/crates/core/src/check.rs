//! Named inequality checks collected into reports.

use serde::{Deserialize, Serialize};

/// One asserted inequality `lhs <= rhs`, with the values that were compared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Clause {
    pub fn at_most(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            holds: lhs <= rhs,
        }
    }
}

pub fn all_hold(clauses: &[Clause]) -> bool {
    clauses.iter().all(|c| c.holds)
}
