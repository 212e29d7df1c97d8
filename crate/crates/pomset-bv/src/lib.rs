//! System BV (deep inference) and pomset logic (RB-digraph proof nets):
//! formula/sequent syntax, graph translations, provers, proof-net
//! correctness checkers, sequent calculi, and SAT/QBF reductions.

use thiserror::Error;

/// Raised when a search exceeds its step budget. Distinct from a definitive
/// negative answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("search budget exceeded")]
pub struct BudgetExceeded;

/// A step counter shared across a search. Each elementary search step calls
/// [`Budget::tick`]; exhaustion aborts the search with [`BudgetExceeded`].
#[derive(Clone, Debug)]
pub struct Budget {
    remaining: u64,
}

impl Budget {
    pub fn new(steps: u64) -> Self {
        Budget { remaining: steps }
    }

    /// An effectively unlimited budget for small, provably bounded searches.
    pub fn unlimited() -> Self {
        Budget { remaining: u64::MAX }
    }

    pub fn tick(&mut self) -> Result<(), BudgetExceeded> {
        if self.remaining == 0 {
            return Err(BudgetExceeded);
        }
        self.remaining -= 1;
        Ok(())
    }
}

pub mod bv;
pub mod dicograph;
pub mod formula;
pub mod rbnet;
pub mod reductions;
pub mod sequent;
