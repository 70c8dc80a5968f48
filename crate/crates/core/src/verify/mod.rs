//! Independent numerical oracles for the analytic rates: the stationary
//! distribution of a truncated chain, Monte Carlo simulation, and slope fits.

mod fit;
mod simulate;
mod truncated;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use fit::{
    fit_decay, fit_decay_with, fit_tail, regress, FitMode, FitModel, FitOptions, Regression, SlopeFit, MIN_POINTS,
    MIN_R_SQUARED,
};
pub use simulate::{simulate, simulate_with_burn_in, SimResult, BURN_IN_FRACTION};
pub use truncated::{
    solve_truncated, solve_truncated_with, OverflowPolicy, Solver, TruncatedChain, POWER_MAX_ITER, RESIDUAL_TOL,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailSource {
    Truncated,
    Montecarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub level: usize,
    pub tail_probability: f64,
    pub source: TailSource,
}

/// Rows of `P(L_k >= n)` from both oracles, `n` running over each curve.
pub fn tail_rows(chain: Option<&TruncatedChain>, sim: Option<&SimResult>, k: usize) -> Vec<TailRow> {
    let mut rows = Vec::new();
    if let Some(c) = chain {
        rows.extend(c.marginal_tail(k).into_iter().enumerate().map(|(level, p)| TailRow {
            level,
            tail_probability: p,
            source: TailSource::Truncated,
        }));
    }
    if let Some(s) = sim {
        rows.extend(s.tail_probability(k).into_iter().enumerate().map(|(level, p)| TailRow {
            level,
            tail_probability: p,
            source: TailSource::Montecarlo,
        }));
    }
    rows
}

pub fn write_tail_csv<W: Write>(out: W, rows: &[TailRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}
