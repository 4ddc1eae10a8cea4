//! End-to-end partitioning algorithms: balanced separator, iterative spectral
//! max-cut, and a recursive k-way baseline.

mod kway;
mod maxcut;
mod separator;

use serde::Serialize;

pub use kway::{recursive_kway, KwayResult};
pub use maxcut::{maxcut_enlargement_check, EXACT_EPSILON_MAX_N, maxcut_guarantee, spectral_maxcut, MaxCutResult, MaxCutStep};
pub use separator::{balanced_separator, rayleigh_enlargement_check, SeparatorResult, SeparatorStep};

/// Which move an iteration made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Best threshold set or cut of the eigenfunction.
    Sweep,
    /// A threshold set or cut of one of the disjoint functions that does not
    /// worsen the removed union.
    Enlarge,
    /// A vertex with no edges left inside U.
    Isolated,
    /// The sweep was empty or everything; one extreme vertex was removed.
    Degenerate,
}

/// Distinct positive values of |f| in decreasing order.
pub(crate) fn descending_levels(f: &[f64]) -> Vec<f64> {
    let mut ts: Vec<f64> = f.iter().map(|x| x.abs()).filter(|&x| x > 0.0).collect();
    ts.sort_by(|a, b| b.total_cmp(a));
    ts.dedup();
    ts
}

/// One JSON object per line.
pub fn trace_json_lines(records: &[serde_json::Value]) -> String {
    records
        .iter()
        .map(|r| serde_json::to_string(r).expect("trace record serializes") + "\n")
        .collect()
}
