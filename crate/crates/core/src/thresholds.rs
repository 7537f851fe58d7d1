//! Verdict thresholds shared by the acceptance tests and the experiment
//! runner. Bump [`THRESHOLDS_VERSION`] whenever a default changes.

use serde::{Deserialize, Serialize};

pub const THRESHOLDS_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Largest allowed ratio between maxima at consecutive dyadic N.
    pub growth: f64,
    /// Largest allowed change of a Littlewood–Paley spread across N.
    pub lp_spread: f64,
    /// Bound on vector Bernstein ratios.
    pub bernstein: f64,
    /// Exactness tolerance for identities.
    pub exact: f64,
    /// Tolerance for dual-route linear algebra identities.
    pub identity: f64,
    /// Picard versus split-step agreement for the NLS.
    pub nls_agreement: f64,
    /// Allowed deviation of the split-step order from 2.
    pub order_band: f64,
    pub trace_drift: f64,
    pub gram_drift: f64,
    /// Allowed deviation of the residual shrink factor from 4.
    pub shrink_band: f64,
    /// Operator Picard versus splitting for the Hartree flow.
    pub hartree_agreement: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            growth: 1.3,
            lp_spread: 1.5,
            bernstein: 2.0,
            exact: 1e-12,
            identity: 1e-8,
            nls_agreement: 1e-6,
            order_band: 0.2,
            trace_drift: 1e-10,
            gram_drift: 1e-8,
            shrink_band: 0.5,
            hartree_agreement: 1e-5,
        }
    }
}

/// Largest ratio between consecutive entries; 0 for fewer than two.
pub fn growth(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max)
}

/// Largest two-sided ratio between consecutive entries.
pub fn stability(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] / w[0]).max(w[0] / w[1])).fold(0.0, f64::max)
}
