//! Parameter derivation, the Chebyshev good-shift estimate, Turán window
//! scans and the covering subdivision.

mod cover;
mod params;
mod theta;
mod turan;

pub use cover::{covering_from_intervals, covering_subdivision, psi, psi_image_len, Covering, MAX_PIECES};
pub use params::{
    alpha_bar_from, derive_params, m_bound, nu_delta, range_nesting, window_contained, Exact,
    ParameterSet, RangeNesting, DEFAULT_ALPHA_STAR, DEFAULT_CQ, H_MAX, H_MIN,
};
pub use theta::{estimate_theta_set, theta_feasibility, ThetaOptions, ThetaSetEstimate};
pub use turan::{turan_rhs, turan_scan, ExponentMode, TuranOptions, TuranPoint, TuranReport};

use serde::{Deserialize, Serialize};

/// Default limit on primes and heights the desk-scale pipeline will touch.
pub const DEFAULT_FEASIBILITY_CAP: f64 = 1e8;

/// Result of a stage that is skipped, with a reason, when the instance is
/// beyond what can be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Scaled<T> {
    Computed(T),
    AnalysisOnly { reason: String },
}

impl<T> Scaled<T> {
    pub fn computed(&self) -> Option<&T> {
        match self {
            Scaled::Computed(v) => Some(v),
            Scaled::AnalysisOnly { .. } => None,
        }
    }

    pub fn is_analysis_only(&self) -> bool {
        matches!(self, Scaled::AnalysisOnly { .. })
    }
}
