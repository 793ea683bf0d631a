use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::pipeline::{ExponentMode, DEFAULT_ALPHA_STAR, DEFAULT_FEASIBILITY_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Every knob of every subcommand, flat so that `--key value` overrides
/// address fields directly. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    /// Largest prime or height any stage may touch.
    pub cap: f64,
    /// Worker threads; 0 lets the runtime decide.
    pub workers: usize,
    pub format: Format,
    pub out: Option<PathBuf>,

    pub h: u32,
    pub nu: u32,
    pub alpha: f64,
    pub delta0: Option<f64>,
    /// Chaining constant; calibrated when absent.
    pub cq: Option<f64>,
    pub alpha_star: f64,

    pub sup_terms: usize,
    pub sup_eps: f64,
    pub sup_lo: f64,
    pub sup_hi: f64,
    pub family_theta: f64,
    pub family_u: f64,
    pub family_delta: f64,
    pub family_eps: f64,

    pub spacing_n: usize,
    pub spacing_q: u32,
    pub eq_budget: u64,

    pub moment_n: usize,
    pub moment_q: u32,
    pub moment_draws: usize,
    pub moment_j_lens: Vec<f64>,
    pub moment_t_values: Vec<f64>,
    /// Panels per oscillation-safe minimum.
    pub moment_oversample: usize,

    pub hilbert_trials: usize,
    pub hilbert_max_n: usize,
    pub hilbert_min_gap: f64,

    pub chain_polys: usize,
    pub chain_max_terms: usize,
    pub chain_max_q: u32,
    pub chain_theta_samples: usize,
    pub chain_eps_rel: f64,
    pub chain_calibration_seed: u64,

    pub theta_samples: usize,

    pub tau_grid: usize,
    pub exponent_mode: ExponentMode,
    pub scan_theta: Option<f64>,

    pub zeta_t: f64,
    pub zeta_step: f64,
    pub box_sigma0: f64,
    pub box_t_lo: f64,
    pub box_t_hi: f64,
    pub box_grid: usize,
    /// Number of covered pieces `K_i` that `certify` scans with the oracle.
    pub certify_boxes: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            seed: 1,
            cap: DEFAULT_FEASIBILITY_CAP,
            workers: 0,
            format: Format::Json,
            out: None,
            h: 2,
            nu: 1,
            alpha: 0.75,
            delta0: None,
            cq: None,
            alpha_star: DEFAULT_ALPHA_STAR,
            sup_terms: 20,
            sup_eps: 1e-6,
            sup_lo: 0.0,
            sup_hi: 1.0,
            family_theta: 0.0,
            family_u: 100.0,
            family_delta: 0.5,
            family_eps: 1e-2,
            spacing_n: 8,
            spacing_q: 4,
            eq_budget: 1_000_000,
            moment_n: 6,
            moment_q: 3,
            moment_draws: 20,
            moment_j_lens: vec![10.0, 100.0, 1000.0],
            moment_t_values: vec![100.0, 1000.0],
            moment_oversample: 2,
            hilbert_trials: 1000,
            hilbert_max_n: 50,
            hilbert_min_gap: 1e-3,
            chain_polys: 50,
            chain_max_terms: 8,
            chain_max_q: 3,
            chain_theta_samples: 48,
            chain_eps_rel: 1e-3,
            chain_calibration_seed: 2023,
            theta_samples: 200,
            tau_grid: 64,
            exponent_mode: ExponentMode::Local,
            scan_theta: None,
            zeta_t: 100.0,
            zeta_step: 0.01,
            box_sigma0: 0.9,
            box_t_lo: 10.0,
            box_t_hi: 20.0,
            box_grid: 20,
            certify_boxes: 3,
        }
    }
}

impl RunConfig {
    /// A lighter configuration for the checks `certify` runs alongside the
    /// pipeline stages.
    pub fn certify_side_checks(&self) -> RunConfig {
        RunConfig {
            hilbert_trials: self.hilbert_trials.min(200),
            spacing_n: self.spacing_n.min(6),
            spacing_q: self.spacing_q.min(3),
            moment_n: self.moment_n.min(4),
            moment_q: self.moment_q.min(2),
            moment_draws: self.moment_draws.min(3),
            moment_j_lens: vec![100.0],
            moment_t_values: vec![100.0],
            chain_polys: self.chain_polys.min(20),
            ..self.clone()
        }
    }
}
