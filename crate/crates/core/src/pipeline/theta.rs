use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ParameterSet, Scaled, DEFAULT_FEASIBILITY_CAP};
use crate::dirichlet::{family_sup, FamilyGrid};
use crate::error::{Error, Result};
use crate::primes::PrimeTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaOptions {
    /// Target `upper - lower` for each family supremum.
    pub eps: f64,
    pub point_budget: usize,
    pub cap: f64,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        Self {
            eps: 1e-2,
            point_budget: 5_000_000,
            cap: DEFAULT_FEASIBILITY_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSetEstimate {
    pub samples: usize,
    pub seed: u64,
    /// `mu(alpha) M`
    pub threshold: f64,
    pub hits: usize,
    pub hit_fraction: f64,
    /// Chebyshev's prediction, `alpha`.
    pub predicted_lower: f64,
    /// Binomial standard error of `hit_fraction` at `p = alpha`.
    pub std_error: f64,
    /// Samples whose certificate straddles the threshold; counted as misses.
    pub undecided: usize,
    pub primes: usize,
    pub grid_step: f64,
    pub thetas: Vec<f64>,
    pub sup_lower: Vec<f64>,
    pub sup_upper: Vec<f64>,
    pub good_thetas: Vec<f64>,
}

/// Why the good-shift estimate cannot run, if it cannot.
pub fn theta_feasibility(params: &ParameterSet, table: &PrimeTable, cap: f64) -> Option<String> {
    let top = params.u.powf(1.0 + params.delta.value());
    let tau_max = params.j.hi + params.l.hi;
    if top > table.limit() as f64 {
        Some(format!("primes up to U^(1+delta) = {top:.4e} exceed the table limit {}", table.limit()))
    } else if top > cap || tau_max > cap {
        Some(format!(
            "primes up to {top:.4e} and heights up to {tau_max:.4e} exceed the cap {cap:.1e}"
        ))
    } else {
        None
    }
}

/// Monte-Carlo estimate of the proportion of `J` on which the family
/// supremum stays below `mu(alpha) M`.
///
/// Shifts are drawn sequentially from a ChaCha stream seeded by `seed`
/// before any parallel work, so results do not depend on the worker count.
/// A shift counts as good only when the certified upper bound is below the
/// threshold.
pub fn estimate_theta_set(
    params: &ParameterSet,
    table: &PrimeTable,
    samples: usize,
    seed: u64,
    opts: &ThetaOptions,
) -> Result<Scaled<ThetaSetEstimate>> {
    if samples == 0 {
        return Err(Error::invalid("samples must be positive"));
    }
    if !(opts.eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    if let Some(reason) = theta_feasibility(params, table, opts.cap) {
        return Ok(Scaled::AnalysisOnly { reason });
    }
    let delta = params.delta.value();
    let top = params.u.powf(1.0 + delta);
    let k = table.primes_in(params.u, top)?.len();
    let lip = k as f64 * top.ln();
    let step = if lip > 0.0 { opts.eps / lip } else { params.l.len().max(1.0) };
    let grid = FamilyGrid {
        step,
        budget: opts.point_budget,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let thetas: Vec<f64> = (0..samples)
        .map(|_| rng.gen_range(params.j.lo..params.j.hi))
        .collect();
    let sups = thetas
        .par_iter()
        .map(|&theta| family_sup(table, theta, params.u, delta, params.l, &grid))
        .collect::<Result<Vec<_>>>()?;

    let threshold = params.threshold();
    let mut good_thetas = Vec::new();
    let mut undecided = 0;
    for (s, &theta) in sups.iter().zip(&thetas) {
        if s.upper <= threshold {
            good_thetas.push(theta);
        } else if s.lower <= threshold {
            undecided += 1;
        }
    }
    let hits = good_thetas.len();
    let alpha = params.alpha;
    Ok(Scaled::Computed(ThetaSetEstimate {
        samples,
        seed,
        threshold,
        hits,
        hit_fraction: hits as f64 / samples as f64,
        predicted_lower: alpha,
        std_error: (alpha * (1.0 - alpha) / samples as f64).sqrt(),
        undecided,
        primes: k,
        grid_step: step,
        thetas,
        sup_lower: sups.iter().map(|s| s.lower).collect(),
        sup_upper: sups.iter().map(|s| s.upper).collect(),
        good_thetas,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::derive_params;

    #[test]
    fn zero_samples_rejected() {
        let p = derive_params(2, 1, 0.75, None).unwrap();
        let t = PrimeTable::sieve(100).unwrap();
        assert!(estimate_theta_set(&p, &t, 0, 1, &ThetaOptions::default()).is_err());
    }

    #[test]
    fn infinite_threshold_hits_everything() {
        let p = derive_params(2, 1, 0.75, None).unwrap().with_cq(f64::MAX).unwrap();
        let t = PrimeTable::sieve(100).unwrap();
        let est = estimate_theta_set(&p, &t, 20, 3, &ThetaOptions::default()).unwrap();
        let est = est.computed().unwrap();
        assert_eq!(est.hit_fraction, 1.0);
    }

    #[test]
    fn over_cap_is_analysis_only() {
        let p = derive_params(2, 3, 0.75, None).unwrap();
        let t = PrimeTable::sieve(100).unwrap();
        assert!(estimate_theta_set(&p, &t, 5, 1, &ThetaOptions::default())
            .unwrap()
            .is_analysis_only());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let p = derive_params(2, 1, 0.75, None).unwrap();
        let t = PrimeTable::sieve(100).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_theta_set(&p, &t, 16, 9, &ThetaOptions::default()).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
