//! Dirichlet polynomials `P(t) = sum_n c_n exp(i t phi_n)` and certified
//! enclosures of their local suprema.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::phase::{cis, cis_angle, reduced_angle, ComplexSum};
use crate::primes::PrimeTable;

/// Default cap on the number of grid points a certificate may use.
pub const DEFAULT_POINT_BUDGET: usize = 20_000_000;

/// Relative evaluation error allowance (times `sum |c_n|`) folded into upper
/// bounds.
pub const EVAL_SLACK: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletPoly {
    phases: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl DirichletPoly {
    pub fn new(phases: Vec<f64>, coeffs: Vec<Complex64>) -> Result<Self> {
        if phases.len() != coeffs.len() {
            return Err(Error::invalid(format!(
                "{} phases but {} coefficients",
                phases.len(),
                coeffs.len()
            )));
        }
        if phases.iter().any(|p| !p.is_finite()) || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite phase or coefficient"));
        }
        let mut sorted = phases.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("phases must be pairwise distinct"));
        }
        Ok(Self { phases, coeffs })
    }

    /// Polynomial with phases `log p` for the given primes.
    pub fn over_primes(primes: &[u64], coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(primes.iter().map(|&p| (p as f64).ln()).collect(), coeffs)
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// `max_n |phi_n|`, zero for the empty polynomial.
    pub fn phi_max(&self) -> f64 {
        self.phases.iter().fold(0.0, |m, p| m.max(p.abs()))
    }

    pub fn coeff_l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// `sum |c_n|^2`
    pub fn coeff_energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `sum |c_n|^2 phi_n^2`
    pub fn weighted_energy(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.phases)
            .map(|(c, p)| c.norm_sqr() * p * p)
            .sum()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&self.phases)
            .map(|(&c, &phi)| c * cis(t, phi))
            .collect::<ComplexSum>()
            .value()
    }

    /// `P(theta + t)` with both products reduced separately, so a huge shift
    /// does not swamp `t`.
    pub fn eval_shifted(&self, theta: f64, t: f64) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&self.phases)
            .map(|(&c, &phi)| c * cis_angle(reduced_angle(theta, phi) + reduced_angle(t, phi)))
            .collect::<ComplexSum>()
            .value()
    }

    /// `d(s, t) = (2 sum |c_n|^2 sin^2((t - s) phi_n / 2))^(1/2)`
    pub fn metric_d(&self, s: f64, t: f64) -> f64 {
        let diff = t - s;
        let sum: f64 = self
            .coeffs
            .iter()
            .zip(&self.phases)
            .map(|(c, &phi)| {
                let h = reduced_angle(diff, 0.5 * phi).sin();
                c.norm_sqr() * h * h
            })
            .sum();
        (2.0 * sum).sqrt()
    }

    /// `sum |c_n|^2 |exp(i t phi_n) - exp(i s phi_n)|^2`, which equals
    /// `2 d(s, t)^2`. This is the quantity that controls the increment
    /// moments.
    pub fn increment_energy(&self, s: f64, t: f64) -> f64 {
        let d = self.metric_d(s, t);
        2.0 * d * d
    }

    /// Lipschitz constant `sum |c_n| |phi_n|` of `P` (and of `|P|`).
    pub fn derivative_bound(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.phases)
            .map(|(c, p)| c.norm() * p.abs())
            .sum()
    }

    /// Negated phases with conjugated coefficients; `|P|` is unchanged.
    pub fn reflected(&self) -> Self {
        Self {
            phases: self.phases.iter().map(|p| -p).collect(),
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }
}

/// `sum_{n1 <= p <= n2} p^(-i tau)`
pub fn prime_sum(table: &PrimeTable, n1: f64, n2: f64, tau: f64) -> Result<Complex64> {
    Ok(table
        .primes_in(n1, n2)?
        .iter()
        .map(|&p| cis(-tau, (p as f64).ln()))
        .collect::<ComplexSum>()
        .value())
}

/// Two-sided enclosure of `sup_{t in interval} |P(t)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupCertificate {
    pub interval: Interval,
    pub grid_step: f64,
    pub lower: f64,
    pub upper: f64,
    pub lipschitz: f64,
    pub argmax: f64,
    pub points: usize,
}

impl SupCertificate {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn encloses(&self, value: f64, slack: f64) -> bool {
        self.lower - slack <= value && value <= self.upper + slack
    }
}

/// Max of `f` over `0..points` with the lowest index winning ties.
fn grid_argmax<F>(points: usize, f: F) -> (f64, usize)
where
    F: Fn(usize) -> f64 + Sync,
{
    (0..points)
        .into_par_iter()
        .map(|i| (f(i), i))
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                    a
                } else {
                    b
                }
            },
        )
}

/// Certified supremum of `|P|` over `interval` with `upper - lower <= eps`.
///
/// The grid step is `eps / lipschitz`. Every point of the interval lies
/// within half a step of a grid point, and `|P|` is `lipschitz`-Lipschitz,
/// so `upper = lower + step * lipschitz / 2` (plus the evaluation slack).
pub fn certified_sup(
    poly: &DirichletPoly,
    interval: Interval,
    eps: f64,
    budget: usize,
) -> Result<SupCertificate> {
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    let slack = EVAL_SLACK * poly.coeff_l1();
    if eps <= 2.0 * slack {
        return Err(Error::invalid(format!(
            "eps {eps:e} is below twice the evaluation slack {slack:e}"
        )));
    }
    let lip = poly.derivative_bound();
    let len = interval.len();
    let wanted = if lip == 0.0 || len == 0.0 {
        0usize
    } else {
        let n = (len * lip / eps).ceil();
        if n >= (usize::MAX / 2) as f64 {
            usize::MAX / 2
        } else {
            (n as usize).max(1)
        }
    };
    let budget = budget.max(2);
    let intervals = wanted.min(budget - 1);
    let step = if intervals == 0 { 0.0 } else { len / intervals as f64 };
    let point = |i: usize| {
        if i == intervals {
            interval.hi
        } else {
            interval.lo + i as f64 * step
        }
    };
    let (lower, idx) = grid_argmax(intervals + 1, |i| poly.eval(point(i)).norm());
    let cert = SupCertificate {
        interval,
        grid_step: step,
        lower,
        upper: lower + 0.5 * step * lip + slack,
        lipschitz: lip,
        argmax: point(idx),
        points: intervals + 1,
    };
    if wanted > intervals {
        return Err(Error::SupBudgetExceeded(Box::new(cert)));
    }
    Ok(cert)
}

/// Grid used by [`family_sup`]: the lattice `{k * step}` intersected with
/// `L`. Anchoring at zero makes the lower bound monotone when `L` grows.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FamilyGrid {
    pub step: f64,
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySup {
    pub lower: f64,
    pub upper: f64,
    pub lipschitz: f64,
    pub grid_step: f64,
    pub points: usize,
    pub argmax_t: f64,
    /// First and last prime of the maximizing run, if any prime is in range.
    pub argmax_run: Option<(u64, u64)>,
    pub primes: usize,
}

/// `sup |sum_{N1 <= p <= N2} p^(-i(theta + t))|` over `t` in `L` and over
/// runs of consecutive primes in `[U, U^(1+delta)]` whose last prime is at
/// most twice the first (the dyadic condition `N <= N1 < N2 <= 2N`).
///
/// Per grid point this is `max |S_j - S_i|` over admissible prefix-sum
/// pairs, which costs O(K^2) in the number of primes K.
pub fn family_sup(
    table: &PrimeTable,
    theta: f64,
    u: f64,
    delta: f64,
    l: Interval,
    grid: &FamilyGrid,
) -> Result<FamilySup> {
    if !(grid.step > 0.0) {
        return Err(Error::invalid("family grid step must be positive"));
    }
    if !(u >= 1.0) || !(delta >= 0.0) {
        return Err(Error::invalid(format!("need U >= 1 and delta >= 0, got {u}, {delta}")));
    }
    let top = u.powf(1.0 + delta);
    let primes = table.primes_in(u, top)?;
    let k = primes.len();
    let lip = k as f64 * top.ln();

    let first = (l.lo / grid.step).ceil();
    let last = (l.hi / grid.step).floor();
    let lattice = if last >= first { (last - first) as usize + 1 } else { 0 };
    let points = lattice.max(1);
    if points > grid.budget {
        return Err(Error::BudgetExceeded {
            what: "family_sup grid",
            needed: points as u128,
            budget: grid.budget as u128,
        });
    }
    let t_at = |i: usize| {
        if lattice == 0 {
            0.5 * (l.lo + l.hi)
        } else {
            (first + i as f64) * grid.step
        }
    };

    if k == 0 {
        return Ok(FamilySup {
            lower: 0.0,
            upper: 0.0,
            lipschitz: 0.0,
            grid_step: grid.step,
            points,
            argmax_t: t_at(0),
            argmax_run: None,
            primes: 0,
        });
    }

    let logs: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
    let shift: Vec<f64> = logs.iter().map(|&lp| reduced_angle(theta, lp)).collect();
    // last admissible run end for each run start
    let mut run_end = vec![0usize; k];
    let mut j = 0;
    for a in 0..k {
        j = j.max(a);
        while j + 1 < k && primes[j + 1] <= 2 * primes[a] {
            j += 1;
        }
        run_end[a] = j;
    }

    let best_run = |t: f64| -> (f64, usize, usize) {
        let mut prefix = Vec::with_capacity(k + 1);
        let mut acc = ComplexSum::new();
        prefix.push(Complex64::new(0.0, 0.0));
        for (lp, sh) in logs.iter().zip(&shift) {
            acc.add(cis_angle(-(sh + reduced_angle(t, *lp))));
            prefix.push(acc.value());
        }
        let mut best = (-1.0, 0, 0);
        for a in 0..k {
            for b in a..=run_end[a] {
                let v = (prefix[b + 1] - prefix[a]).norm_sqr();
                if v > best.0 {
                    best = (v, a, b);
                }
            }
        }
        best
    };

    let (sq, idx) = grid_argmax(points, |i| best_run(t_at(i)).0);
    let argmax_t = t_at(idx);
    let (_, a, b) = best_run(argmax_t);
    let lower = sq.sqrt();
    let slack = EVAL_SLACK * k as f64;
    Ok(FamilySup {
        lower,
        upper: lower + lip * grid.step + slack,
        lipschitz: lip,
        grid_step: grid.step,
        points,
        argmax_t,
        argmax_run: Some((primes[a], primes[b])),
        primes: k,
    })
}
