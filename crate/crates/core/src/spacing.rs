//! The multi-index set `E_q` and the linear-spacing coefficient
//! `xi(N, q) = min_{h != k in E_q} |sum (h_n - k_n) phi_n|`.
//!
//! Phases are assumed linearly independent over the rationals; this is not
//! decided here. A numerically vanishing minimum is reported as
//! [`Error::DegeneratePhases`].

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::PrimeTable;

pub const DEFAULT_EQ_BUDGET: u128 = 1_000_000;

/// Below this the linear form is treated as an exact zero.
pub const ZERO_THRESHOLD: f64 = 1e-13;

/// An `N`-tuple of nonnegative integers summing to `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `sum k_n phi_n`
    pub fn dot(&self, phases: &[f64]) -> f64 {
        self.0.iter().zip(phases).map(|(&k, &p)| k as f64 * p).sum()
    }
}

/// `|E_q| = C(q + N - 1, N - 1)`, saturating at `u128::MAX`.
pub fn composition_count(n: usize, q: u32) -> u128 {
    if n == 0 {
        return u128::from(q == 0);
    }
    let k = (n - 1) as u128;
    let total = q as u128 + k;
    let k = k.min(q as u128);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(total - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// All compositions of `q` into `n` nonnegative parts, in descending
/// lexicographic order: `(q, 0, ..), (q-1, 1, ..), .., (0, .., q)`.
pub fn enumerate_eq(n: usize, q: u32, budget: u128) -> Result<Vec<MultiIndex>> {
    if n == 0 || q == 0 {
        return Err(Error::invalid("enumerate_eq needs N >= 1 and q >= 1"));
    }
    let count = composition_count(n, q);
    if count > budget {
        return Err(Error::BudgetExceeded {
            what: "E_q enumeration",
            needed: count,
            budget,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0u32; n];
    fill(&mut current, 0, q, &mut out);
    Ok(out)
}

fn fill(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for v in (0..=remaining).rev() {
        current[pos] = v;
        fill(current, pos + 1, remaining - v, out);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spacing {
    /// `+inf` when `E_q` has a single element (N = 1).
    pub xi: f64,
    pub argmin: Option<(MultiIndex, MultiIndex)>,
    pub set_size: u128,
}

/// Exact `xi(N, q)` by sorting the values `sum k_n phi_n` over `E_q`; the
/// smallest gap between distinct multi-indices is a gap between neighbours
/// in sorted order.
pub fn xi_exact(phases: &[f64], q: u32, budget: u128) -> Result<Spacing> {
    let set = enumerate_eq(phases.len(), q, budget)?;
    let set_size = set.len() as u128;
    let mut values: Vec<(f64, usize)> = set
        .iter()
        .enumerate()
        .map(|(i, k)| (k.dot(phases), i))
        .collect();
    values.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut best: Option<(f64, usize, usize)> = None;
    for w in values.windows(2) {
        let gap = w[1].0 - w[0].0;
        if best.is_none_or(|(g, _, _)| gap < g) {
            best = Some((gap, w[0].1, w[1].1));
        }
    }
    match best {
        None => Ok(Spacing {
            xi: f64::INFINITY,
            argmin: None,
            set_size,
        }),
        Some((gap, i, j)) => {
            let (h, k) = (set[j].clone(), set[i].clone());
            if gap < ZERO_THRESHOLD {
                return Err(Error::DegeneratePhases {
                    h: h.0,
                    k: k.0,
                    value: gap,
                });
            }
            Ok(Spacing {
                xi: gap,
                argmin: Some((h, k)),
                set_size,
            })
        }
    }
}

/// `p_N^(-q)`, the lower bound for `xi` when `phi_n = log p_n`.
pub fn xi_prime_lower_bound(table: &PrimeTable, n: usize, q: u32) -> Result<f64> {
    let p = table.nth(n).ok_or_else(|| {
        Error::invalid(format!("N = {n} exceeds the {} primes in the table", table.len()))
    })?;
    Ok((p as f64).powi(-(q as i32)))
}

/// A value of `xi` that is safe to divide by in moment bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiValue {
    pub value: f64,
    /// `false` when the prime lower bound stood in for the exact value.
    pub exact: bool,
}

/// Exact `xi` when `E_q` fits in the budget. Otherwise, if every phase is
/// the logarithm of a prime, `(max p)^(-q)`, which can only be smaller than
/// the true value.
pub fn xi_or_prime_bound(phases: &[f64], q: u32, budget: u128) -> Result<XiValue> {
    match xi_exact(phases, q, budget) {
        Ok(s) => Ok(XiValue {
            value: s.xi,
            exact: true,
        }),
        Err(err @ Error::BudgetExceeded { .. }) => {
            let primes: Option<Vec<u64>> = phases.iter().map(|&phi| prime_from_log(phi)).collect();
            match primes.and_then(|ps| ps.into_iter().max()) {
                Some(p) => Ok(XiValue {
                    value: (p as f64).powi(-(q as i32)),
                    exact: false,
                }),
                None => Err(err),
            }
        }
        Err(e) => Err(e),
    }
}

fn prime_from_log(phi: f64) -> Option<u64> {
    if !(phi > 0.0 && phi < 43.0) {
        return None;
    }
    let x = phi.exp();
    let n = x.round();
    if (x - n).abs() > 1e-9 * n {
        return None;
    }
    let n = n as u64;
    let is_prime = n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
    is_prime.then_some(n)
}

/// The two products `P+ = prod_{l_n > 0} p_n^{l_n}` and
/// `P- = prod_{l_n < 0} p_n^{-l_n}` for `l = h - k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeRatio {
    pub plus: BigUint,
    pub minus: BigUint,
}

impl PrimeRatio {
    pub fn new(primes: &[u64], h: &MultiIndex, k: &MultiIndex) -> Self {
        let mut plus = BigUint::one();
        let mut minus = BigUint::one();
        for ((&p, &a), &b) in primes.iter().zip(&h.0).zip(&k.0) {
            if a > b {
                plus *= BigUint::from(p).pow(a - b);
            } else if b > a {
                minus *= BigUint::from(p).pow(b - a);
            }
        }
        Self { plus, minus }
    }

    /// `log(P+ / P-)` computed from the exact integer difference, so it stays
    /// accurate when the two products are close.
    pub fn log_ratio(&self) -> f64 {
        use std::cmp::Ordering;
        let (big, small, sign) = match self.plus.cmp(&self.minus) {
            Ordering::Equal => return 0.0,
            Ordering::Greater => (&self.plus, &self.minus, 1.0),
            Ordering::Less => (&self.minus, &self.plus, -1.0),
        };
        let diff = big - small;
        sign * ratio_f64(&diff, small).ln_1p()
    }
}

fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    let shift = den.bits().saturating_sub(60).min(num.bits().saturating_sub(60));
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn enumerate_small_sets() {
        assert_eq!(
            enumerate_eq(2, 2, 100).unwrap(),
            vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])]
        );
        assert_eq!(enumerate_eq(1, 7, 100).unwrap(), vec![mi(&[7])]);
        assert_eq!(enumerate_eq(4, 3, 100).unwrap().len(), 20);
    }

    #[test]
    fn enumeration_respects_budget() {
        assert!(matches!(
            enumerate_eq(10, 10, 1000),
            Err(Error::BudgetExceeded { needed: 92378, .. })
        ));
    }

    #[test]
    fn composition_counts() {
        assert_eq!(composition_count(4, 3), 20);
        assert_eq!(composition_count(1, 9), 1);
        assert_eq!(composition_count(8, 4), 330);
        assert_eq!(composition_count(200, 200), u128::MAX);
    }

    #[test]
    fn xi_for_two_and_three() {
        let phases = [2f64.ln(), 3f64.ln()];
        let s1 = xi_exact(&phases, 1, 100).unwrap();
        assert!((s1.xi - 1.5f64.ln()).abs() < 1e-15);
        let s2 = xi_exact(&phases, 2, 100).unwrap();
        assert!((s2.xi - 1.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn xi_single_phase_is_infinite() {
        let s = xi_exact(&[1.0], 3, 100).unwrap();
        assert!(s.xi.is_infinite());
        assert!(s.argmin.is_none());
    }

    #[test]
    fn dependent_phases_are_flagged() {
        // (1, 0, 1) and (0, 2, 0) give the same value
        let phases = [1.0, 2.0, 3.0];
        assert!(matches!(
            xi_exact(&phases, 2, 100),
            Err(Error::DegeneratePhases { .. })
        ));
    }

    #[test]
    fn prime_lower_bound_examples() {
        let t = PrimeTable::sieve(100).unwrap();
        assert!((xi_prime_lower_bound(&t, 2, 2).unwrap() - 1.0 / 9.0).abs() < 1e-17);
        assert_eq!(xi_prime_lower_bound(&t, 1, 1).unwrap(), 0.5);
        assert!(xi_prime_lower_bound(&t, 26, 1).is_err());
    }

    #[test]
    fn fallback_uses_prime_bound() {
        let phases: Vec<f64> = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29]
            .iter()
            .map(|&p| (p as f64).ln())
            .collect();
        let xi = xi_or_prime_bound(&phases, 10, 1000).unwrap();
        assert!(!xi.exact);
        assert!((xi.value - 29f64.powi(-10)).abs() < 1e-30);
        let generic = [0.1, 0.2 + 1e-3, 0.35, 0.47, 0.51];
        assert!(xi_or_prime_bound(&generic, 10, 10).is_err());
    }

    #[test]
    fn prime_ratio_products() {
        let primes = [2, 3, 5];
        let r = PrimeRatio::new(&primes, &mi(&[2, 0, 1]), &mi(&[0, 3, 0]));
        assert_eq!(r.plus, BigUint::from(20u32));
        assert_eq!(r.minus, BigUint::from(27u32));
        assert!((r.log_ratio() - (20f64 / 27.0).ln()).abs() < 1e-15);
    }
}
