//! Sieved prime tables with range access.
//!
//! Tables up to [`SEGMENT_THRESHOLD`] use a plain odd-only sieve; larger
//! limits are sieved segment by segment so working memory stays bounded by
//! the segment size plus the base primes.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const SEGMENT_THRESHOLD: u64 = 10_000_000;
const SEGMENT_LEN: u64 = 1 << 20;

/// Environment variable naming the on-disk prime cache directory.
pub const CACHE_ENV: &str = "ZEROFREE_PRIME_CACHE";

/// Immutable list of all primes up to `limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn sieve(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::invalid(format!("sieve limit {limit} is below 2")));
        }
        let primes = if limit <= SEGMENT_THRESHOLD {
            simple_sieve(limit)
        } else {
            segmented_sieve(limit)
        };
        Ok(Self { limit, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// The `n`-th prime, 1-based (`nth(1) == Some(2)`).
    pub fn nth(&self, n: usize) -> Option<u64> {
        n.checked_sub(1).and_then(|i| self.primes.get(i).copied())
    }

    /// pi(n): number of table entries `<= n`.
    pub fn prefix_count(&self, n: u64) -> usize {
        self.primes.partition_point(|&p| p <= n)
    }

    /// Primes `p` with `lo <= p <= hi`.
    pub fn primes_in(&self, lo: f64, hi: f64) -> Result<&[u64]> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::invalid("prime range endpoint is NaN"));
        }
        if hi > self.limit as f64 {
            return Err(Error::RangeExceedsTable {
                hi,
                limit: self.limit,
            });
        }
        if hi < lo || hi < 2.0 {
            return Ok(&[]);
        }
        let lo_int = lo.max(0.0).ceil() as u64;
        let hi_int = hi.floor() as u64;
        let start = self.primes.partition_point(|&p| p < lo_int);
        let end = self.primes.partition_point(|&p| p <= hi_int);
        Ok(&self.primes[start..end.max(start)])
    }

    /// Natural logarithms of [`primes_in`](Self::primes_in).
    pub fn log_phases(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        Ok(self
            .primes_in(lo, hi)?
            .iter()
            .map(|&p| (p as f64).ln())
            .collect())
    }

    /// Write the table as a little-endian `u64` count followed by the primes.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(fs::File::create(path)?);
        w.write_all(&(self.primes.len() as u64).to_le_bytes())?;
        for p in &self.primes {
            w.write_all(&p.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Read a table written by [`save`](Self::save). The limit is not stored
    /// in the file and must be supplied by the caller.
    pub fn load(path: &Path, limit: u64) -> Result<Self> {
        let mut r = BufReader::new(fs::File::open(path)?);
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let count = u64::from_le_bytes(word) as usize;
        let mut primes = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut word)?;
            primes.push(u64::from_le_bytes(word));
        }
        if r.read(&mut word)? != 0 {
            return Err(Error::invalid(format!(
                "prime cache {} has trailing data",
                path.display()
            )));
        }
        let ascending = primes.windows(2).all(|w| w[0] < w[1]);
        if !ascending || primes.last().is_some_and(|&p| p > limit) {
            return Err(Error::invalid(format!(
                "prime cache {} is inconsistent with limit {limit}",
                path.display()
            )));
        }
        Ok(Self { limit, primes })
    }

    pub fn cache_path(dir: &Path, limit: u64) -> PathBuf {
        dir.join(format!("primes-{limit}.bin"))
    }

    /// Load from `dir` if a cache for `limit` exists, otherwise sieve and
    /// store it there.
    pub fn cached_in(dir: &Path, limit: u64) -> Result<Self> {
        let path = Self::cache_path(dir, limit);
        if path.exists() {
            return Self::load(&path, limit);
        }
        let table = Self::sieve(limit)?;
        fs::create_dir_all(dir)?;
        table.save(&path)?;
        Ok(table)
    }

    /// Sieve, going through the cache directory named by [`CACHE_ENV`] when
    /// that variable is set.
    pub fn with_env_cache(limit: u64) -> Result<Self> {
        match std::env::var_os(CACHE_ENV) {
            Some(dir) if !dir.is_empty() => Self::cached_in(Path::new(&dir), limit),
            _ => Self::sieve(limit),
        }
    }
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    // index i stands for the odd number 2i + 1
    let n = limit as usize;
    let half = n.div_ceil(2);
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= n {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(estimate_count(limit));
    primes.push(2);
    primes.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| 2 * i as u64 + 1),
    );
    primes
}

fn segmented_sieve(limit: u64) -> Vec<u64> {
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = simple_sieve(root.max(2));
    let mut primes = Vec::with_capacity(estimate_count(limit));
    let mut seg = vec![false; SEGMENT_LEN as usize];
    let mut low = 2u64;
    while low <= limit {
        let high = (low + SEGMENT_LEN - 1).min(limit);
        let span = (high - low + 1) as usize;
        seg[..span].fill(false);
        for &p in &base {
            if p * p > high {
                break;
            }
            let mut m = (low.div_ceil(p) * p).max(p * p);
            while m <= high {
                seg[(m - low) as usize] = true;
                m += p;
            }
        }
        primes.extend(
            seg[..span]
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| low + i as u64),
        );
        low = high + 1;
    }
    primes
}

fn estimate_count(limit: u64) -> usize {
    let x = limit as f64;
    if x < 17.0 {
        8
    } else {
        (1.26 * x / x.ln()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_prime_trial(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn sieve_thirty() {
        let t = PrimeTable::sieve(30).unwrap();
        assert_eq!(t.primes(), &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(t.prefix_count(30), 10);
    }

    #[test]
    fn sieve_two_and_below() {
        assert_eq!(PrimeTable::sieve(2).unwrap().primes(), &[2]);
        assert!(matches!(PrimeTable::sieve(1), Err(Error::InvalidArgument(_))));
        assert!(matches!(PrimeTable::sieve(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn pi_of_a_million_matches_trial_division() {
        let t = PrimeTable::sieve(1_000_000).unwrap();
        let trial = (2..=1_000_000u64).filter(|&n| is_prime_trial(n)).count();
        assert_eq!(trial, 78_498);
        assert_eq!(t.len(), trial);
    }

    #[test]
    fn segmented_agrees_with_simple() {
        for limit in [2u64, 3, 10, 1_048_575, 1_048_576, 1_048_577, 3_000_001] {
            assert_eq!(segmented_sieve(limit), simple_sieve(limit), "limit {limit}");
        }
    }

    #[test]
    fn segmented_path_above_threshold() {
        let t = PrimeTable::sieve(SEGMENT_THRESHOLD + 1_000).unwrap();
        assert_eq!(t.prefix_count(SEGMENT_THRESHOLD), 664_579);
        assert!(t.primes().iter().rev().take(20).all(|&p| is_prime_trial(p)));
    }

    #[test]
    fn ranges_are_inclusive() {
        let t = PrimeTable::sieve(100).unwrap();
        assert_eq!(t.primes_in(10.0, 20.0).unwrap(), &[11, 13, 17, 19]);
        assert!(t.primes_in(14.0, 16.0).unwrap().is_empty());
        assert_eq!(t.primes_in(2.0, 2.0).unwrap(), &[2]);
        assert_eq!(t.primes_in(96.5, 100.0).unwrap(), &[97]);
        assert!(t.primes_in(20.0, 10.0).unwrap().is_empty());
        assert!(matches!(
            t.primes_in(10.0, 101.0),
            Err(Error::RangeExceedsTable { .. })
        ));
    }

    #[test]
    fn log_phases_round_trip() {
        let t = PrimeTable::sieve(100).unwrap();
        let small = t.log_phases(2.0, 3.0).unwrap();
        assert!((small[0] - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((small[1] - 1.098_612_288_668_109_8).abs() < 1e-15);
        let logs = t.log_phases(10.0, 100.0).unwrap();
        assert!(logs.windows(2).all(|w| w[0] < w[1]));
        for (l, &p) in logs.iter().zip(t.primes_in(10.0, 100.0).unwrap()) {
            assert!((l.exp() - p as f64).abs() / (p as f64) < 1e-12);
        }
    }

    #[test]
    fn nth_prime_is_one_based() {
        let t = PrimeTable::sieve(30).unwrap();
        assert_eq!(t.nth(1), Some(2));
        assert_eq!(t.nth(10), Some(29));
        assert_eq!(t.nth(0), None);
        assert_eq!(t.nth(11), None);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let a = PrimeTable::cached_in(dir.path(), 5000).unwrap();
        let path = PrimeTable::cache_path(dir.path(), 5000);
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes.len(), 8 * (a.len() + 1));
        assert_eq!(u64::from_le_bytes(bytes[..8].try_into().unwrap()), a.len() as u64);
        let b = PrimeTable::cached_in(dir.path(), 5000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn corrupt_cache_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        let mut bytes = 2u64.to_le_bytes().to_vec();
        bytes.extend(5u64.to_le_bytes());
        bytes.extend(3u64.to_le_bytes());
        std::fs::write(&path, bytes).unwrap();
        assert!(PrimeTable::load(&path, 10).is_err());
    }
}
