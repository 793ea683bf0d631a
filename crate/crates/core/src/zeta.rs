//! An independent zeta evaluator used to sanity-check candidate zero-free
//! boxes: Euler-Maclaurin with an explicit remainder, the Hardy Z function
//! by Riemann-Siegel, sign-change zero counting and grid box scans.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::phase::{cis, ComplexSum};

/// Largest `|t|` the oracle accepts.
pub const DESK_T_CAP: f64 = 1e4;

/// Highest Euler-Maclaurin correction order available.
pub const MAX_ORDER: usize = 60;

/// Below this height `hardy_z` rotates an Euler-Maclaurin value instead of
/// using Riemann-Siegel, whose main sum is too short there.
pub const RS_MIN_T: f64 = 30.0;

/// Default accuracy target of [`zeta`].
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaSample {
    pub s: Complex64,
    pub value: Complex64,
    /// Bound on the truncation error.
    pub err: f64,
}

/// `B_{2k} / (2k)!` for `k = 0..=MAX_ORDER + 1`, from exact Bernoulli
/// numbers.
fn bernoulli_ratios() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = 2 * (MAX_ORDER + 1);
        // Akiyama-Tanigawa
        let mut a: Vec<BigRational> = Vec::with_capacity(n + 1);
        let mut bern = Vec::with_capacity(n + 1);
        for m in 0..=n {
            a.push(BigRational::new(BigInt::one(), BigInt::from(m + 1)));
            for j in (1..=m).rev() {
                let d = &a[j - 1] - &a[j];
                a[j - 1] = d * BigRational::from_integer(BigInt::from(j));
            }
            bern.push(a[0].clone());
        }
        let mut fact = BigInt::one();
        let mut out = Vec::with_capacity(MAX_ORDER + 2);
        for k in 0..=MAX_ORDER + 1 {
            if k > 0 {
                fact *= BigInt::from(2 * k - 1) * BigInt::from(2 * k);
            }
            let r = &bern[2 * k] / BigRational::from_integer(fact.clone());
            out.push(r.to_f64().unwrap_or(0.0));
        }
        out
    })
}

/// `n^{-s}` with the phase reduced exactly.
fn npow(n: u64, s: Complex64) -> Complex64 {
    let ln = (n as f64).ln();
    (-s.re * ln).exp() * cis(-s.im, ln)
}

/// Euler-Maclaurin evaluation with `terms - 1` summed terms and `order`
/// Bernoulli corrections. The remainder bound
/// `|T_{m+1}| |s + 2m + 1| / (sigma + 2m + 1)` holds for `sigma > -(2m+1)`.
pub fn zeta_em(s: Complex64, terms: u64, order: usize) -> Result<ZetaSample> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    if terms < 2 {
        return Err(Error::invalid("Euler-Maclaurin needs at least 2 terms"));
    }
    if order > MAX_ORDER {
        return Err(Error::invalid(format!("order {order} exceeds {MAX_ORDER}")));
    }
    let ratios = bernoulli_ratios();
    let mut acc = ComplexSum::new();
    for n in 1..terms {
        acc.add(npow(n, s));
    }
    let nf = terms as f64;
    let n_s = npow(terms, s);
    acc.add(n_s * nf / (s - 1.0));
    acc.add(0.5 * n_s);
    // T_k = B_2k/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
    let mut rising = s;
    let mut power = n_s / nf;
    let mut next = Complex64::zero();
    for (k, &ratio) in ratios.iter().enumerate().take(order + 2).skip(1) {
        let term = ratio * rising * power;
        if k <= order {
            acc.add(term);
        } else {
            next = term;
        }
        rising *= (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
        power /= nf * nf;
    }
    let m = order as f64;
    let denom = s.re + 2.0 * m + 1.0;
    let err = if denom > 0.0 {
        next.norm() * (s + 2.0 * m + 1.0).norm() / denom
    } else {
        f64::INFINITY
    };
    Ok(ZetaSample {
        s,
        value: acc.value(),
        err,
    })
}

/// `zeta(s)` with error bound at most `tol`, choosing the number of terms
/// and the correction order.
pub fn zeta(s: Complex64, tol: f64) -> Result<ZetaSample> {
    if s.im.abs() > DESK_T_CAP {
        return Err(Error::InfeasibleScale(format!(
            "|t| = {} exceeds the oracle cap {DESK_T_CAP}",
            s.im.abs()
        )));
    }
    let mut best = f64::INFINITY;
    let mut terms = (s.norm() / PI).ceil() as u64 + 10;
    while terms <= 1 << 20 {
        let mut last = f64::INFINITY;
        for order in 1..=MAX_ORDER {
            let z = zeta_em(s, terms, order)?;
            best = best.min(z.err);
            if z.err <= tol {
                return Ok(z);
            }
            // past the smallest term the series starts to diverge
            if z.err > last {
                break;
            }
            last = z.err;
        }
        terms *= 2;
    }
    Err(Error::AccuracyUnreachable { achieved: best })
}

/// `ln Gamma(z)` for `Re z > 0`, by upward shift and Stirling's series.
fn ln_gamma(z: Complex64) -> Complex64 {
    const SHIFT: usize = 10;
    let mut w = z;
    let mut logs = ComplexSum::new();
    for _ in 0..SHIFT {
        logs.add(w.ln());
        w += 1.0;
    }
    let ratios = bernoulli_ratios();
    let mut series = Complex64::zero();
    let w2 = w * w;
    let mut wp = w;
    let mut fact = 1.0; // (2k)! / (2k (2k-1)) = (2k-2)!
    for (k, &ratio) in ratios.iter().enumerate().take(11).skip(1) {
        if k > 1 {
            fact *= ((2 * k - 3) * (2 * k - 2)) as f64;
        }
        // B_2k / (2k (2k-1) w^{2k-1}) = ratios[k] (2k-2)! / w^{2k-1}
        series += ratio * fact / wp;
        wp *= w2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - logs.value()
}

/// Riemann-Siegel theta, `arg Gamma(1/4 + it/2) - (t/2) ln pi`.
pub fn rs_theta(t: f64) -> f64 {
    ln_gamma(Complex64::new(0.25, 0.5 * t)).im - 0.5 * t * PI.ln()
}

/// `e^{i theta(t)} zeta(1/2 + it)`; real up to rounding.
pub fn hardy_z_em(t: f64) -> Result<Complex64> {
    let z = zeta(Complex64::new(0.5, t), DEFAULT_TOL)?;
    Ok(Complex64::from_polar(1.0, rs_theta(t)) * z.value)
}

/// Values of `Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)` and its
/// derivatives of orders 0, 2, 3 and 6, by the trapezoid rule on a circle
/// (exact for entire functions up to aliasing).
fn psi_derivatives(p: f64) -> [f64; 4] {
    const NODES: usize = 128;
    const RADIUS: f64 = 0.5;
    let f = |z: Complex64| (2.0 * PI * (z * z - z - 0.0625)).cos() / (2.0 * PI * z).cos();
    let orders = [0usize, 2, 3, 6];
    let mut sums = [Complex64::zero(); 4];
    for j in 0..NODES {
        let ang = 2.0 * PI * (j as f64 + 0.5) / NODES as f64;
        let u = Complex64::from_polar(1.0, ang);
        let v = f(p + RADIUS * u);
        for (sum, &k) in sums.iter_mut().zip(&orders) {
            *sum += v * u.powi(-(k as i32));
        }
    }
    let mut out = [0.0; 4];
    for ((o, sum), &k) in out.iter_mut().zip(&sums).zip(&orders) {
        let kf: f64 = (1..=k).map(|i| i as f64).product();
        *o = (sum.re / NODES as f64) * kf / RADIUS.powi(k as i32);
    }
    out
}

/// Hardy's `Z(t)`: Riemann-Siegel main sum with corrections `C0`, `C1`,
/// `C2` for `t >= 30`, the rotated Euler-Maclaurin value below.
pub fn hardy_z(t: f64) -> Result<f64> {
    if !(t >= 2.0) {
        return Err(Error::invalid(format!("hardy_z needs t >= 2, got {t}")));
    }
    if t > DESK_T_CAP {
        return Err(Error::InfeasibleScale(format!("t = {t} exceeds the oracle cap {DESK_T_CAP}")));
    }
    if t < RS_MIN_T {
        return Ok(hardy_z_em(t)?.re);
    }
    let tau = (t / (2.0 * PI)).sqrt();
    let n = tau.floor() as u64;
    let p = tau - n as f64;
    let th = rs_theta(t);
    let mut main = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        main += (th - t * kf.ln()).cos() / kf.sqrt();
    }
    let [c0, d2, d3, d6] = psi_derivatives(p);
    let pi2 = PI * PI;
    let c1 = -d3 / (96.0 * pi2);
    let c2 = d2 / (64.0 * pi2) + d6 / (18432.0 * pi2 * pi2);
    let a = 1.0 / tau;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    Ok(2.0 * main + sign * a.sqrt() * (c0 + c1 * a + c2 * a * a))
}

/// `(T/2pi) log(T/2pi) - T/2pi + 7/8`
pub fn zero_count_main_term(t: f64) -> f64 {
    let x = t / (2.0 * PI);
    x * x.ln() - x + 0.875
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub t: f64,
    pub step: f64,
    pub count: usize,
    pub main_term: f64,
    /// `|count - main_term| > 1`.
    pub flagged: bool,
    pub resolution_warning: Option<String>,
}

fn sign_changes(values: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut changes = 0;
    for &v in values {
        if v != 0.0 {
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                changes += 1;
            }
            last = v;
        }
    }
    changes
}

fn z_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    let n = ((hi - lo) / step).ceil() as usize;
    (0..=n)
        .into_par_iter()
        .map(|k| hardy_z((lo + k as f64 * step).min(hi)))
        .collect()
}

/// Sign changes of `Z` on `(2, T]` at spacing `step`, a lower bound for the
/// number of critical-line zeros up to `T`.
pub fn count_zeros(t: f64, step: f64) -> Result<ZeroCount> {
    if !(step > 0.0) {
        return Err(Error::invalid("step must be positive"));
    }
    if t > DESK_T_CAP {
        return Err(Error::InfeasibleScale(format!("T = {t} exceeds the oracle cap {DESK_T_CAP}")));
    }
    let main_term = zero_count_main_term(t.max(2.0 * PI));
    if t <= 2.0 {
        return Ok(ZeroCount {
            t,
            step,
            count: 0,
            main_term,
            flagged: false,
            resolution_warning: None,
        });
    }
    let count = sign_changes(&z_grid(2.0, t, step)?);
    let spacing = 2.0 * PI / (t / (2.0 * PI)).ln().max(1.0);
    let resolution_warning = (step > spacing / 4.0).then(|| {
        format!("step {step} is coarse against the mean zero spacing {spacing:.3} near T")
    });
    Ok(ZeroCount {
        t,
        step,
        count,
        main_term,
        flagged: (count as f64 - main_term).abs() > 1.0,
        resolution_warning,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxScan {
    pub sigma0: f64,
    pub sigma_max: f64,
    pub t_interval: Interval,
    pub grid: usize,
    pub points: usize,
    pub min_abs: f64,
    pub argmin: Option<Complex64>,
    /// Smallest `|zeta| - floor` over the box, the floor being the error
    /// bounds plus the largest change to a lattice neighbour.
    pub min_clearance: f64,
    pub max_err: f64,
    /// Sign changes of `Z` in the interval at step 0.01; these sit on the
    /// critical line and do not contradict the box.
    pub critical_line_zeros: usize,
    pub consistent: bool,
    pub verdict: String,
    pub samples: Vec<ZetaSample>,
}

pub const BOX_SIGMA_MAX: f64 = 1.2;

/// Scan `|zeta|` over `[sigma0, 1.2] x t_interval`.
///
/// The sigma lattice is `1/2 + j (0.7 / grid)`, so raising `sigma0` only
/// removes columns and never turns a consistent verdict inconsistent. The
/// verdict is heuristic: a grid cannot exclude a zero, only make one
/// implausible.
pub fn box_zero_scan(sigma0: f64, t_interval: Interval, grid: usize) -> Result<BoxScan> {
    if !(0.5..BOX_SIGMA_MAX).contains(&sigma0) {
        return Err(Error::invalid(format!("sigma0 must lie in [0.5, {BOX_SIGMA_MAX}), got {sigma0}")));
    }
    if grid < 2 {
        return Err(Error::invalid("grid must be at least 2"));
    }
    if t_interval.hi > DESK_T_CAP || t_interval.lo < -DESK_T_CAP {
        return Err(Error::InfeasibleScale(format!(
            "t interval {t_interval} exceeds the oracle cap {DESK_T_CAP}"
        )));
    }
    let empty = BoxScan {
        sigma0,
        sigma_max: BOX_SIGMA_MAX,
        t_interval,
        grid,
        points: 0,
        min_abs: f64::INFINITY,
        argmin: None,
        min_clearance: f64::INFINITY,
        max_err: 0.0,
        critical_line_zeros: 0,
        consistent: true,
        verdict: "consistent (heuristic): empty interval".into(),
        samples: Vec::new(),
    };
    if t_interval.len() == 0.0 {
        return Ok(empty);
    }
    if t_interval.lo < 1.0 && t_interval.hi > -1.0 {
        return Err(Error::invalid("t interval must stay away from the pole, |t| >= 1"));
    }

    let dsig = (BOX_SIGMA_MAX - 0.5) / grid as f64;
    let j0 = ((sigma0 - 0.5) / dsig - 1e-9).ceil().max(0.0) as usize;
    let first_col = j0.saturating_sub(1);
    let sigmas: Vec<f64> = (first_col..=grid).map(|j| 0.5 + j as f64 * dsig).collect();
    let nt = grid.max((t_interval.len() / 0.1).ceil() as usize);
    let ts: Vec<f64> = (0..=nt)
        .map(|k| t_interval.lo + t_interval.len() * k as f64 / nt as f64)
        .collect();

    let cells: Vec<(usize, usize)> = (0..sigmas.len())
        .flat_map(|a| (0..ts.len()).map(move |b| (a, b)))
        .collect();
    let values: Vec<ZetaSample> = cells
        .par_iter()
        .map(|&(a, b)| zeta(Complex64::new(sigmas[a], ts[b]), 1e-10))
        .collect::<Result<_>>()?;
    let at = |a: usize, b: usize| &values[a * ts.len() + b];

    let in_box = j0 - first_col; // first column inside the box
    let mut out = empty;
    out.verdict.clear();
    for a in in_box..sigmas.len() {
        for b in 0..ts.len() {
            let z = at(a, b);
            let mut floor = 0.0f64;
            let nbrs = [
                (a.checked_sub(1), Some(b)),
                (Some(a + 1).filter(|&x| x < sigmas.len()), Some(b)),
                (Some(a), b.checked_sub(1)),
                (Some(a), Some(b + 1).filter(|&x| x < ts.len())),
            ];
            for (na, nb) in nbrs {
                if let (Some(na), Some(nb)) = (na, nb) {
                    let w = at(na, nb);
                    floor = floor.max((w.value - z.value).norm() + w.err);
                }
            }
            floor += z.err;
            let abs = z.value.norm();
            if abs < out.min_abs {
                out.min_abs = abs;
                out.argmin = Some(z.s);
            }
            out.min_clearance = out.min_clearance.min(abs - floor);
            out.max_err = out.max_err.max(z.err);
            out.samples.push(*z);
        }
    }
    out.points = out.samples.len();
    if t_interval.lo >= 2.0 {
        out.critical_line_zeros = sign_changes(&z_grid(t_interval.lo, t_interval.hi, 0.01)?);
    }
    out.consistent = out.min_clearance > 0.0;
    out.verdict = if out.consistent {
        "consistent (heuristic): |zeta| clears the grid floor everywhere".into()
    } else {
        "inconsistent (heuristic): |zeta| falls below the grid floor".into()
    };
    Ok(out)
}
