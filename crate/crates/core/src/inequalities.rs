//! Numerical checks of the Hilbert-type inequality, the 2q-th moment bounds
//! for shifted Dirichlet polynomials and the chaining bound for their local
//! suprema.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dirichlet::{certified_sup, DirichletPoly, SupCertificate, DEFAULT_POINT_BUDGET};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::phase::{cis, ComplexSum};
use crate::primes::PrimeTable;
use crate::quadrature::{GaussLegendre, PANEL_ORDER};
use crate::spacing::{xi_or_prime_bound, XiValue};

/// Relative slack on the Hilbert bound.
pub const HILBERT_SLACK: f64 = 1e-9;

/// Rounding floor added to Richardson-style quadrature error estimates,
/// relative to the integral.
pub const QUAD_ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HilbertForm {
    pub value: Complex64,
    pub delta: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `sum_{m != n} x_m y_n / (lambda_m - lambda_n)` against
/// `(pi / delta) |x| |y|` with `delta` the minimal gap.
pub fn hilbert_form(lambdas: &[f64], x: &[Complex64], y: &[Complex64]) -> Result<HilbertForm> {
    let n = lambdas.len();
    if x.len() != n || y.len() != n {
        return Err(Error::invalid("lambda, x and y must have equal lengths"));
    }
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let delta = sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    if !(delta > 0.0) {
        return Err(Error::invalid("lambdas must be pairwise distinct"));
    }
    let mut acc = ComplexSum::new();
    for (m, (&lm, &xm)) in lambdas.iter().zip(x).enumerate() {
        for (k, (&ln, &yn)) in lambdas.iter().zip(y).enumerate() {
            if k != m {
                acc.add(xm * yn / (lm - ln));
            }
        }
    }
    let value = acc.value();
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let bound = if n < 2 {
        0.0
    } else {
        std::f64::consts::PI / delta * norm(x) * norm(y)
    };
    Ok(HilbertForm {
        value,
        delta,
        bound,
        pass: value.norm() <= bound * (1.0 + HILBERT_SLACK),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HilbertSuite {
    pub trials: usize,
    pub passes: usize,
    pub worst_ratio: f64,
    pub seed: u64,
}

impl HilbertSuite {
    pub fn pass_fraction(&self) -> f64 {
        if self.trials == 0 {
            1.0
        } else {
            self.passes as f64 / self.trials as f64
        }
    }
}

/// Random instances with `2 <= N <= max_n` and gaps at least `min_gap`.
pub fn hilbert_suite(trials: usize, seed: u64, max_n: usize, min_gap: f64) -> Result<HilbertSuite> {
    if max_n < 2 || !(min_gap > 0.0) {
        return Err(Error::invalid("hilbert suite needs max_n >= 2 and a positive gap"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passes = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let n = rng.gen_range(2..=max_n);
        let mut lambdas = Vec::with_capacity(n);
        let mut at = rng.gen_range(-10.0..10.0);
        for _ in 0..n {
            lambdas.push(at);
            // gaps from min_gap up to a few units, log-uniformly
            at += min_gap * (rng.gen_range(0.0..8.0f64)).exp();
        }
        // shuffle so the index order is unrelated to the ordering of lambdas
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            lambdas.swap(i, j);
        }
        let mut draw = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let x: Vec<Complex64> = (0..n).map(|_| draw()).collect();
        let y: Vec<Complex64> = (0..n).map(|_| draw()).collect();
        let h = hilbert_form(&lambdas, &x, &y)?;
        if h.pass {
            passes += 1;
        }
        if h.bound > 0.0 {
            worst = worst.max(h.value.norm() / h.bound);
        }
    }
    Ok(HilbertSuite {
        trials,
        passes,
        worst_ratio: worst,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    /// Normalized integral of the 2q-th power.
    pub value: f64,
    pub quad_error: f64,
    pub bound: f64,
    /// `bound - value`; negative beyond `quad_error` means the inequality failed.
    pub margin: f64,
    pub xi: XiValue,
    pub panels: usize,
}

impl MomentEstimate {
    pub fn holds(&self) -> bool {
        self.value <= self.bound + self.quad_error
    }
}

/// Fewest panels keeping each panel within a quarter period of the fastest
/// oscillation of the integrand, frequency `2 q phi_max`.
pub fn min_panels(length: f64, q: u32, phi_max: f64) -> usize {
    let width = std::f64::consts::PI / (4.0 * q as f64 * phi_max);
    if !(width.is_finite()) || width <= 0.0 {
        return 1;
    }
    ((length / width).ceil() as usize).max(1)
}

/// `(1/|J|) int_J |sum_n a_n e^{i theta phi_n}|^{2q} d theta` at `panels`
/// and `panels / 2`, returning the finer value and the error estimate.
fn normalized_moment(
    amplitudes: &[Complex64],
    phases: &[f64],
    j: Interval,
    q: u32,
    panels: usize,
) -> (f64, f64) {
    let rule = GaussLegendre::new(PANEL_ORDER);
    let integrand = |theta: f64| {
        let s = amplitudes
            .iter()
            .zip(phases)
            .map(|(&a, &phi)| a * cis(theta, phi))
            .collect::<ComplexSum>()
            .value();
        s.norm_sqr().powi(q as i32)
    };
    let fine = rule.composite(j.lo, j.hi, panels, integrand) / j.len();
    let coarse = rule.composite(j.lo, j.hi, (panels / 2).max(1), integrand) / j.len();
    (fine, (fine - coarse).abs() + rounding_floor(phases, j, q) * fine.abs())
}

/// Relative rounding in the integrand: the fixed floor plus the effect of
/// storing each node `theta` in f64, which moves the phase of the `2q`-th
/// power by up to `2 q phi~ ulp(theta)`.
fn rounding_floor(phases: &[f64], j: Interval, q: u32) -> f64 {
    let phi = phases.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let node_ulp = j.lo.abs().max(j.hi.abs()) * f64::EPSILON;
    QUAD_ROUNDING + 2.0 * q as f64 * phi * node_ulp
}

fn factorial(q: u32) -> f64 {
    (1..=q).map(f64::from).product()
}

/// `q! + 2 min(N^q, pi q!) / (|J| xi)`
pub fn moment_factor(n: usize, q: u32, j_len: f64, xi: f64) -> f64 {
    let qf = factorial(q);
    let cross = (n as f64).powi(q as i32).min(std::f64::consts::PI * qf);
    qf + 2.0 * cross / (j_len * xi)
}

fn check_resolution(poly: &DirichletPoly, j: Interval, q: u32, resolution: usize) -> Result<()> {
    if q == 0 {
        return Err(Error::invalid("moment order q must be positive"));
    }
    if !(j.len() > 0.0) {
        return Err(Error::invalid("moment interval J must have positive length"));
    }
    let need = min_panels(j.len(), q, poly.phi_max());
    if resolution < need {
        return Err(Error::invalid(format!(
            "resolution {resolution} below the oscillation-safe minimum {need}"
        )));
    }
    Ok(())
}

/// Increment moment `(1/|J|) int_J |P(theta+t) - P(theta+s)|^{2q}` against
/// `(q! + 2 min(N^q, pi q!)/(|J| xi)) * E(s,t)^q` where
/// `E(s,t) = sum |c_n|^2 |e^{i t phi_n} - e^{i s phi_n}|^2`.
pub fn moment_increment(
    poly: &DirichletPoly,
    j: Interval,
    q: u32,
    s: f64,
    t: f64,
    resolution: usize,
    xi_budget: u128,
) -> Result<MomentEstimate> {
    check_resolution(poly, j, q, resolution)?;
    let xi = xi_or_prime_bound(poly.phases(), q, xi_budget)?;
    let amplitudes: Vec<Complex64> = poly
        .coeffs()
        .iter()
        .zip(poly.phases())
        .map(|(&c, &phi)| c * (cis(t, phi) - cis(s, phi)))
        .collect();
    let (value, quad_error) = normalized_moment(&amplitudes, poly.phases(), j, q, resolution);
    let energy = poly.increment_energy(s, t);
    let bound = moment_factor(poly.len(), q, j.len(), xi.value) * energy.powi(q as i32);
    Ok(MomentEstimate {
        value,
        quad_error,
        bound,
        margin: bound - value,
        xi,
        panels: resolution,
    })
}

/// Plain moment `(1/|J|) int_J |P(theta)|^{2q}` against
/// `(q! + 2 min(N^q, pi q!)/(|J| xi)) (sum |c_n|^2)^q`.
pub fn moment_plain(
    poly: &DirichletPoly,
    j: Interval,
    q: u32,
    resolution: usize,
    xi_budget: u128,
) -> Result<MomentEstimate> {
    check_resolution(poly, j, q, resolution)?;
    let xi = xi_or_prime_bound(poly.phases(), q, xi_budget)?;
    let (value, quad_error) = normalized_moment(poly.coeffs(), poly.phases(), j, q, resolution);
    let bound = moment_factor(poly.len(), q, j.len(), xi.value) * poly.coeff_energy().powi(q as i32);
    Ok(MomentEstimate {
        value,
        quad_error,
        bound,
        margin: bound - value,
        xi,
        panels: resolution,
    })
}

/// `q! (1 + 2 pi N^q / T) (sum |c_p|^2)^q`
pub fn cor22_bound(nmax: f64, t: f64, q: u32, energy: f64) -> f64 {
    factorial(q) * (1.0 + 2.0 * std::f64::consts::PI * nmax.powi(q as i32) / t) * energy.powi(q as i32)
}

/// `(1/2T) int_{-T}^{T} |sum_{p <= N} c_p p^{-i theta}|^{2q}` against
/// [`cor22_bound`]. `coeffs` has one entry per prime `<= nmax`.
pub fn cor22_check(
    table: &PrimeTable,
    coeffs: &[Complex64],
    nmax: f64,
    t: f64,
    q: u32,
    resolution: usize,
) -> Result<MomentEstimate> {
    if !(t > 0.0) {
        return Err(Error::invalid("T must be positive"));
    }
    let primes = table.primes_in(2.0, nmax)?;
    if primes.len() != coeffs.len() {
        return Err(Error::invalid(format!(
            "{} coefficients for {} primes up to {nmax}",
            coeffs.len(),
            primes.len()
        )));
    }
    let phases: Vec<f64> = primes.iter().map(|&p| -(p as f64).ln()).collect();
    let poly = DirichletPoly::new(phases, coeffs.to_vec())?;
    let j = Interval::new(-t, t)?;
    check_resolution(&poly, j, q, resolution)?;
    let (value, quad_error) = normalized_moment(poly.coeffs(), poly.phases(), j, q, resolution);
    let bound = cor22_bound(nmax, t, q, poly.coeff_energy());
    Ok(MomentEstimate {
        value,
        quad_error,
        bound,
        margin: bound - value,
        xi: XiValue {
            value: primes.last().map_or(f64::INFINITY, |&p| (p as f64).powi(-(q as i32))),
            exact: false,
        },
        panels: resolution,
    })
}

/// `B = [q! (1 + 2 pi / (|J| xi))]^{1/2q}`
pub fn chaining_factor(q: u32, j_len: f64, xi: f64) -> f64 {
    (factorial(q) * (1.0 + 2.0 * std::f64::consts::PI / (j_len * xi))).powf(0.5 / q as f64)
}

/// Right-hand side of the chaining bound
/// `C_q B max{1, |L| phi~}^{1/2q} ( |c|_2 + min(|L|, 1/phi~) (sum |c|^2 phi^2)^{1/2} )`
/// where `phi~ = max |phi_n|`.
pub fn thm23_bound(
    poly: &DirichletPoly,
    j_len: f64,
    l_len: f64,
    q: u32,
    cq: f64,
    xi_budget: u128,
) -> Result<f64> {
    if !(cq > 0.0) || q == 0 || !(j_len > 0.0) || !(l_len >= 0.0) {
        return Err(Error::invalid("thm23_bound needs C_q > 0, q >= 1, |J| > 0, |L| >= 0"));
    }
    let xi = xi_or_prime_bound(poly.phases(), q, xi_budget)?;
    let b = chaining_factor(q, j_len, xi.value);
    let phi = poly.phi_max();
    let spread = (l_len * phi).max(1.0).powf(0.5 / q as f64);
    let reach = if phi > 0.0 { l_len.min(1.0 / phi) } else { l_len };
    Ok(cq * b * spread * (poly.coeff_energy().sqrt() + reach * poly.weighted_energy().sqrt()))
}

/// Configuration of a seeded family of random prime-phase polynomials used
/// to calibrate and validate the chaining constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSuite {
    pub polys: usize,
    pub max_terms: usize,
    pub max_q: u32,
    pub theta_samples: usize,
    /// Certificate gap relative to `sum |c_n|`.
    pub eps_rel: f64,
    pub seed: u64,
}

impl Default for ChainSuite {
    fn default() -> Self {
        Self {
            polys: 50,
            max_terms: 8,
            max_q: 3,
            theta_samples: 48,
            eps_rel: 1e-3,
            seed: 2023,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSample {
    pub terms: usize,
    pub q: u32,
    pub j: Interval,
    pub l: Interval,
    /// Monte-Carlo estimate of `|| sup_L |P_theta| ||_{2q}` from certified
    /// upper bounds.
    pub lhs: f64,
    /// Chaining right-hand side with `C_q = 1`.
    pub rhs_unit: f64,
}

impl ChainSample {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs_unit
    }
}

/// Empirical `|| sup_{t in L} |P(theta + t)| ||_{L^{2q}(m_J)}` from `samples`
/// uniform shifts; each supremum is the upper end of a certificate.
pub fn sup_moment_estimate(
    poly: &DirichletPoly,
    j: Interval,
    l: Interval,
    q: u32,
    samples: usize,
    eps: f64,
    rng: &mut impl Rng,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::invalid("need at least one theta sample"));
    }
    let mut acc = 0.0;
    for _ in 0..samples {
        let theta = if j.len() > 0.0 { rng.gen_range(j.lo..j.hi) } else { j.lo };
        let cert = shifted_sup(poly, theta, l, eps)?;
        acc += cert.upper.powi(2 * q as i32);
    }
    Ok((acc / samples as f64).powf(0.5 / q as f64))
}

/// Certified `sup_{t in L} |P(theta + t)|`.
pub fn shifted_sup(poly: &DirichletPoly, theta: f64, l: Interval, eps: f64) -> Result<SupCertificate> {
    let coeffs = poly
        .coeffs()
        .iter()
        .zip(poly.phases())
        .map(|(&c, &phi)| c * cis(theta, phi))
        .collect();
    let shifted = DirichletPoly::new(poly.phases().to_vec(), coeffs)?;
    certified_sup(&shifted, l, eps, DEFAULT_POINT_BUDGET)
}

const J_LENS: [f64; 2] = [10.0, 100.0];
const L_LENS: [f64; 3] = [0.25, 1.0, 4.0];

/// `suite.polys` random polynomials followed by one single-term polynomial
/// per `(q, |J|, |L|)` configuration.
pub fn chain_samples(table: &PrimeTable, suite: &ChainSuite) -> Result<Vec<ChainSample>> {
    if suite.max_terms == 0 || suite.max_terms > table.len() || suite.max_q == 0 {
        return Err(Error::invalid("chain suite needs 1 <= max_terms <= table size and max_q >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(suite.seed);
    let mut out = Vec::with_capacity(suite.polys);
    for _ in 0..suite.polys {
        let terms = rng.gen_range(1..=suite.max_terms);
        let q = rng.gen_range(1..=suite.max_q);
        let coeffs: Vec<Complex64> = (0..terms)
            .map(|_| Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let poly = DirichletPoly::over_primes(&table.primes()[..terms], coeffs)?;
        let j_lo = rng.gen_range(0.0..1000.0);
        let j_len = J_LENS[rng.gen_range(0..J_LENS.len())];
        let l_lo = rng.gen_range(0.0..10.0);
        let l_len = L_LENS[rng.gen_range(0..L_LENS.len())];
        let j = Interval::new(j_lo, j_lo + j_len)?;
        let l = Interval::new(l_lo, l_lo + l_len)?;
        let eps = suite.eps_rel * poly.coeff_l1();
        let lhs = sup_moment_estimate(&poly, j, l, q, suite.theta_samples, eps, &mut rng)?;
        let rhs_unit = thm23_bound(&poly, j_len, l_len, q, 1.0, crate::spacing::DEFAULT_EQ_BUDGET)?;
        out.push(ChainSample {
            terms,
            q,
            j,
            l,
            lhs,
            rhs_unit,
        });
    }
    // A single term has constant modulus, so its ratio depends only on
    // (q, |J|, |L|). Cover every such configuration instead of leaving it
    // to the draw. A fixed stream keeps these samples identical across suites.
    let mut fixed = ChaCha8Rng::seed_from_u64(0);
    for q in 1..=suite.max_q {
        for j_len in J_LENS {
            for l_len in L_LENS {
                let poly = DirichletPoly::over_primes(&table.primes()[..1], vec![Complex64::new(1.0, 0.0)])?;
                let j = Interval::new(0.0, j_len)?;
                let l = Interval::new(0.0, l_len)?;
                let lhs = sup_moment_estimate(&poly, j, l, q, 1, suite.eps_rel, &mut fixed)?;
                let rhs_unit = thm23_bound(&poly, j_len, l_len, q, 1.0, crate::spacing::DEFAULT_EQ_BUDGET)?;
                out.push(ChainSample {
                    terms: 1,
                    q,
                    j,
                    l,
                    lhs,
                    rhs_unit,
                });
            }
        }
    }
    Ok(out)
}

/// Smallest `C_q` for which every sample satisfies the chaining bound.
pub fn calibrate_cq(samples: &[ChainSample]) -> f64 {
    samples.iter().map(ChainSample::ratio).fold(0.0, f64::max)
}
