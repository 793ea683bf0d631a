//! Acceptance suite. Each criterion prints one PASS or FAIL line; the binary
//! exits non-zero when any criterion fails.
//!
//! Pass an integer argument to run a single criterion, e.g.
//! `cargo test --test acceptance -- 7`.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zerofree::checks::CheckTag;
use zerofree::cli::{self, RunConfig, EXIT_ANALYSIS_ONLY, EXIT_OK};
use zerofree::dirichlet::{certified_sup, DirichletPoly, DEFAULT_POINT_BUDGET};
use zerofree::inequalities::{
    calibrate_cq, chain_samples, cor22_check, hilbert_suite, min_panels, moment_increment, moment_plain,
    ChainSuite, MomentEstimate,
};
use zerofree::pipeline::{
    covering_from_intervals, derive_params, estimate_theta_set, Scaled, ThetaOptions, H_MAX, H_MIN,
};
use zerofree::primes::PrimeTable;
use zerofree::spacing::{enumerate_eq, xi_exact, xi_prime_lower_bound, PrimeRatio, DEFAULT_EQ_BUDGET};
use zerofree::zeta::{box_zero_scan, count_zeros, zero_count_main_term, zeta};
use zerofree::Interval;

type Q = Ratio<i64>;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

const CRITERIA: [Criterion; 10] = [
    Criterion {
        id: 1,
        name: "exact parameter identities",
        budget: Duration::from_secs(1),
        run: exact_parameters,
    },
    Criterion {
        id: 2,
        name: "sigma0 above 1 - 19^-12",
        budget: Duration::from_secs(1),
        run: sigma0_remark,
    },
    Criterion {
        id: 3,
        name: "Hilbert inequality suite",
        budget: Duration::from_secs(10),
        run: hilbert,
    },
    Criterion {
        id: 4,
        name: "moment bounds",
        budget: Duration::from_secs(300),
        run: moments,
    },
    Criterion {
        id: 5,
        name: "spacing lower bound",
        budget: Duration::from_secs(60),
        run: spacing,
    },
    Criterion {
        id: 6,
        name: "certified suprema",
        budget: Duration::from_secs(60),
        run: suprema,
    },
    Criterion {
        id: 7,
        name: "good-shift proportion at desk scale",
        budget: Duration::from_secs(600),
        run: good_shifts,
    },
    Criterion {
        id: 8,
        name: "covering count",
        budget: Duration::from_secs(10),
        run: covering,
    },
    Criterion {
        id: 9,
        name: "zeta oracle",
        budget: Duration::from_secs(120),
        run: zeta_oracle,
    },
    Criterion {
        id: 10,
        name: "end-to-end certify",
        budget: Duration::from_secs(900),
        run: certify,
    },
];

fn main() {
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for c in CRITERIA.iter().filter(|c| only.is_none_or(|id| id == c.id)) {
        let start = Instant::now();
        let out = (c.run)();
        let took = start.elapsed();
        let ok = out.ok && took <= c.budget;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {}: {} [{:.2}s of {}s]",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.name,
            out.detail,
            took.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}

fn exact_parameters() -> Outcome {
    let mut bad = Vec::new();
    for h in H_MIN..=H_MAX {
        let p = match derive_params(h, 1, 0.75, None) {
            Ok(p) => p,
            Err(e) => return outcome(false, format!("H = {h}: {e}")),
        };
        let hh = h as i64;
        let one = Q::from_integer(1);
        let delta = Q::new(hh - 1, 8 * hh);
        let q = Q::from_integer(5 * hh);
        let big_b = p.big_b.0;
        let b = p.b.0;
        let ok = p.delta.0 == delta
            && p.q as i64 == 5 * hh
            && (one + delta) * (one + one / q) - big_b / (q * 2) == one - delta
            && big_b * 2 < q
            && big_b < Q::from_integer(5) / ((one - delta * 8) * 2)
            && b >= delta * (one - delta * 8) / 5;
        if !ok {
            bad.push(h);
        }
    }
    outcome(bad.is_empty(), format!("H in 2..=8, failing: {bad:?}"))
}

fn sigma0_remark() -> Outcome {
    let mut worst: Option<(u32, f64, f64, f64)> = None;
    for h in H_MIN..=H_MAX {
        let p = match derive_params(h, 1, 0.75, None) {
            Ok(p) => p,
            Err(e) => return outcome(false, format!("H = {h}: {e}")),
        };
        if worst.is_none_or(|w| p.delta0 > w.1) {
            worst = Some((h, p.delta0, p.delta0_pow12, p.sigma0));
        }
    }
    let (h, d0, d12, sigma0) = worst.expect("at least one H");
    let floor = 19f64.powi(-12);
    // `1 - d0^12` rounds in f64, so the twelfth power is compared as well
    let ok = sigma0 > 1.0 - floor && d12 < floor;
    outcome(
        ok,
        format!("max delta0 = {d0:.6e} at H = {h}, delta0^12 = {d12:.4e} vs 19^-12 = {floor:.4e}"),
    )
}

fn hilbert() -> Outcome {
    match hilbert_suite(1000, 7, 50, 1e-3) {
        Ok(s) => outcome(
            s.passes == s.trials,
            format!("{}/{} instances, worst |form|/bound = {:.4}", s.passes, s.trials, s.worst_ratio),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn random_coeffs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::from_polar(rng.gen_range(0.1..1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect()
}

/// Value within bound and the estimate agreeing with a run at twice the
/// resolution to within its own error estimate.
fn consistent(coarse: &MomentEstimate, fine: &MomentEstimate) -> bool {
    coarse.holds() && fine.holds() && (fine.value - coarse.value).abs() <= coarse.quad_error
}

fn moments() -> Outcome {
    let table = PrimeTable::sieve(100).expect("sieve");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut cases, mut failures, mut min_margin) = (0usize, Vec::new(), f64::INFINITY);
    for n in 1..=6usize {
        let primes = &table.primes()[..n];
        let phi_max = (primes[n - 1] as f64).ln();
        for q in 1..=3u32 {
            for draw in 0..20 {
                let coeffs = random_coeffs(&mut rng, n);
                let poly = DirichletPoly::over_primes(primes, coeffs.clone()).expect("poly");
                let s = rng.gen_range(-5.0..5.0);
                let t = rng.gen_range(-5.0..5.0);
                for len in [10.0, 100.0, 1000.0] {
                    let lo = rng.gen_range(0.0..1000.0);
                    let j = Interval::new(lo, lo + len).expect("interval");
                    let r = min_panels(len, q, phi_max);
                    let run = |res| {
                        Ok::<_, zerofree::Error>((
                            moment_increment(&poly, j, q, s, t, res, DEFAULT_EQ_BUDGET)?,
                            moment_plain(&poly, j, q, res, DEFAULT_EQ_BUDGET)?,
                        ))
                    };
                    match run(r).and_then(|a| Ok((a, run(2 * r)?))) {
                        Ok(((inc, plain), (inc2, plain2))) => {
                            cases += 2;
                            min_margin = min_margin.min(inc.margin).min(plain.margin);
                            if !consistent(&inc, &inc2) || !consistent(&plain, &plain2) {
                                failures.push(format!("N={n} q={q} draw={draw} |J|={len}"));
                            }
                        }
                        Err(e) => failures.push(format!("N={n} q={q} |J|={len}: {e}")),
                    }
                }
                for big_t in [100.0, 1000.0] {
                    let nmax = primes[n - 1] as f64;
                    let r = min_panels(2.0 * big_t, q, phi_max);
                    let pair = cor22_check(&table, &coeffs, nmax, big_t, q, r)
                        .and_then(|a| Ok((a, cor22_check(&table, &coeffs, nmax, big_t, q, 2 * r)?)));
                    match pair {
                        Ok((c, c2)) => {
                            cases += 1;
                            min_margin = min_margin.min(c.margin);
                            if !consistent(&c, &c2) {
                                failures.push(format!("corollary N={n} q={q} T={big_t}"));
                            }
                        }
                        Err(e) => failures.push(format!("corollary N={n} q={q} T={big_t}: {e}")),
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{cases} estimates, min margin {min_margin:.3e}, failures {}{}",
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

fn spacing() -> Outcome {
    let table = PrimeTable::sieve(100).expect("sieve");
    let (mut pairs, mut worst_form, mut failures) = (0usize, 0f64, Vec::new());
    for n in 1..=8usize {
        let primes = &table.primes()[..n];
        let phases: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
        for q in 1..=4u32 {
            let bound = xi_prime_lower_bound(&table, n, q).expect("bound");
            let xi = match xi_exact(&phases, q, DEFAULT_EQ_BUDGET) {
                Ok(s) => s.xi,
                Err(e) => {
                    failures.push(format!("N={n} q={q}: {e}"));
                    continue;
                }
            };
            let set = enumerate_eq(n, q, DEFAULT_EQ_BUDGET).expect("E_q");
            let mut brute = f64::INFINITY;
            for (a, h) in set.iter().enumerate() {
                for k in &set[a + 1..] {
                    pairs += 1;
                    let float = h.dot(&phases) - k.dot(&phases);
                    let exact = PrimeRatio::new(primes, h, k).log_ratio();
                    worst_form = worst_form.max((float - exact).abs());
                    brute = brute.min(exact.abs());
                }
            }
            if !(xi >= bound && brute >= bound && (n == 1 || (brute - xi).abs() <= 1e-9)) {
                failures.push(format!("N={n} q={q}: xi {xi:e}, brute {brute:e}, bound {bound:e}"));
            }
        }
    }
    let ok = failures.is_empty() && worst_form <= 1e-9;
    outcome(
        ok,
        format!(
            "{pairs} pairs, worst float vs big-integer form {worst_form:.2e}, failures {}{}",
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

fn suprema() -> Outcome {
    let table = PrimeTable::sieve(100).expect("sieve");
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_excess, mut failures) = (f64::NEG_INFINITY, 0usize);
    for _ in 0..50 {
        let n = rng.gen_range(1..=20usize);
        let poly = DirichletPoly::over_primes(&table.primes()[..n], random_coeffs(&mut rng, n)).expect("poly");
        let lo = rng.gen_range(-50.0..50.0);
        let l = Interval::new(lo, lo + rng.gen_range(0.5..2.0)).expect("interval");
        let cert = match certified_sup(&poly, l, 1e-3 * poly.coeff_l1(), DEFAULT_POINT_BUDGET) {
            Ok(c) => c,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let fine_points = (cert.points.max(2) - 1) * 100;
        let fine_max = (0..=fine_points)
            .map(|i| poly.eval(l.lo + l.len() * i as f64 / fine_points as f64).norm())
            .fold(0.0, f64::max);
        let excess = (fine_max - cert.upper).max(cert.lower - fine_max);
        worst_excess = worst_excess.max(excess);
        if !cert.encloses(fine_max, 1e-12) {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("50 polynomials, failures {failures}, worst distance outside enclosure {worst_excess:.3e}"),
    )
}

fn good_shifts() -> Outcome {
    let alpha = 0.75;
    let table = PrimeTable::sieve(10_000).expect("sieve");
    let samples = match chain_samples(&table, &ChainSuite::default()) {
        Ok(s) => s,
        Err(e) => return outcome(false, format!("calibration: {e}")),
    };
    let cq = calibrate_cq(&samples);
    let params = match derive_params(2, 1, alpha, None).and_then(|p| p.with_cq(cq)) {
        Ok(p) => p,
        Err(e) => return outcome(false, e.to_string()),
    };
    let scale = params.u.powf(2.0 * params.big_b.value());
    if scale > 1e6 {
        return outcome(false, format!("U^2B = {scale:e} is above the desk limit"));
    }
    match estimate_theta_set(&params, &table, 200, 11, &ThetaOptions::default()) {
        Ok(Scaled::Computed(est)) => {
            let floor = alpha - 3.0 * est.std_error;
            outcome(
                est.hit_fraction >= floor,
                format!(
                    "nu = 1, U^2B = {scale:.1}, C_q = {cq:.4}, {} primes, hit fraction {:.3} vs floor {floor:.3}",
                    est.primes, est.hit_fraction
                ),
            )
        }
        Ok(Scaled::AnalysisOnly { reason }) => outcome(false, format!("analysis only: {reason}")),
        Err(e) => outcome(false, e.to_string()),
    }
}

/// Disjoint intervals of total length `alpha |J|` placed uniformly in `J`.
fn synthetic_good_set(rng: &mut ChaCha8Rng, j: Interval, alpha: f64, pieces: usize) -> Vec<Interval> {
    let split = |rng: &mut ChaCha8Rng, total: f64, parts: usize| {
        let mut cuts: Vec<f64> = (0..parts - 1).map(|_| rng.gen_range(0.0..total)).collect();
        cuts.push(0.0);
        cuts.push(total);
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2).map(|w| w[1] - w[0]).collect::<Vec<f64>>()
    };
    let good = split(rng, alpha * j.len(), pieces);
    let gaps = split(rng, (1.0 - alpha) * j.len(), pieces + 1);
    let mut at = j.lo;
    let mut out = Vec::with_capacity(pieces);
    for (g, gap) in good.iter().zip(&gaps) {
        at += gap;
        let hi = (at + g).min(j.hi);
        out.push(Interval::new(at.min(hi), hi).expect("ordered"));
        at += g;
    }
    out
}

fn covering() -> Outcome {
    let alpha = 0.75;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut runs, mut worst_slack, mut failures) = (0usize, f64::INFINITY, Vec::new());
    for h in H_MIN..=H_MAX {
        for nu in 1..=4u32 {
            let params = match derive_params(h, nu, alpha, None) {
                Ok(p) => p,
                Err(e) => return outcome(false, format!("H = {h}, nu = {nu}: {e}")),
            };
            if params.b_nu() > 20.0 {
                continue;
            }
            for pieces in [1usize, 4, 32, 256] {
                for _ in 0..5 {
                    let good = synthetic_good_set(&mut rng, params.j, alpha, pieces);
                    let cov = match covering_from_intervals(&params, &good) {
                        Ok(c) => c,
                        Err(e) => return outcome(false, e.to_string()),
                    };
                    runs += 1;
                    let need = params.alpha_bar * cov.total as f64 - 1.0;
                    worst_slack = worst_slack.min(cov.count as f64 - need);
                    if (cov.count as f64) < need {
                        failures.push(format!("H={h} nu={nu} pieces={pieces}: {} < {need:.2}", cov.count));
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{runs} good sets, smallest count - (alpha_bar n - 1) = {worst_slack:.2}, failures {}{}",
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

fn zeta_oracle() -> Outcome {
    let z2 = match zeta(Complex64::new(2.0, 0.0), 1e-13) {
        Ok(z) => z.value,
        Err(e) => return outcome(false, e.to_string()),
    };
    let z2_err = (z2 - std::f64::consts::PI.powi(2) / 6.0).norm();
    let count = match count_zeros(100.0, 0.01) {
        Ok(c) => c,
        Err(e) => return outcome(false, e.to_string()),
    };
    let main = zero_count_main_term(100.0);
    let scan = match Interval::new(10.0, 20.0).and_then(|t| box_zero_scan(0.9, t, 20)) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let ok = z2_err <= 1e-9
        && count.count == 29
        && (count.count as f64 - main).abs() <= 1.0
        && scan.min_abs > 0.0
        && scan.consistent;
    outcome(
        ok,
        format!(
            "|zeta(2) - pi^2/6| = {z2_err:.1e}, zeros up to 100: {} (main term {main:.2}), box min |zeta| = {:.4}",
            count.count, scan.min_abs
        ),
    )
}

fn certify() -> Outcome {
    let cfg = RunConfig {
        command: "certify".into(),
        h: 2,
        nu: 1,
        ..RunConfig::default()
    };
    let report = match cli::run(&cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let missing: Vec<&str> = CheckTag::CONSTRUCTION
        .iter()
        .filter(|t| !report.checks.iter().any(|c| c.tag == **t))
        .map(|t| t.as_str())
        .collect();
    let bugs: Vec<&str> = report.checks.iter().filter(|c| c.is_bug()).map(|c| c.name.as_str()).collect();
    let exit_ok = report.exit_code == EXIT_OK || report.exit_code == EXIT_ANALYSIS_ONLY;
    outcome(
        exit_ok && missing.is_empty() && bugs.is_empty(),
        format!(
            "exit {}, {} checks, missing tags {missing:?}, theorem-backed failures {bugs:?}",
            report.exit_code,
            report.checks.len()
        ),
    )
}
