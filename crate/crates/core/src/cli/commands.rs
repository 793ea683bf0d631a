use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::RunConfig;
use super::report::{Report, Table};
use crate::checks::{Basis, Check, CheckTag};
use crate::dirichlet::{certified_sup, family_sup, DirichletPoly, FamilyGrid, DEFAULT_POINT_BUDGET};
use crate::error::{Error, Result};
use crate::inequalities::{
    calibrate_cq, chain_samples, cor22_check, hilbert_suite, min_panels, moment_increment,
    moment_plain, ChainSample, ChainSuite, MomentEstimate,
};
use crate::interval::Interval;
use crate::pipeline::{
    covering_subdivision, derive_params, estimate_theta_set, m_bound, range_nesting,
    theta_feasibility, turan_scan, window_contained, Covering, ParameterSet, Scaled, ThetaOptions,
    ThetaSetEstimate, TuranOptions,
};
use crate::primes::PrimeTable;
use crate::spacing::{xi_exact, xi_prime_lower_bound, PrimeRatio};
use crate::zeta::{box_zero_scan, count_zeros, zeta, BOX_SIGMA_MAX, DESK_T_CAP};

/// Run the configured subcommand and assemble its report.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    let mut rep = Report::new(cfg.clone());
    match cfg.command.as_str() {
        "params" => {
            params_stage(cfg, &mut rep, cfg.cq.unwrap_or(crate::pipeline::DEFAULT_CQ))?;
        }
        "sup" => sup(cfg, &mut rep)?,
        "spacing" => spacing(cfg, &mut rep)?,
        "moments" => moments(cfg, &mut rep)?,
        "hilbert" => hilbert(cfg, &mut rep)?,
        "chain" => {
            chain(cfg, &mut rep)?;
        }
        "theta" => {
            let p = pipeline_params(cfg, &mut rep)?;
            theta_stage(cfg, &mut rep, &p)?;
        }
        "scan" => {
            let p = pipeline_params(cfg, &mut rep)?;
            let theta = cfg.scan_theta.unwrap_or(0.5 * (p.j.lo + p.j.hi));
            scan_stage(cfg, &mut rep, &p, theta)?;
        }
        "cover" => {
            let p = pipeline_params(cfg, &mut rep)?;
            let est = theta_stage(cfg, &mut rep, &p)?;
            cover_stage(&mut rep, &p, est.as_ref())?;
        }
        "zeta" => zeta_cmd(cfg, &mut rep)?,
        "certify" => certify(cfg, &mut rep)?,
        other => return Err(Error::invalid(format!("unknown command `{other}`"))),
    }
    rep.finish();
    Ok(rep)
}

fn table_up_to(limit: f64, cfg: &RunConfig) -> Result<PrimeTable> {
    let limit = limit.max(1000.0).min(cfg.cap).ceil() as u64;
    PrimeTable::with_env_cache(limit.max(2))
}

fn random_coeffs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::from_polar(rng.gen_range(0.1..1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect()
}

fn pipeline_params(cfg: &RunConfig, rep: &mut Report) -> Result<ParameterSet> {
    let cq = match cfg.cq {
        Some(c) => c,
        None => chain(cfg, rep)?,
    };
    params_stage(cfg, rep, cq)
}

fn params_stage(cfg: &RunConfig, rep: &mut Report, cq: f64) -> Result<ParameterSet> {
    let p = derive_params(cfg.h, cfg.nu, cfg.alpha, cfg.delta0)?
        .with_cq(cq)?
        .with_alpha_star(cfg.alpha_star)?;
    rep.extend(p.checks.iter().cloned());
    let inside = (0..=20).all(|k| window_contained(&p, p.j.lo + p.j.len() * k as f64 / 20.0));
    let basis = if p.nu >= 4 { Basis::Theorem } else { Basis::Empirical };
    rep.check(Check::new(
        CheckTag::MainParameters,
        "[T - sqrt T, T + sqrt T] inside theta + L",
        basis,
        inside,
        "21 shifts across J",
    ));
    let t = p.j.lo + 3.0 * p.j.lo.sqrt();
    let nest = range_nesting(&p, t);
    rep.check(Check::info(
        CheckTag::MainParameters,
        "prime range nesting",
        format!(
            "nu = {}, nu_delta = {}, upper slack = {:.4e}, nests = {}",
            p.nu,
            p.nu_delta,
            nest.upper_slack,
            nest.nests()
        ),
    ));
    rep.put("params", &p)?;
    rep.put("m_bound", &m_bound(&p, cq))?;
    rep.put("threshold", &p.threshold())?;
    rep.put("range_nesting", &nest)?;
    Ok(p)
}

fn sup(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let top = cfg.family_u.powf(1.0 + cfg.family_delta);
    let table = table_up_to(top.max(1000.0), cfg)?;
    if cfg.sup_terms == 0 || cfg.sup_terms > table.len() {
        return Err(Error::invalid("sup_terms must be between 1 and the table size"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let poly = DirichletPoly::over_primes(&table.primes()[..cfg.sup_terms], random_coeffs(&mut rng, cfg.sup_terms))?;
    let l = Interval::new(cfg.sup_lo, cfg.sup_hi)?;
    let cert = match certified_sup(&poly, l, cfg.sup_eps, DEFAULT_POINT_BUDGET) {
        Ok(c) => c,
        Err(Error::SupBudgetExceeded(c)) => {
            rep.check(Check::info(
                CheckTag::ChainingBound,
                "certificate gap",
                format!("budget reached; achieved gap {:.3e}", c.gap()),
            ));
            *c
        }
        Err(e) => return Err(e),
    };
    let fine = 1_000_000usize;
    let fine_max = (0..=fine)
        .map(|i| poly.eval(l.lo + l.len() * i as f64 / fine as f64).norm())
        .fold(0.0, f64::max);
    rep.check(Check::new(
        CheckTag::ChainingBound,
        "certified supremum encloses a fine-grid maximum",
        Basis::Theorem,
        fine_max <= cert.upper + 1e-12,
        format!("fine max {fine_max:.12} <= upper {:.12}", cert.upper),
    ));
    rep.put("certificate", &cert)?;

    if top <= table.limit() as f64 {
        let k = table.primes_in(cfg.family_u, top)?.len();
        let lip = k as f64 * top.ln();
        let step = if lip > 0.0 { cfg.family_eps / lip } else { l.len().max(1.0) };
        let grid = FamilyGrid {
            step,
            budget: DEFAULT_POINT_BUDGET,
        };
        let fam = family_sup(&table, cfg.family_theta, cfg.family_u, cfg.family_delta, l, &grid)?;
        rep.put("family_sup", &fam)?;
    } else {
        rep.check(Check::analysis_only(
            CheckTag::MainParameters,
            "family supremum",
            format!("U^(1+delta) = {top:.3e} exceeds the cap"),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct SpacingRow {
    n: usize,
    q: u32,
    xi: f64,
    bound: f64,
    oracle_gap: f64,
}

fn spacing_rows(cfg: &RunConfig, rep: &mut Report) -> Result<Vec<SpacingRow>> {
    let table = PrimeTable::sieve(1000)?;
    let mut rows = Vec::new();
    for n in 1..=cfg.spacing_n {
        let phases = table.log_phases(2.0, table.nth(n).expect("n within table") as f64)?;
        for q in 1..=cfg.spacing_q {
            let s = xi_exact(&phases, q, cfg.eq_budget as u128)?;
            let bound = xi_prime_lower_bound(&table, n, q)?;
            let oracle_gap = match &s.argmin {
                Some((h, k)) => {
                    let r = PrimeRatio::new(&table.primes()[..n], h, k);
                    (r.log_ratio().abs() - s.xi).abs()
                }
                None => 0.0,
            };
            rows.push(SpacingRow {
                n,
                q,
                xi: s.xi,
                bound,
                oracle_gap,
            });
        }
    }
    let below = rows.iter().filter(|r| !(r.xi >= r.bound)).count();
    let worst_oracle = rows.iter().map(|r| r.oracle_gap).fold(0.0, f64::max);
    rep.check(Check::new(
        CheckTag::SpacingLowerBound,
        "xi >= p_N^(-q) for prime phases",
        Basis::Theorem,
        below == 0,
        format!("{} instances, {below} below the bound", rows.len()),
    ));
    rep.check(Check::new(
        CheckTag::SpacingLowerBound,
        "big-integer P+/P- oracle matches the linear form",
        Basis::Theorem,
        worst_oracle <= 1e-9,
        format!("largest discrepancy {worst_oracle:.3e}"),
    ));
    Ok(rows)
}

fn spacing(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let rows = spacing_rows(cfg, rep)?;
    let mut t = Table::new(&["n", "q", "xi", "bound", "oracle_gap"]);
    for r in &rows {
        t.push(vec![r.n.to_string(), r.q.to_string(), r.xi.to_string(), r.bound.to_string(), r.oracle_gap.to_string()]);
    }
    rep.put("spacing", &rows)?;
    rep.table = Some(t);
    Ok(())
}

#[derive(Serialize)]
struct MomentRow {
    kind: &'static str,
    n: usize,
    q: u32,
    length: f64,
    estimate: MomentEstimate,
    /// `|I_{2n} - I_n|`
    refined_change: f64,
}

fn moment_rows(cfg: &RunConfig) -> Result<Vec<MomentRow>> {
    let table = PrimeTable::sieve(1000)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let over = cfg.moment_oversample.max(1);
    let budget = cfg.eq_budget as u128;
    let mut rows = Vec::new();
    for n in 1..=cfg.moment_n {
        let primes = &table.primes()[..n];
        let phi = (primes[n - 1] as f64).ln();
        for q in 1..=cfg.moment_q {
            for _ in 0..cfg.moment_draws {
                let coeffs = random_coeffs(&mut rng, n);
                let poly = DirichletPoly::over_primes(primes, coeffs.clone())?;
                for &len in &cfg.moment_j_lens {
                    let d = rng.gen_range(0.0..1000.0);
                    let j = Interval::new(d, d + len)?;
                    let (s, t) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
                    let panels = min_panels(len, q, phi) * over;
                    let inc = moment_increment(&poly, j, q, s, t, panels, budget)?;
                    let inc2 = moment_increment(&poly, j, q, s, t, 2 * panels, budget)?;
                    rows.push(MomentRow {
                        kind: "increment",
                        n,
                        q,
                        length: len,
                        refined_change: (inc2.value - inc.value).abs(),
                        estimate: inc,
                    });
                    let pl = moment_plain(&poly, j, q, panels, budget)?;
                    let pl2 = moment_plain(&poly, j, q, 2 * panels, budget)?;
                    rows.push(MomentRow {
                        kind: "plain",
                        n,
                        q,
                        length: len,
                        refined_change: (pl2.value - pl.value).abs(),
                        estimate: pl,
                    });
                }
                let unit: Vec<Complex64> = coeffs.iter().map(|c| c / c.norm()).collect();
                for &t in &cfg.moment_t_values {
                    let panels = min_panels(2.0 * t, q, phi) * over;
                    let m = cor22_check(&table, &unit, primes[n - 1] as f64, t, q, panels)?;
                    let m2 = cor22_check(&table, &unit, primes[n - 1] as f64, t, q, 2 * panels)?;
                    rows.push(MomentRow {
                        kind: "corollary",
                        n,
                        q,
                        length: 2.0 * t,
                        refined_change: (m2.value - m.value).abs(),
                        estimate: m,
                    });
                }
            }
        }
    }
    Ok(rows)
}

fn moment_checks(rows: &[MomentRow], rep: &mut Report) {
    for (kind, tag, name) in [
        ("increment", CheckTag::MomentBounds, "increment moment <= bound + quad_error"),
        ("plain", CheckTag::MomentBounds, "plain moment <= bound + quad_error"),
        ("corollary", CheckTag::MomentCorollary, "prime mean value <= q!(1 + 2 pi N^q/T)(sum |c|^2)^q"),
    ] {
        let sel: Vec<&MomentRow> = rows.iter().filter(|r| r.kind == kind).collect();
        let fails = sel.iter().filter(|r| !r.estimate.holds()).count();
        let worst = sel
            .iter()
            .map(|r| r.estimate.value / r.estimate.bound)
            .filter(|x| x.is_finite())
            .fold(0.0, f64::max);
        rep.check(Check::new(
            tag,
            name,
            Basis::Theorem,
            fails == 0,
            format!("{} instances, {fails} failures, largest value/bound {worst:.4}", sel.len()),
        ));
    }
    let unstable = rows
        .iter()
        .filter(|r| !(r.refined_change < r.estimate.quad_error || r.refined_change == 0.0))
        .count();
    rep.check(Check::new(
        CheckTag::MomentBounds,
        "halving the panel width moves values by less than quad_error",
        Basis::Empirical,
        unstable == 0,
        format!("{} quadratures, {unstable} outside their error estimate", rows.len()),
    ));
}

fn moments(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let rows = moment_rows(cfg)?;
    moment_checks(&rows, rep);
    let mut t = Table::new(&["kind", "n", "q", "length", "value", "bound", "quad_error", "xi", "panels"]);
    for r in &rows {
        t.push(vec![
            r.kind.to_string(),
            r.n.to_string(),
            r.q.to_string(),
            r.length.to_string(),
            r.estimate.value.to_string(),
            r.estimate.bound.to_string(),
            r.estimate.quad_error.to_string(),
            r.estimate.xi.value.to_string(),
            r.estimate.panels.to_string(),
        ]);
    }
    rep.put("moments", &rows)?;
    rep.table = Some(t);
    Ok(())
}

fn hilbert(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let suite = hilbert_suite(cfg.hilbert_trials, cfg.seed, cfg.hilbert_max_n, cfg.hilbert_min_gap)?;
    rep.check(Check::new(
        CheckTag::HilbertInequality,
        "|sum x_m y_n/(l_m - l_n)| <= (pi/delta)|x||y|",
        Basis::Theorem,
        suite.passes == suite.trials,
        format!(
            "pass fraction {} over {} trials, largest ratio {:.4}",
            suite.pass_fraction(),
            suite.trials,
            suite.worst_ratio
        ),
    ));
    rep.put("hilbert", &suite)?;
    rep.put("pass_fraction", &suite.pass_fraction())?;
    Ok(())
}

/// Calibrate `C_q` on a seeded suite and validate it on a fresh one.
/// Returns the constant in use (the configured one if given).
fn chain(cfg: &RunConfig, rep: &mut Report) -> Result<f64> {
    let table = PrimeTable::sieve(1000)?;
    let suite = ChainSuite {
        polys: cfg.chain_polys,
        max_terms: cfg.chain_max_terms,
        max_q: cfg.chain_max_q,
        theta_samples: cfg.chain_theta_samples,
        eps_rel: cfg.chain_eps_rel,
        seed: cfg.chain_calibration_seed,
    };
    let calibration = chain_samples(&table, &suite)?;
    let calibrated = calibrate_cq(&calibration);
    let cq = cfg.cq.unwrap_or(calibrated);
    let validation_seed = cfg.seed.wrapping_add(0x5eed_0000);
    let validation = chain_samples(&table, &ChainSuite { seed: validation_seed, ..suite })?;
    let worst = calibrate_cq(&validation);
    rep.check(Check::new(
        CheckTag::ChainingBound,
        "chaining bound with calibrated C_q on a validation suite",
        Basis::Empirical,
        worst <= cq,
        format!("C_q = {cq:.6}, largest validation ratio {worst:.6} over {} polys", validation.len()),
    ));
    #[derive(Serialize)]
    struct ChainResult<'a> {
        calibrated_cq: f64,
        cq_in_use: f64,
        calibration_seed: u64,
        validation_seed: u64,
        validation_max_ratio: f64,
        calibration: &'a [ChainSample],
    }
    rep.put(
        "chain",
        &ChainResult {
            calibrated_cq: calibrated,
            cq_in_use: cq,
            calibration_seed: suite.seed,
            validation_seed,
            validation_max_ratio: worst,
            calibration: &calibration,
        },
    )?;
    let mut t = Table::new(&["suite", "terms", "q", "j_len", "l_len", "lhs", "rhs_unit", "ratio"]);
    for (name, set) in [("calibration", &calibration), ("validation", &validation)] {
        for s in set.iter() {
            t.push(vec![
                name.to_string(),
                s.terms.to_string(),
                s.q.to_string(),
                s.j.len().to_string(),
                s.l.len().to_string(),
                s.lhs.to_string(),
                s.rhs_unit.to_string(),
                s.ratio().to_string(),
            ]);
        }
    }
    rep.table = Some(t);
    Ok(cq)
}

fn theta_stage(cfg: &RunConfig, rep: &mut Report, p: &ParameterSet) -> Result<Option<ThetaSetEstimate>> {
    let top = p.u.powf(1.0 + p.delta.value());
    let table = table_up_to(top, cfg)?;
    let opts = ThetaOptions {
        eps: cfg.family_eps,
        cap: cfg.cap,
        ..ThetaOptions::default()
    };
    match estimate_theta_set(p, &table, cfg.theta_samples, cfg.seed, &opts)? {
        Scaled::Computed(est) => {
            let floor = est.predicted_lower - 3.0 * est.std_error;
            rep.check(Check::new(
                CheckTag::MainParameters,
                "good-shift proportion >= alpha - 3 standard errors",
                Basis::Empirical,
                est.hit_fraction >= floor,
                format!(
                    "hit fraction {:.4} vs {floor:.4} (alpha {}, threshold {:.4}, {} primes in range)",
                    est.hit_fraction, est.predicted_lower, est.threshold, est.primes
                ),
            ));
            let mut t = Table::new(&["theta", "sup_lower", "sup_upper", "good"]);
            for i in 0..est.samples {
                t.push(vec![
                    est.thetas[i].to_string(),
                    est.sup_lower[i].to_string(),
                    est.sup_upper[i].to_string(),
                    (est.sup_upper[i] <= est.threshold).to_string(),
                ]);
            }
            rep.table = Some(t);
            rep.put("theta", &est)?;
            Ok(Some(est))
        }
        Scaled::AnalysisOnly { reason } => {
            rep.check(Check::analysis_only(CheckTag::MainParameters, "good-shift proportion", reason.clone()));
            rep.put("theta", &Scaled::<()>::AnalysisOnly { reason })?;
            Ok(None)
        }
    }
}

fn cover_stage(rep: &mut Report, p: &ParameterSet, est: Option<&ThetaSetEstimate>) -> Result<Option<Covering>> {
    let Some(est) = est else {
        rep.check(Check::analysis_only(
            CheckTag::CoveringCount,
            "covered subdivision pieces",
            "no good-shift sample at this scale",
        ));
        return Ok(None);
    };
    let cover = covering_subdivision(p, &est.good_thetas)?;
    rep.check(Check::new(
        CheckTag::CoveringCount,
        "covered pieces >= alpha_bar (2^(B nu + 1) + 6(sqrt 2 - 1))",
        Basis::Empirical,
        cover.meets_alpha_bar,
        format!(
            "{} of {} pieces from {} good samples, target {:.3}",
            cover.count,
            cover.total,
            est.good_thetas.len(),
            cover.alpha_bar_target
        ),
    ));
    rep.check(Check::info(
        CheckTag::CoveringCount,
        "covered pieces against alpha* 2^(B nu + 1)",
        format!(
            "{} vs {:.3} (alpha* = {}), met = {}",
            cover.count, cover.alpha_star_target, p.alpha_star, cover.meets_alpha_star
        ),
    ));
    rep.put("cover", &cover)?;
    Ok(Some(cover))
}

fn scan_stage(cfg: &RunConfig, rep: &mut Report, p: &ParameterSet, theta: f64) -> Result<()> {
    let t = theta + 3.0 * theta.sqrt();
    let n_hi = (t + t.sqrt()).powf(p.d * (1.0 + p.delta0));
    let table = table_up_to(n_hi, cfg)?;
    let opts = TuranOptions {
        tau_grid: cfg.tau_grid,
        mode: cfg.exponent_mode,
        cap: cfg.cap,
    };
    match turan_scan(p, &table, theta, &opts)? {
        Scaled::Computed(r) => {
            let vacuous = if r.admissible_runs == 0 { " (no admissible run at this scale)" } else { "" };
            rep.check(Check::new(
                CheckTag::TuranCriterion,
                "prime sums below the window bound",
                Basis::Empirical,
                r.pass_fraction == 1.0,
                format!(
                    "pass fraction {} over {} evaluations{vacuous}; min margins local {:.4e}, turan {:.4e}",
                    r.pass_fraction, r.evaluations, r.min_margin_local, r.min_margin_turan
                ),
            ));
            rep.put("scan", &r)?;
        }
        Scaled::AnalysisOnly { reason } => {
            rep.check(Check::analysis_only(CheckTag::TuranCriterion, "prime sums below the window bound", reason.clone()));
            rep.put("scan", &Scaled::<()>::AnalysisOnly { reason })?;
        }
    }
    Ok(())
}

fn box_stage(cfg: &RunConfig, rep: &mut Report, p: &ParameterSet, cover: Option<&Covering>) -> Result<()> {
    let Some(cover) = cover else {
        rep.check(Check::analysis_only(CheckTag::ZetaOracle, "zeta box scan", "no covered pieces"));
        return Ok(());
    };
    let sigma0 = p.sigma0.clamp(0.5, BOX_SIGMA_MAX - 1e-9);
    let mut scans = Vec::new();
    for &i in cover.hit.iter().take(cfg.certify_boxes) {
        let piece = cover.piece(i)?;
        if piece.hi > DESK_T_CAP || piece.hi > cfg.cap {
            rep.check(Check::analysis_only(
                CheckTag::ZetaOracle,
                "zeta box scan",
                format!("K_{i} = {piece} is above the oracle cap"),
            ));
            continue;
        }
        let s = box_zero_scan(sigma0, piece, cfg.box_grid)?;
        rep.check(Check::new(
            CheckTag::ZetaOracle,
            format!("no zero in [sigma0, 1.2] x K_{i}"),
            Basis::Heuristic,
            s.consistent,
            format!("{piece}: min |zeta| {:.4e}, clearance {:.4e}; {}", s.min_abs, s.min_clearance, s.verdict),
        ));
        scans.push((i, s));
    }
    let summaries: Vec<_> = scans
        .iter()
        .map(|(i, s)| {
            serde_json::json!({
                "piece": i,
                "t_interval": s.t_interval,
                "sigma0": s.sigma0,
                "min_abs": s.min_abs,
                "min_clearance": s.min_clearance,
                "critical_line_zeros": s.critical_line_zeros,
                "verdict": s.verdict,
            })
        })
        .collect();
    rep.put("boxes", &summaries)?;
    Ok(())
}

fn zeta_cmd(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let z2 = zeta(Complex64::new(2.0, 0.0), 1e-13)?;
    let target = std::f64::consts::PI.powi(2) / 6.0;
    rep.check(Check::new(
        CheckTag::ZetaOracle,
        "zeta(2) = pi^2/6",
        Basis::Empirical,
        (z2.value - target).norm() <= 1e-9,
        format!("error {:.3e}", (z2.value - target).norm()),
    ));
    let count = count_zeros(cfg.zeta_t, cfg.zeta_step)?;
    rep.check(Check::new(
        CheckTag::ZetaOracle,
        "sign-change count within 1 of the main term",
        Basis::Heuristic,
        !count.flagged,
        format!(
            "{} sign changes up to {}, main term {:.3}{}",
            count.count,
            count.t,
            count.main_term,
            count.resolution_warning.as_deref().map(|w| format!("; {w}")).unwrap_or_default()
        ),
    ));
    let iv = Interval::new(cfg.box_t_lo, cfg.box_t_hi)?;
    let scan = box_zero_scan(cfg.box_sigma0, iv, cfg.box_grid)?;
    rep.check(Check::new(
        CheckTag::ZetaOracle,
        "box scan",
        Basis::Heuristic,
        scan.consistent,
        format!("min |zeta| {:.4e} on [{}, 1.2] x {iv}; {}", scan.min_abs, cfg.box_sigma0, scan.verdict),
    ));
    let mut t = Table::new(&["sigma", "t", "re", "im", "abs", "err"]);
    for s in &scan.samples {
        t.push(vec![
            s.s.re.to_string(),
            s.s.im.to_string(),
            s.value.re.to_string(),
            s.value.im.to_string(),
            s.value.norm().to_string(),
            s.err.to_string(),
        ]);
    }
    rep.table = Some(t);
    rep.put("zeta2", &z2)?;
    rep.put("zero_count", &count)?;
    rep.put("box", &scan)?;
    Ok(())
}

fn certify(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let side = cfg.certify_side_checks();
    hilbert(&side, rep)?;
    let spacing = spacing_rows(&side, rep)?;
    rep.put("spacing", &spacing)?;
    let rows = moment_rows(&side)?;
    moment_checks(&rows, rep);

    let cq = match cfg.cq {
        Some(c) => c,
        None => chain(&side, rep)?,
    };
    let p = params_stage(cfg, rep, cq)?;
    let feasible = {
        let top = p.u.powf(1.0 + p.delta.value());
        let table = table_up_to(top, cfg)?;
        theta_feasibility(&p, &table, cfg.cap).is_none()
    };
    let est = if feasible { theta_stage(cfg, rep, &p)? } else {
        let reason = format!("nu = {} is beyond the feasibility cap {:.1e}", p.nu, cfg.cap);
        rep.check(Check::analysis_only(CheckTag::MainParameters, "good-shift proportion", reason.clone()));
        rep.put("theta", &Scaled::<()>::AnalysisOnly { reason })?;
        None
    };
    let cover = cover_stage(rep, &p, est.as_ref())?;
    match est.as_ref().and_then(|e| e.good_thetas.first().copied()) {
        Some(theta) => scan_stage(cfg, rep, &p, theta)?,
        None => rep.check(Check::analysis_only(
            CheckTag::TuranCriterion,
            "prime sums below the window bound",
            "no good shift available at this scale",
        )),
    }
    box_stage(cfg, rep, &p, cover.as_ref())?;
    rep.table = None;
    Ok(())
}
