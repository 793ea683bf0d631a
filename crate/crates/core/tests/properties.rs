use num_complex::Complex64;
use proptest::prelude::*;

use zerofree::dirichlet::{family_sup, DirichletPoly, FamilyGrid};
use zerofree::pipeline::{covering_subdivision, derive_params, psi};
use zerofree::primes::PrimeTable;
use zerofree::spacing::xi_exact;
use zerofree::zeta::box_zero_scan;
use zerofree::Interval;

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn poly_strategy(max_terms: usize) -> impl Strategy<Value = DirichletPoly> {
    prop::collection::vec((-20.0..20.0f64, -1.0..1.0f64, -1.0..1.0f64), 1..=max_terms).prop_map(|terms| {
        let (phases, coeffs) = terms
            .into_iter()
            .map(|(phi, re, im)| (phi, Complex64::new(re, im)))
            .unzip();
        DirichletPoly::new(phases, coeffs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_symmetry(poly in poly_strategy(12), t in -1e3..1e3f64) {
        let a = poly.eval(t);
        let b = poly.reflected().eval(t);
        prop_assert!((a.norm() - b.norm()).abs() <= 1e-12 * (1.0 + poly.coeff_l1()));
        prop_assert!((a.conj() - b).norm() <= 1e-12 * (1.0 + poly.coeff_l1()));
    }

    #[test]
    fn metric_triangle_inequality(
        poly in poly_strategy(12),
        s in -100.0..100.0f64,
        t in -100.0..100.0f64,
        u in -100.0..100.0f64,
    ) {
        let (st, tu, su) = (poly.metric_d(s, t), poly.metric_d(t, u), poly.metric_d(s, u));
        prop_assert!(su <= st + tu + 1e-10);
        prop_assert!((poly.metric_d(t, s) - st).abs() <= 1e-12);
        prop_assert!(poly.metric_d(s, s) == 0.0);
    }

    #[test]
    fn xi_scales_and_ignores_order(
        phases in prop::collection::vec(0.1..10.0f64, 2..=5),
        q in 1u32..=3,
        lambda in 0.1..10.0f64,
        rot in 0usize..5,
    ) {
        let Ok(base) = xi_exact(&phases, q, 100_000) else { return Ok(()) };
        let scaled: Vec<f64> = phases.iter().map(|p| p * lambda).collect();
        let mut permuted = phases.clone();
        permuted.rotate_left(rot % phases.len());
        permuted.reverse();
        if let Ok(s) = xi_exact(&scaled, q, 100_000) {
            prop_assert!((s.xi - lambda * base.xi).abs() <= 1e-9 * (1.0 + lambda * base.xi));
        }
        let p = xi_exact(&permuted, q, 100_000).unwrap();
        prop_assert!((p.xi - base.xi).abs() <= 1e-12 * (1.0 + base.xi));
    }

    #[test]
    fn psi_strictly_increasing(a in 0.0..1e12f64, gap in 1e-6..1e6f64) {
        let b = a + gap;
        prop_assert!(psi(b).unwrap() > psi(a).unwrap());
    }

    #[test]
    fn covering_monotone_in_good_set(
        h in 2u32..=8,
        fractions in prop::collection::vec(0.0..1.0f64, 0..40),
        extra in prop::collection::vec(0.0..1.0f64, 0..40),
    ) {
        let params = derive_params(h, 1, 0.75, None).unwrap();
        let at = |f: &f64| params.j.lo + f * params.j.len();
        let small: Vec<f64> = fractions.iter().map(at).collect();
        let mut big = small.clone();
        big.extend(extra.iter().map(at));
        let a = covering_subdivision(&params, &small).unwrap();
        let b = covering_subdivision(&params, &big).unwrap();
        prop_assert!(b.count >= a.count);
        prop_assert!(a.hit.iter().all(|i| b.hit.contains(i)));
    }

    #[test]
    fn primes_in_matches_trial_division(lo in 2u64..100_000, len in 0u64..3_000) {
        let table = PrimeTable::sieve(100_000).unwrap();
        let hi = (lo + len).min(100_000);
        let want: Vec<u64> = (lo..=hi).filter(|&n| is_prime(n)).collect();
        prop_assert_eq!(table.primes_in(lo as f64, hi as f64).unwrap(), &want[..]);
    }

    #[test]
    fn family_sup_grows_with_range(
        theta in 0.0..1e4f64,
        lo in 0.0..2.0f64,
        len in 0.1..1.0f64,
        more in 0.0..1.0f64,
        delta in 0.1..0.4f64,
        widen in 0.0..0.3f64,
    ) {
        let table = PrimeTable::sieve(2_000).unwrap();
        let grid = FamilyGrid { step: 0.01, budget: 1_000_000 };
        let l = Interval::new(lo, lo + len).unwrap();
        let wide = Interval::new(lo, lo + len + more).unwrap();
        let base = family_sup(&table, theta, 100.0, delta, l, &grid).unwrap();
        let by_l = family_sup(&table, theta, 100.0, delta, wide, &grid).unwrap();
        let by_delta = family_sup(&table, theta, 100.0, delta + widen, l, &grid).unwrap();
        prop_assert!(by_l.lower >= base.lower);
        prop_assert!(by_delta.lower >= base.lower);
    }
}

#[test]
fn prime_count_in_dyadic_range() {
    let table = PrimeTable::sieve(20_000).unwrap();
    for n in 2..=10_000u64 {
        let count = table.prefix_count(2 * n) - table.prefix_count(n);
        assert!((count as f64) < n as f64 / (n as f64).ln(), "N = {n}: {count}");
    }
}

#[test]
fn box_verdict_monotone_in_sigma0() {
    let t = Interval::new(10.0, 30.0).unwrap();
    let mut seen_consistent = false;
    for k in 0..=10 {
        let sigma0 = 0.5 + 0.05 * k as f64;
        let scan = box_zero_scan(sigma0, t, 14).unwrap();
        assert!(!(seen_consistent && !scan.consistent), "flipped at sigma0 = {sigma0}");
        seen_consistent |= scan.consistent;
    }
    assert!(seen_consistent);
}
