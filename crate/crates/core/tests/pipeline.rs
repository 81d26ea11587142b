use markoff_core::factor::is_prime;
use markoff_core::oracle;
use markoff_core::{run_prime, Config, Strategy, Verdict};
use proptest::prelude::*;

fn next_prime(mut n: u64) -> u64 {
    while !is_prime(n) {
        n += 1;
    }
    n
}

#[test]
fn oracle_agrees_on_small_primes() {
    for p in [5, 7, 13, 29, 61, 97, 157, 211, 307] {
        let c = oracle::cross_check(p).unwrap();
        assert!(c.passed(), "p = {p}: {:?}", c.failures);
    }
}

#[test]
fn strategies_agree_without_cap() {
    for p in [1009, 2003, 4001] {
        let run = |strategy| {
            run_prime(
                p,
                Config {
                    cap: None,
                    strategy,
                    ..Config::default()
                },
            )
            .unwrap()
        };
        let (a, b) = (run(Strategy::Cosets), run(Strategy::Auto));
        assert_eq!((a.bad_hyperbolic, a.bad_elliptic), (b.bad_hyperbolic, b.bad_elliptic));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn report_is_self_consistent(n in 20_000u64..400_000) {
        let p = next_prime(n);
        let r = run_prime(p, Config::default()).unwrap();
        prop_assert_eq!(r.bad_total, r.bad_hyperbolic + r.bad_elliptic);
        prop_assert_eq!(r.four_p, 4 * p);
        prop_assert_eq!(r.verdict == Verdict::Connected, r.bad_total < r.four_p);
        prop_assert!(r.s_hyperbolic + r.s_elliptic < p);
        prop_assert!(r.max_orbit_checks <= 60);
    }

    #[test]
    fn cap_only_adds_bad_triples(n in 100u64..3000) {
        let p = next_prime(n);
        let capped = run_prime(p, Config { cap: Some(5), ..Config::default() }).unwrap();
        let full = run_prime(p, Config { cap: None, ..Config::default() }).unwrap();
        prop_assert!(full.bad_total <= capped.bad_total);
        prop_assert_eq!(full.capped_orbits, 0);
    }
}
