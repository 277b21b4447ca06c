use dcsit_core::optimizer::*;
use num_integer::binomial;
use num_rational::Rational64;
use proptest::prelude::*;

fn solve(scheme: Scheme, m: usize, n: usize, users: usize, group: usize) -> dcsit_core::Result<SchemeParams> {
    match scheme {
        Scheme::Ria => solve_p1(m, n, users, group, None),
        Scheme::Tg => solve_p2(m, n, users, group, None),
        Scheme::Psr3 => solve_p3(m, n, None),
    }
}

/// b / (N * slots), times L/K for time-shared RIA, from the raw fields.
fn recomputed_dof(p: &SchemeParams) -> Rational64 {
    let (b, n) = (p.symbols as i64, p.rx_antennas as i64);
    let s: Vec<i64> = p.phase_slots.iter().map(|&x| x as i64).collect();
    match p.scheme {
        Scheme::Ria => Rational64::new(b * p.group as i64, n * (s[0] + s[1]) * p.users as i64),
        Scheme::Tg => {
            let groups = binomial(p.users as i64, p.group as i64);
            Rational64::new(b, n * (p.users as i64 * s[0] + groups * s[1]))
        }
        Scheme::Psr3 => Rational64::new(b, n * (s[0] + 3 * s[1] + s[2])),
    }
}

#[test]
fn oracle_matches_closed_forms_across_regimes() {
    let ria = SearchCaps { max_symbols: 12, max_slots: 14 };
    let tg = SearchCaps { max_symbols: 14, max_slots: 8 };
    let psr = SearchCaps { max_symbols: 14, max_slots: 16 };
    let cases = [
        (Scheme::Ria, 1, 1, 3, 3, ria, Regime::A2),
        (Scheme::Ria, 2, 3, 3, 3, ria, Regime::A2),
        (Scheme::Ria, 1, 2, 4, 4, ria, Regime::A2),
        (Scheme::Ria, 1, 2, 3, 3, ria, Regime::A1),
        (Scheme::Ria, 1, 3, 4, 3, ria, Regime::A1),
        (Scheme::Ria, 2, 5, 4, 3, ria, Regime::A1),
        (Scheme::Tg, 2, 1, 3, 2, tg, Regime::B1),
        (Scheme::Tg, 3, 2, 3, 2, tg, Regime::B1),
        (Scheme::Tg, 4, 1, 3, 2, tg, Regime::B2),
        (Scheme::Tg, 3, 1, 3, 3, tg, Regime::B2),
        (Scheme::Psr3, 1, 1, 3, 3, psr, Regime::C4),
        (Scheme::Psr3, 2, 3, 3, 3, psr, Regime::C1),
    ];
    for (scheme, m, n, k, g, caps, regime) in cases {
        let closed = solve(scheme, m, n, k, g).unwrap();
        assert_eq!(closed.regime, Some(regime), "{scheme} ({m},{n},{k},{g})");
        let oracle = brute_force_params(scheme, m, n, k, g, caps).unwrap();
        assert_eq!(oracle.dof, closed.dof, "{scheme} ({m},{n},{k},{g})");
    }
}

#[test]
fn ria_regime_flips_at_its_threshold() {
    // threshold 3/5 for three users, 4/11 for four
    let below = solve_p1(599, 1000, 3, 3, None).unwrap();
    let above = solve_p1(601, 1000, 3, 3, None).unwrap();
    assert_eq!((below.regime, above.regime), (Some(Regime::A1), Some(Regime::A2)));
    let below = solve_p1(363, 1000, 4, 4, None).unwrap();
    let above = solve_p1(364, 1000, 4, 4, None).unwrap();
    assert_eq!((below.regime, above.regime), (Some(Regime::A1), Some(Regime::A2)));
}

#[test]
fn tg_regime_flips_at_its_threshold() {
    // K = 4, G = 2: each user sits in three pairs, threshold 4
    assert!((tg_threshold(4, 2) - 4.0).abs() < 1e-15);
    let below = solve_p2(399, 100, 4, 2, None).unwrap();
    let above = solve_p2(401, 100, 4, 2, None).unwrap();
    assert_eq!((below.regime, above.regime), (Some(Regime::B1), Some(Regime::B2)));
}

#[test]
fn bound_ordering_on_dense_grids() {
    for users in 3..=7 {
        let lo = 1.0 / (users as f64 - 1.0);
        let hi = 2.0 * users as f64;
        for i in 1..=200 {
            let rho = lo + (hi - lo) * i as f64 / 200.0;
            let inner = inner_bound_kuser(users, rho).unwrap().value;
            let outer = outer_bound(users, rho).unwrap();
            assert!(inner <= outer + 1e-12, "K={users} rho={rho}: {inner} > {outer}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solver_outputs_satisfy_constraints_and_dof(m in 1usize..9, n in 1usize..9, users in 3usize..7, g in 2usize..7, which in 0usize..3) {
        let scheme = [Scheme::Ria, Scheme::Tg, Scheme::Psr3][which];
        let (users, g) = match scheme {
            Scheme::Psr3 => (3, 3),
            Scheme::Ria => (users, g.clamp(3, users)),
            Scheme::Tg => (users, g.min(users)),
        };
        if let Ok(p) = solve(scheme, m, n, users, g) {
            prop_assert!(violations(&p).is_empty(), "{:?}: {:?}", p, violations(&p));
            prop_assert_eq!(p.dof, recomputed_dof(&p));
            prop_assert!(p.phase_slots.iter().all(|&s| s >= 1));
        }
    }

    #[test]
    fn bounded_solutions_stay_within_budget(m in 1usize..6, n in 1usize..6, budget in 1usize..30, which in 0usize..3) {
        let scheme = [Scheme::Ria, Scheme::Tg, Scheme::Psr3][which];
        if let Ok(p) = best_params(scheme, m, n, 3, None, Some(budget)) {
            prop_assert!(p.symbols <= budget);
            prop_assert!(violations(&p).is_empty());
            prop_assert_eq!(p.dof, recomputed_dof(&p));
        }
    }
}
