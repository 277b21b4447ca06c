//! Solvers for the three parameter programs. Without a symbol budget they
//! return the closed-form table point; with a budget `B` they enumerate every
//! `b <= B` and pick the slot counts that are exactly minimal for that `b`.

use num_integer::binomial;

use super::bounds::{psr_regime, select_ria_group, select_tg_group, tg_memberships};
use super::{violations, Regime, Scheme, SchemeParams};
use crate::error::{Error, Result};

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Preferred point: larger DoF, then shorter frame, then fewer symbols.
pub fn better(candidate: &SchemeParams, incumbent: &SchemeParams) -> bool {
    (candidate.dof, std::cmp::Reverse(candidate.tau()), std::cmp::Reverse(candidate.symbols))
        > (incumbent.dof, std::cmp::Reverse(incumbent.tau()), std::cmp::Reverse(incumbent.symbols))
}

fn keep_best(best: &mut Option<SchemeParams>, candidate: SchemeParams) {
    if best.as_ref().is_none_or(|b| better(&candidate, b)) {
        *best = Some(candidate);
    }
}

fn verified(p: SchemeParams) -> Result<SchemeParams> {
    let bad = violations(&p);
    if bad.is_empty() {
        Ok(p)
    } else {
        Err(Error::Infeasible(bad.join("; ")))
    }
}

fn check_antennas(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("antenna counts must be positive".into()));
    }
    Ok(())
}

fn check_budget(bound: Option<usize>) -> Result<()> {
    if bound == Some(0) {
        return Err(Error::Domain("symbol budget must be positive".into()));
    }
    Ok(())
}

fn ria_regime(m: usize, n: usize, group: usize) -> Regime {
    if m * (group * group - group - 1) <= n * group {
        Regime::A1
    } else {
        Regime::A2
    }
}

/// Minimal slot counts for RIA over `group` users carrying `b` symbols each.
pub fn ria_slots(m: usize, n: usize, group: usize, b: usize) -> (usize, usize) {
    let l = group;
    let s1 = ceil_div(b, m).max(ceil_div(b * (l * l - l - 1), n * l)).max((l - 2) * b / n + 1);
    let s2 = ceil_div(b, n).max(ceil_div(b, l * m));
    (s1, s2)
}

/// RIA parameters. Needs `3 <= group <= users`, `M <= N` and `group * M >= N`.
pub fn solve_p1(m: usize, n: usize, users: usize, group: usize, bound: Option<usize>) -> Result<SchemeParams> {
    check_antennas(m, n)?;
    check_budget(bound)?;
    if !(3..=users).contains(&group) {
        return Err(Error::Domain(format!("RIA group {group} not in 3..={users}")));
    }
    if m > n || group * m < n {
        return Err(Error::Domain(format!("RIA over {group} users needs 1/{group} <= M/N <= 1, got {m}/{n}")));
    }
    let regime = ria_regime(m, n, group);
    match bound {
        None => {
            let (b, s1, s2) = match regime {
                Regime::A1 => (m * n, n, m),
                _ => (group * n, group * group - group - 1, group),
            };
            verified(SchemeParams::new(Scheme::Ria, users, m, n, group, b, vec![s1, s2])?.with_regime(regime))
        }
        Some(limit) => {
            let mut best = None;
            for b in 1..=limit {
                let (s1, s2) = ria_slots(m, n, group, b);
                keep_best(&mut best, verified(SchemeParams::new(Scheme::Ria, users, m, n, group, b, vec![s1, s2])?.with_regime(regime))?);
            }
            best.ok_or_else(|| Error::Infeasible("no RIA point within the budget".into()))
        }
    }
}

fn tg_regime(m: usize, n: usize, users: usize, group: usize) -> Regime {
    let a = tg_memberships(users, group) as usize;
    if m * (1 + a * (group - 2)) <= n * (1 + a * (group - 1)) {
        Regime::B1
    } else {
        Regime::B2
    }
}

/// Slot counts of minimal frame length for TG carrying `b` symbols per user.
pub fn tg_slots(m: usize, n: usize, users: usize, group: usize, b: usize) -> Option<(usize, usize)> {
    let share = tg_memberships(users, group) as usize;
    let rounds = binomial(users, group);
    let mut best: Option<(usize, usize, usize)> = None;
    let mut s1 = ceil_div(b, m).max(1);
    while n * s1 < b {
        let s2 = ceil_div(b - n * s1, n * share).max(1);
        let room = ((group - 1) * n * s1) as i64 - ((group - 2) * b) as i64;
        if (n * s2) as i64 <= room {
            let tau = users * s1 + rounds * s2;
            if best.is_none_or(|(t, _, _)| tau < t) {
                best = Some((tau, s1, s2));
            }
        }
        s1 += 1;
    }
    best.map(|(_, s1, s2)| (s1, s2))
}

/// TG parameters. Needs `M > N` and `2 <= group <= users`.
pub fn solve_p2(m: usize, n: usize, users: usize, group: usize, bound: Option<usize>) -> Result<SchemeParams> {
    check_antennas(m, n)?;
    check_budget(bound)?;
    if !(2..=users).contains(&group) || users < 3 {
        return Err(Error::Domain(format!("TG group {group} not in 2..={users}")));
    }
    if m <= n {
        return Err(Error::Domain(format!("TG needs M > N, got {m}/{n}")));
    }
    let regime = tg_regime(m, n, users, group);
    match bound {
        None => {
            let a = tg_memberships(users, group) as usize;
            let (b, s1, s2) = match regime {
                Regime::B1 => (a * m * n, a * n, m - n),
                _ => ((1 + a * (group - 1)) * n, 1 + a * (group - 2), 1),
            };
            verified(SchemeParams::new(Scheme::Tg, users, m, n, group, b, vec![s1, s2])?.with_regime(regime))
        }
        Some(limit) => {
            let mut best = None;
            for b in 1..=limit {
                if let Some((s1, s2)) = tg_slots(m, n, users, group, b) {
                    keep_best(&mut best, verified(SchemeParams::new(Scheme::Tg, users, m, n, group, b, vec![s1, s2])?.with_regime(regime))?);
                }
            }
            best.ok_or_else(|| Error::Infeasible("no TG point within the budget".into()))
        }
    }
}

/// Slot counts of minimal frame length for the three-user scheme with `b`
/// symbols per user, by bounded enumeration of the overheard dimensions.
pub fn psr_slots(m: usize, n: usize, b: usize) -> Option<(usize, usize, usize)> {
    let mut best: Option<(usize, usize, usize, usize)> = None;
    let start = ceil_div(b, m).max(ceil_div(5 * b, 4 * n)).max(b / n + 1);
    for s1 in start..=start + 4 * b + 8 {
        if best.is_some_and(|(t, ..)| s1 + 4 >= t) {
            break;
        }
        let f1 = n * s1 - b;
        let mut s2 = ceil_div(f1, m).max(f1 / n + 1);
        while n * s2 <= 2 * f1 {
            if best.is_some_and(|(t, ..)| s1 + 3 * s2 + 1 >= t) {
                break;
            }
            let f2 = n * s2 - f1;
            let mut s3 = ceil_div(2 * f2, m).max(2 * f2 / n + 1);
            while n * s3 <= 4 * f2 {
                let f3 = n * s3 - 2 * f2;
                if 2 * (f1 + f2 + f3) >= b {
                    let tau = s1 + 3 * s2 + s3;
                    if best.is_none_or(|(t, ..)| tau < t) {
                        best = Some((tau, s1, s2, s3));
                    }
                    break;
                }
                s3 += 1;
            }
            s2 += 1;
        }
    }
    best.map(|(_, s1, s2, s3)| (s1, s2, s3))
}

/// Three-user scheme parameters. Needs `2M > N`.
pub fn solve_p3(m: usize, n: usize, bound: Option<usize>) -> Result<SchemeParams> {
    check_antennas(m, n)?;
    check_budget(bound)?;
    if 2 * m <= n {
        return Err(Error::Domain(format!("three-user scheme needs M/N > 1/2, got {m}/{n}")));
    }
    let regime = if 5 * m >= 4 * n { Regime::C4 } else { psr_regime(m as f64 / n as f64) };
    match bound {
        None => {
            let slots = match regime {
                Regime::C1 => vec![m * m, m * (n - m), 2 * (n - m) * (n - m)],
                Regime::C2 => vec![2 * m * n, 2 * n * (n - m), 5 * m * m + 2 * n * n - 6 * m * n],
                Regime::C3 => vec![6 * n, 4 * n - 3 * m, 4 * (3 * m - 2 * n)],
                _ => vec![15, 4, 4],
            };
            let b = match regime {
                Regime::C1 => m * m * m,
                Regime::C2 => 2 * m * m * n,
                Regime::C3 => 6 * m * n,
                _ => 12 * n,
            };
            verified(SchemeParams::new(Scheme::Psr3, 3, m, n, 3, b, slots)?.with_regime(regime))
        }
        Some(limit) => {
            let mut best = None;
            for b in 1..=limit {
                if let Some((s1, s2, s3)) = psr_slots(m, n, b) {
                    keep_best(&mut best, verified(SchemeParams::new(Scheme::Psr3, 3, m, n, 3, b, vec![s1, s2, s3])?.with_regime(regime))?);
                }
            }
            best.ok_or_else(|| Error::Infeasible("no three-user point within the budget".into()))
        }
    }
}

/// Best point of a scheme. A fixed `group` is honored; otherwise the closed
/// form picks it when unbounded and every valid group is tried when bounded.
pub fn best_params(scheme: Scheme, m: usize, n: usize, users: usize, group: Option<usize>, bound: Option<usize>) -> Result<SchemeParams> {
    check_antennas(m, n)?;
    let rho = m as f64 / n as f64;
    match scheme {
        Scheme::Psr3 => {
            if users != 3 || group.is_some_and(|g| g != 3) {
                return Err(Error::Domain("the three-user scheme needs K = 3".into()));
            }
            solve_p3(m, n, bound)
        }
        Scheme::Ria => match (group, bound) {
            (Some(l), _) => solve_p1(m, n, users, l, bound),
            (None, None) => solve_p1(m, n, users, select_ria_group(users, rho)?, None),
            (None, Some(_)) => pick((3..=users).map(|l| solve_p1(m, n, users, l, bound))),
        },
        Scheme::Tg => match (group, bound) {
            (Some(g), _) => solve_p2(m, n, users, g, bound),
            (None, None) => solve_p2(m, n, users, select_tg_group(users, rho)?, None),
            (None, Some(_)) => pick((2..=users).map(|g| solve_p2(m, n, users, g, bound))),
        },
    }
}

fn pick(candidates: impl Iterator<Item = Result<SchemeParams>>) -> Result<SchemeParams> {
    let mut best = None;
    let mut last_err = None;
    for c in candidates {
        match c {
            Ok(p) => keep_best(&mut best, p),
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::Infeasible("no candidate group".into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn triple(p: &SchemeParams) -> (usize, usize, usize) {
        (p.symbols, p.slots(0), p.slots(1))
    }

    #[test]
    fn ria_table_points() {
        let p = solve_p1(4, 7, 3, 3, None).unwrap();
        assert_eq!((triple(&p), p.regime), ((28, 7, 4), Some(Regime::A1)));
        assert_eq!(p.dof, Rational64::new(4, 11));
        let p = solve_p1(1, 1, 3, 3, None).unwrap();
        assert_eq!((triple(&p), p.regime), ((3, 5, 3), Some(Regime::A2)));
        assert_eq!(p.dof, Rational64::new(3, 8));
        assert!(solve_p1(2, 1, 3, 3, None).is_err());
        assert!(solve_p1(1, 4, 3, 3, None).is_err());
    }

    #[test]
    fn tg_table_points() {
        let p = solve_p2(4, 1, 6, 2, None).unwrap();
        assert_eq!((triple(&p), p.tau()), ((20, 5, 3), 75));
        assert_eq!(p.dof, Rational64::new(4, 15));
        let p = solve_p2(2, 1, 3, 2, None).unwrap();
        assert_eq!(triple(&p), (4, 2, 1));
        assert_eq!(p.dof, Rational64::new(4, 9));
        let p = solve_p2(7, 1, 6, 2, None).unwrap();
        assert_eq!((triple(&p), p.regime), ((6, 1, 1), Some(Regime::B2)));
        assert_eq!(p.dof, Rational64::new(2, 7));
        let p = solve_p2(7, 5, 3, 2, None).unwrap();
        assert_eq!((p.tau(), p.dof), (36, Rational64::new(7, 18)));
        assert!(solve_p2(1, 1, 3, 2, None).is_err());
    }

    #[test]
    fn psr_table_points() {
        let p = solve_p3(1, 1, None).unwrap();
        assert_eq!((p.symbols, p.phase_slots.clone(), p.tau()), (12, vec![15, 4, 4], 31));
        assert_eq!(p.dof, Rational64::new(12, 31));
        let p = solve_p3(4, 5, None).unwrap();
        assert_eq!((p.symbols, p.phase_slots.clone()), (60, vec![15, 4, 4]));
        let p = solve_p3(11, 14, None).unwrap();
        assert_eq!((p.symbols, p.phase_slots.clone(), p.regime), (924, vec![84, 23, 20], Some(Regime::C3)));
        assert!((p.dof_f64() - 0.3815).abs() < 1e-4);
        let p = solve_p3(3, 4, None).unwrap();
        assert_eq!((p.symbols, p.phase_slots.clone(), p.regime), (27, vec![9, 3, 2], Some(Regime::C1)));
        assert!(p.notes.is_empty());
        assert!(solve_p3(1, 2, None).is_err());
    }

    #[test]
    fn psr_below_two_thirds_keeps_a_redundant_phase_note() {
        let p = solve_p3(2, 3, None).unwrap();
        assert_eq!((p.symbols, p.phase_slots.clone()), (8, vec![4, 2, 2]));
        assert_eq!(p.notes.len(), 1);
    }

    #[test]
    fn bounded_points() {
        let p = solve_p1(4, 7, 3, 3, Some(12)).unwrap();
        assert_eq!((p.tau(), p.dof), (5, Rational64::new(12, 35)));
        let p = solve_p2(4, 1, 6, 2, Some(7)).unwrap();
        assert_eq!((p.tau(), p.dof), (27, Rational64::new(7, 27)));
        let p = solve_p3(1, 1, Some(12)).unwrap();
        assert_eq!((p.tau(), p.dof), (31, Rational64::new(12, 31)));
        let p = solve_p1(1, 1, 3, 3, Some(3)).unwrap();
        assert_eq!((p.tau(), p.dof), (8, Rational64::new(3, 8)));
        assert!(solve_p2(2, 1, 3, 2, Some(1)).is_err());
    }

    #[test]
    fn budget_at_table_size_reaches_the_table_dof() {
        for (m, n) in [(4, 7), (2, 3), (3, 4), (1, 1)] {
            let table = solve_p1(m, n, 3, 3, None).unwrap();
            assert_eq!(solve_p1(m, n, 3, 3, Some(table.symbols)).unwrap().dof, table.dof);
        }
        for (m, n, k, g) in [(4, 1, 6, 2), (2, 1, 3, 2), (7, 5, 3, 2), (7, 1, 6, 2), (3, 2, 4, 3)] {
            let table = solve_p2(m, n, k, g, None).unwrap();
            assert_eq!(solve_p2(m, n, k, g, Some(table.symbols)).unwrap().dof, table.dof);
        }
        for (m, n) in [(1, 1), (4, 5), (3, 4), (2, 3)] {
            let table = solve_p3(m, n, None).unwrap();
            assert_eq!(solve_p3(m, n, Some(table.symbols)).unwrap().dof, table.dof);
        }
    }

    #[test]
    fn group_choice() {
        assert_eq!(best_params(Scheme::Tg, 4, 1, 6, None, None).unwrap().group, 2);
        assert_eq!(best_params(Scheme::Ria, 4, 7, 6, None, None).unwrap().group, 3);
        assert!(best_params(Scheme::Psr3, 1, 1, 4, None, None).is_err());
    }
}
