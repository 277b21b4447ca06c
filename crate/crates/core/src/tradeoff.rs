//! DoF against frame length when each user may send at most `B` symbols.

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{best_params, rational_string, Regime, Scheme, SchemeParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    /// Symbol budget per user.
    pub budget: usize,
    pub symbols: usize,
    /// Slots per round, one entry per phase.
    pub slots: Vec<usize>,
    pub group: usize,
    pub regime: Option<Regime>,
    pub tau: usize,
    pub dof: f64,
    pub dof_exact: String,
    pub pareto: bool,
    #[serde(skip)]
    exact: Rational64,
}

impl TradeoffPoint {
    fn from_params(budget: usize, p: &SchemeParams) -> Self {
        TradeoffPoint {
            budget,
            symbols: p.symbols,
            slots: p.phase_slots.clone(),
            group: p.group,
            regime: p.regime,
            tau: p.tau(),
            dof: p.dof_f64(),
            dof_exact: rational_string(&p.dof),
            pareto: false,
            exact: p.dof,
        }
    }

    pub fn dof_rational(&self) -> Rational64 {
        self.exact
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffCurve {
    pub scheme: Scheme,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub users: usize,
    /// Fixed group size, or `None` when every valid group competes.
    pub fixed_group: Option<usize>,
    /// One point per feasible budget, in increasing budget order.
    pub points: Vec<TradeoffPoint>,
    /// Budgets in `1..=budget_max` with no feasible parameters.
    pub infeasible_budgets: Vec<usize>,
}

impl TradeoffCurve {
    pub fn pareto_points(&self) -> impl Iterator<Item = &TradeoffPoint> {
        self.points.iter().filter(|p| p.pareto)
    }

    pub fn point(&self, budget: usize) -> Option<&TradeoffPoint> {
        self.points.iter().find(|p| p.budget == budget)
    }
}

/// Best operating point with at most `budget` symbols per user.
pub fn bounded_dof(scheme: Scheme, m: usize, n: usize, users: usize, budget: usize) -> Result<TradeoffPoint> {
    bounded_point(scheme, m, n, users, None, budget)
}

pub fn bounded_point(scheme: Scheme, m: usize, n: usize, users: usize, group: Option<usize>, budget: usize) -> Result<TradeoffPoint> {
    if budget == 0 {
        return Err(Error::Domain("the symbol budget must be at least 1".into()));
    }
    let p = best_params(scheme, m, n, users, group, Some(budget))?;
    Ok(TradeoffPoint::from_params(budget, &p))
}

/// Marks the non-dominated points: scanning by increasing `tau`, a point is
/// kept when its DoF beats everything shorter. Equal points keep the smallest
/// budget.
pub fn mark_pareto(points: &mut [TradeoffPoint]) {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (&points[a], &points[b]);
        pa.tau.cmp(&pb.tau).then(pb.exact.cmp(&pa.exact)).then(pa.budget.cmp(&pb.budget))
    });
    let mut best: Option<Rational64> = None;
    for i in order {
        let keep = best.map_or(true, |b| points[i].exact > b);
        points[i].pareto = keep;
        if keep {
            best = Some(points[i].exact);
        }
    }
}

/// Points for every budget `1..=budget_max`, skipping budgets that admit no
/// parameters.
pub fn sweep_curve(scheme: Scheme, m: usize, n: usize, users: usize, group: Option<usize>, budget_max: usize) -> Result<TradeoffCurve> {
    if budget_max == 0 {
        return Err(Error::Domain("the largest budget must be at least 1".into()));
    }
    let results: Vec<(usize, Result<TradeoffPoint>)> =
        (1..=budget_max).into_par_iter().map(|b| (b, bounded_point(scheme, m, n, users, group, b))).collect();
    let mut points = Vec::new();
    let mut infeasible = Vec::new();
    for (b, r) in results {
        match r {
            Ok(p) => points.push(p),
            Err(Error::Infeasible(_)) => infeasible.push(b),
            Err(e) => return Err(e),
        }
    }
    mark_pareto(&mut points);
    Ok(TradeoffCurve { scheme, tx_antennas: m, rx_antennas: n, users, fixed_group: group, points, infeasible_budgets: infeasible })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-6
    }

    #[test]
    fn quoted_operating_points() {
        let p = bounded_dof(Scheme::Ria, 4, 7, 3, 28).unwrap();
        assert_eq!(p.tau, 11);
        assert!(close(p.dof, 0.363636));
        let p = bounded_dof(Scheme::Ria, 4, 7, 3, 12).unwrap();
        assert_eq!(p.tau, 5);
        assert!(close(p.dof, 0.342857));
        let p = bounded_dof(Scheme::Tg, 4, 1, 6, 20).unwrap();
        assert_eq!((p.tau, p.dof_exact.as_str()), (75, "4/15"));
        let p = bounded_dof(Scheme::Tg, 4, 1, 6, 7).unwrap();
        assert_eq!((p.tau, p.dof_exact.as_str()), (27, "7/27"));
        let p = bounded_dof(Scheme::Psr3, 1, 1, 3, 12).unwrap();
        assert_eq!((p.tau, p.dof_exact.as_str()), (31, "12/31"));
        let p = bounded_dof(Scheme::Ria, 1, 1, 3, 3).unwrap();
        assert_eq!((p.tau, p.dof_exact.as_str()), (8, "3/8"));
    }

    #[test]
    fn zero_budget_is_rejected() {
        assert!(bounded_dof(Scheme::Ria, 1, 1, 3, 0).is_err());
        assert!(sweep_curve(Scheme::Ria, 1, 1, 3, None, 0).is_err());
    }

    #[test]
    fn small_budgets_can_be_infeasible() {
        let curve = sweep_curve(Scheme::Tg, 3, 2, 3, None, 4).unwrap();
        assert_eq!(curve.infeasible_budgets, vec![1, 2]);
        assert_eq!(curve.points.iter().map(|p| p.budget).collect::<Vec<_>>(), vec![3, 4]);
        let p = bounded_dof(Scheme::Ria, 1, 1, 3, 1).unwrap();
        assert_eq!((p.tau, p.dof_exact.as_str()), (3, "1/3"));
    }

    #[test]
    fn pareto_marking_by_hand() {
        let mk = |budget, tau, num: i64, den: i64| {
            let exact = Rational64::new(num, den);
            TradeoffPoint {
                budget,
                symbols: budget,
                slots: vec![1, 1],
                group: 3,
                regime: None,
                tau,
                dof: *exact.numer() as f64 / *exact.denom() as f64,
                dof_exact: rational_string(&exact),
                pareto: false,
                exact,
            }
        };
        // (tau, dof): (4, 1/4) (6, 1/3) (5, 1/5) (6, 1/3) again at a larger budget (8, 1/3)
        let mut pts = vec![mk(1, 4, 1, 4), mk(2, 6, 1, 3), mk(3, 5, 1, 5), mk(4, 6, 1, 3), mk(5, 8, 1, 3)];
        mark_pareto(&mut pts);
        assert_eq!(pts.iter().map(|p| p.pareto).collect::<Vec<_>>(), vec![true, true, false, false, false]);
    }

    #[test]
    fn ria_group_switches_along_the_curve() {
        let curve = sweep_curve(Scheme::Ria, 3, 4, 6, None, 24).unwrap();
        let groups: Vec<usize> = curve.points.iter().map(|p| p.group).collect();
        assert_eq!(&groups[..3], &[5, 5, 5], "{groups:?}");
        assert!(groups[6..].iter().all(|&g| g == 3), "{groups:?}");
        let short = curve.points.iter().filter(|p| p.group == 5).map(|p| p.tau).max().unwrap();
        let long = curve.points.iter().filter(|p| p.group == 3).map(|p| p.tau).min().unwrap();
        assert!(short < long);
        // all groups tie at 1/6 for B = 4; the shortest frame wins
        assert_eq!((curve.point(4).unwrap().group, curve.point(4).unwrap().tau), (6, 6));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn dof_grows_with_budget_and_reaches_table(m in 1usize..5, n in 1usize..5, users in 3usize..5, which in 0usize..3) {
            let scheme = [Scheme::Ria, Scheme::Tg, Scheme::Psr3][which];
            let users = if scheme == Scheme::Psr3 { 3 } else { users };
            let table = match best_params(scheme, m, n, users, None, None) {
                Ok(t) => t,
                Err(_) => return Ok(()),
            };
            let curve = sweep_curve(scheme, m, n, users, None, table.symbols).unwrap();
            let mut last = Rational64::new(0, 1);
            for p in &curve.points {
                prop_assert!(p.dof_rational() >= last, "B={} dropped", p.budget);
                prop_assert!(p.dof_rational() <= table.dof);
                last = p.dof_rational();
            }
            prop_assert_eq!(curve.point(table.symbols).unwrap().dof_rational(), table.dof);
            let front: Vec<&TradeoffPoint> = curve.pareto_points().collect();
            for w in front.windows(2) {
                prop_assert!(w[0].tau < w[1].tau && w[0].dof_rational() < w[1].dof_rational());
            }
        }
    }
}
