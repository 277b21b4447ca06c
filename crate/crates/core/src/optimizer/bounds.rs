//! Closed-form DoF curves: outer bound, per-scheme optima and the piecewise
//! inner bounds, all normalized per user by the receive antenna count.

use num_integer::binomial;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{Regime, Scheme};

fn check_users(users: usize) -> Result<()> {
    if users < 3 {
        return Err(Error::Domain(format!("need at least 3 users, got {users}")));
    }
    Ok(())
}

fn check_ratio(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Domain(format!("antenna ratio {rho} must be positive and finite")));
    }
    Ok(())
}

/// Harmonic tail `sum_{k=2..K} 1/k`.
fn harmonic_tail(users: usize) -> f64 {
    (2..=users).map(|k| 1.0 / k as f64).sum()
}

/// Outer bound on the per-user normalized DoF, valid for `rho >= 1/(K-1)`.
pub fn outer_bound(users: usize, rho: f64) -> Result<f64> {
    check_users(users)?;
    check_ratio(rho)?;
    let k = users as f64;
    if rho < 1.0 / (k - 1.0) - 1e-15 {
        return Err(Error::Domain(format!("outer bound needs rho >= 1/(K-1), got {rho}")));
    }
    let first_corner = (k - 2.0) / (k * k - 3.0 * k + 1.0);
    let beta = harmonic_tail(users);
    Ok(if rho < first_corner {
        (k - 1.0) * rho / k
    } else if rho < 1.0 / beta {
        rho / (rho + 1.0)
    } else {
        1.0 / (beta + 1.0)
    })
}

/// Antenna ratio above which RIA over `group` users switches to the
/// symbol-limited parameter set.
pub fn ria_threshold(group: usize) -> f64 {
    let l = group as f64;
    l / (l * l - l - 1.0)
}

/// Number of G-groups each user belongs to, `C(K-1, G-1)`.
pub fn tg_memberships(users: usize, group: usize) -> u64 {
    binomial(users as u64 - 1, group as u64 - 1)
}

/// Antenna ratio above which TG with group size `group` switches parameter sets.
pub fn tg_threshold(users: usize, group: usize) -> f64 {
    let a = tg_memberships(users, group) as f64;
    let g = group as f64;
    (1.0 + a * (g - 1.0)) / (1.0 + a * (g - 2.0))
}

/// Lower PSR switch point, the real root where the two small-ratio regimes meet.
pub fn psr_threshold_low() -> f64 {
    let s6 = 6f64.sqrt();
    (10.0 + 5f64.powf(2.0 / 3.0) * ((2.0 * (3.0 * s6 + 2.0)).cbrt() - (2.0 * (3.0 * s6 - 2.0)).cbrt())) / 15.0
}

pub fn psr_threshold_mid() -> f64 {
    (5.0 - 7f64.sqrt()) / 3.0
}

pub const PSR_THRESHOLD_HIGH: f64 = 0.8;

/// Ratio where PSR overtakes three-user RIA.
pub fn ria_psr_crossover() -> f64 {
    249f64.sqrt() - 15.0
}

/// Ratio where TG over all users overtakes time-shared PSR.
pub fn psr_tg_crossover(users: usize) -> f64 {
    let k = users as f64;
    36.0 * (k - 1.0) / (31.0 * k - 36.0)
}

/// DoF of RIA over a group of `group` users, time-shared among `users`.
pub fn ria_dof(users: usize, group: usize, rho: f64) -> f64 {
    let l = group as f64;
    (l / users as f64) * (rho / (rho + 1.0)).min(l / (l * l - 1.0))
}

/// DoF of TG with group size `group` among `users` users, for `rho > 1`.
pub fn tg_dof(users: usize, group: usize, rho: f64) -> f64 {
    let (k, g) = (users as f64, group as f64);
    let a = tg_memberships(users, group) as f64;
    let slot_limited = (g / k) * rho / (rho + g - 1.0);
    let groups = binomial(users as u64, group as u64) as f64;
    let symbol_limited = (1.0 + a * (g - 1.0)) / (k + (1.0 + g * (g - 2.0)) * groups);
    slot_limited.min(symbol_limited)
}

pub fn psr_regime(rho: f64) -> Regime {
    if rho <= psr_threshold_low() {
        Regime::C1
    } else if rho <= psr_threshold_mid() {
        Regime::C2
    } else if rho < PSR_THRESHOLD_HIGH {
        Regime::C3
    } else {
        Regime::C4
    }
}

fn psr_value(rho: f64, regime: Regime) -> f64 {
    match regime {
        Regime::C1 => rho.powi(3) / (2.0 - rho),
        Regime::C2 => 2.0 * rho * rho / (5.0 * rho * rho - 10.0 * rho + 8.0),
        Regime::C3 => 6.0 * rho / (3.0 * rho + 10.0),
        _ => 12.0 / 31.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerPoint {
    pub value: f64,
    pub scheme: Scheme,
    pub group: usize,
    pub regime: Regime,
}

/// Three-user PSR inner bound, defined for `rho > 1/2`.
pub fn inner_bound_3user(rho: f64) -> Result<InnerPoint> {
    check_ratio(rho)?;
    if rho <= 0.5 {
        return Err(Error::Domain(format!("three-user PSR bound needs rho > 1/2, got {rho}")));
    }
    let regime = psr_regime(rho);
    Ok(InnerPoint { value: psr_value(rho, regime), scheme: Scheme::Psr3, group: 3, regime })
}

/// K-user inner bound: the best row of the piecewise table that covers `rho`.
pub fn inner_bound_kuser(users: usize, rho: f64) -> Result<InnerPoint> {
    check_users(users)?;
    check_ratio(rho)?;
    let k = users as f64;
    if rho <= 1.0 / k {
        return Err(Error::Domain(format!("inner bound needs rho > 1/K, got {rho}")));
    }
    let mut rows: Vec<InnerPoint> = Vec::new();
    let ria = |group: usize, regime: Regime, value: f64| InnerPoint { value, scheme: Scheme::Ria, group, regime };
    let tg = |group: usize, regime: Regime, value: f64| InnerPoint { value, scheme: Scheme::Tg, group, regime };

    if rho < ria_threshold(users) {
        rows.push(ria(users, Regime::A1, rho / (rho + 1.0)));
    }
    for lambda in 4..=users {
        if rho >= ria_threshold(lambda) && rho <= ria_threshold(lambda - 1) {
            let l = lambda as f64;
            let full = l * l / (l * l - 1.0) / k;
            let partial = (l - 1.0) * rho / (rho + 1.0) / k;
            rows.push(if full >= partial { ria(lambda, Regime::A2, full) } else { ria(lambda - 1, Regime::A1, partial) });
        }
    }
    let rx = ria_psr_crossover();
    if rho > 0.6 && rho <= rx {
        rows.push(ria(3, Regime::A2, 9.0 / (8.0 * k)));
    }
    let ry = psr_tg_crossover(users);
    if rho > rx && rho <= ry {
        let regime = psr_regime(rho);
        rows.push(InnerPoint { value: 3.0 / k * psr_value(rho, regime), scheme: Scheme::Psr3, group: 3, regime });
    }
    if rho > ry && rho < tg_threshold(users, users) {
        rows.push(tg(users, Regime::B1, rho / (rho + k - 1.0)));
    }
    for eps in 3..=users {
        if rho >= tg_threshold(users, eps) && rho <= tg_threshold(users, eps - 1) {
            let e = eps as f64;
            let groups = binomial(users as u64, eps as u64) as f64;
            let a = tg_memberships(users, eps) as f64;
            let full = (1.0 + a * (e - 1.0)) / (k + (1.0 + e * (e - 2.0)) * groups);
            let partial = (e - 1.0) / k * rho / (rho + e - 2.0);
            rows.push(if full >= partial { tg(eps, Regime::B2, full) } else { tg(eps - 1, Regime::B1, partial) });
        }
    }
    if rho > k {
        rows.push(tg(2, Regime::B2, 2.0 / (k + 1.0)));
    }
    rows.into_iter()
        .reduce(|best, p| if p.value > best.value { p } else { best })
        .ok_or_else(|| Error::Domain(format!("no inner-bound row covers rho = {rho}")))
}

/// TDMA baseline `min(rho, 1) / K`.
pub fn tdma(users: usize, rho: f64) -> f64 {
    rho.min(1.0) / users as f64
}

/// TDMA baseline ignoring the antenna ratio, `1 / K`.
pub fn tdma_flat(users: usize) -> f64 {
    1.0 / users as f64
}

/// `(outer - inner) / outer`, zero where the outer bound is reachable without CSIT.
pub fn relative_gap(users: usize, rho: f64) -> Result<f64> {
    check_users(users)?;
    check_ratio(rho)?;
    if rho <= 1.0 / (users as f64 - 1.0) {
        return Ok(0.0);
    }
    let outer = outer_bound(users, rho)?;
    let inner = inner_bound_kuser(users, rho)?.value;
    Ok((outer - inner) / outer)
}

/// Time sharing a scheme over `group` users among `users`: returns the scaled
/// DoF and the frame length covering every group once.
pub fn time_share(dof: f64, group: usize, users: usize, frame: u64) -> Result<(f64, u64)> {
    if group == 0 || group > users {
        return Err(Error::Domain(format!("group size {group} not in 1..={users}")));
    }
    Ok((group as f64 / users as f64 * dof, binomial(users as u64, group as u64) * frame))
}

/// Group size for RIA from the two integers around the positive root of
/// `rho = L / (L^2 - L - 1)`, clamped to `3..=K`.
pub fn select_ria_group(users: usize, rho: f64) -> Result<usize> {
    check_users(users)?;
    check_ratio(rho)?;
    if rho <= 1.0 / users as f64 || rho > 1.0 {
        return Err(Error::Domain(format!("RIA group selection needs 1/K < rho <= 1, got {rho}")));
    }
    let c = 1.0 + 1.0 / rho;
    let root = 0.5 * (c + (c * c + 4.0).sqrt());
    let clamp = |x: f64| (x as usize).clamp(3, users);
    let (lo, hi) = (clamp(root.floor()), clamp(root.ceil()));
    let valid = |l: usize| l as f64 * rho >= 1.0;
    Ok(match (valid(lo), valid(hi)) {
        (true, true) if ria_dof(users, hi, rho) > ria_dof(users, lo, rho) => hi,
        (true, _) => lo,
        _ => hi,
    })
}

/// Group size for TG: locate the threshold interval holding `rho` and compare
/// its two candidate group sizes.
pub fn select_tg_group(users: usize, rho: f64) -> Result<usize> {
    check_users(users)?;
    check_ratio(rho)?;
    if rho <= 1.0 {
        return Err(Error::Domain(format!("TG group selection needs rho > 1, got {rho}")));
    }
    if rho > users as f64 {
        return Ok(2);
    }
    if rho < tg_threshold(users, users) {
        return Ok(users);
    }
    for eps in 3..=users {
        if rho >= tg_threshold(users, eps) && rho <= tg_threshold(users, eps - 1) {
            let (small, large) = (tg_dof(users, eps - 1, rho), tg_dof(users, eps, rho));
            return Ok(if large > small { eps } else { eps - 1 });
        }
    }
    Err(Error::Domain(format!("no TG threshold interval holds rho = {rho}")))
}
