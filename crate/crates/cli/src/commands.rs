use anyhow::{bail, ensure};
use dcsit_core::channel::ChannelMode;
use dcsit_core::constant_lab::{run_case, CaseReport};
use dcsit_core::optimizer::{best_params, inner_bound_kuser, outer_bound, rational_string, relative_gap, tdma, tdma_flat, Scheme, SchemeParams};
use dcsit_core::schemes::{monte_carlo, simulated_params, TrialOutcome};
use dcsit_core::tradeoff::sweep_curve;
use dcsit_core::Error;
use serde::Serialize;

use crate::args::{channel_mode, BoundsArgs, LabArgs, ParamsArgs, SettingArgs, SimulateArgs, TradeoffArgs};
use crate::output::{csv_payload, csv_writer, decimal, json_payload};

pub fn bounds(args: &BoundsArgs) -> anyhow::Result<String> {
    ensure!(args.k >= 3, "--K must be at least 3");
    let rho_min = args.rho_min.unwrap_or(1.0 / (args.k as f64 - 1.0));
    ensure!(rho_min.is_finite() && args.rho_max.is_finite(), "ratios must be finite");
    ensure!(rho_min <= args.rho_max, "--rho-min exceeds --rho-max");
    ensure!(args.steps >= 1, "--steps must be at least 1");
    ensure!(args.steps > 1 || rho_min == args.rho_max, "a single step needs --rho-min equal to --rho-max");
    let mut w = csv_writer();
    w.write_record(["rho", "outer", "inner", "scheme", "regime", "tdma", "tdma_flat", "gap"])?;
    for i in 0..args.steps {
        let rho = if args.steps == 1 { rho_min } else { rho_min + (args.rho_max - rho_min) * i as f64 / (args.steps - 1) as f64 };
        let outer = outer_bound(args.k, rho)?;
        let inner = inner_bound_kuser(args.k, rho)?;
        w.write_record([
            decimal(rho),
            decimal(outer),
            decimal(inner.value),
            inner.scheme.name().to_string(),
            inner.regime.label().to_string(),
            decimal(tdma(args.k, rho)),
            decimal(tdma_flat(args.k)),
            decimal(relative_gap(args.k, rho)?),
        ])?;
    }
    csv_payload(w)
}

#[derive(Debug, Serialize)]
struct ParamsReport {
    feasible: bool,
    scheme: Scheme,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget: Option<usize>,
    #[serde(flatten)]
    point: Option<PointFields>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

#[derive(Debug, Serialize)]
struct PointFields {
    group: usize,
    regime: Option<String>,
    b: usize,
    #[serde(rename = "S1")]
    s1: usize,
    #[serde(rename = "S2")]
    s2: usize,
    #[serde(rename = "S3")]
    s3: Option<usize>,
    tau: usize,
    dof: f64,
    dof_exact_rational: String,
    notes: Vec<String>,
}

impl PointFields {
    fn new(p: &SchemeParams) -> Self {
        PointFields {
            group: p.group,
            regime: p.regime.map(|r| r.label().to_string()),
            b: p.symbols,
            s1: p.slots(0),
            s2: p.slots(1),
            s3: (p.scheme == Scheme::Psr3).then(|| p.slots(2)),
            tau: p.tau(),
            dof: p.dof_f64(),
            dof_exact_rational: rational_string(&p.dof),
            notes: p.notes.clone(),
        }
    }
}

fn resolve(setting: &SettingArgs, budget: Option<usize>) -> anyhow::Result<Result<SchemeParams, Error>> {
    let group = setting.group()?;
    ensure!(budget != Some(0), "--B must be at least 1");
    Ok(best_params(setting.scheme, setting.m, setting.n, setting.k, group, budget))
}

pub fn params(args: &ParamsArgs) -> anyhow::Result<String> {
    let s = &args.setting;
    let mut report = ParamsReport { feasible: true, scheme: s.scheme, m: s.m, n: s.n, k: s.k, budget: args.b, point: None, reason: None };
    match resolve(s, args.b)? {
        Ok(p) => report.point = Some(PointFields::new(&p)),
        Err(e @ (Error::Infeasible(_) | Error::Domain(_))) => {
            report.feasible = false;
            report.reason = Some(e.to_string());
        }
        Err(e) => return Err(e.into()),
    }
    json_payload(&report)
}

#[derive(Debug, Serialize)]
struct SimulateReport {
    scheme: Scheme,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    group: usize,
    b: usize,
    channel: ChannelMode,
    trials: usize,
    seed: u64,
    rank_tolerance: f64,
    /// Symbols per user in the simulated domain.
    symbols: usize,
    per_trial: Vec<TrialOutcome>,
    feasible_fraction: f64,
    min_rank: usize,
    predicted_dof: f64,
    predicted_dof_exact: String,
    measured_dof: f64,
}

fn signal_rows(p: &SchemeParams) -> usize {
    p.layout().phases.iter().map(|ph| ph.rounds.len() * ph.slots * p.rx_antennas).sum()
}

pub fn simulate(args: &SimulateArgs) -> anyhow::Result<String> {
    let mode = channel_mode(args.channel, args.acs)?;
    let tol = args.tol.tolerance()?;
    ensure!(args.trials >= 1, "--trials must be at least 1");
    let params = resolve(&args.setting, args.b)??;
    let rows = signal_rows(&simulated_params(&params, mode));
    if rows > args.max_rows {
        bail!("signal space has {rows} rows, above --max-rows {}", args.max_rows);
    }
    let summary = monte_carlo(&params, args.trials, args.seed, mode, tol)?;
    let s = &args.setting;
    json_payload(&SimulateReport {
        scheme: s.scheme,
        m: s.m,
        n: s.n,
        k: s.k,
        group: params.group,
        b: params.symbols,
        channel: mode,
        trials: args.trials,
        seed: args.seed,
        rank_tolerance: tol.rel_eps,
        symbols: summary.symbols,
        per_trial: summary.per_trial,
        feasible_fraction: summary.feasible_fraction,
        min_rank: summary.min_rank,
        predicted_dof: summary.predicted_dof,
        predicted_dof_exact: rational_string(&params.dof),
        measured_dof: summary.measured_dof,
    })
}

pub fn tradeoff(args: &TradeoffArgs) -> anyhow::Result<String> {
    let s = &args.setting;
    ensure!(args.b_max >= 1, "--Bmax must be at least 1");
    let curve = sweep_curve(s.scheme, s.m, s.n, s.k, s.group()?, args.b_max)?;
    let mut w = csv_writer();
    w.write_record(["B", "b", "S1", "S2", "S3", "group", "tau", "dof", "pareto"])?;
    for p in &curve.points {
        let s3 = if s.scheme == Scheme::Psr3 { p.slots[2].to_string() } else { String::new() };
        w.write_record([
            p.budget.to_string(),
            p.symbols.to_string(),
            p.slots[0].to_string(),
            p.slots[1].to_string(),
            s3,
            p.group.to_string(),
            p.tau.to_string(),
            decimal(p.dof),
            p.pareto.to_string(),
        ])?;
    }
    csv_payload(w)
}

#[derive(Debug, Serialize)]
struct LabReport {
    rank_tolerance: f64,
    #[serde(flatten)]
    report: CaseReport,
    min_rank: usize,
}

pub fn constant_lab(args: &LabArgs) -> anyhow::Result<String> {
    let mode = channel_mode(args.channel, args.acs)?;
    let tol = args.tol.tolerance()?;
    let report = run_case(args.case, mode, args.seed, tol)?;
    json_payload(&LabReport { rank_tolerance: tol.rel_eps, min_rank: report.min_rank(), report })
}
