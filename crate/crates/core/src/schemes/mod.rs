//! Precoder and receive-filter construction for the three schemes, signal
//! space assembly and rank-based decodability checks.

mod psr;
mod ria;
mod tg;

use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{gaussian_matrix, generate_ensemble, real_gaussian_matrix, ChannelEnsemble, ChannelMode, FrameLayout};
use crate::error::{Error, Result};
use crate::linalg::{hstack, identity, left_null_space, rank_tol, row_space, vstack, zeros, CMatrix, Subspace, Tolerance};
use crate::optimizer::{Scheme, SchemeParams};

/// Largest signal-space matrix (rows times columns) the simulator will build.
pub const MAX_SIGNAL_ENTRIES: usize = 1 << 21;

/// One block of receive processing applied to a round's received signal.
#[derive(Debug, Clone)]
pub struct RxBlock {
    pub label: String,
    /// `rows x (N * slots)` combiner.
    pub filter: CMatrix,
}

#[derive(Debug, Clone)]
pub struct TransmissionPlan {
    pub params: SchemeParams,
    pub layout: FrameLayout,
    pub real_field: bool,
    /// phase -> round -> user -> precoder of size `M*S x b` when active.
    pub precoders: Vec<Vec<Vec<Option<CMatrix>>>>,
    /// phase -> round -> receiver -> processing blocks.
    pub filters: Vec<Vec<Vec<Vec<RxBlock>>>>,
    /// Dimensions of the subspaces the construction relied on.
    pub subspace_dims: Vec<(String, usize)>,
}

impl TransmissionPlan {
    pub fn precoder(&self, phase: usize, round: usize, user: usize) -> Option<&CMatrix> {
        self.precoders.get(phase)?.get(round)?.get(user)?.as_ref()
    }

    pub fn subspace_dim(&self, label: &str) -> Option<usize> {
        self.subspace_dims.iter().find(|(l, _)| l == label).map(|&(_, d)| d)
    }
}

/// Random draws for precoder dictionaries and combining matrices.
pub(crate) struct Dictionary {
    rng: ChaCha8Rng,
    real: bool,
}

impl Dictionary {
    pub(crate) fn new(seed: u64, real: bool) -> Self {
        Dictionary { rng: ChaCha8Rng::seed_from_u64(seed), real }
    }

    pub(crate) fn draw(&mut self, rows: usize, cols: usize) -> CMatrix {
        if self.real {
            real_gaussian_matrix(rows, cols, &mut self.rng)
        } else {
            gaussian_matrix(rows, cols, &mut self.rng)
        }
    }
}

pub(crate) fn degenerate_if_short(label: &str, got: usize, needed: usize) -> Result<()> {
    if got < needed || got == 0 {
        Err(Error::Degenerate(format!("{label} has dimension {got}, needed {needed}")))
    } else {
        Ok(())
    }
}

/// Generic dimension of an intersection of subspaces of `ambient`.
pub(crate) fn generic_intersection(ambient: usize, dims: &[usize]) -> usize {
    let lost: usize = dims.iter().map(|d| ambient - d).sum();
    ambient.saturating_sub(lost)
}

pub(crate) fn raw_block(rows: usize) -> RxBlock {
    RxBlock { label: "raw".into(), filter: identity(rows) }
}

/// Received signal of transmitter `tx` at receiver `rx` over one round.
pub(crate) fn heard(ens: &ChannelEnsemble, plan_pre: &[Option<CMatrix>], phase: usize, round: usize, rx: usize, tx: usize) -> Result<Option<CMatrix>> {
    match &plan_pre[tx] {
        Some(v) => Ok(Some(ens.round_channel(phase, round, rx, tx)? * v)),
        None => Ok(None),
    }
}

fn check_compatible(params: &SchemeParams, ens: &ChannelEnsemble) -> Result<()> {
    if ens.tx_antennas() != params.tx_antennas || ens.rx_antennas() != params.rx_antennas {
        return Err(Error::Dimension(format!(
            "ensemble is {}x{} but parameters expect {}x{}",
            ens.rx_antennas(),
            ens.tx_antennas(),
            params.rx_antennas,
            params.tx_antennas
        )));
    }
    if *ens.layout() != params.layout() {
        return Err(Error::Dimension("ensemble frame layout does not match the parameters".into()));
    }
    let rows: usize = params.layout().phases.iter().map(|p| p.rounds.len() * p.slots * params.rx_antennas).sum();
    let cols = params.active_users() * params.symbols;
    if rows.saturating_mul(cols) > MAX_SIGNAL_ENTRIES {
        return Err(Error::TooLarge(format!("signal space would be about {rows} x {cols}")));
    }
    Ok(())
}

/// Builds precoders and receive filters for `params` over the channel draw.
/// `dictionary_seed` drives every random precoder and combining matrix.
pub fn build_plan(params: &SchemeParams, ens: &ChannelEnsemble, dictionary_seed: u64, tol: Tolerance) -> Result<TransmissionPlan> {
    check_compatible(params, ens)?;
    let mut dict = Dictionary::new(dictionary_seed, ens.is_real());
    match params.scheme {
        Scheme::Ria => ria::build(params, ens, &mut dict, tol),
        Scheme::Tg => tg::build(params, ens, &mut dict, tol),
        Scheme::Psr3 => psr::build(params, ens, &mut dict, tol),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowBlock {
    pub phase: usize,
    pub round: usize,
    pub label: String,
    pub start: usize,
    pub rows: usize,
}

/// Processed observations of one receiver: one column block of `b` columns
/// per transmitter.
#[derive(Debug, Clone)]
pub struct SignalSpaceMatrix {
    pub receiver: usize,
    pub symbols: usize,
    pub users: usize,
    pub matrix: CMatrix,
    pub row_blocks: Vec<RowBlock>,
}

impl SignalSpaceMatrix {
    pub fn column_block(&self, user: usize) -> CMatrix {
        self.matrix.columns(user * self.symbols, self.symbols).into_owned()
    }

    pub fn desired(&self) -> CMatrix {
        self.column_block(self.receiver)
    }

    /// Columns of every other transmitter, in user order.
    pub fn interference(&self) -> CMatrix {
        let parts: Vec<CMatrix> = (0..self.users).filter(|&u| u != self.receiver).map(|u| self.column_block(u)).collect();
        let refs: Vec<&CMatrix> = parts.iter().collect();
        hstack(self.matrix.nrows(), &refs).expect("column blocks share the row count")
    }

    pub fn block(&self, index: usize) -> CMatrix {
        let b = &self.row_blocks[index];
        self.matrix.rows(b.start, b.rows).into_owned()
    }

    /// Rows observed up to and including `phase`.
    pub fn through_phase(&self, phase: usize) -> SignalSpaceMatrix {
        let blocks: Vec<RowBlock> = self.row_blocks.iter().filter(|b| b.phase <= phase).cloned().collect();
        let rows = blocks.last().map(|b| b.start + b.rows).unwrap_or(0);
        SignalSpaceMatrix {
            receiver: self.receiver,
            symbols: self.symbols,
            users: self.users,
            matrix: self.matrix.rows(0, rows).into_owned(),
            row_blocks: blocks,
        }
    }
}

pub fn assemble_signal_space(plan: &TransmissionPlan, ens: &ChannelEnsemble, receiver: usize) -> Result<SignalSpaceMatrix> {
    let users = plan.layout.users;
    if receiver >= users {
        return Err(Error::Dimension(format!("receiver {receiver} not in 0..{users}")));
    }
    let b = plan.params.symbols;
    let mut parts = Vec::new();
    let mut row_blocks = Vec::new();
    let mut start = 0;
    for (p, phase) in plan.layout.phases.iter().enumerate() {
        let width = phase.slots * plan.params.rx_antennas;
        for r in 0..phase.rounds.len() {
            let columns = (0..users)
                .map(|tx| Ok(heard(ens, &plan.precoders[p][r], p, r, receiver, tx)?.unwrap_or_else(|| zeros(width, b))))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&CMatrix> = columns.iter().collect();
            let received = hstack(width, &refs)?;
            for block in &plan.filters[p][r][receiver] {
                let rows = block.filter.nrows();
                parts.push(&block.filter * &received);
                row_blocks.push(RowBlock { phase: p, round: r, label: block.label.clone(), start, rows });
                start += rows;
            }
        }
    }
    let refs: Vec<&CMatrix> = parts.iter().collect();
    Ok(SignalSpaceMatrix { receiver, symbols: b, users, matrix: vstack(users * b, &refs)?, row_blocks })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub receiver: usize,
    /// Rows of the zero-forcing combiner.
    pub filter_rows: usize,
    pub heq_rank: usize,
    pub symbols: usize,
    pub feasible: bool,
}

/// Zero-forces all interference columns and measures what is left of the
/// desired columns.
pub fn decode_signal_space(omega: &SignalSpaceMatrix, tol: Tolerance) -> Result<DecodeReport> {
    let combiner: Subspace = left_null_space(&omega.interference(), tol)?;
    let equivalent = combiner.basis() * omega.desired();
    let heq_rank = rank_tol(&equivalent, tol)?;
    Ok(DecodeReport { receiver: omega.receiver, filter_rows: combiner.dim(), heq_rank, symbols: omega.symbols, feasible: heq_rank == omega.symbols })
}

pub fn decode_user(plan: &TransmissionPlan, ens: &ChannelEnsemble, receiver: usize, tol: Tolerance) -> Result<DecodeReport> {
    decode_signal_space(&assemble_signal_space(plan, ens, receiver)?, tol)
}

impl DecodeReport {
    /// DoF delivered to this receiver under the plan's frame accounting.
    pub fn dof(&self, params: &SchemeParams) -> f64 {
        rational_to_f64(scaled_dof(params, self.heq_rank))
    }
}

/// Predicted DoF scaled by the fraction of symbols recovered, exactly.
fn scaled_dof(params: &SchemeParams, rank: usize) -> Rational64 {
    params.dof * Rational64::new(rank as i64, params.symbols as i64)
}

fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub checks: usize,
    pub failures: usize,
}

impl AlignmentReport {
    pub fn holds(&self) -> bool {
        self.failures == 0
    }
}

pub(crate) struct AlignmentTally {
    tol: Tolerance,
    report: AlignmentReport,
}

impl AlignmentTally {
    pub(crate) fn new(tol: Tolerance) -> Self {
        AlignmentTally { tol, report: AlignmentReport { checks: 0, failures: 0 } }
    }

    /// Records whether the row space of `signal` lies inside `known`.
    pub(crate) fn inside(&mut self, signal: &CMatrix, known: &Subspace) -> Result<()> {
        let inner = row_space(signal, self.tol)?;
        self.report.checks += 1;
        if !known.contains(&inner, self.tol) {
            self.report.failures += 1;
        }
        Ok(())
    }

    pub(crate) fn finish(self) -> AlignmentReport {
        self.report
    }
}

/// Checks every alignment inclusion of the plan, with the overheard subspaces
/// recomputed from `ens`. A plan built on a different draw generally fails.
pub fn alignment_report(plan: &TransmissionPlan, ens: &ChannelEnsemble, tol: Tolerance) -> Result<AlignmentReport> {
    check_compatible(&plan.params, ens)?;
    match plan.params.scheme {
        Scheme::Ria => ria::verify(plan, ens, tol),
        Scheme::Tg => tg::verify(plan, ens, tol),
        Scheme::Psr3 => psr::verify(plan, ens, tol),
    }
}

pub fn verify_alignment(plan: &TransmissionPlan, ens: &ChannelEnsemble, tol: Tolerance) -> Result<bool> {
    Ok(alignment_report(plan, ens, tol)?.holds())
}

/// Seed of the precoder dictionary paired with a channel seed.
pub fn dictionary_seed(channel_seed: u64) -> u64 {
    channel_seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0x5DEE_CE66_D1CE_5EED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub seed: u64,
    pub ranks: Vec<usize>,
    pub min_rank: usize,
    pub feasible: bool,
    pub aligned: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub scheme: Scheme,
    pub mode: ChannelMode,
    /// Symbols per user in the simulated domain (doubled when lifted).
    pub symbols: usize,
    pub per_trial: Vec<TrialOutcome>,
    pub feasible_fraction: f64,
    pub min_rank: usize,
    pub predicted_dof: f64,
    /// Worst DoF delivered to any receiver in any trial.
    pub measured_dof: f64,
}

/// Parameters as simulated under `mode`: lifted to the real domain for ACS.
pub fn simulated_params(params: &SchemeParams, mode: ChannelMode) -> SchemeParams {
    if mode == ChannelMode::AcsReal {
        params.lifted()
    } else {
        params.clone()
    }
}

/// One channel draw: build, decode every receiver, check alignment.
pub fn run_trial(params: &SchemeParams, seed: u64, mode: ChannelMode, tol: Tolerance) -> Result<TrialOutcome> {
    let ens = generate_ensemble(&params.layout(), params.tx_antennas, params.rx_antennas, mode, seed)?;
    let sim = simulated_params(params, mode);
    let outcome = build_plan(&sim, &ens, dictionary_seed(seed), tol).and_then(|plan| {
        let ranks = (0..plan.layout.users).map(|j| Ok(decode_user(&plan, &ens, j, tol)?.heq_rank)).collect::<Result<Vec<_>>>()?;
        let aligned = verify_alignment(&plan, &ens, tol)?;
        Ok((ranks, aligned))
    });
    match outcome {
        Ok((ranks, aligned)) => {
            let min_rank = ranks.iter().copied().min().unwrap_or(0);
            Ok(TrialOutcome { seed, feasible: min_rank == sim.symbols, min_rank, ranks, aligned, error: None })
        }
        Err(Error::Degenerate(msg)) => Ok(TrialOutcome { seed, ranks: Vec::new(), min_rank: 0, feasible: false, aligned: false, error: Some(msg) }),
        Err(e) => Err(e),
    }
}

/// Runs `trials` independent draws with seeds `seed_base..seed_base + trials`.
pub fn monte_carlo(params: &SchemeParams, trials: usize, seed_base: u64, mode: ChannelMode, tol: Tolerance) -> Result<MonteCarloSummary> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let per_trial = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(params, seed_base.wrapping_add(t), mode, tol))
        .collect::<Result<Vec<_>>>()?;
    let sim = simulated_params(params, mode);
    let feasible = per_trial.iter().filter(|t| t.feasible).count();
    let min_rank = per_trial.iter().map(|t| t.min_rank).min().unwrap_or(0);
    let predicted = params.dof_f64();
    Ok(MonteCarloSummary {
        scheme: params.scheme,
        mode,
        symbols: sim.symbols,
        feasible_fraction: feasible as f64 / trials as f64,
        min_rank,
        predicted_dof: predicted,
        measured_dof: rational_to_f64(scaled_dof(&sim, min_rank)),
        per_trial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelMode;
    use crate::optimizer::{solve_p1, solve_p2, solve_p3};

    fn built(params: &SchemeParams, mode: ChannelMode, seed: u64) -> (TransmissionPlan, ChannelEnsemble) {
        let ens = generate_ensemble(&params.layout(), params.tx_antennas, params.rx_antennas, mode, seed).unwrap();
        let sim = simulated_params(params, mode);
        let plan = build_plan(&sim, &ens, dictionary_seed(seed), Tolerance::default()).unwrap();
        (plan, ens)
    }

    #[test]
    fn small_cases_decode_on_time_varying_draws() {
        let tol = Tolerance::default();
        for params in [solve_p1(1, 1, 3, 3, None).unwrap(), solve_p2(2, 1, 3, 2, None).unwrap(), solve_p3(1, 1, None).unwrap()] {
            for seed in 1..=3 {
                let (plan, ens) = built(&params, ChannelMode::TimeVarying, seed);
                for j in 0..3 {
                    let report = decode_user(&plan, &ens, j, tol).unwrap();
                    assert!(report.feasible, "{:?} seed {seed} rx {j}: rank {}", params.scheme, report.heq_rank);
                    assert!((report.dof(&params) - params.dof_f64()).abs() < 1e-12);
                }
                assert!(verify_alignment(&plan, &ens, tol).unwrap());
            }
        }
    }

    #[test]
    fn signal_space_shape_follows_frame() {
        let params = solve_p1(1, 1, 3, 3, None).unwrap();
        let (plan, ens) = built(&params, ChannelMode::TimeVarying, 4);
        let omega = assemble_signal_space(&plan, &ens, 0).unwrap();
        // two 2-row phase-1 views plus the raw 3-slot second phase
        assert_eq!(omega.matrix.shape(), (2 + 2 + 3, 9));
        assert_eq!(omega.row_blocks.len(), 3);
        assert_eq!(omega.through_phase(0).matrix.nrows(), 4);
        assert_eq!(omega.interference().ncols(), 6);
        // the view that keeps user 2 must not contain user 3
        let keep2 = omega.row_blocks.iter().position(|b| b.label == "T1,2").unwrap();
        let block = omega.block(keep2);
        assert!(block.columns(6, 3).norm() < 1e-10);
        assert!(block.columns(3, 3).norm() > 1e-3);
    }

    #[test]
    fn alignment_fails_on_another_draw() {
        let params = solve_p1(1, 1, 3, 3, None).unwrap();
        let (plan, _) = built(&params, ChannelMode::TimeVarying, 1);
        let other = generate_ensemble(&params.layout(), 1, 1, ChannelMode::TimeVarying, 2).unwrap();
        let report = alignment_report(&plan, &other, Tolerance::default()).unwrap();
        assert!(report.failures > 0);
    }

    #[test]
    fn mismatched_ensemble_is_rejected() {
        let params = solve_p1(1, 1, 3, 3, None).unwrap();
        let wrong = solve_p3(1, 1, None).unwrap();
        let ens = generate_ensemble(&wrong.layout(), 1, 1, ChannelMode::TimeVarying, 1).unwrap();
        assert!(matches!(build_plan(&params, &ens, 1, Tolerance::default()), Err(Error::Dimension(_))));
    }

    #[test]
    fn constant_siso_ria_collapses_to_rank_one() {
        let params = solve_p1(1, 1, 3, 3, None).unwrap();
        let trial = run_trial(&params, 3, ChannelMode::Constant, Tolerance::default()).unwrap();
        assert_eq!(trial.ranks, vec![1, 1, 1]);
        assert!(!trial.feasible);
        let lifted = run_trial(&params, 3, ChannelMode::AcsReal, Tolerance::default()).unwrap();
        assert_eq!(lifted.ranks, vec![6, 6, 6]);
    }

    #[test]
    fn acs_plan_stays_real() {
        let params = solve_p3(1, 1, None).unwrap();
        let (plan, _) = built(&params, ChannelMode::AcsReal, 2);
        assert!(plan.real_field);
        for v in plan.precoders.iter().flatten().flatten().flatten() {
            assert!(v.iter().all(|z| z.im == 0.0));
        }
    }

    #[test]
    fn monte_carlo_summary_counts() {
        let params = solve_p2(2, 1, 3, 2, None).unwrap();
        let summary = monte_carlo(&params, 4, 10, ChannelMode::TimeVarying, Tolerance::default()).unwrap();
        assert_eq!(summary.per_trial.len(), 4);
        assert_eq!(summary.per_trial.iter().map(|t| t.seed).collect::<Vec<_>>(), vec![10, 11, 12, 13]);
        assert_eq!(summary.feasible_fraction, 1.0);
        assert_eq!(summary.min_rank, 4);
        assert!((summary.measured_dof - 4.0 / 9.0).abs() < 1e-12);
        assert!(monte_carlo(&params, 0, 1, ChannelMode::TimeVarying, Tolerance::default()).is_err());
    }

    #[test]
    fn dictionary_seed_spreads() {
        assert_ne!(dictionary_seed(1), dictionary_seed(2));
        assert_ne!(dictionary_seed(0), 0);
    }
}
