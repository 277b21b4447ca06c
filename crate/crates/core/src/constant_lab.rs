//! Constant-channel experiments: the collinearity behind the SISO RIA
//! collapse, the rank reports for the failing SISO cases, and the real-lifted
//! fix.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{generate_ensemble, ChannelEnsemble, ChannelMode};
use crate::error::{Error, Result};
use crate::linalg::{left_null_space, max_principal_angle, row_space, vstack, CMatrix, Tolerance};
use crate::optimizer::{solve_p1, solve_p2, solve_p3, Scheme, SchemeParams};
use crate::schemes::{build_plan, decode_user, dictionary_seed, simulated_params, verify_alignment, DecodeReport, TransmissionPlan};

/// Angles below this count as collinear.
pub const COLLINEARITY_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabCase {
    RiaSiso,
    PsrSiso,
    TgMimo,
    RiaMimo,
}

impl LabCase {
    pub const ALL: [LabCase; 4] = [LabCase::RiaSiso, LabCase::PsrSiso, LabCase::TgMimo, LabCase::RiaMimo];

    pub fn name(&self) -> &'static str {
        match self {
            LabCase::RiaSiso => "ria-siso",
            LabCase::PsrSiso => "psr-siso",
            LabCase::TgMimo => "tg-mimo",
            LabCase::RiaMimo => "ria-mimo",
        }
    }

    /// Table operating point of the case: RIA (1,1,3), PSR (1,1), TG (2,1,3)
    /// with pairs, RIA (2,3,3).
    pub fn params(&self) -> Result<SchemeParams> {
        match self {
            LabCase::RiaSiso => solve_p1(1, 1, 3, 3, None),
            LabCase::PsrSiso => solve_p3(1, 1, None),
            LabCase::TgMimo => solve_p2(2, 1, 3, 2, None),
            LabCase::RiaMimo => solve_p1(2, 3, 3, 3, None),
        }
    }
}

impl fmt::Display for LabCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LabCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LabCase::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown case '{s}', expected one of ria-siso, psr-siso, tg-mimo, ria-mimo")))
    }
}

/// Projection coefficients of one user together with the receive-space rows
/// they select.
#[derive(Debug, Clone)]
pub struct ProjectionPair {
    pub user: usize,
    /// Coefficients on the view at the next receiver, in its filter basis.
    pub theta: CMatrix,
    /// Coefficients on the view at the previous receiver, in its filter basis.
    pub vartheta: CMatrix,
    pub theta_receive: CMatrix,
    pub vartheta_receive: CMatrix,
}

/// Computes, for every user `i`, the coefficients that map its two
/// phase-one views onto their common subspace.
pub fn projection_pairs(plan: &TransmissionPlan, ens: &ChannelEnsemble, tol: Tolerance) -> Result<Vec<ProjectionPair>> {
    let users = plan.layout.users;
    if plan.params.scheme != Scheme::Ria || users != 3 {
        return Err(Error::Domain("collinearity check needs a three-user RIA plan".into()));
    }
    let mut out = Vec::with_capacity(users);
    for i in 0..users {
        let (next, prev) = ((i + 1) % users, (i + 2) % users);
        let v = plan.precoder(0, 0, i).ok_or_else(|| Error::Dimension("phase-one precoder missing".into()))?;
        let (u_next, u_prev) = (filter_rows(plan, next, i)?, filter_rows(plan, prev, i)?);
        let a = u_next * ens.round_channel(0, 0, next, i)? * v;
        let b = u_prev * ens.round_channel(0, 0, prev, i)? * v;
        let stacked = vstack(v.ncols(), &[&a, &(-&b)])?;
        let coeffs = left_null_space(&stacked, tol)?;
        if coeffs.dim() == 0 {
            return Err(Error::Degenerate(format!("views of user {} do not intersect", i + 1)));
        }
        let d = a.nrows();
        let theta = coeffs.basis().columns(0, d).into_owned();
        let vartheta = coeffs.basis().columns(d, b.nrows()).into_owned();
        out.push(ProjectionPair { user: i, theta_receive: &theta * u_next, vartheta_receive: &vartheta * u_prev, theta, vartheta });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollinearPair {
    /// Index `i` of the pair (theta of user i, vartheta of user i+1).
    pub user: usize,
    /// Coefficient rows as `[re, im]` entries, unit norm with the largest
    /// entry of theta made real.
    pub theta: Vec<Vec<[f64; 2]>>,
    /// The partner coefficients expressed in the same filter basis.
    pub vartheta: Vec<Vec<[f64; 2]>>,
    /// Largest principal angle between the receive-space rows, radians.
    pub angle: f64,
    pub collinear: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollinearityReport {
    pub mode: ChannelMode,
    pub seed: u64,
    pub threshold: f64,
    pub pairs: Vec<CollinearPair>,
}

impl CollinearityReport {
    pub fn all_collinear(&self) -> bool {
        self.pairs.iter().all(|p| p.collinear)
    }

    pub fn none_collinear(&self) -> bool {
        self.pairs.iter().all(|p| !p.collinear)
    }

    pub fn max_angle(&self) -> f64 {
        self.pairs.iter().map(|p| p.angle).fold(0.0, f64::max)
    }

    pub fn min_angle(&self) -> f64 {
        self.pairs.iter().map(|p| p.angle).fold(f64::INFINITY, f64::min)
    }
}

fn phase_fixed(rows: &CMatrix, reference: Complex64) -> Vec<Vec<[f64; 2]>> {
    let norm = rows.norm();
    let scale = if norm > 0.0 { reference.conj() / (reference.norm().max(f64::MIN_POSITIVE) * norm) } else { Complex64::new(1.0, 0.0) };
    rows.row_iter().map(|r| r.iter().map(|z| [(z * scale).re, (z * scale).im]).collect()).collect()
}

/// Compares `theta_i` with `vartheta_{i+1}` for every `i` on a plan built
/// from `ens`.
pub fn collinearity_from_plan(plan: &TransmissionPlan, ens: &ChannelEnsemble, tol: Tolerance) -> Result<CollinearityReport> {
    let pairs = projection_pairs(plan, ens, tol)?;
    let users = pairs.len();
    let mut out = Vec::with_capacity(users);
    for i in 0..users {
        let here = &pairs[i];
        let there = &pairs[(i + 1) % users];
        let a = row_space(&here.theta_receive, tol)?;
        let b = row_space(&there.vartheta_receive, tol)?;
        if a.dim() != b.dim() {
            return Err(Error::Degenerate(format!("pair {} spans {} and {} dimensions", i + 1, a.dim(), b.dim())));
        }
        let angle = max_principal_angle(&a, &b)?;
        // the partner's coefficients in theta's filter basis (exact when collinear)
        let u_here = filter_rows(plan, (i + 1) % users, i)?;
        let moved = &there.vartheta_receive * u_here.adjoint();
        let reference = here.theta.iter().copied().max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap_or(Complex64::new(1.0, 0.0));
        let partner_ref = moved.iter().copied().max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap_or(Complex64::new(1.0, 0.0));
        out.push(CollinearPair {
            user: i,
            theta: phase_fixed(&here.theta, reference),
            vartheta: phase_fixed(&moved, partner_ref),
            angle,
            collinear: angle < COLLINEARITY_THRESHOLD,
        });
    }
    Ok(CollinearityReport { mode: ens.mode(), seed: ens.seed(), threshold: COLLINEARITY_THRESHOLD, pairs: out })
}

fn filter_rows(plan: &TransmissionPlan, rx: usize, keep: usize) -> Result<&CMatrix> {
    let label = format!("T{},{}", rx + 1, keep + 1);
    plan.filters[0][0][rx]
        .iter()
        .find(|b| b.label == label)
        .map(|b| &b.filter)
        .ok_or_else(|| Error::Dimension(format!("plan has no phase-one filter {label}")))
}

/// Builds the SISO three-user RIA plan over `ens` (complex or real-lifted)
/// and runs the collinearity comparison.
pub fn collinearity_check(ens: &ChannelEnsemble, tol: Tolerance) -> Result<CollinearityReport> {
    let base = LabCase::RiaSiso.params()?;
    let lifted = ens.is_real();
    let side = if lifted { 2 } else { 1 };
    if ens.tx_antennas() != side || ens.rx_antennas() != side || *ens.layout() != base.layout() {
        return Err(Error::Domain("collinearity check supports the SISO three-user RIA layout only".into()));
    }
    let params = simulated_params(&base, ens.mode());
    let plan = build_plan(&params, ens, dictionary_seed(ens.seed()), tol)?;
    collinearity_from_plan(&plan, ens, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case: LabCase,
    pub mode: ChannelMode,
    pub seed: u64,
    pub scheme: Scheme,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    /// Symbols per user in the simulated domain.
    pub symbols: usize,
    pub decode: Vec<DecodeReport>,
    pub ranks: Vec<usize>,
    pub feasible: bool,
    pub aligned: bool,
    pub collinearity: Option<CollinearityReport>,
    pub error: Option<String>,
}

impl CaseReport {
    pub fn min_rank(&self) -> usize {
        self.ranks.iter().copied().min().unwrap_or(0)
    }
}

/// Builds the case over one draw in `mode` and decodes every receiver.
pub fn run_case(case: LabCase, mode: ChannelMode, seed: u64, tol: Tolerance) -> Result<CaseReport> {
    let params = case.params()?;
    let ens = generate_ensemble(&params.layout(), params.tx_antennas, params.rx_antennas, mode, seed)?;
    let sim = simulated_params(&params, mode);
    let mut report = CaseReport {
        case,
        mode,
        seed,
        scheme: params.scheme,
        tx_antennas: params.tx_antennas,
        rx_antennas: params.rx_antennas,
        symbols: sim.symbols,
        decode: Vec::new(),
        ranks: Vec::new(),
        feasible: false,
        aligned: false,
        collinearity: None,
        error: None,
    };
    let plan = match build_plan(&sim, &ens, dictionary_seed(seed), tol) {
        Ok(plan) => plan,
        Err(Error::Degenerate(msg)) => {
            report.error = Some(msg);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.decode = (0..plan.layout.users).map(|j| decode_user(&plan, &ens, j, tol)).collect::<Result<Vec<_>>>()?;
    report.ranks = report.decode.iter().map(|d| d.heq_rank).collect();
    report.feasible = report.decode.iter().all(|d| d.feasible);
    report.aligned = verify_alignment(&plan, &ens, tol)?;
    if case == LabCase::RiaSiso {
        report.collinearity = Some(collinearity_from_plan(&plan, &ens, tol)?);
    }
    Ok(report)
}

/// The case over a constant channel, without lifting.
pub fn constant_failure_report(case: LabCase, seed: u64, tol: Tolerance) -> Result<CaseReport> {
    run_case(case, ChannelMode::Constant, seed, tol)
}

/// The case over a constant channel lifted to the real domain, with twice the
/// symbols per user.
pub fn acs_feasibility(case: LabCase, seed: u64, tol: Tolerance) -> Result<CaseReport> {
    run_case(case, ChannelMode::AcsReal, seed, tol)
}

/// `run_case` over seeds `first..first + count`, in parallel.
pub fn run_seeds(case: LabCase, mode: ChannelMode, first: u64, count: u64, tol: Tolerance) -> Result<Vec<CaseReport>> {
    (first..first + count).into_par_iter().map(|s| run_case(case, mode, s, tol)).collect()
}
