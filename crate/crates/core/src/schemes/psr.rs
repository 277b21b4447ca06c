//! Three-user, three-phase scheme. Phase one as in RIA; in phase two each pair
//! resends what its partner overheard while the idle receiver listens; phase
//! three resends what the idle receivers picked up.

use super::ria::first_phase;
use super::{degenerate_if_short, heard, raw_block, AlignmentReport, AlignmentTally, Dictionary, RxBlock, TransmissionPlan};
use crate::channel::ChannelEnsemble;
use crate::error::Result;
use crate::linalg::{left_null_space, row_space, span_sum, vstack, CMatrix, Subspace, Tolerance};
use crate::optimizer::SchemeParams;

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

fn third(a: usize, c: usize) -> usize {
    3 - a - c
}

/// What the idle receiver of round `r` keeps of each active transmitter:
/// `(tx, filter, row space)` for both members of the pair.
fn idle_views(ens: &ChannelEnsemble, round: &[Option<CMatrix>], r: usize, tol: Tolerance) -> Result<Vec<(usize, CMatrix, Subspace)>> {
    let (a, c) = PAIRS[r];
    let idle = third(a, c);
    [(a, c), (c, a)]
        .iter()
        .map(|&(keep, null)| {
            let nulled = heard(ens, round, 1, r, idle, null)?.expect("pair member is active");
            let kept = heard(ens, round, 1, r, idle, keep)?.expect("pair member is active");
            let filter = left_null_space(&nulled, tol)?.basis().clone();
            let view = row_space(&(&filter * kept), tol)?;
            Ok((keep, filter, view))
        })
        .collect()
}

pub(super) fn build(params: &SchemeParams, ens: &ChannelEnsemble, dict: &mut Dictionary, tol: Tolerance) -> Result<TransmissionPlan> {
    let layout = params.layout();
    let (m, n, b) = (params.tx_antennas, params.rx_antennas, params.symbols);
    let (s1, s2, s3) = (params.slots(0), params.slots(1), params.slots(2));
    let mut dims = Vec::new();

    let first: Vec<Option<CMatrix>> = (0..3).map(|_| Some(dict.draw(m * s1, b))).collect();
    let phase1 = first_phase(ens, &first, tol)?;
    let overheard = |rx: usize, tx: usize| phase1.overheard[rx][tx].as_ref().expect("overheard for every pair");
    for rx in 0..3 {
        for tx in (0..3).filter(|&t| t != rx) {
            dims.push((format!("T{},{}", rx + 1, tx + 1), overheard(rx, tx).dim()));
        }
    }

    let mut second = Vec::new();
    let mut second_filters = Vec::new();
    // [idle rx][tx]
    let mut idle_heard: Vec<Vec<Option<Subspace>>> = vec![vec![None; 3]; 3];
    for (r, &(a, c)) in PAIRS.iter().enumerate() {
        let mut round = vec![None; 3];
        for (tx, partner) in [(a, c), (c, a)] {
            let space = overheard(partner, tx);
            round[tx] = Some(dict.draw(m * s2, space.dim()) * space.basis());
        }
        let idle = third(a, c);
        let mut filters: Vec<Vec<RxBlock>> = (0..3).map(|_| vec![raw_block(n * s2)]).collect();
        filters[idle] = Vec::new();
        for (keep, filter, view) in idle_views(ens, &round, r, tol)? {
            let partner = if keep == a { c } else { a };
            let label = format!("F{}:{},{}", idle + 1, partner + 1, keep + 1);
            dims.push((label.clone(), view.dim()));
            filters[idle].push(RxBlock { label, filter });
            idle_heard[idle][keep] = Some(view);
        }
        second.push(round);
        second_filters.push(filters);
    }

    let mut last = vec![None; 3];
    for (tx, slot) in last.iter_mut().enumerate() {
        let parts: Vec<&Subspace> = (0..3).filter(|&k| k != tx).map(|k| idle_heard[k][tx].as_ref().expect("heard by both idle receivers")).collect();
        let stacked = span_sum(&parts, tol)?;
        let needed: usize = parts.iter().map(|s| s.dim()).sum::<usize>().min(b);
        degenerate_if_short(&format!("phase-three space of user {}", tx + 1), stacked.dim(), needed)?;
        let bases: Vec<&CMatrix> = parts.iter().map(|s| s.basis()).collect();
        let rows = vstack(b, &bases)?;
        *slot = Some(dict.draw(m * s3, rows.nrows()) * rows);
    }
    let mut third_filters = Vec::new();
    for rx in 0..3 {
        let received = (0..3).map(|tx| Ok(heard(ens, &last, 2, 0, rx, tx)?.expect("all active"))).collect::<Result<Vec<_>>>()?;
        let mut blocks = Vec::new();
        for keep in (0..3).filter(|&t| t != rx) {
            let filter = left_null_space(&received[third(rx, keep)], tol)?.basis().clone();
            blocks.push(RxBlock { label: format!("R{},{}", rx + 1, keep + 1), filter });
        }
        third_filters.push(blocks);
    }

    Ok(TransmissionPlan {
        params: params.clone(),
        layout,
        real_field: ens.is_real(),
        precoders: vec![vec![first], second, vec![last]],
        filters: vec![vec![phase1.filters], second_filters, vec![third_filters]],
        subspace_dims: dims,
    })
}

pub(super) fn verify(plan: &TransmissionPlan, ens: &ChannelEnsemble, tol: Tolerance) -> Result<AlignmentReport> {
    let phase1 = first_phase(ens, &plan.precoders[0][0], tol)?;
    let overheard = |rx: usize, tx: usize| phase1.overheard[rx][tx].as_ref().expect("overheard for every pair");
    let mut tally = AlignmentTally::new(tol);
    let mut idle_heard: Vec<Vec<Option<Subspace>>> = vec![vec![None; 3]; 3];
    for (r, &(a, c)) in PAIRS.iter().enumerate() {
        let round = &plan.precoders[1][r];
        for (tx, rx) in [(a, c), (c, a)] {
            let signal = heard(ens, round, 1, r, rx, tx)?.expect("pair member is active");
            tally.inside(&signal, overheard(rx, tx))?;
        }
        for (keep, _, view) in idle_views(ens, round, r, tol)? {
            idle_heard[third(a, c)][keep] = Some(view);
        }
    }
    for tx in 0..3 {
        for rx in (0..3).filter(|&r| r != tx) {
            let known = span_sum(&[overheard(rx, tx), idle_heard[rx][tx].as_ref().expect("idle view")], tol)?;
            let signal = heard(ens, &plan.precoders[2][0], 2, 0, rx, tx)?.expect("all active");
            tally.inside(&signal, &known)?;
        }
    }
    Ok(tally.finish())
}
