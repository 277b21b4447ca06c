//! Transmitter gaining: each transmitter first sends alone, then every group
//! of G users resends combinations all other group members overheard.

use super::{degenerate_if_short, generic_intersection, heard, raw_block, AlignmentReport, AlignmentTally, Dictionary, TransmissionPlan};
use crate::channel::ChannelEnsemble;
use crate::error::Result;
use crate::linalg::{intersect, row_space, CMatrix, Subspace, Tolerance};
use crate::optimizer::SchemeParams;

/// `[rx][tx]`: row space of transmitter `tx`'s solo round as heard by `rx`.
fn solo_views(ens: &ChannelEnsemble, plan_first: &[Vec<Option<CMatrix>>], users: usize, tol: Tolerance) -> Result<Vec<Vec<Subspace>>> {
    (0..users)
        .map(|rx| {
            (0..users)
                .map(|tx| {
                    let signal = heard(ens, &plan_first[tx], 0, tx, rx, tx)?.expect("solo transmitter is active");
                    row_space(&signal, tol)
                })
                .collect()
        })
        .collect()
}

pub(super) fn build(params: &SchemeParams, ens: &ChannelEnsemble, dict: &mut Dictionary, tol: Tolerance) -> Result<TransmissionPlan> {
    let layout = params.layout();
    let users = layout.users;
    let (m, n, b) = (params.tx_antennas, params.rx_antennas, params.symbols);
    let (s1, s2) = (params.slots(0), params.slots(1));

    let first: Vec<Vec<Option<CMatrix>>> = (0..users)
        .map(|round| (0..users).map(|tx| (tx == round).then(|| dict.draw(m * s1, b))).collect())
        .collect();
    let views = solo_views(ens, &first, users, tol)?;
    let mut dims = Vec::new();
    for rx in 0..users {
        for tx in (0..users).filter(|&t| t != rx) {
            dims.push((format!("T{},{}", rx + 1, tx + 1), views[rx][tx].dim()));
        }
    }

    let mut second = Vec::new();
    for group in &layout.phases[1].rounds {
        let mut round = vec![None; users];
        for &tx in group {
            let parts: Vec<&Subspace> = group.iter().filter(|&&rx| rx != tx).map(|&rx| &views[rx][tx]).collect();
            let common = intersect(&parts, tol)?;
            let part_dims: Vec<usize> = parts.iter().map(|s| s.dim()).collect();
            let label = format!("T{}@{:?}", tx + 1, group.iter().map(|u| u + 1).collect::<Vec<_>>());
            degenerate_if_short(&label, common.dim(), generic_intersection(b, &part_dims))?;
            dims.push((label, common.dim()));
            round[tx] = Some(dict.draw(m * s2, common.dim()) * common.basis());
        }
        second.push(round);
    }

    let raw = |rows: usize, rounds: usize| (0..rounds).map(|_| (0..users).map(|_| vec![raw_block(rows)]).collect()).collect();
    Ok(TransmissionPlan {
        params: params.clone(),
        real_field: ens.is_real(),
        precoders: vec![first, second],
        filters: vec![raw(n * s1, users), raw(n * s2, layout.phases[1].rounds.len())],
        layout,
        subspace_dims: dims,
    })
}

pub(super) fn verify(plan: &TransmissionPlan, ens: &ChannelEnsemble, tol: Tolerance) -> Result<AlignmentReport> {
    let users = plan.layout.users;
    let views = solo_views(ens, &plan.precoders[0], users, tol)?;
    let mut tally = AlignmentTally::new(tol);
    for (r, group) in plan.layout.phases[1].rounds.iter().enumerate() {
        for &tx in group {
            for &rx in group.iter().filter(|&&rx| rx != tx) {
                let signal = heard(ens, &plan.precoders[1][r], 1, r, rx, tx)?.expect("group member is active");
                tally.inside(&signal, &views[rx][tx])?;
            }
        }
    }
    Ok(tally.finish())
}
