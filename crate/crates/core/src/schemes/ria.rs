//! Retrospective interference alignment over a group of users: one round in
//! which everybody transmits, then one round that resends the parts of each
//! user's symbols that every other receiver already overheard.

use super::{degenerate_if_short, generic_intersection, heard, raw_block, AlignmentReport, AlignmentTally, Dictionary, RxBlock, TransmissionPlan};
use crate::channel::ChannelEnsemble;
use crate::error::Result;
use crate::linalg::{hstack, intersect, left_null_space, row_space, CMatrix, Subspace, Tolerance};
use crate::optimizer::SchemeParams;

/// Receive filters and overheard subspaces of an all-active first phase.
pub(crate) struct FirstPhase {
    /// receiver -> one block per interferer, which it keeps while nulling the rest.
    pub filters: Vec<Vec<RxBlock>>,
    /// `[rx][tx]`: row space of what `rx` learned about `tx`'s symbols.
    pub overheard: Vec<Vec<Option<Subspace>>>,
}

pub(crate) fn first_phase(ens: &ChannelEnsemble, precoders: &[Option<CMatrix>], tol: Tolerance) -> Result<FirstPhase> {
    let users = precoders.len();
    let mut filters = Vec::with_capacity(users);
    let mut overheard = vec![vec![None; users]; users];
    for rx in 0..users {
        let received = (0..users).map(|tx| Ok(heard(ens, precoders, 0, 0, rx, tx)?.expect("first phase is all active"))).collect::<Result<Vec<_>>>()?;
        let width = received[0].nrows();
        let mut blocks = Vec::new();
        for keep in (0..users).filter(|&i| i != rx) {
            let others: Vec<&CMatrix> = (0..users).filter(|&k| k != rx && k != keep).map(|k| &received[k]).collect();
            let combiner = left_null_space(&hstack(width, &others)?, tol)?;
            let view = combiner.basis() * &received[keep];
            overheard[rx][keep] = Some(row_space(&view, tol)?);
            blocks.push(RxBlock { label: format!("T{},{}", rx + 1, keep + 1), filter: combiner.basis().clone() });
        }
        filters.push(blocks);
    }
    Ok(FirstPhase { filters, overheard })
}

pub(super) fn build(params: &SchemeParams, ens: &ChannelEnsemble, dict: &mut Dictionary, tol: Tolerance) -> Result<TransmissionPlan> {
    let layout = params.layout();
    let users = layout.users;
    let (m, n, b) = (params.tx_antennas, params.rx_antennas, params.symbols);
    let (s1, s2) = (params.slots(0), params.slots(1));

    let first: Vec<Option<CMatrix>> = (0..users).map(|_| Some(dict.draw(m * s1, b))).collect();
    let phase1 = first_phase(ens, &first, tol)?;
    let mut dims = Vec::new();
    for rx in 0..users {
        for tx in (0..users).filter(|&t| t != rx) {
            let d = phase1.overheard[rx][tx].as_ref().map_or(0, |s| s.dim());
            dims.push((format!("T{},{}", rx + 1, tx + 1), d));
        }
    }

    let mut second = Vec::with_capacity(users);
    for tx in 0..users {
        let parts: Vec<&Subspace> = (0..users).filter(|&rx| rx != tx).filter_map(|rx| phase1.overheard[rx][tx].as_ref()).collect();
        let common = intersect(&parts, tol)?;
        let part_dims: Vec<usize> = parts.iter().map(|s| s.dim()).collect();
        degenerate_if_short(&format!("common overheard space of user {}", tx + 1), common.dim(), generic_intersection(b, &part_dims))?;
        dims.push((format!("T{}", tx + 1), common.dim()));
        second.push(Some(dict.draw(m * s2, common.dim()) * common.basis()));
    }

    let raw: Vec<Vec<RxBlock>> = (0..users).map(|_| vec![raw_block(n * s2)]).collect();
    Ok(TransmissionPlan {
        params: params.clone(),
        layout,
        real_field: ens.is_real(),
        precoders: vec![vec![first], vec![second]],
        filters: vec![vec![phase1.filters], vec![raw]],
        subspace_dims: dims,
    })
}

pub(super) fn verify(plan: &TransmissionPlan, ens: &ChannelEnsemble, tol: Tolerance) -> Result<AlignmentReport> {
    let users = plan.layout.users;
    let phase1 = first_phase(ens, &plan.precoders[0][0], tol)?;
    let mut tally = AlignmentTally::new(tol);
    for tx in 0..users {
        for rx in (0..users).filter(|&r| r != tx) {
            let signal = heard(ens, &plan.precoders[1][0], 1, 0, rx, tx)?.expect("second phase is all active");
            tally.inside(&signal, phase1.overheard[rx][tx].as_ref().expect("overheard for every pair"))?;
        }
    }
    Ok(tally.finish())
}
