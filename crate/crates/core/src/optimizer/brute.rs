//! Exhaustive search over small integer grids, used as an oracle for the
//! closed-form and bounded solvers.

use super::problems::better;
use super::{violations, Scheme, SchemeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchCaps {
    pub max_symbols: usize,
    pub max_slots: usize,
}

/// Best feasible point with every coordinate under the caps, or `None`.
pub fn brute_force_params(scheme: Scheme, m: usize, n: usize, users: usize, group: usize, caps: SearchCaps) -> Option<SchemeParams> {
    let phases = if scheme == Scheme::Psr3 { 3 } else { 2 };
    let mut best: Option<SchemeParams> = None;
    let mut slots = vec![1; phases];
    for b in 1..=caps.max_symbols {
        slots.iter_mut().for_each(|s| *s = 1);
        loop {
            if let Ok(p) = SchemeParams::new(scheme, users, m, n, group, b, slots.clone()) {
                if violations(&p).is_empty() && best.as_ref().is_none_or(|q| better(&p, q)) {
                    best = Some(p);
                }
            }
            // odometer step over the slot grid
            let mut i = 0;
            while i < phases && slots[i] == caps.max_slots {
                slots[i] = 1;
                i += 1;
            }
            if i == phases {
                break;
            }
            slots[i] += 1;
        }
    }
    best
}
