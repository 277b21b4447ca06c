//! Constraint evaluator for the three parameter programs, in exact integer
//! arithmetic. Kept independent of the solvers so each can check the other.

use num_integer::binomial;

use super::{Scheme, SchemeParams};

fn i(x: usize) -> i64 {
    x as i64
}

/// Overheard dimensions per phase of the three-user scheme.
pub fn psr_overheard(p: &SchemeParams) -> (i64, i64, i64) {
    let (n, b) = (i(p.rx_antennas), i(p.symbols));
    let first = n * i(p.slots(0)) - b;
    let second = n * i(p.slots(1)) - first;
    let third = n * i(p.slots(2)) - 2 * second;
    (first, second, third)
}

/// Violated decodability constraints, empty when the point is feasible.
pub fn violations(p: &SchemeParams) -> Vec<String> {
    let (m, n, b) = (i(p.tx_antennas), i(p.rx_antennas), i(p.symbols));
    let (s1, s2, s3) = (i(p.slots(0)), i(p.slots(1)), i(p.slots(2)));
    let g = i(p.group);
    let mut out = Vec::new();
    let mut need = |ok: bool, what: &str| {
        if !ok {
            out.push(what.to_string());
        }
    };
    match p.scheme {
        Scheme::Ria => {
            need(m * s1 >= b, "first-phase precoder cannot carry b symbols (M*S1 >= b)");
            need(n * s1 > (g - 2) * b, "no room left after zero-forcing (N*S1 > (L-2)*b)");
            need(n * s2 >= b, "too few second-phase equations (N*S2 >= b)");
            need(g * m * s2 >= b, "second-phase transmit dimension too small (L*M*S2 >= b)");
            let common = (g - 1) * n * s1 - g * (g - 2) * b;
            need(g * common >= b, "intersections too small to fill the second phase (L*phi2 >= b)");
        }
        Scheme::Tg => {
            let share = binomial(i(p.users) - 1, g - 1);
            need(m * s1 >= b, "first-phase precoder cannot carry b symbols (M*S1 >= b)");
            need(n * s1 < b, "first phase alone already decodes (N*S1 < b)");
            need(n * s2 <= (g - 1) * n * s1 - (g - 2) * b, "second phase exceeds the common overheard space");
            need(n * (s1 + share * s2) >= b, "too few equations in total (N*(S1 + C(K-1,G-1)*S2) >= b)");
        }
        Scheme::Psr3 => {
            let (f1, f2, f3) = psr_overheard(p);
            need(f1 > 0 && f2 > 0 && f3 > 0, "every phase must leave a positive overheard dimension");
            need(m * s1 >= b, "first-phase precoder cannot carry b symbols (M*S1 >= b)");
            need(4 * f1 >= b, "first-phase side information too small (4*phi1 >= b)");
            need(m * s2 >= f1, "second-phase precoder too small (M*S2 >= phi1)");
            need(f2 <= f1, "second phase overhears more than it resends (phi2 <= phi1)");
            need(m * s3 >= 2 * f2, "third-phase precoder too small (M*S3 >= 2*phi2)");
            need(2 * (f1 + f2 + f3) >= b, "too few equations in total (2*(phi1+phi2+phi3) >= b)");
            need(f3 <= 2 * f2, "third phase overhears more than it resends (phi3 <= 2*phi2)");
        }
    }
    out
}

/// Constraints that only guarantee every phase is needed. Violating them wastes
/// slots but keeps the scheme decodable, so they are reported, not enforced.
pub fn control_notes(p: &SchemeParams) -> Vec<String> {
    match p.scheme {
        Scheme::Psr3 => {
            let (f1, f2, _) = psr_overheard(p);
            if 2 * (f1 + f2) >= i(p.symbols) {
                vec!["third phase is redundant: 2*(phi1+phi2) >= b".to_string()]
            } else {
                Vec::new()
            }
        }
        _ => Vec::new(),
    }
}
