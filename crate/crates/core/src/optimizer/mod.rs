//! Scheme parameters: closed-form and bounded solvers for the three linear
//! programs, an independent constraint evaluator and an exhaustive oracle.

pub mod bounds;
pub mod brute;
pub mod constraints;
pub mod problems;

use std::fmt;

use num_integer::binomial;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::channel::{FrameLayout, PhaseLayout};
use crate::error::{Error, Result};

pub use bounds::*;
pub use brute::{brute_force_params, SearchCaps};
pub use constraints::{control_notes, violations};
pub use problems::{best_params, solve_p1, solve_p2, solve_p3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Retrospective interference alignment over a group of users.
    Ria,
    /// Transmitter gaining: single-transmitter rounds, then group rounds.
    Tg,
    /// Three-user three-phase scheme with partial symbol recovery.
    #[serde(rename = "psr")]
    Psr3,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ria => "ria",
            Scheme::Tg => "tg",
            Scheme::Psr3 => "psr",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ria" => Ok(Scheme::Ria),
            "tg" => Ok(Scheme::Tg),
            "psr" | "psr3" => Ok(Scheme::Psr3),
            other => Err(Error::Domain(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Which parameter family of a scheme is optimal. `A*` belong to RIA, `B*` to
/// TG and `C*` to PSR; the lower number is the antenna-limited side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    A1,
    A2,
    B1,
    B2,
    C1,
    C2,
    C3,
    C4,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::A1 => "A.I",
            Regime::A2 => "A.II",
            Regime::B1 => "B.I",
            Regime::B2 => "B.II",
            Regime::C1 => "C.I",
            Regime::C2 => "C.II",
            Regime::C3 => "C.III",
            Regime::C4 => "C.IV",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One integer operating point of a scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub scheme: Scheme,
    pub users: usize,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    /// Users served together: RIA group, TG group, 3 for PSR.
    pub group: usize,
    /// Parameter family when the point comes from a closed form.
    pub regime: Option<Regime>,
    /// Symbols sent per user in one frame.
    pub symbols: usize,
    /// Slots per round, one entry per phase.
    pub phase_slots: Vec<usize>,
    pub dof: Rational64,
    /// Constraints that only express economy, reported rather than enforced.
    pub notes: Vec<String>,
}

fn as_i64(x: usize) -> i64 {
    i64::try_from(x).expect("parameter fits in i64")
}

impl SchemeParams {
    pub fn new(scheme: Scheme, users: usize, tx_antennas: usize, rx_antennas: usize, group: usize, symbols: usize, phase_slots: Vec<usize>) -> Result<Self> {
        let phases = match scheme {
            Scheme::Psr3 => 3,
            _ => 2,
        };
        if phase_slots.len() != phases || phase_slots.iter().any(|&s| s == 0) {
            return Err(Error::Dimension(format!("{scheme} needs {phases} positive phase lengths, got {phase_slots:?}")));
        }
        if symbols == 0 || tx_antennas == 0 || rx_antennas == 0 {
            return Err(Error::Dimension("symbols and antenna counts must be positive".into()));
        }
        let group_ok = match scheme {
            Scheme::Ria => (3..=users).contains(&group),
            Scheme::Tg => (2..=users).contains(&group),
            Scheme::Psr3 => users == 3 && group == 3,
        };
        if !group_ok {
            return Err(Error::Domain(format!("{scheme} cannot use group {group} among {users} users")));
        }
        let mut p = SchemeParams {
            scheme,
            users,
            tx_antennas,
            rx_antennas,
            group,
            regime: None,
            symbols,
            phase_slots,
            dof: Rational64::from_integer(0),
            notes: Vec::new(),
        };
        p.dof = Rational64::new(as_i64(p.active_users() * symbols), as_i64(users * rx_antennas * p.frame_slots()));
        p.notes = control_notes(&p);
        Ok(p)
    }

    pub fn with_regime(mut self, regime: Regime) -> Self {
        self.regime = Some(regime);
        self
    }

    pub fn rho(&self) -> f64 {
        self.tx_antennas as f64 / self.rx_antennas as f64
    }

    pub fn slots(&self, phase: usize) -> usize {
        self.phase_slots.get(phase).copied().unwrap_or(0)
    }

    /// Users carried by one simulated frame.
    pub fn active_users(&self) -> usize {
        match self.scheme {
            Scheme::Ria => self.group,
            _ => self.users,
        }
    }

    /// Slots of one frame over the active users.
    pub fn frame_slots(&self) -> usize {
        let (s1, s2, s3) = (self.slots(0), self.slots(1), self.slots(2));
        match self.scheme {
            Scheme::Ria => s1 + s2,
            Scheme::Tg => self.users * s1 + binomial(self.users, self.group) * s2,
            Scheme::Psr3 => s1 + 3 * s2 + s3,
        }
    }

    /// Total slots including time sharing over every group.
    pub fn tau(&self) -> usize {
        match self.scheme {
            Scheme::Ria => binomial(self.users, self.group) * self.frame_slots(),
            _ => self.frame_slots(),
        }
    }

    pub fn dof_f64(&self) -> f64 {
        *self.dof.numer() as f64 / *self.dof.denom() as f64
    }

    /// Phase structure of one frame over users `0..active_users()`.
    pub fn layout(&self) -> FrameLayout {
        let users = self.active_users();
        let all: Vec<usize> = (0..users).collect();
        let phases = match self.scheme {
            Scheme::Ria => vec![
                PhaseLayout { slots: self.slots(0), rounds: vec![all.clone()] },
                PhaseLayout { slots: self.slots(1), rounds: vec![all] },
            ],
            Scheme::Tg => vec![
                PhaseLayout { slots: self.slots(0), rounds: (0..users).map(|i| vec![i]).collect() },
                PhaseLayout { slots: self.slots(1), rounds: subsets(users, self.group) },
            ],
            Scheme::Psr3 => vec![
                PhaseLayout { slots: self.slots(0), rounds: vec![all.clone()] },
                PhaseLayout { slots: self.slots(1), rounds: vec![vec![0, 1], vec![0, 2], vec![1, 2]] },
                PhaseLayout { slots: self.slots(2), rounds: vec![all] },
            ],
        };
        FrameLayout { users, phases }
    }

    /// The same operating point over the real-lifted channel: antennas and
    /// symbols double, slots and DoF stay.
    pub fn lifted(&self) -> SchemeParams {
        let mut p = self.clone();
        p.tx_antennas *= 2;
        p.rx_antennas *= 2;
        p.symbols *= 2;
        p
    }
}

/// All `size`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(x + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Reduced fraction as `p/q`.
pub fn rational_string(r: &Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
