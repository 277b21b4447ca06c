//! Random channel ensembles over a multi-phase transmission frame.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{block_diag, zeros, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelMode {
    /// Fresh draw per slot.
    TimeVarying,
    /// One draw per link, repeated in every slot.
    Constant,
    /// Constant draw lifted to the real domain (asymmetric complex signaling).
    AcsReal,
}

/// One phase of the frame: every round uses `slots` slots and activates one
/// group of transmitters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseLayout {
    pub slots: usize,
    pub rounds: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameLayout {
    pub users: usize,
    pub phases: Vec<PhaseLayout>,
}

impl FrameLayout {
    pub fn total_slots(&self) -> usize {
        self.phases.iter().map(|p| p.slots * p.rounds.len()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.users == 0 || self.phases.is_empty() {
            return Err(Error::Dimension("layout needs users and at least one phase".into()));
        }
        for (p, phase) in self.phases.iter().enumerate() {
            if phase.slots == 0 || phase.rounds.is_empty() {
                return Err(Error::Dimension(format!("phase {p} has no slots or rounds")));
            }
            if phase.rounds.iter().flatten().any(|&u| u >= self.users) {
                return Err(Error::Dimension(format!("phase {p} names a user outside 0..{}", self.users)));
            }
        }
        Ok(())
    }
}

/// Per-slot channel blocks `H[j][i]` (receiver j, transmitter i) for every
/// phase, round and slot of a frame.
#[derive(Debug, Clone)]
pub struct ChannelEnsemble {
    mode: ChannelMode,
    tx_antennas: usize,
    rx_antennas: usize,
    layout: FrameLayout,
    seed: u64,
    // phase -> round -> slot -> link (j * users + i)
    blocks: Vec<Vec<Vec<Vec<CMatrix>>>>,
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. CN(0,1) entries.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Matrix with i.i.d. real N(0,1) entries, stored as complex.
pub fn real_gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let x: f64 = StandardNormal.sample(rng);
        Complex64::new(x, 0.0)
    })
}

pub fn generate_ensemble(layout: &FrameLayout, tx_antennas: usize, rx_antennas: usize, mode: ChannelMode, seed: u64) -> Result<ChannelEnsemble> {
    layout.validate()?;
    if tx_antennas == 0 || rx_antennas == 0 {
        return Err(Error::Dimension("antenna counts must be positive".into()));
    }
    if mode == ChannelMode::AcsReal {
        let base = generate_ensemble(layout, tx_antennas, rx_antennas, ChannelMode::Constant, seed)?;
        return acs_lift(&base);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let links = layout.users * layout.users;
    let fixed: Vec<CMatrix> = if mode == ChannelMode::Constant {
        (0..links).map(|_| gaussian_matrix(rx_antennas, tx_antennas, &mut rng)).collect()
    } else {
        Vec::new()
    };
    let blocks = layout
        .phases
        .iter()
        .map(|phase| {
            phase
                .rounds
                .iter()
                .map(|_| {
                    (0..phase.slots)
                        .map(|_| match mode {
                            ChannelMode::Constant => fixed.clone(),
                            _ => (0..links).map(|_| gaussian_matrix(rx_antennas, tx_antennas, &mut rng)).collect(),
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(ChannelEnsemble { mode, tx_antennas, rx_antennas, layout: layout.clone(), seed, blocks })
}

/// Maps each complex entry `h` to `[[Re h, -Im h], [Im h, Re h]]`, doubling
/// both dimensions. Vectors are realified by interleaving real and imaginary parts.
pub fn lift_matrix(m: &CMatrix) -> CMatrix {
    let mut out = zeros(2 * m.nrows(), 2 * m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let h = m[(r, c)];
            out[(2 * r, 2 * c)] = Complex64::new(h.re, 0.0);
            out[(2 * r, 2 * c + 1)] = Complex64::new(-h.im, 0.0);
            out[(2 * r + 1, 2 * c)] = Complex64::new(h.im, 0.0);
            out[(2 * r + 1, 2 * c + 1)] = Complex64::new(h.re, 0.0);
        }
    }
    out
}

pub fn acs_lift(ens: &ChannelEnsemble) -> Result<ChannelEnsemble> {
    if ens.mode == ChannelMode::AcsReal {
        return Err(Error::Domain("ensemble is already lifted".into()));
    }
    let blocks = ens
        .blocks
        .iter()
        .map(|rounds| rounds.iter().map(|slots| slots.iter().map(|links| links.iter().map(lift_matrix).collect()).collect()).collect())
        .collect();
    Ok(ChannelEnsemble {
        mode: ChannelMode::AcsReal,
        tx_antennas: 2 * ens.tx_antennas,
        rx_antennas: 2 * ens.rx_antennas,
        layout: ens.layout.clone(),
        seed: ens.seed,
        blocks,
    })
}

impl ChannelEnsemble {
    pub fn mode(&self) -> ChannelMode {
        self.mode
    }

    pub fn tx_antennas(&self) -> usize {
        self.tx_antennas
    }

    pub fn rx_antennas(&self) -> usize {
        self.rx_antennas
    }

    pub fn layout(&self) -> &FrameLayout {
        &self.layout
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_real(&self) -> bool {
        self.mode == ChannelMode::AcsReal
    }

    fn check(&self, phase: usize, round: usize, rx: usize, tx: usize) -> Result<()> {
        let users = self.layout.users;
        let ok = phase < self.blocks.len() && round < self.blocks[phase].len() && rx < users && tx < users;
        if ok {
            Ok(())
        } else {
            Err(Error::Dimension(format!("no channel for phase {phase} round {round} link {rx}<-{tx}")))
        }
    }

    /// Single-slot `N x M` block.
    pub fn slot_channel(&self, phase: usize, round: usize, slot: usize, rx: usize, tx: usize) -> Result<&CMatrix> {
        self.check(phase, round, rx, tx)?;
        self.blocks[phase][round]
            .get(slot)
            .map(|links| &links[rx * self.layout.users + tx])
            .ok_or_else(|| Error::Dimension(format!("slot {slot} out of range")))
    }

    /// Block-diagonal channel of a whole round, `N*S x M*S`.
    pub fn round_channel(&self, phase: usize, round: usize, rx: usize, tx: usize) -> Result<CMatrix> {
        self.check(phase, round, rx, tx)?;
        let link = rx * self.layout.users + tx;
        let parts: Vec<&CMatrix> = self.blocks[phase][round].iter().map(|links| &links[link]).collect();
        Ok(block_diag(&parts))
    }
}
