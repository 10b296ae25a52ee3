//! Artificial-noise-alignment (ANA) transmission schemes built as explicit
//! precoders and effective block channel matrices.
//!
//! Every scheme sends artificial noise `u` in phase 1 and confidential
//! symbols mixed with precoded copies of past noiseless observations
//! afterwards. Thermal noise is not part of these matrices; the analysis
//! module adds it as an identity covariance.

mod assembly;
mod precoders;
mod transmit;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sdof_theory::AntennaConfig;

pub use assembly::{build_scheme, sample_scheme, EffectiveChannel, SchemeMatrices, SchemeStructure, SignalDims};
pub use precoders::{build_precoders, AlignmentPrecoder, Permutation, Precoders};
pub use transmit::transmit_signals;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Three-phase wiretap scheme, delayed CSIT on both channels.
    WiretapThreePhase,
    /// First two phases only, delayed CSIT on the legitimate channel.
    WiretapPartialTwoPhase,
    /// Four-phase scheme carrying one confidential message per receiver.
    BccFourPhase,
    /// The four-slot MISO example with `(m, nA, nB) = (2, 1, 1)`.
    MisoFourSlot,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::WiretapThreePhase,
        SchemeKind::WiretapPartialTwoPhase,
        SchemeKind::BccFourPhase,
        SchemeKind::MisoFourSlot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::WiretapThreePhase => "wiretap3",
            SchemeKind::WiretapPartialTwoPhase => "partial2",
            SchemeKind::BccFourPhase => "bcc4",
            SchemeKind::MisoFourSlot => "miso4",
        }
    }

    /// Confidential messages carried, in receiver order.
    pub fn messages(self) -> &'static [Message] {
        match self {
            SchemeKind::WiretapThreePhase | SchemeKind::WiretapPartialTwoPhase => &[Message::A],
            SchemeKind::BccFourPhase | SchemeKind::MisoFourSlot => &[Message::A, Message::B],
        }
    }

    pub fn is_broadcast(self) -> bool {
        self.messages().len() == 2
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown scheme '{s}' (expected wiretap3, partial2, bcc4 or miso4)"))
    }
}

impl Serialize for SchemeKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for SchemeKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A confidential message, named after its intended receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Message {
    A,
    B,
}

impl Message {
    pub fn name(self) -> &'static str {
        match self {
            Message::A => "A",
            Message::B => "B",
        }
    }

    pub fn other(self) -> Message {
        match self {
            Message::A => Message::B,
            Message::B => Message::A,
        }
    }
}

/// Independent Gaussian symbol blocks fed to a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    /// The artificial noise `u`.
    Noise,
    /// Confidential symbols for one receiver (`v`, `vA` or `vB`).
    Message(Message),
}

/// Column layout of the stacked source vector `[u; v]` or `[u; vA; vB]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceLayout {
    entries: Vec<(Source, Range<usize>)>,
}

impl SourceLayout {
    pub fn new(blocks: &[(Source, usize)]) -> Self {
        let mut start = 0;
        let entries = blocks
            .iter()
            .map(|&(s, len)| {
                let r = start..start + len;
                start += len;
                (s, r)
            })
            .collect();
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.last().map_or(0, |(_, r)| r.end)
    }

    pub fn sources(&self) -> impl Iterator<Item = Source> + '_ {
        self.entries.iter().map(|(s, _)| *s)
    }

    pub fn range(&self, source: Source) -> Option<Range<usize>> {
        self.entries.iter().find(|(s, _)| *s == source).map(|(_, r)| r.clone())
    }

    /// Column indices of every source not listed in `excluded`.
    pub fn columns_excluding(&self, excluded: &[Source]) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|(s, _)| !excluded.contains(s))
            .flat_map(|(_, r)| r.clone())
            .collect()
    }
}

/// Phase lengths `tau_1, ..., tau_k` of one scheme instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhasePlan {
    taus: Vec<usize>,
    effective: AntennaConfig,
}

impl PhasePlan {
    pub fn taus(&self) -> &[usize] {
        &self.taus
    }

    pub fn total(&self) -> usize {
        self.taus.iter().sum()
    }

    /// Antenna configuration the plan was computed for (`m` capped at
    /// `nA + nB`).
    pub fn effective_cfg(&self) -> AntennaConfig {
        self.effective
    }

    /// Slots of phase `i` (zero-based).
    pub fn phase_slots(&self, i: usize) -> Range<usize> {
        let start: usize = self.taus[..i].iter().sum();
        start..start + self.taus[i]
    }
}

/// Phase lengths for `kind`. Transmit antennas beyond `nA + nB` are dropped
/// before the tables are evaluated.
pub fn phase_plan(kind: SchemeKind, cfg: AntennaConfig) -> Result<PhasePlan> {
    let unsupported = || Error::UnsupportedConfig { kind: kind.name(), cfg };
    if kind == SchemeKind::MisoFourSlot {
        if (cfg.m, cfg.na, cfg.nb) != (2, 1, 1) {
            return Err(unsupported());
        }
        return Ok(PhasePlan {
            taus: vec![1, 1, 1, 1],
            effective: cfg,
        });
    }
    if !cfg.exceeds_receivers() {
        return Err(unsupported());
    }
    let effective = cfg.capped();
    let (m, na, nb) = (effective.m as usize, effective.na as usize, effective.nb as usize);
    let taus = match kind {
        SchemeKind::WiretapThreePhase => vec![na * nb, na * (m - nb), (m - na) * (m - nb)],
        SchemeKind::WiretapPartialTwoPhase => vec![na * nb, na * (m - nb)],
        SchemeKind::BccFourPhase => {
            vec![na * nb, na * (m - nb), nb * (m - na), (m - na) * (m - nb)]
        }
        SchemeKind::MisoFourSlot => unreachable!(),
    };
    Ok(PhasePlan { taus, effective })
}
