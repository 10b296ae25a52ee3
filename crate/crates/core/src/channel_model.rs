//! Seeded i.i.d. Rayleigh channel realizations and the per-phase block
//! diagonal channel matrices built from them.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{block_diag, numeric_rank, vstack, CMatrix, C64};
use crate::sdof_theory::AntennaConfig;

/// Master seed. Sub-streams are derived, never drawn sequentially, so any
/// slot or trial can be regenerated on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

impl Seed {
    /// Independent child seed (SplitMix64 finalizer over seed and index).
    pub fn derive(self, index: u64) -> Seed {
        let mut z = self
            .0
            .wrapping_add(0x9E37_79B9_7F4A_7C15_u64.wrapping_mul(index.wrapping_add(1)));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Seed(z ^ (z >> 31))
    }

    /// RNG for stream `stream` of this seed.
    pub fn stream_rng(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }
}

/// One standard circularly-symmetric complex Gaussian sample, CN(0, 1).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows x cols` matrix of CN(0, 1) entries, drawn in row-major order.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let data: Vec<C64> = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    CMatrix::from_row_slice(rows, cols, &data)
}

/// Channels seen by the two receivers in one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotChannels {
    /// `nA x m`, transmitter to receiver A.
    pub h: CMatrix,
    /// `nB x m`, transmitter to receiver B.
    pub g: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    cfg: AntennaConfig,
    slots: Vec<SlotChannels>,
}

impl ChannelRealization {
    pub fn from_slots(cfg: AntennaConfig, slots: Vec<SlotChannels>) -> Result<Self> {
        let (m, na, nb) = (cfg.m as usize, cfg.na as usize, cfg.nb as usize);
        for (t, s) in slots.iter().enumerate() {
            if s.h.shape() != (na, m) || s.g.shape() != (nb, m) {
                return Err(Error::Shape(format!(
                    "slot {t}: H is {:?} and G is {:?}, expected ({na}, {m}) and ({nb}, {m})",
                    s.h.shape(),
                    s.g.shape()
                )));
            }
        }
        Ok(Self { cfg, slots })
    }

    pub fn cfg(&self) -> AntennaConfig {
        self.cfg
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[SlotChannels] {
        &self.slots
    }

    pub fn slot(&self, t: usize) -> Result<&SlotChannels> {
        self.slots.get(t).ok_or(Error::SlotOutOfRange {
            slot: t,
            len: self.slots.len(),
        })
    }

    /// New realization made of the listed slots, in the listed order.
    pub fn select(&self, slots: &[usize]) -> Result<Self> {
        let picked = slots
            .iter()
            .map(|&t| self.slot(t).cloned())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            cfg: self.cfg,
            slots: picked,
        })
    }

    /// Keeps only the first `m` transmit antennas of every slot.
    pub fn truncate_tx(&self, m: u32) -> Result<Self> {
        if m == 0 || m > self.cfg.m {
            return Err(Error::InvalidParameter(format!(
                "cannot keep {m} of {} transmit antennas",
                self.cfg.m
            )));
        }
        let cols = m as usize;
        let slots = self
            .slots
            .iter()
            .map(|s| SlotChannels {
                h: s.h.columns(0, cols).into_owned(),
                g: s.g.columns(0, cols).into_owned(),
            })
            .collect();
        Ok(Self {
            cfg: AntennaConfig { m, ..self.cfg },
            slots,
        })
    }

    pub fn to_dump(&self) -> RealizationDump {
        RealizationDump {
            m: self.cfg.m,
            na: self.cfg.na,
            nb: self.cfg.nb,
            slots: self
                .slots
                .iter()
                .map(|s| SlotDump {
                    h: matrix_rows(&s.h),
                    g: matrix_rows(&s.g),
                })
                .collect(),
        }
    }

    pub fn from_dump(dump: &RealizationDump) -> Result<Self> {
        let cfg = AntennaConfig::new(dump.m, dump.na, dump.nb)?;
        let slots = dump
            .slots
            .iter()
            .map(|s| {
                Ok(SlotChannels {
                    h: matrix_from_rows(&s.h)?,
                    g: matrix_from_rows(&s.g)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_slots(cfg, slots)
    }
}

/// JSON layout of a realization: slot-major, each matrix row-major with
/// complex entries as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationDump {
    pub m: u32,
    pub na: u32,
    pub nb: u32,
    pub slots: Vec<SlotDump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotDump {
    pub h: Vec<Vec<[f64; 2]>>,
    pub g: Vec<Vec<[f64; 2]>>,
}

fn matrix_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Shape("ragged matrix rows in dump".into()));
    }
    let data: Vec<C64> = rows
        .iter()
        .flat_map(|r| r.iter().map(|&[re, im]| C64::new(re, im)))
        .collect();
    Ok(CMatrix::from_row_slice(rows.len(), cols, &data))
}

/// Draws `n` slots of i.i.d. CN(0, 1) channels. Slot `t` is generated from
/// its own stream of `seed`, so every prefix is independent of `n`.
pub fn sample_states(cfg: AntennaConfig, n: usize, seed: Seed) -> Result<ChannelRealization> {
    if n == 0 {
        return Err(Error::InvalidParameter("a realization needs at least one slot".into()));
    }
    let (m, na, nb) = (cfg.m as usize, cfg.na as usize, cfg.nb as usize);
    let slots = (0..n)
        .map(|t| {
            let mut rng = seed.stream_rng(t as u64);
            let h = gaussian_matrix(&mut rng, na, m);
            let g = gaussian_matrix(&mut rng, nb, m);
            SlotChannels { h, g }
        })
        .collect();
    ChannelRealization::from_slots(cfg, slots)
}

/// `[H_t; G_t]`, shape `(nA + nB) x m`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix(CMatrix);

impl StateMatrix {
    pub fn new(matrix: CMatrix) -> Self {
        Self(matrix)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }
}

/// State matrix of slot `t` (zero-based).
pub fn state_matrix(realization: &ChannelRealization, t: usize) -> Result<StateMatrix> {
    let s = realization.slot(t)?;
    Ok(StateMatrix(vstack(&[&s.h, &s.g])?))
}

/// Whether the numerical rank of `S` reaches `min(rows, cols)`, which for a
/// state matrix is `min(m, nA + nB)`.
pub fn check_full_rank(s: &StateMatrix, tol: f64) -> bool {
    let m = s.matrix();
    numeric_rank(m, tol) == m.nrows().min(m.ncols())
}

/// `(diag{H_t}, diag{G_t})` over `slots`, in slot order.
pub fn block_diag_channels(realization: &ChannelRealization, slots: Range<usize>) -> Result<(CMatrix, CMatrix)> {
    if slots.is_empty() {
        return Err(Error::EmptySlotRange);
    }
    if slots.end > realization.len() {
        return Err(Error::SlotOutOfRange {
            slot: slots.end - 1,
            len: realization.len(),
        });
    }
    let picked = &realization.slots()[slots];
    let h: Vec<CMatrix> = picked.iter().map(|s| s.h.clone()).collect();
    let g: Vec<CMatrix> = picked.iter().map(|s| s.g.clone()).collect();
    Ok((block_diag(&h), block_diag(&g)))
}
