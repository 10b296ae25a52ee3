use serde::{Deserialize, Serialize};

use crate::channel_model::{block_diag_channels, sample_states, ChannelRealization, Seed};
use crate::error::{Error, Result};
use crate::linalg::{block_diag, identity, scale_rows, select_rows, zeros, BlockGrid, BlockStructure, CMatrix};
use crate::sdof_theory::AntennaConfig;

use super::precoders::{build_precoders, Precoders};
use super::transmit::{slot_gains, transmit_map};
use super::{phase_plan, Message, PhasePlan, SchemeKind, Source, SourceLayout};

/// Dimensions of the artificial noise and of each confidential symbol block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalDims {
    pub noise: usize,
    pub message_a: usize,
    /// Zero for the wiretap schemes.
    pub message_b: usize,
}

/// One receiver's effective channel: `matrix` acts on the column blocks
/// obtained from the stacked source vector through `lift`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    pub matrix: CMatrix,
    pub structure: BlockStructure,
    pub lift: CMatrix,
    /// Position of each row of `matrix` in the slot-ordered stacked
    /// observation of this receiver.
    pub row_order: Vec<usize>,
    /// Receive antennas per slot.
    pub antennas: usize,
}

impl EffectiveChannel {
    /// Slot index of each row of `matrix`.
    pub fn row_slots(&self) -> Vec<usize> {
        self.row_order.iter().map(|r| r / self.antennas).collect()
    }

    pub fn is_square(&self) -> bool {
        self.matrix.is_square()
    }

    /// `matrix * lift`: noiseless observation as a function of the sources,
    /// before power normalization.
    pub fn source_map(&self) -> CMatrix {
        &self.matrix * &self.lift
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeMatrices {
    pub kind: SchemeKind,
    /// Configuration as requested (before capping `m`).
    pub cfg: AntennaConfig,
    pub plan: PhasePlan,
    /// The `plan.total()` slots used, restricted to the effective antennas.
    pub realization: ChannelRealization,
    /// `H~_i` for every phase.
    pub phase_h: Vec<CMatrix>,
    /// `G~_i` for every phase.
    pub phase_g: Vec<CMatrix>,
    pub precoders: Precoders,
    /// Receiver A: `He` or `He_bcc`.
    pub effective_legit: EffectiveChannel,
    /// Receiver B: `Ge` or `Ge_bcc`.
    pub effective_eaves: EffectiveChannel,
    pub sources: SourceLayout,
    /// Stacked transmit vectors `[x_1; ...; x_n]` as a linear map of the
    /// sources, without power normalization.
    pub transmit: CMatrix,
    /// Per-slot amplitude factors applied to `x_t`.
    pub slot_gains: Vec<f64>,
    pub signal_dims: SignalDims,
}

impl SchemeMatrices {
    pub fn effective(&self, rx: Message) -> &EffectiveChannel {
        match rx {
            Message::A => &self.effective_legit,
            Message::B => &self.effective_eaves,
        }
    }

    /// Variance of each source symbol at total power `p`.
    pub fn symbol_power(&self, p: f64) -> f64 {
        p / self.plan.effective_cfg().m as f64
    }

    /// Noiseless observation of `rx` as a map of the sources, assembled from
    /// the effective block matrix and the slot gains. Rows follow the block
    /// matrix.
    pub fn observation(&self, rx: Message) -> CMatrix {
        let eff = self.effective(rx);
        let gains: Vec<f64> = eff.row_slots().iter().map(|&t| self.slot_gains[t]).collect();
        scale_rows(&eff.source_map(), &gains)
    }

    /// Same quantity as [`SchemeMatrices::observation`], computed by passing
    /// the transmit vectors through the per-slot channels.
    pub fn observation_from_transmit(&self, rx: Message) -> CMatrix {
        let channels: Vec<CMatrix> = self
            .realization
            .slots()
            .iter()
            .map(|s| match rx {
                Message::A => s.h.clone(),
                Message::B => s.g.clone(),
            })
            .collect();
        let m = self.plan.effective_cfg().m as usize;
        let gains: Vec<f64> = (0..self.transmit.nrows()).map(|r| self.slot_gains[r / m]).collect();
        let received = block_diag(&channels) * scale_rows(&self.transmit, &gains);
        select_rows(&received, &self.effective(rx).row_order)
    }

    pub fn structure(&self) -> SchemeStructure {
        let channel = |e: &EffectiveChannel| ChannelStructure {
            shape: [e.matrix.nrows(), e.matrix.ncols()],
            blocks: e.structure.clone(),
        };
        SchemeStructure {
            kind: self.kind,
            cfg: self.cfg,
            effective_cfg: self.plan.effective_cfg(),
            taus: self.plan.taus().to_vec(),
            signal_dims: self.signal_dims,
            precoders: self
                .precoders
                .named()
                .into_iter()
                .map(|(name, p)| NamedShape {
                    name: name.to_string(),
                    shape: [p.matrix.nrows(), p.matrix.ncols()],
                })
                .collect(),
            legit: channel(&self.effective_legit),
            eaves: channel(&self.effective_eaves),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedShape {
    pub name: String,
    pub shape: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelStructure {
    pub shape: [usize; 2],
    pub blocks: BlockStructure,
}

/// Shapes and sparsity masks of a scheme instance, for golden-file checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeStructure {
    pub kind: SchemeKind,
    pub cfg: AntennaConfig,
    pub effective_cfg: AntennaConfig,
    pub taus: Vec<usize>,
    pub signal_dims: SignalDims,
    pub precoders: Vec<NamedShape>,
    pub legit: ChannelStructure,
    pub eaves: ChannelStructure,
}

/// Plan, precoders and a fresh channel realization for `kind` at `cfg`.
pub fn sample_scheme(kind: SchemeKind, cfg: AntennaConfig, seed: Seed) -> Result<SchemeMatrices> {
    let plan = phase_plan(kind, cfg)?;
    let precoders = build_precoders(kind, cfg, &plan)?;
    let realization = sample_states(plan.effective_cfg(), plan.total(), seed)?;
    build_scheme(kind, cfg, &realization, precoders)
}

/// Assembles the effective block channels of `kind` on the first
/// `plan.total()` slots of `realization`. The realization may be drawn for
/// `cfg` itself or for the capped configuration.
pub fn build_scheme(
    kind: SchemeKind,
    cfg: AntennaConfig,
    realization: &ChannelRealization,
    precoders: Precoders,
) -> Result<SchemeMatrices> {
    let plan = phase_plan(kind, cfg)?;
    let eff = plan.effective_cfg();
    let realization = if realization.cfg() == eff {
        realization.clone()
    } else if realization.cfg() == cfg {
        realization.truncate_tx(eff.m)?
    } else {
        return Err(Error::ConfigMismatch {
            expected: cfg,
            found: realization.cfg(),
        });
    };
    if realization.len() < plan.total() {
        return Err(Error::RealizationTooShort {
            needed: plan.total(),
            available: realization.len(),
        });
    }
    let realization = realization.select(&(0..plan.total()).collect::<Vec<_>>())?;

    let (mut phase_h, mut phase_g) = (Vec::new(), Vec::new());
    for i in 0..plan.taus().len() {
        let slots = plan.phase_slots(i);
        let (h, g) = if slots.is_empty() {
            (zeros(0, 0), zeros(0, 0))
        } else {
            block_diag_channels(&realization, slots)?
        };
        phase_h.push(h);
        phase_g.push(g);
    }

    let (m, na, nb) = (eff.m as usize, eff.na as usize, eff.nb as usize);
    let t = plan.taus();
    let signal_dims = match kind {
        SchemeKind::WiretapThreePhase => SignalDims {
            noise: m * t[0],
            message_a: m * t[1],
            message_b: 0,
        },
        SchemeKind::WiretapPartialTwoPhase => SignalDims {
            noise: m * t[0],
            message_a: na * t[1],
            message_b: 0,
        },
        SchemeKind::BccFourPhase | SchemeKind::MisoFourSlot => SignalDims {
            noise: m * t[0],
            message_a: m * t[1],
            message_b: m * t[2],
        },
    };
    let mut blocks = vec![
        (Source::Noise, signal_dims.noise),
        (Source::Message(Message::A), signal_dims.message_a),
    ];
    if kind.is_broadcast() {
        blocks.push((Source::Message(Message::B), signal_dims.message_b));
    }
    let sources = SourceLayout::new(&blocks);

    let ctx = Ctx {
        plan: &plan,
        h: &phase_h,
        g: &phase_g,
        na,
        nb,
    };
    let (effective_legit, effective_eaves) = match (kind, &precoders) {
        (SchemeKind::WiretapThreePhase, Precoders::Wiretap { theta, phi }) => {
            ctx.wiretap(&theta.matrix, &phi.matrix)?
        }
        (SchemeKind::WiretapPartialTwoPhase, Precoders::Partial { theta, spreading }) => {
            ctx.partial(&theta.matrix, spreading)?
        }
        (
            SchemeKind::BccFourPhase | SchemeKind::MisoFourSlot,
            Precoders::Broadcast {
                theta_a,
                theta_b,
                phi_a,
                phi_b,
            },
        ) => ctx.broadcast(&theta_a.matrix, &theta_b.matrix, &phi_a.matrix, &phi_b.matrix)?,
        _ => return Err(Error::Shape(format!("precoders do not belong to scheme {kind}"))),
    };

    let transmit = transmit_map(kind, &plan, &realization, &phase_h, &phase_g, &precoders, &sources)?;
    let slot_gains = slot_gains(&transmit, m);

    Ok(SchemeMatrices {
        kind,
        cfg,
        plan,
        realization,
        phase_h,
        phase_g,
        precoders,
        effective_legit,
        effective_eaves,
        sources,
        transmit,
        slot_gains,
        signal_dims,
    })
}

struct Ctx<'a> {
    plan: &'a PhasePlan,
    h: &'a [CMatrix],
    g: &'a [CMatrix],
    na: usize,
    nb: usize,
}

impl Ctx<'_> {
    fn m(&self) -> usize {
        self.plan.effective_cfg().m as usize
    }

    fn tau(&self, i: usize) -> usize {
        self.plan.taus()[i]
    }

    fn in_order(&self, antennas: usize, matrix: CMatrix, structure: BlockStructure, lift: CMatrix) -> EffectiveChannel {
        EffectiveChannel {
            row_order: (0..matrix.nrows()).collect(),
            matrix,
            structure,
            lift,
            antennas,
        }
    }

    fn wiretap(&self, theta: &CMatrix, phi: &CMatrix) -> Result<(EffectiveChannel, EffectiveChannel)> {
        let (m, na, nb) = (self.m(), self.na, self.nb);
        let (h, g) = (self.h, self.g);
        let (t1, t2, t3) = (self.tau(0), self.tau(1), self.tau(2));

        let h2_theta = &h[1] * theta;
        let h3_phi_g2 = &h[2] * phi * &g[1];
        let mut he = BlockGrid::new(&[na * t1, na * t2, na * t3], &[na * t1, m * t2]);
        he.set(0, 0, &identity(na * t1))?
            .set(1, 0, &h2_theta)?
            .set(1, 1, &h[1])?
            .set(2, 0, &(&h3_phi_g2 * theta))?
            .set(2, 1, &h3_phi_g2)?;
        let (he, he_s) = he.finish();
        let legit = self.in_order(na, he, he_s, block_diag(&[h[0].clone(), identity(m * t2)]));

        let g2_theta_h1 = &g[1] * theta * &h[0];
        let g3_phi = &g[2] * phi;
        let mut ge = BlockGrid::new(&[nb * t1, nb * t2, nb * t3], &[m * t1, nb * t2]);
        ge.set(0, 0, &g[0])?
            .set(1, 0, &g2_theta_h1)?
            .set(1, 1, &identity(nb * t2))?
            .set(2, 0, &(&g3_phi * &g2_theta_h1))?
            .set(2, 1, &g3_phi)?;
        let (ge, ge_s) = ge.finish();
        let eaves = self.in_order(nb, ge, ge_s, block_diag(&[identity(m * t1), g[1].clone()]));
        Ok((legit, eaves))
    }

    fn partial(&self, theta: &CMatrix, spreading: &CMatrix) -> Result<(EffectiveChannel, EffectiveChannel)> {
        let (m, na, nb) = (self.m(), self.na, self.nb);
        let (h, g) = (self.h, self.g);
        let (t1, t2) = (self.tau(0), self.tau(1));

        let mut he = BlockGrid::new(&[na * t1, na * t2], &[na * t1, na * t2]);
        he.set(0, 0, &identity(na * t1))?
            .set(1, 0, &(&h[1] * theta))?
            .set(1, 1, &(&h[1] * spreading))?;
        let (he, he_s) = he.finish();
        let legit = self.in_order(na, he, he_s, block_diag(&[h[0].clone(), identity(na * t2)]));

        let mut ge = BlockGrid::new(&[nb * t1, nb * t2], &[m * t1, nb * t2]);
        ge.set(0, 0, &g[0])?
            .set(1, 0, &(&g[1] * theta * &h[0]))?
            .set(1, 1, &identity(nb * t2))?;
        let (ge, ge_s) = ge.finish();
        let eaves = self.in_order(nb, ge, ge_s, block_diag(&[identity(m * t1), &g[1] * spreading]));
        Ok((legit, eaves))
    }

    fn broadcast(
        &self,
        theta_a: &CMatrix,
        theta_b: &CMatrix,
        phi_a: &CMatrix,
        phi_b: &CMatrix,
    ) -> Result<(EffectiveChannel, EffectiveChannel)> {
        let (m, na, nb) = (self.m(), self.na, self.nb);
        let (h, g) = (self.h, self.g);
        let (t1, t2, t3, t4) = (self.tau(0), self.tau(1), self.tau(2), self.tau(3));
        let (du, da, db) = (m * t1, m * t2, m * t3);

        // Receiver A, rows [phase 2, phase 4, phase 1, phase 3], columns
        // [vA, H~1 u, H~3 x3].
        let h4_phia_g2 = &h[3] * phi_a * &g[1];
        let mut he = BlockGrid::new(&[na * t2, na * t4, na * t1, na * t3], &[da, na * t1, na * t3]);
        he.set(0, 0, &h[1])?
            .set(0, 1, &(&h[1] * theta_a))?
            .set(1, 0, &h4_phia_g2)?
            .set(1, 1, &(&h4_phia_g2 * theta_a))?
            .set(1, 2, &(&h[3] * phi_b))?
            .set(2, 1, &identity(na * t1))?
            .set(3, 2, &identity(na * t3))?;
        let (he, he_s) = he.finish();
        let mut lift_a = BlockGrid::new(&[da, na * t1, na * t3], &[du, da, db]);
        lift_a
            .set(0, 1, &identity(da))?
            .set(1, 0, &h[0])?
            .set(2, 0, &(&h[2] * theta_b * &g[0]))?
            .set(2, 2, &h[2])?;
        let slot_rows = |antennas: usize, phase: usize| {
            let r = self.plan.phase_slots(phase);
            antennas * r.start..antennas * r.end
        };
        let row_order = [1, 3, 0, 2].into_iter().flat_map(|p| slot_rows(na, p)).collect();
        let legit = EffectiveChannel {
            matrix: he,
            structure: he_s,
            lift: lift_a.finish().0,
            row_order,
            antennas: na,
        };

        // Receiver B, rows in phase order, columns [vB, G~1 u, G~2 x2].
        let g4_phib_h3 = &g[3] * phi_b * &h[2];
        let mut ge = BlockGrid::new(&[nb * t1, nb * t2, nb * t3, nb * t4], &[db, nb * t1, nb * t2]);
        ge.set(0, 1, &identity(nb * t1))?
            .set(1, 2, &identity(nb * t2))?
            .set(2, 0, &g[2])?
            .set(2, 1, &(&g[2] * theta_b))?
            .set(3, 0, &g4_phib_h3)?
            .set(3, 1, &(&g4_phib_h3 * theta_b))?
            .set(3, 2, &(&g[3] * phi_a))?;
        let (ge, ge_s) = ge.finish();
        let mut lift_b = BlockGrid::new(&[db, nb * t1, nb * t2], &[du, da, db]);
        lift_b
            .set(0, 2, &identity(db))?
            .set(1, 0, &g[0])?
            .set(2, 0, &(&g[1] * theta_a * &h[0]))?
            .set(2, 1, &g[1])?;
        let eaves = self.in_order(nb, ge, ge_s, lift_b.finish().0);
        Ok((legit, eaves))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(m: u32, na: u32, nb: u32) -> AntennaConfig {
        AntennaConfig::new(m, na, nb).unwrap()
    }

    fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        assert_eq!(a.shape(), b.shape());
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn wiretap_effective_shapes() {
        let s = sample_scheme(SchemeKind::WiretapThreePhase, cfg(5, 3, 2), Seed(1)).unwrap();
        assert_eq!(s.effective_legit.matrix.shape(), (63, 63));
        assert_eq!(s.effective_eaves.matrix.shape(), (42, 48));
        assert_eq!(s.sources.dim(), 75);
        assert!(s.effective_legit.structure.zero_blocks_hold(&s.effective_legit.matrix));
        assert!(s.effective_eaves.structure.zero_blocks_hold(&s.effective_eaves.matrix));
        let top_right = s.effective_legit.matrix.view((0, 18), (18, 45));
        assert!(top_right.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn bcc_effective_shapes() {
        let s = sample_scheme(SchemeKind::BccFourPhase, cfg(5, 3, 2), Seed(1)).unwrap();
        assert_eq!(s.effective_legit.matrix.shape(), (75, 75));
        assert_eq!(s.effective_eaves.matrix.shape(), (50, 50));
        assert_eq!(
            s.signal_dims,
            SignalDims {
                noise: 30,
                message_a: 45,
                message_b: 20
            }
        );
    }

    #[test]
    fn display_and_transmit_routes_agree() {
        for (kind, c) in [
            (SchemeKind::WiretapThreePhase, cfg(5, 3, 2)),
            (SchemeKind::WiretapThreePhase, cfg(2, 1, 1)),
            (SchemeKind::WiretapPartialTwoPhase, cfg(4, 3, 2)),
            (SchemeKind::BccFourPhase, cfg(5, 3, 2)),
            (SchemeKind::BccFourPhase, cfg(5, 2, 3)),
            (SchemeKind::MisoFourSlot, cfg(2, 1, 1)),
        ] {
            let s = sample_scheme(kind, c, Seed(11)).unwrap();
            for rx in [Message::A, Message::B] {
                let a = s.observation(rx);
                let b = s.observation_from_transmit(rx);
                let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
                assert!(max_abs_diff(&a, &b) <= 1e-10 * scale, "{kind} {c} {rx:?}");
            }
        }
    }

    #[test]
    fn extra_antennas_are_dropped() {
        let big = cfg(7, 3, 2);
        let plan = phase_plan(SchemeKind::WiretapThreePhase, big).unwrap();
        let pre = build_precoders(SchemeKind::WiretapThreePhase, big, &plan).unwrap();
        let r = sample_states(big, plan.total(), Seed(3)).unwrap();
        let s = build_scheme(SchemeKind::WiretapThreePhase, big, &r, pre).unwrap();
        assert_eq!(s.realization.cfg(), cfg(5, 3, 2));
        assert_eq!(s.effective_legit.matrix.shape(), (63, 63));
        assert_eq!(s.realization.slots()[0].h, r.slots()[0].h.columns(0, 5).into_owned());
    }

    #[test]
    fn short_or_mismatched_realizations_rejected() {
        let c = cfg(5, 3, 2);
        let plan = phase_plan(SchemeKind::WiretapThreePhase, c).unwrap();
        let pre = build_precoders(SchemeKind::WiretapThreePhase, c, &plan).unwrap();
        let short = sample_states(c, 20, Seed(3)).unwrap();
        assert_eq!(
            build_scheme(SchemeKind::WiretapThreePhase, c, &short, pre.clone()),
            Err(Error::RealizationTooShort {
                needed: 21,
                available: 20
            })
        );
        let other = sample_states(cfg(5, 2, 2), 21, Seed(3)).unwrap();
        assert!(matches!(
            build_scheme(SchemeKind::WiretapThreePhase, c, &other, pre.clone()),
            Err(Error::ConfigMismatch { .. })
        ));
        let r = sample_states(c, 25, Seed(3)).unwrap();
        assert!(build_scheme(SchemeKind::BccFourPhase, c, &r, pre).is_err());
    }

    #[test]
    fn gains_bound_expected_slot_power() {
        let s = sample_scheme(SchemeKind::BccFourPhase, cfg(5, 3, 2), Seed(5)).unwrap();
        let m = 5;
        for (t, &c) in s.slot_gains.iter().enumerate() {
            let rows = s.transmit.rows(t * m, m);
            let power = c * c * rows.iter().map(|z| z.norm_sqr()).sum::<f64>() / m as f64;
            assert!(power <= 1.0 + 1e-12);
            assert!(c > 0.0 && c <= 1.0);
        }
        assert_relative_eq!(s.slot_gains[0], 1.0);
    }
}
