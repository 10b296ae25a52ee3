use crate::error::{Error, Result};
use crate::linalg::{block_diag, identity, zeros, CMatrix, C64};
use crate::sdof_theory::AntennaConfig;

use super::{phase_plan, PhasePlan, SchemeKind};

/// Row permutation `Pi`, stored as the row order of `Pi^T A`: row `i` of
/// `Pi^T A` is row `order[i]` of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    order: Vec<usize>,
}

impl Permutation {
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &i in &order {
            if i >= order.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Shape(format!("{order:?} is not a permutation")));
            }
        }
        Ok(Self { order })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The matrix `Pi`, with `Pi[order[i], i] = 1`.
    pub fn matrix(&self) -> CMatrix {
        let n = self.order.len();
        let mut p = zeros(n, n);
        for (i, &r) in self.order.iter().enumerate() {
            p[(r, i)] = C64::new(1.0, 0.0);
        }
        p
    }

    /// `Pi^T A`.
    pub fn permute_rows(&self, a: &CMatrix) -> CMatrix {
        crate::linalg::select_rows(a, &self.order)
    }

    /// Keeps the first `keep` rows of each `block`-row group (for
    /// `groups` groups), slot-ordered, followed by all other rows in their
    /// original order.
    fn leading_rows_per_block(block: usize, keep: usize, groups: usize) -> Self {
        let mut order: Vec<usize> = (0..groups)
            .flat_map(|s| (0..keep).map(move |r| s * block + r))
            .collect();
        let mut rest: Vec<usize> = (0..groups * block).filter(|i| i % block >= keep).collect();
        order.append(&mut rest);
        Self { order }
    }
}

/// One alignment precoder, `Theta` or `Phi`, together with its construction
/// data: `matrix * Pi = [diag(slot_block, ..., slot_block) 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentPrecoder {
    pub matrix: CMatrix,
    pub permutation: Permutation,
    /// Per-slot block `[I; 0]`, `m x k`.
    pub slot_block: CMatrix,
    /// Rows per slot of the observation the precoder acts on.
    pub rows_per_slot: usize,
    /// Leading rows of each slot that `Pi^T` moves to the top.
    pub kept_rows_per_slot: usize,
}

impl AlignmentPrecoder {
    /// * `m` transmit antennas
    /// * `rows_per_slot`, `observed_slots`: shape of the block-diagonal
    ///   observation being re-sent
    /// * `kept_rows_per_slot`: rows of each observed slot placed first by `Pi`
    /// * `output_slots`: slots of the phase that transmits the precoded signal
    /// * `block_cols`: columns of each `[I; 0]` block
    fn build(
        m: usize,
        rows_per_slot: usize,
        kept_rows_per_slot: usize,
        observed_slots: usize,
        output_slots: usize,
        block_cols: usize,
    ) -> Result<Self> {
        let inputs = rows_per_slot * observed_slots;
        let selected = kept_rows_per_slot * observed_slots;
        if kept_rows_per_slot > rows_per_slot || block_cols > m {
            return Err(Error::Shape(format!(
                "cannot keep {kept_rows_per_slot} of {rows_per_slot} rows with {block_cols} of {m} columns"
            )));
        }
        if block_cols * output_slots != selected || selected > inputs {
            return Err(Error::Shape(format!(
                "{output_slots} blocks of width {block_cols} cannot consume {selected} of {inputs} selected rows"
            )));
        }
        let mut slot_block = zeros(m, block_cols);
        slot_block
            .view_mut((0, 0), (block_cols, block_cols))
            .copy_from(&identity(block_cols));
        let diag = block_diag(&vec![slot_block.clone(); output_slots]);
        let mut padded = zeros(m * output_slots, inputs);
        padded.view_mut((0, 0), diag.shape()).copy_from(&diag);

        let permutation = Permutation::leading_rows_per_block(rows_per_slot, kept_rows_per_slot, observed_slots);
        // matrix = padded * Pi^T: column order[i] of matrix is column i of padded.
        let mut matrix = zeros(m * output_slots, inputs);
        for (i, &c) in permutation.order().iter().enumerate() {
            matrix.set_column(c, &padded.column(i));
        }
        Ok(Self {
            matrix,
            permutation,
            slot_block,
            rows_per_slot,
            kept_rows_per_slot,
        })
    }

    /// `matrix * Pi`.
    pub fn permuted(&self) -> CMatrix {
        &self.matrix * self.permutation.matrix()
    }

    /// Number of columns of the `diag(slot_block)` part of `matrix * Pi`.
    pub fn active_inputs(&self) -> usize {
        self.kept_rows_per_slot * (self.permutation.len() / self.rows_per_slot.max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Precoders {
    /// `Theta` re-sends receiver A's phase-1 noise observation in phase 2,
    /// `Phi` re-sends the eavesdropper's phase-2 observation in phase 3.
    Wiretap {
        theta: AlignmentPrecoder,
        phi: AlignmentPrecoder,
    },
    /// `spreading` places the `nA` confidential symbols of each phase-2 slot
    /// on the first `nA` transmit antennas.
    Partial {
        theta: AlignmentPrecoder,
        spreading: CMatrix,
    },
    Broadcast {
        theta_a: AlignmentPrecoder,
        theta_b: AlignmentPrecoder,
        phi_a: AlignmentPrecoder,
        phi_b: AlignmentPrecoder,
    },
}

impl Precoders {
    /// Every alignment precoder with its conventional name.
    pub fn named(&self) -> Vec<(&'static str, &AlignmentPrecoder)> {
        match self {
            Precoders::Wiretap { theta, phi } => vec![("theta", theta), ("phi", phi)],
            Precoders::Partial { theta, .. } => vec![("theta", theta)],
            Precoders::Broadcast {
                theta_a,
                theta_b,
                phi_a,
                phi_b,
            } => vec![
                ("theta_a", theta_a),
                ("theta_b", theta_b),
                ("phi_a", phi_a),
                ("phi_b", phi_b),
            ],
        }
    }
}

/// Canonical precoders for `kind`: per-slot blocks `[I; 0]` and permutations
/// that pick the leading rows of every slot.
pub fn build_precoders(kind: SchemeKind, cfg: AntennaConfig, plan: &PhasePlan) -> Result<Precoders> {
    let expected = phase_plan(kind, cfg)?;
    if &expected != plan {
        return Err(Error::Shape(format!(
            "plan {:?} does not belong to {kind} at {cfg}",
            plan.taus()
        )));
    }
    let eff = plan.effective_cfg();
    let (m, na, nb) = (eff.m as usize, eff.na as usize, eff.nb as usize);
    let t = plan.taus();
    Ok(match kind {
        SchemeKind::WiretapThreePhase => Precoders::Wiretap {
            theta: AlignmentPrecoder::build(m, na, m - nb, t[0], t[1], nb)?,
            phi: AlignmentPrecoder::build(m, nb, m - na, t[1], t[2], na)?,
        },
        SchemeKind::WiretapPartialTwoPhase => {
            let mut block = zeros(m, na);
            block.view_mut((0, 0), (na, na)).copy_from(&identity(na));
            Precoders::Partial {
                theta: AlignmentPrecoder::build(m, na, m - nb, t[0], t[1], nb)?,
                spreading: block_diag(&vec![block; t[1]]),
            }
        }
        SchemeKind::BccFourPhase | SchemeKind::MisoFourSlot => Precoders::Broadcast {
            theta_a: AlignmentPrecoder::build(m, na, m - nb, t[0], t[1], nb)?,
            theta_b: AlignmentPrecoder::build(m, nb, m - na, t[0], t[2], na)?,
            phi_a: AlignmentPrecoder::build(m, nb, m - na, t[1], t[3], na)?,
            phi_b: AlignmentPrecoder::build(m, na, m - nb, t[2], t[3], nb)?,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_model::{block_diag_channels, sample_states, Seed};

    fn cfg(m: u32, na: u32, nb: u32) -> AntennaConfig {
        AntennaConfig::new(m, na, nb).unwrap()
    }

    fn precoders(kind: SchemeKind, c: AntennaConfig) -> (PhasePlan, Precoders) {
        let plan = phase_plan(kind, c).unwrap();
        let p = build_precoders(kind, c, &plan).unwrap();
        (plan, p)
    }

    fn is_permutation_matrix(p: &CMatrix) -> bool {
        let unit = |z: &C64| *z == C64::new(1.0, 0.0);
        let zero = |z: &C64| *z == C64::new(0.0, 0.0);
        p.row_iter()
            .all(|r| r.iter().filter(|z| unit(z)).count() == 1 && r.iter().all(|z| unit(z) || zero(z)))
            && p.column_iter().all(|c| c.iter().filter(|z| unit(z)).count() == 1)
    }

    #[test]
    fn wiretap_shapes() {
        let (_, p) = precoders(SchemeKind::WiretapThreePhase, cfg(5, 3, 2));
        let Precoders::Wiretap { theta, phi } = p else { panic!() };
        assert_eq!(theta.matrix.shape(), (45, 18));
        assert_eq!(phi.matrix.shape(), (30, 18));
    }

    #[test]
    fn permutations_are_orthogonal() {
        for kind in [SchemeKind::WiretapThreePhase, SchemeKind::BccFourPhase] {
            let (_, p) = precoders(kind, cfg(5, 3, 2));
            for (_, pre) in p.named() {
                let pi = pre.permutation.matrix();
                assert!(is_permutation_matrix(&pi));
                assert_eq!(&pi * pi.adjoint(), identity(pi.nrows()));
            }
        }
    }

    #[test]
    fn precoder_times_permutation_is_block_diagonal_then_zero() {
        for kind in [SchemeKind::WiretapThreePhase, SchemeKind::BccFourPhase] {
            for c in [cfg(5, 3, 2), cfg(4, 3, 2), cfg(5, 2, 3), cfg(2, 1, 1)] {
                let (_, p) = precoders(kind, c);
                for (name, pre) in p.named() {
                    let permuted = pre.permuted();
                    let k = pre.slot_block.ncols();
                    let blocks = permuted.nrows() / pre.slot_block.nrows();
                    let diag = block_diag(&vec![pre.slot_block.clone(); blocks]);
                    assert_eq!(permuted.columns(0, blocks * k).into_owned(), diag, "{kind} {c} {name}");
                    assert!(permuted
                        .columns(blocks * k, permuted.ncols() - blocks * k)
                        .iter()
                        .all(|z| z.norm() == 0.0));
                    assert_eq!(pre.active_inputs(), blocks * k);
                }
            }
        }
    }

    #[test]
    fn miso_theta_is_first_unit_vector() {
        let (_, p) = precoders(SchemeKind::WiretapThreePhase, cfg(2, 1, 1));
        let Precoders::Wiretap { theta, .. } = p else { panic!() };
        assert_eq!(
            theta.matrix,
            CMatrix::from_column_slice(2, 1, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
        );
    }

    #[test]
    fn permuted_phase_one_channel_is_block_diagonal() {
        let c = cfg(5, 3, 2);
        let (plan, p) = precoders(SchemeKind::WiretapThreePhase, c);
        let Precoders::Wiretap { theta, .. } = p else { panic!() };
        let r = sample_states(c, plan.total(), Seed(4)).unwrap();
        let (h1, _) = block_diag_channels(&r, plan.phase_slots(0)).unwrap();
        let top = theta.permutation.permute_rows(&h1);
        let keep = 5 - 2;
        let leading = top.rows(0, 2 * plan.taus()[1]).into_owned();
        let expected = block_diag(
            &r.slots()[..plan.taus()[0]]
                .iter()
                .map(|s| s.h.rows(0, keep).into_owned())
                .collect::<Vec<_>>(),
        );
        assert_eq!(leading, expected);
    }

    #[test]
    fn mismatched_plan_rejected() {
        let plan = phase_plan(SchemeKind::BccFourPhase, cfg(5, 3, 2)).unwrap();
        assert!(build_precoders(SchemeKind::WiretapThreePhase, cfg(5, 3, 2), &plan).is_err());
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::from_order(vec![1, 0, 2]).is_ok());
        assert!(Permutation::from_order(vec![1, 1, 2]).is_err());
        assert!(Permutation::from_order(vec![0, 3]).is_err());
        assert_eq!(Permutation::identity(3).matrix(), identity(3));
    }
}
