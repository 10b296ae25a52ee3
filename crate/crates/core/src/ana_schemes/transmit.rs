use nalgebra::DVector;

use crate::channel_model::{complex_gaussian, ChannelRealization, Seed};
use crate::error::{Error, Result};
use crate::linalg::{vstack, zeros, CMatrix, C64};

use super::assembly::SchemeMatrices;
use super::precoders::Precoders;
use super::{Message, PhasePlan, SchemeKind, Source, SourceLayout};

/// Rows of the identity picking `source` out of the stacked source vector.
fn pick(layout: &SourceLayout, source: Source) -> Result<CMatrix> {
    let range = layout
        .range(source)
        .ok_or_else(|| Error::InvalidSource(format!("{source:?} is not part of this scheme")))?;
    let mut out = zeros(range.len(), layout.dim());
    for (i, c) in range.enumerate() {
        out[(i, c)] = C64::new(1.0, 0.0);
    }
    Ok(out)
}

/// Stacked transmit vectors `[x_1; ...; x_n]` as a linear map of the
/// sources, following each phase's transmit rule.
pub(super) fn transmit_map(
    kind: SchemeKind,
    plan: &PhasePlan,
    realization: &ChannelRealization,
    h: &[CMatrix],
    g: &[CMatrix],
    precoders: &Precoders,
    layout: &SourceLayout,
) -> Result<CMatrix> {
    let u = pick(layout, Source::Noise)?;
    let va = pick(layout, Source::Message(Message::A))?;
    let shape_err = || Error::Shape(format!("precoders do not belong to scheme {kind}"));
    let phases = match (kind, precoders) {
        (SchemeKind::MisoFourSlot, _) => return miso_transmit_map(plan, realization, layout),
        (SchemeKind::WiretapThreePhase, Precoders::Wiretap { theta, phi }) => {
            let x2 = va + &theta.matrix * &h[0] * &u;
            let x3 = &phi.matrix * &g[1] * &x2;
            vec![u, x2, x3]
        }
        (SchemeKind::WiretapPartialTwoPhase, Precoders::Partial { theta, spreading }) => {
            let x2 = spreading * va + &theta.matrix * &h[0] * &u;
            vec![u, x2]
        }
        (
            SchemeKind::BccFourPhase,
            Precoders::Broadcast {
                theta_a,
                theta_b,
                phi_a,
                phi_b,
            },
        ) => {
            let vb = pick(layout, Source::Message(Message::B))?;
            let x2 = va + &theta_a.matrix * &h[0] * &u;
            let x3 = vb + &theta_b.matrix * &g[0] * &u;
            let x4 = &phi_a.matrix * &g[1] * &x2 + &phi_b.matrix * &h[2] * &x3;
            vec![u, x2, x3, x4]
        }
        _ => return Err(shape_err()),
    };
    vstack(&phases.iter().collect::<Vec<_>>())
}

/// The four transmit vectors of the two-antenna example written out entry by
/// entry from the slot channels `h_t^T`, `g_t^T`.
fn miso_transmit_map(plan: &PhasePlan, realization: &ChannelRealization, layout: &SourceLayout) -> Result<CMatrix> {
    if plan.taus() != [1, 1, 1, 1] || layout.dim() != 6 {
        return Err(Error::Shape("the four-slot scheme needs (2, 1, 1)".into()));
    }
    let row = |t: usize, rx: Message| -> Result<[C64; 2]> {
        let s = realization.slot(t)?;
        let v = match rx {
            Message::A => &s.h,
            Message::B => &s.g,
        };
        Ok([v[(0, 0)], v[(0, 1)]])
    };
    let (h1, g1, g2, h3) = (
        row(0, Message::A)?,
        row(0, Message::B)?,
        row(1, Message::B)?,
        row(2, Message::A)?,
    );
    // Columns: u1 u2 vA1 vA2 vB1 vB2.
    let one = C64::new(1.0, 0.0);
    let mut t = zeros(8, 6);
    t[(0, 0)] = one;
    t[(1, 1)] = one;
    // x2 = vA + [h1^T u; 0]
    t[(2, 2)] = one;
    t[(3, 3)] = one;
    t[(2, 0)] = h1[0];
    t[(2, 1)] = h1[1];
    // x3 = vB + [g1^T u; 0]
    t[(4, 4)] = one;
    t[(5, 5)] = one;
    t[(4, 0)] = g1[0];
    t[(4, 1)] = g1[1];
    // x4 = [g2^T vA + g21 h1^T u + h3^T vB + h31 g1^T u; 0]
    t[(6, 2)] = g2[0];
    t[(6, 3)] = g2[1];
    t[(6, 4)] = h3[0];
    t[(6, 5)] = h3[1];
    for k in 0..2 {
        t[(6, k)] = g2[0] * h1[k] + h3[0] * g1[k];
    }
    Ok(t)
}

/// Amplitude factor per slot keeping `E||x_t||^2 <= P` when every source
/// symbol has variance `P / m`.
pub(super) fn slot_gains(transmit: &CMatrix, m: usize) -> Vec<f64> {
    (0..transmit.nrows() / m)
        .map(|t| {
            let energy: f64 = transmit.rows(t * m, m).iter().map(|z| z.norm_sqr()).sum();
            if energy <= m as f64 {
                1.0
            } else {
                (m as f64 / energy).sqrt()
            }
        })
        .collect()
}

/// Draws the source symbols i.i.d. `CN(0, P/m)` and returns the normalized
/// transmit vector of every slot.
pub fn transmit_signals(scheme: &SchemeMatrices, power: f64, symbol_seed: Seed) -> Vec<DVector<C64>> {
    let mut rng = symbol_seed.stream_rng(0);
    let sd = scheme.symbol_power(power).sqrt();
    let s = DVector::from_fn(scheme.sources.dim(), |_, _| complex_gaussian(&mut rng) * sd);
    let x = &scheme.transmit * s;
    let m = scheme.plan.effective_cfg().m as usize;
    scheme
        .slot_gains
        .iter()
        .enumerate()
        .map(|(t, &c)| x.rows(t * m, m).into_owned() * C64::new(c, 0.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ana_schemes::{build_precoders, build_scheme, phase_plan, sample_scheme};
    use crate::sdof_theory::AntennaConfig;

    fn cfg(m: u32, na: u32, nb: u32) -> AntennaConfig {
        AntennaConfig::new(m, na, nb).unwrap()
    }

    #[test]
    fn phase_one_is_pure_noise() {
        let s = sample_scheme(SchemeKind::WiretapThreePhase, cfg(5, 3, 2), Seed(2)).unwrap();
        let x = transmit_signals(&s, 100.0, Seed(9));
        assert_eq!(x.len(), 21);
        let mut rng = Seed(9).stream_rng(0);
        let sd = (100.0_f64 / 5.0).sqrt();
        for xt in &x[..6] {
            for xk in xt.iter() {
                assert_eq!(*xk, complex_gaussian(&mut rng) * sd);
            }
        }
    }

    #[test]
    fn phase_three_only_depends_on_eavesdropper_phase_two() {
        let s = sample_scheme(SchemeKind::WiretapThreePhase, cfg(5, 3, 2), Seed(2)).unwrap();
        let m = 5;
        let phase3 = s.transmit.rows(15 * m, 6 * m).into_owned();
        let z2 = &s.phase_g[1] * s.transmit.rows(6 * m, 9 * m);
        let Precoders::Wiretap { phi, .. } = &s.precoders else {
            panic!()
        };
        let diff = (&phase3 - &phi.matrix * z2).norm();
        assert!(diff < 1e-12);
    }

    #[test]
    fn miso_map_equals_generic_broadcast_map() {
        let c = cfg(2, 1, 1);
        let miso = sample_scheme(SchemeKind::MisoFourSlot, c, Seed(8)).unwrap();
        let plan = phase_plan(SchemeKind::BccFourPhase, c).unwrap();
        let pre = build_precoders(SchemeKind::BccFourPhase, c, &plan).unwrap();
        let bcc = build_scheme(SchemeKind::BccFourPhase, c, &miso.realization, pre).unwrap();
        assert!((&miso.transmit - &bcc.transmit).norm() < 1e-12);
    }

    #[test]
    fn average_power_respects_budget() {
        let s = sample_scheme(SchemeKind::BccFourPhase, cfg(4, 3, 2), Seed(21)).unwrap();
        let p = 10.0;
        let draws = 10_000;
        let mut total = 0.0;
        for d in 0..draws {
            let x = transmit_signals(&s, p, Seed(5).derive(d));
            total += x.iter().map(|v| v.norm_squared()).sum::<f64>() / x.len() as f64;
        }
        assert!(total / draws as f64 <= p * 1.01);
    }
}
