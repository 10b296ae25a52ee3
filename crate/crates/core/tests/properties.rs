use ana_dof::ana_schemes::{phase_plan, SchemeKind};
use ana_dof::channel_model::{gaussian_matrix, Seed};
use ana_dof::dof_analysis::{numeric_rank, rank_lemma_check, SnrGrid};
use ana_dof::sdof_theory::{
    bc_dof_region_delayed, bcc_region_delayed, bcc_region_perfect, bcc_sum_point, sdof_wiretap, sdof_wiretap_delayed,
    AntennaConfig, CsitMode, Rational, SdofRegion,
};
use proptest::prelude::*;

fn any_cfg(max: u32) -> impl Strategy<Value = AntennaConfig> {
    (1..=max, 1..=max, 1..=max).prop_map(|(m, na, nb)| AntennaConfig::new(m, na, nb).unwrap())
}

/// Configurations with `max(nA, nB) < m <= max`.
fn above_receivers(max: u32) -> impl Strategy<Value = AntennaConfig> {
    (1..max, 1..max)
        .prop_flat_map(move |(na, nb)| (na.max(nb) + 1..=max).prop_map(move |m| (m, na, nb)))
        .prop_map(|(m, na, nb)| AntennaConfig::new(m, na, nb).unwrap())
}

fn sorted_halfplanes(r: &SdofRegion) -> Vec<(Rational, Rational, Rational)> {
    let mut h: Vec<_> = r.halfplanes().iter().map(|h| (h.a, h.b, h.c)).collect();
    h.sort();
    h
}

proptest! {
    #[test]
    fn delayed_sdof_is_nondecreasing_and_saturates(na in 1u32..8, nb in 1u32..8) {
        let value = |m| sdof_wiretap_delayed(AntennaConfig::new(m, na, nb).unwrap());
        for m in 1..(na + nb + 4) {
            prop_assert!(value(m) <= value(m + 1));
        }
        for m in (na + nb)..(na + nb + 4) {
            prop_assert_eq!(value(m), value(na + nb));
        }
        // Both closed forms coincide at m = nA + nB.
        let (a, b) = (i64::from(na), i64::from(nb));
        let m = a + b;
        let third = Rational::new(a * m * (m - b), a * b + m * (m - b));
        let fourth = Rational::new(a * (a + b), a + 2 * b);
        prop_assert_eq!(third, fourth);
    }

    #[test]
    fn csit_modes_are_ordered(cfg in above_receivers(10)) {
        let v = |mode| sdof_wiretap(cfg, mode).unwrap();
        prop_assert!(v(CsitMode::NoCsit) <= v(CsitMode::DelayedPartial));
        prop_assert!(v(CsitMode::DelayedPartial) <= v(CsitMode::Delayed));
        prop_assert!(v(CsitMode::Delayed) <= v(CsitMode::Perfect));
    }

    #[test]
    fn region_is_symmetric_under_receiver_swap(cfg in any_cfg(10)) {
        let direct = bcc_region_delayed(cfg);
        let mirrored = bcc_region_delayed(cfg.swapped()).swap_axes();
        prop_assert_eq!(direct.vertices(), mirrored.vertices());
        prop_assert_eq!(sorted_halfplanes(&direct), sorted_halfplanes(&mirrored));
    }

    #[test]
    fn sum_point_is_tight_on_both_constraints(cfg in above_receivers(10)) {
        let region = bcc_region_delayed(cfg);
        let p = bcc_sum_point(cfg).unwrap();
        prop_assert!(region.contains(&p));
        for h in region.halfplanes() {
            prop_assert!(h.is_tight(&p));
        }
    }

    #[test]
    fn sdof_region_is_dominated(cfg in any_cfg(10)) {
        let sdof = bcc_region_delayed(cfg);
        let dof = bc_dof_region_delayed(cfg);
        let perfect = bcc_region_perfect(cfg).ok();
        for v in sdof.vertices() {
            prop_assert!(dof.contains(v));
            if let Some(p) = &perfect {
                prop_assert!(p.contains(v));
            }
        }
    }

    #[test]
    fn vertices_are_feasible_corners(cfg in any_cfg(10)) {
        for region in [bcc_region_delayed(cfg), bc_dof_region_delayed(cfg)] {
            let vs = region.vertices();
            prop_assert!(!vs.is_empty());
            for v in vs {
                prop_assert!(region.contains(v));
                prop_assert!(region.active_constraints(v) >= 2 || vs.len() == 1);
            }
            // Counterclockwise from the dA axis: polar angle nondecreasing.
            for w in vs.windows(2) {
                let cross = w[0].0 * w[1].1 - w[0].1 * w[1].0;
                prop_assert!(cross >= Rational::from_integer(0));
            }
        }
    }

    #[test]
    fn phase_plans_sum_to_table_totals(cfg in above_receivers(10)) {
        let c = cfg.capped();
        let (m, na, nb) = (c.m as usize, c.na as usize, c.nb as usize);
        let w = phase_plan(SchemeKind::WiretapThreePhase, cfg).unwrap();
        prop_assert_eq!(w.total(), na * nb + m * (m - nb));
        let b = phase_plan(SchemeKind::BccFourPhase, cfg).unwrap();
        prop_assert_eq!(b.total(), m * m);
        let p = phase_plan(SchemeKind::WiretapPartialTwoPhase, cfg).unwrap();
        prop_assert_eq!(p.total(), na * m);
    }

    #[test]
    fn log_det_slope_tracks_rank(rows in 1usize..=8, cols in 1usize..=8, inner in 1usize..=8, seed in any::<u64>()) {
        let mut rng = Seed(seed).stream_rng(0);
        let a = gaussian_matrix(&mut rng, rows, inner) * gaussian_matrix(&mut rng, inner, cols);
        let grid = SnrGrid::from_db(&[60.0, 80.0, 100.0, 120.0, 140.0]).unwrap();
        let slope = rank_lemma_check(&a, &grid).slope;
        let rank = numeric_rank(&a, 1e-10);
        prop_assert_eq!(rank, rows.min(cols).min(inner));
        prop_assert!((slope - rank as f64).abs() < 0.01, "slope {} rank {}", slope, rank);
    }
}
