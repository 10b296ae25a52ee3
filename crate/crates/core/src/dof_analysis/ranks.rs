use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ana_schemes::{sample_scheme, Message, Precoders, SchemeKind, SchemeMatrices};
use crate::channel_model::Seed;
use crate::error::{Error, Result};
use crate::linalg::{numeric_rank, vstack, CMatrix};
use crate::sdof_theory::AntennaConfig;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankRecord {
    pub name: String,
    pub expected: usize,
    pub observed: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub records: Vec<RankRecord>,
}

impl RankReport {
    pub fn pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn first_failure(&self) -> Option<&RankRecord> {
        self.records.iter().find(|r| !r.pass)
    }
}

fn record(name: &str, expected: usize, top: &CMatrix, bottom: Option<CMatrix>, tol: f64) -> RankRecord {
    let observed = match bottom {
        Some(b) => numeric_rank(&vstack(&[top, &b]).expect("stacked blocks share columns"), tol),
        None => numeric_rank(top, tol),
    };
    RankRecord {
        name: name.to_string(),
        expected,
        observed,
        pass: expected == observed,
    }
}

/// Evaluates the alignment rank identities of the scheme: the intended
/// message fills its whole dimension at its receiver, and the artificial
/// noise fills the whole observation space of the other receiver.
pub fn verify_ranks(scheme: &SchemeMatrices, tol: f64) -> RankReport {
    let eff = scheme.plan.effective_cfg();
    let (m, na, nb) = (eff.m as usize, eff.na as usize, eff.nb as usize);
    let (h, g) = (&scheme.phase_h, &scheme.phase_g);
    let records = match &scheme.precoders {
        Precoders::Wiretap { theta, phi } => vec![
            record(
                "rank([H2; H3 Phi G2])",
                m * na * (m - nb),
                &h[1],
                Some(&h[2] * &phi.matrix * &g[1]),
                tol,
            ),
            record(
                "rank([G1; G2 Theta H1])",
                m * na * nb,
                &g[0],
                Some(&g[1] * &theta.matrix * &h[0]),
                tol,
            ),
        ],
        Precoders::Partial { theta, spreading } => vec![
            record("rank(H2 E)", na * na * (m - nb), &(&h[1] * spreading), None, tol),
            record(
                "rank([G1; G2 Theta H1])",
                m * na * nb,
                &g[0],
                Some(&g[1] * &theta.matrix * &h[0]),
                tol,
            ),
        ],
        Precoders::Broadcast {
            theta_a,
            theta_b,
            phi_a,
            phi_b,
        } => vec![
            record(
                "rank([H2; H4 PhiA G2])",
                m * na * (m - nb),
                &h[1],
                Some(&h[3] * &phi_a.matrix * &g[1]),
                tol,
            ),
            record(
                "rank([G1; G2 ThetaA H1])",
                m * na * nb,
                &g[0],
                Some(&g[1] * &theta_a.matrix * &h[0]),
                tol,
            ),
            record(
                "rank([G3; G4 PhiB H3])",
                m * nb * (m - na),
                &g[2],
                Some(&g[3] * &phi_b.matrix * &h[2]),
                tol,
            ),
            record(
                "rank([H1; H3 ThetaB G1])",
                m * na * nb,
                &h[0],
                Some(&h[2] * &theta_b.matrix * &g[0]),
                tol,
            ),
        ],
    };
    RankReport { records }
}

/// True when the effective block matrix of `rx` is square and invertible.
pub fn is_decodable(scheme: &SchemeMatrices, rx: Message, tol: f64) -> bool {
    let e = &scheme.effective(rx).matrix;
    e.is_square() && numeric_rank(e, tol) == e.nrows()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityTally {
    pub name: String,
    pub expected: usize,
    /// Trials in which the observed rank matched.
    pub passed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeTally {
    pub message: Message,
    /// Trials in which the receiver's effective channel was invertible.
    pub decodable: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankFailure {
    pub trial: usize,
    pub name: String,
    pub expected: usize,
    pub observed: usize,
}

/// Rank identities and decodability over independent channel draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTrials {
    pub kind: SchemeKind,
    pub cfg: AntennaConfig,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub identities: Vec<IdentityTally>,
    pub decodable: Vec<DecodeTally>,
    pub failures: Vec<RankFailure>,
    /// Every identity held in every trial and each intended receiver could
    /// invert its channel in at least 99% of them.
    pub pass: bool,
}

/// Runs [`verify_ranks`] and [`is_decodable`] on `trials` draws, trial `i`
/// using `seed.derive(i)`.
pub fn rank_trials(kind: SchemeKind, cfg: AntennaConfig, trials: usize, seed: Seed, tol: f64) -> Result<RankTrials> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let per_trial: Vec<(RankReport, Vec<bool>)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let scheme = sample_scheme(kind, cfg, seed.derive(i))?;
            let decodable = kind.messages().iter().map(|&m| is_decodable(&scheme, m, tol)).collect();
            Ok((verify_ranks(&scheme, tol), decodable))
        })
        .collect::<Result<_>>()?;

    let mut identities: Vec<IdentityTally> = per_trial[0]
        .0
        .records
        .iter()
        .map(|r| IdentityTally {
            name: r.name.clone(),
            expected: r.expected,
            passed: 0,
        })
        .collect();
    let mut decodable: Vec<DecodeTally> = kind
        .messages()
        .iter()
        .map(|&message| DecodeTally { message, decodable: 0 })
        .collect();
    let mut failures = Vec::new();
    for (trial, (report, dec)) in per_trial.iter().enumerate() {
        for (tally, r) in identities.iter_mut().zip(&report.records) {
            if r.pass {
                tally.passed += 1;
            } else {
                failures.push(RankFailure {
                    trial,
                    name: r.name.clone(),
                    expected: r.expected,
                    observed: r.observed,
                });
            }
        }
        for (tally, &ok) in decodable.iter_mut().zip(dec) {
            tally.decodable += usize::from(ok);
        }
    }
    let pass = failures.is_empty() && decodable.iter().all(|d| d.decodable * 100 >= trials * 99);
    Ok(RankTrials {
        kind,
        cfg,
        trials,
        seed: seed.0,
        tol,
        identities,
        decodable,
        failures,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ana_schemes::{build_precoders, build_scheme, phase_plan, sample_scheme, SchemeKind};
    use crate::channel_model::{sample_states, Seed};
    use crate::linalg::DEFAULT_RANK_TOL;
    use crate::sdof_theory::AntennaConfig;

    fn cfg(m: u32, na: u32, nb: u32) -> AntennaConfig {
        AntennaConfig::new(m, na, nb).unwrap()
    }

    #[test]
    fn wiretap_expected_ranks() {
        let s = sample_scheme(SchemeKind::WiretapThreePhase, cfg(5, 3, 2), Seed(4)).unwrap();
        let r = verify_ranks(&s, DEFAULT_RANK_TOL);
        let expected: Vec<usize> = r.records.iter().map(|x| x.expected).collect();
        assert_eq!(expected, vec![45, 30]);
        assert!(r.pass(), "{r:?}");

        let s = sample_scheme(SchemeKind::WiretapThreePhase, cfg(2, 1, 1), Seed(4)).unwrap();
        let r = verify_ranks(&s, DEFAULT_RANK_TOL);
        assert_eq!(r.records.iter().map(|x| x.expected).collect::<Vec<_>>(), vec![2, 2]);
        assert!(r.pass());
    }

    #[test]
    fn zeroed_phi_fails_first_condition() {
        let c = cfg(5, 3, 2);
        let kind = SchemeKind::WiretapThreePhase;
        let plan = phase_plan(kind, c).unwrap();
        let mut pre = build_precoders(kind, c, &plan).unwrap();
        if let Precoders::Wiretap { phi, .. } = &mut pre {
            phi.matrix.fill(num_complex::Complex64::new(0.0, 0.0));
        }
        let r = sample_states(c, plan.total(), Seed(4)).unwrap();
        let s = build_scheme(kind, c, &r, pre).unwrap();
        let report = verify_ranks(&s, DEFAULT_RANK_TOL);
        assert!(!report.pass());
        assert_eq!(report.first_failure().unwrap().name, "rank([H2; H3 Phi G2])");
    }

    #[test]
    fn intended_receivers_decode() {
        let s = sample_scheme(SchemeKind::BccFourPhase, cfg(5, 3, 2), Seed(4)).unwrap();
        assert!(is_decodable(&s, Message::A, 1e-8));
        assert!(is_decodable(&s, Message::B, 1e-8));
        let w = sample_scheme(SchemeKind::WiretapThreePhase, cfg(5, 3, 2), Seed(4)).unwrap();
        assert!(is_decodable(&w, Message::A, 1e-8));
        assert!(!is_decodable(&w, Message::B, 1e-8));
    }

    #[test]
    fn trial_summary_counts_every_draw() {
        let t = rank_trials(SchemeKind::BccFourPhase, cfg(5, 3, 2), 5, Seed(1), 1e-8).unwrap();
        assert_eq!(t.identities.len(), 4);
        assert!(t.identities.iter().all(|i| i.passed == 5));
        assert_eq!(t.decodable.len(), 2);
        assert!(t.pass);
        assert!(rank_trials(SchemeKind::BccFourPhase, cfg(5, 3, 2), 0, Seed(1), 1e-8).is_err());
    }
}
