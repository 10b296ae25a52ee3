use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ana_schemes::{phase_plan, sample_scheme, Message, SchemeKind};
use crate::channel_model::Seed;
use crate::error::{Error, Result};
use crate::sdof_theory::{bcc_sum_point, sdof_wiretap_delayed, sdof_wiretap_partial, AntennaConfig, Rational};

use super::mutual_info::{mi_curve, MiOptions};
use super::SnrGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloConfig {
    pub trials: usize,
    pub grid: SnrGrid,
    pub seed: Seed,
    pub options: MiOptions,
    /// Allowed distance between estimated and closed-form per-slot values.
    pub tol: f64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            trials: 10,
            grid: SnrGrid::default(),
            seed: Seed(42),
            options: MiOptions::default(),
            tol: 0.05,
        }
    }
}

/// Mean over trials with a normal-approximation 95% half-width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub message: Message,
    pub mean: f64,
    pub ci95: f64,
    pub per_trial: Vec<f64>,
}

impl Estimate {
    fn from_trials(message: Message, per_trial: Vec<f64>) -> Self {
        let n = per_trial.len() as f64;
        let mean = per_trial.iter().sum::<f64>() / n;
        let ci95 = if per_trial.len() > 1 {
            let var = per_trial.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            1.96 * (var / n).sqrt()
        } else {
            0.0
        };
        Self {
            message,
            mean,
            ci95,
            per_trial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryValue {
    pub message: Message,
    /// Exact value as `p/q`.
    pub exact: String,
    pub value: f64,
}

/// Serialized result of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub kind: SchemeKind,
    pub cfg: AntennaConfig,
    #[serde(rename = "grid_dB")]
    pub grid_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub slots: usize,
    pub artificial_noise: bool,
    pub tol: f64,
    /// Per-slot rate slope of each message.
    pub slopes: Vec<Estimate>,
    /// Per-slot leakage slope of each message.
    pub leakage: Vec<Estimate>,
    pub theory_value: Vec<TheoryValue>,
    pub pass: bool,
}

/// Closed-form per-slot SDoF the scheme is meant to reach, per message.
pub fn theory_values(kind: SchemeKind, cfg: AntennaConfig) -> Result<Vec<(Message, Rational)>> {
    Ok(match kind {
        SchemeKind::WiretapThreePhase => vec![(Message::A, sdof_wiretap_delayed(cfg))],
        SchemeKind::WiretapPartialTwoPhase => vec![(Message::A, sdof_wiretap_partial(cfg)?)],
        SchemeKind::BccFourPhase | SchemeKind::MisoFourSlot => {
            let (a, b) = bcc_sum_point(cfg)?;
            vec![(Message::A, a), (Message::B, b)]
        }
    })
}

fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Per-slot rate and leakage slopes averaged over independent channel draws.
/// Trial `i` uses `seed.derive(i)`; trials run in parallel and are reduced
/// in index order.
pub fn monte_carlo_sdof(kind: SchemeKind, cfg: AntennaConfig, mc: &MonteCarloConfig) -> Result<SimulationRecord> {
    if mc.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let plan = phase_plan(kind, cfg)?;
    let theory = theory_values(kind, cfg)?;
    let slots = plan.total() as f64;

    let per_trial: Vec<Vec<(f64, f64)>> = (0..mc.trials as u64)
        .into_par_iter()
        .map(|i| {
            let scheme = sample_scheme(kind, cfg, mc.seed.derive(i))?;
            kind.messages()
                .iter()
                .map(|&msg| {
                    let rate = mi_curve(&scheme, msg, false, &mc.grid, mc.options)?.slope().slope;
                    let leak = mi_curve(&scheme, msg, true, &mc.grid, mc.options)?.slope().slope;
                    Ok((rate / slots, leak / slots))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut slopes = Vec::new();
    let mut leakage = Vec::new();
    for (j, &msg) in kind.messages().iter().enumerate() {
        slopes.push(Estimate::from_trials(msg, per_trial.iter().map(|t| t[j].0).collect()));
        leakage.push(Estimate::from_trials(msg, per_trial.iter().map(|t| t[j].1).collect()));
    }
    let theory_value: Vec<TheoryValue> = theory
        .iter()
        .map(|&(message, r)| TheoryValue {
            message,
            exact: r.to_string(),
            value: to_f64(r),
        })
        .collect();
    let pass = slopes
        .iter()
        .zip(&theory_value)
        .all(|(s, t)| (s.mean - t.value).abs() <= mc.tol)
        && leakage.iter().all(|l| l.mean.abs() <= mc.tol);

    Ok(SimulationRecord {
        kind,
        cfg,
        grid_db: mc.grid.db(),
        trials: mc.trials,
        seed: mc.seed.0,
        slots: plan.total(),
        artificial_noise: mc.options.artificial_noise,
        tol: mc.tol,
        slopes,
        leakage,
        theory_value,
        pass,
    })
}
