//! Brute-force check of the entropy inequalities satisfied by
//! entropy-symmetric sequences, on small discrete sources.
//!
//! For an entropy-symmetric `x^L` with `h(k)` the entropy of any `k` of the
//! variables:
//!
//! * `h(N + k) - h(N) >= h(M + k) - h(M)` for `M >= N >= 0`, `k >= 0`,
//!   `M + k <= L` (ess1)
//! * `M h(N) >= N h(M)` for `M >= N` (ess2)

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel_model::Seed;
use crate::error::{Error, Result};

const MAX_VARIABLES: usize = 8;
const SUM_TOL: f64 = 1e-9;

fn check_pmf(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidSource(format!(
            "{what} has a negative or non-finite entry"
        )));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidSource(format!("{what} sums to {s}")));
    }
    Ok(())
}

fn entropy_bits(p: impl IntoIterator<Item = f64>) -> f64 {
    -p.into_iter().filter(|&x| x > 0.0).map(|x| x * x.log2()).sum::<f64>()
}

/// Digits of `index` in base `q`, variable 0 first.
fn digits(mut index: usize, q: usize, l: usize) -> Vec<usize> {
    (0..l)
        .map(|_| {
            let d = index % q;
            index /= q;
            d
        })
        .collect()
}

/// Joint pmf of `L` variables over the alphabet `0..q`, indexed by
/// `sum x_i q^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    l: usize,
    q: usize,
    pmf: Vec<f64>,
}

impl JointDistribution {
    pub fn new(l: usize, q: usize, pmf: Vec<f64>) -> Result<Self> {
        if l == 0 || l > MAX_VARIABLES || q < 2 {
            return Err(Error::InvalidSource(format!("unsupported shape L={l}, q={q}")));
        }
        if pmf.len() != q.pow(l as u32) {
            return Err(Error::InvalidSource(format!(
                "pmf has {} entries, expected {}",
                pmf.len(),
                q.pow(l as u32)
            )));
        }
        check_pmf(&pmf, "joint pmf")?;
        Ok(Self { l, q, pmf })
    }

    /// Builds the pmf from a function of the outcome `x_0, ..., x_{L-1}`.
    pub fn from_fn(l: usize, q: usize, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let pmf = (0..q.pow(l as u32)).map(|i| f(&digits(i, q, l))).collect();
        Self::new(l, q, pmf)
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    pub fn alphabet(&self) -> usize {
        self.q
    }

    /// Entropy in bits of the variables whose bits are set in `mask`.
    pub fn subset_entropy(&self, mask: u32) -> f64 {
        let vars: Vec<usize> = (0..self.l).filter(|i| mask >> i & 1 == 1).collect();
        let mut marginal = vec![0.0; self.q.pow(vars.len() as u32)];
        for (i, &p) in self.pmf.iter().enumerate() {
            let x = digits(i, self.q, self.l);
            let j = vars.iter().rev().fold(0, |acc, &v| acc * self.q + x[v]);
            marginal[j] += p;
        }
        entropy_bits(marginal)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    /// Per-symbol pmf shared by all `L` variables of this component.
    pub marginal: Vec<f64>,
}

/// Finite mixture of i.i.d. laws; exchangeable by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeableSource {
    l: usize,
    q: usize,
    components: Vec<MixtureComponent>,
}

impl ExchangeableSource {
    pub fn new(l: usize, q: usize, components: Vec<MixtureComponent>) -> Result<Self> {
        if l == 0 || l > MAX_VARIABLES || q < 2 {
            return Err(Error::InvalidSource(format!("unsupported shape L={l}, q={q}")));
        }
        if components.is_empty() {
            return Err(Error::InvalidSource("mixture has no components".into()));
        }
        check_pmf(
            &components.iter().map(|c| c.weight).collect::<Vec<_>>(),
            "mixture weights",
        )?;
        for c in &components {
            if c.marginal.len() != q {
                return Err(Error::InvalidSource(format!(
                    "marginal has {} entries, expected {q}",
                    c.marginal.len()
                )));
            }
            check_pmf(&c.marginal, "marginal")?;
        }
        Ok(Self { l, q, components })
    }

    /// `L` i.i.d. copies of `marginal`.
    pub fn iid(l: usize, marginal: Vec<f64>) -> Result<Self> {
        let q = marginal.len();
        Self::new(l, q, vec![MixtureComponent { weight: 1.0, marginal }])
    }

    /// One to three components with Dirichlet(1) weights and marginals.
    pub fn random(l: usize, q: usize, seed: Seed) -> Result<Self> {
        let mut rng = seed.stream_rng(0);
        let count = rng.random_range(1..=3);
        // Normalized Exp(1) draws are Dirichlet(1, ..., 1).
        let mut simplex = |n: usize| {
            let e: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let s: f64 = e.iter().sum();
            e.into_iter().map(|x| x / s).collect::<Vec<f64>>()
        };
        let weights = simplex(count);
        let components = weights
            .into_iter()
            .map(|weight| MixtureComponent {
                weight,
                marginal: simplex(q),
            })
            .collect();
        Self::new(l, q, components)
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    pub fn alphabet(&self) -> usize {
        self.q
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    fn prob(&self, x: &[usize]) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * x.iter().map(|&s| c.marginal[s]).product::<f64>())
            .sum()
    }

    /// Entropy in bits of the first `k` variables, by enumeration of the
    /// `q^k` outcomes.
    pub fn joint_entropy(&self, k: usize) -> Result<f64> {
        if k > self.l {
            return Err(Error::InvalidParameter(format!("k={k} exceeds L={}", self.l)));
        }
        Ok(entropy_bits(
            (0..self.q.pow(k as u32)).map(|i| self.prob(&digits(i, self.q, k))),
        ))
    }

    pub fn joint(&self) -> JointDistribution {
        JointDistribution::from_fn(self.l, self.q, |x| self.prob(x)).expect("mixture of pmfs is a pmf")
    }
}

/// Input accepted by the lemma check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiscreteSource {
    Exchangeable(ExchangeableSource),
    Joint(JointDistribution),
}

impl DiscreteSource {
    pub fn joint(&self) -> JointDistribution {
        match self {
            DiscreteSource::Exchangeable(s) => s.joint(),
            DiscreteSource::Joint(j) => j.clone(),
        }
    }
}

impl From<ExchangeableSource> for DiscreteSource {
    fn from(s: ExchangeableSource) -> Self {
        DiscreteSource::Exchangeable(s)
    }
}

impl From<JointDistribution> for DiscreteSource {
    fn from(j: JointDistribution) -> Self {
        DiscreteSource::Joint(j)
    }
}

/// `h(x^0) = 0, h(x^1), ..., h(x^L)` in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyProfile {
    pub values: Vec<f64>,
}

impl EntropyProfile {
    /// Entropies of the prefixes `x_0 .. x_{k-1}`.
    pub fn of(joint: &JointDistribution) -> Self {
        let values = (0..=joint.len())
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    joint.subset_entropy((1u32 << k) - 1)
                }
            })
            .collect();
        Self { values }
    }

    /// `h(k+1) - 2 h(k) + h(k-1)` for `k = 1 .. L-1`.
    pub fn second_differences(&self) -> Vec<f64> {
        self.values.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect()
    }
}

/// True when subsets of equal size have entropies within `tol`.
pub fn check_entropy_symmetry(joint: &JointDistribution, tol: f64) -> bool {
    let l = joint.len();
    let mut range: Vec<Option<(f64, f64)>> = vec![None; l + 1];
    for mask in 1u32..(1 << l) {
        let h = joint.subset_entropy(mask);
        let r = &mut range[mask.count_ones() as usize];
        *r = Some(match *r {
            None => (h, h),
            Some((lo, hi)) => (lo.min(h), hi.max(h)),
        });
    }
    range.iter().flatten().all(|(lo, hi)| hi - lo <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ess1Margin {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    /// `[h(N+k) - h(N)] - [h(M+k) - h(M)]`.
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ess2Margin {
    pub m: usize,
    pub n: usize,
    /// `M h(N) - N h(M)`.
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaStatus {
    Pass,
    Counterexample,
    /// The source is not entropy-symmetric, so the lemma says nothing.
    HypothesisViolated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub source_spec: DiscreteSource,
    pub profile: Vec<f64>,
    pub status: LemmaStatus,
    pub ess1: Vec<Ess1Margin>,
    pub ess2: Vec<Ess2Margin>,
    pub worst_margin_ess1: Option<f64>,
    pub worst_margin_ess2: Option<f64>,
    pub pass: bool,
}

/// Evaluates every instance of both inequalities on `source`. Margins below
/// `-tol` are counterexamples; sources that fail the symmetry check at `tol`
/// are reported as hypothesis violations instead.
pub fn verify_essential_lemma(source: &DiscreteSource, tol: f64) -> LemmaReport {
    let joint = source.joint();
    let profile = EntropyProfile::of(&joint);
    let h = &profile.values;
    let l = joint.len();

    let mut ess1 = Vec::new();
    for n in 0..=l {
        for m in n..=l {
            for k in 0..=(l - m) {
                ess1.push(Ess1Margin {
                    m,
                    n,
                    k,
                    margin: (h[n + k] - h[n]) - (h[m + k] - h[m]),
                });
            }
        }
    }
    let mut ess2 = Vec::new();
    for n in 0..=l {
        for m in n..=l {
            ess2.push(Ess2Margin {
                m,
                n,
                margin: m as f64 * h[n] - n as f64 * h[m],
            });
        }
    }
    let worst = |it: &mut dyn Iterator<Item = f64>| it.reduce(f64::min);
    let worst_margin_ess1 = worst(&mut ess1.iter().map(|e| e.margin));
    let worst_margin_ess2 = worst(&mut ess2.iter().map(|e| e.margin));

    let status = if !check_entropy_symmetry(&joint, tol) {
        LemmaStatus::HypothesisViolated
    } else if worst_margin_ess1.unwrap_or(0.0) < -tol || worst_margin_ess2.unwrap_or(0.0) < -tol {
        LemmaStatus::Counterexample
    } else {
        LemmaStatus::Pass
    };
    LemmaReport {
        source_spec: source.clone(),
        profile: profile.values,
        status,
        ess1,
        ess2,
        worst_margin_ess1,
        worst_margin_ess2,
        pass: status == LemmaStatus::Pass,
    }
}

/// Aggregate of a batch of lemma checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaSweep {
    pub count: usize,
    pub passed: usize,
    pub counterexamples: Vec<LemmaReport>,
    pub hypothesis_violations: Vec<LemmaReport>,
    pub worst_margin_ess1: Option<f64>,
    pub worst_margin_ess2: Option<f64>,
    pub pass: bool,
}

impl LemmaSweep {
    pub fn from_reports(reports: Vec<LemmaReport>) -> Self {
        let count = reports.len();
        let min_opt = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) | (None, x) => x,
        };
        let mut sweep = Self {
            count,
            passed: 0,
            counterexamples: Vec::new(),
            hypothesis_violations: Vec::new(),
            worst_margin_ess1: None,
            worst_margin_ess2: None,
            pass: true,
        };
        for r in reports {
            match r.status {
                LemmaStatus::Pass => {
                    sweep.passed += 1;
                    sweep.worst_margin_ess1 = min_opt(sweep.worst_margin_ess1, r.worst_margin_ess1);
                    sweep.worst_margin_ess2 = min_opt(sweep.worst_margin_ess2, r.worst_margin_ess2);
                }
                LemmaStatus::Counterexample => {
                    sweep.worst_margin_ess1 = min_opt(sweep.worst_margin_ess1, r.worst_margin_ess1);
                    sweep.worst_margin_ess2 = min_opt(sweep.worst_margin_ess2, r.worst_margin_ess2);
                    sweep.counterexamples.push(r)
                }
                LemmaStatus::HypothesisViolated => sweep.hypothesis_violations.push(r),
            }
        }
        sweep.pass = sweep.counterexamples.is_empty();
        sweep
    }
}

/// Lemma reports for `count` random mixtures. Source `i` uses
/// `seed.derive(i)`, with `L` drawn from `2..=l_max` and the alphabet size
/// from `2..=q_max`.
pub fn random_lemma_reports(
    count: usize,
    l_max: usize,
    q_max: usize,
    seed: Seed,
    tol: f64,
) -> Result<Vec<LemmaReport>> {
    if !(2..=MAX_VARIABLES).contains(&l_max) || q_max < 2 {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= l_max <= {MAX_VARIABLES} and q >= 2, got l_max={l_max}, q={q_max}"
        )));
    }
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.derive(i);
            let mut rng = s.stream_rng(2);
            let l = rng.random_range(2..=l_max);
            let q = rng.random_range(2..=q_max);
            let source = ExchangeableSource::random(l, q, s)?;
            Ok(verify_essential_lemma(&source.into(), tol))
        })
        .collect()
}

/// [`random_lemma_reports`] folded into a [`LemmaSweep`].
pub fn random_lemma_sweep(count: usize, l_max: usize, q_max: usize, seed: Seed, tol: f64) -> Result<LemmaSweep> {
    Ok(LemmaSweep::from_reports(random_lemma_reports(
        count, l_max, q_max, seed, tol,
    )?))
}
