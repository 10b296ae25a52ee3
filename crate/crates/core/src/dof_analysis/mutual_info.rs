use crate::ana_schemes::{Message, SchemeMatrices, Source};
use crate::error::{Error, Result};
use crate::linalg::{log2_det_identity_plus, select_cols, CMatrix};

use super::{MiCurve, SnrGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MiOptions {
    /// When false the artificial noise `u` is switched off (zero variance).
    pub artificial_noise: bool,
}

impl Default for MiOptions {
    fn default() -> Self {
        Self { artificial_noise: true }
    }
}

fn switched_off(opts: MiOptions) -> &'static [Source] {
    if opts.artificial_noise {
        &[]
    } else {
        &[Source::Noise]
    }
}

/// `log2 det(I + P' O O^H)` over the sources still random after removing
/// `known`, where `O` is the observation map of `rx` and `P'` the symbol
/// variance. This is `h(Y | known)` up to the constant noise term.
pub fn observation_entropy(scheme: &SchemeMatrices, rx: Message, known: &[Source], p: f64, opts: MiOptions) -> f64 {
    entropy_of(&scheme.observation(rx), scheme, known, scheme.symbol_power(p), opts)
}

fn entropy_of(obs: &CMatrix, scheme: &SchemeMatrices, known: &[Source], ps: f64, opts: MiOptions) -> f64 {
    let mut excluded = known.to_vec();
    excluded.extend_from_slice(switched_off(opts));
    let cols = scheme.sources.columns_excluding(&excluded);
    log2_det_identity_plus(&select_cols(obs, &cols), ps)
}

/// `I(target; Y_rx | given)` in bits.
pub fn conditional_mi(
    scheme: &SchemeMatrices,
    rx: Message,
    target: &[Source],
    given: &[Source],
    p: f64,
    opts: MiOptions,
) -> f64 {
    let obs = scheme.observation(rx);
    conditional_mi_on(&obs, scheme, target, given, scheme.symbol_power(p), opts)
}

fn conditional_mi_on(
    obs: &CMatrix,
    scheme: &SchemeMatrices,
    target: &[Source],
    given: &[Source],
    ps: f64,
    opts: MiOptions,
) -> f64 {
    let mut both = given.to_vec();
    both.extend_from_slice(target);
    entropy_of(obs, scheme, given, ps, opts) - entropy_of(obs, scheme, &both, ps, opts)
}

fn check_message(scheme: &SchemeMatrices, msg: Message) -> Result<()> {
    if scheme.kind.messages().contains(&msg) {
        Ok(())
    } else {
        Err(Error::NoSuchMessage {
            kind: scheme.kind.name(),
            message: msg.name(),
        })
    }
}

/// Sources and receiver defining the rate of `msg`: `I(v_msg; Y_msg)`.
fn legit_terms(msg: Message) -> (Message, Vec<Source>, Vec<Source>) {
    (msg, vec![Source::Message(msg)], vec![])
}

/// Sources and receiver defining the leakage of `msg`: `I(V; Z)` for the
/// wiretap schemes, `I(v_msg; Y_other | v_other)` for the broadcast ones.
fn leakage_terms(scheme: &SchemeMatrices, msg: Message) -> (Message, Vec<Source>, Vec<Source>) {
    let other = msg.other();
    let given = if scheme.kind.is_broadcast() {
        vec![Source::Message(other)]
    } else {
        vec![]
    };
    (other, vec![Source::Message(msg)], given)
}

/// Information the intended receiver gets about `msg`.
pub fn message_mi(scheme: &SchemeMatrices, msg: Message, p: f64, opts: MiOptions) -> Result<f64> {
    check_message(scheme, msg)?;
    let (rx, target, given) = legit_terms(msg);
    Ok(conditional_mi(scheme, rx, &target, &given, p, opts))
}

/// Information the other receiver gets about `msg`.
pub fn message_leakage(scheme: &SchemeMatrices, msg: Message, p: f64, opts: MiOptions) -> Result<f64> {
    check_message(scheme, msg)?;
    let (rx, target, given) = leakage_terms(scheme, msg);
    Ok(conditional_mi(scheme, rx, &target, &given, p, opts))
}

/// `I(V; Y)`, or `I(vA; Y)` for the broadcast schemes.
pub fn mutual_info_legit(scheme: &SchemeMatrices, p: f64) -> f64 {
    message_mi(scheme, Message::A, p, MiOptions::default()).expect("every scheme carries message A")
}

/// `I(V; Z)`, or `I(vA; Z | vB)` for the broadcast schemes.
pub fn leakage_eaves(scheme: &SchemeMatrices, p: f64) -> f64 {
    message_leakage(scheme, Message::A, p, MiOptions::default()).expect("every scheme carries message A")
}

/// Rate (`leakage == false`) or leakage of `msg` over a grid, reusing one
/// observation matrix for all powers.
pub fn mi_curve(
    scheme: &SchemeMatrices,
    msg: Message,
    leakage: bool,
    grid: &SnrGrid,
    opts: MiOptions,
) -> Result<MiCurve> {
    check_message(scheme, msg)?;
    let (rx, target, given) = if leakage {
        leakage_terms(scheme, msg)
    } else {
        legit_terms(msg)
    };
    let obs = scheme.observation(rx);
    let values = grid
        .powers()
        .iter()
        .map(|&p| conditional_mi_on(&obs, scheme, &target, &given, scheme.symbol_power(p), opts))
        .collect();
    Ok(MiCurve {
        grid: grid.clone(),
        values,
    })
}
