//! Secrecy degrees of freedom of the two-user MIMO broadcast channel with
//! delayed CSIT.
//!
//! * [`sdof_theory`]: closed-form SDoF values and regions, exact rationals.
//! * [`channel_model`]: seeded i.i.d. Gaussian channel realizations.
//! * [`ana_schemes`]: artificial-noise-alignment precoders and effective
//!   block channels.
//! * [`dof_analysis`]: log-det mutual information, slope fits and Monte
//!   Carlo SDoF estimates.
//! * [`entropy_oracle`]: exhaustive check of the entropy inequalities for
//!   entropy-symmetric discrete sources.

pub mod ana_schemes;
pub mod channel_model;
pub mod dof_analysis;
pub mod entropy_oracle;
pub mod error;
pub mod linalg;
pub mod sdof_theory;

pub use ana_schemes::{
    build_precoders, build_scheme, phase_plan, sample_scheme, transmit_signals, Message, PhasePlan, Precoders,
    SchemeKind, SchemeMatrices,
};
pub use channel_model::{sample_states, ChannelRealization, Seed, StateMatrix};
pub use dof_analysis::{monte_carlo_sdof, MonteCarloConfig, SimulationRecord, SnrGrid};
pub use entropy_oracle::{verify_essential_lemma, ExchangeableSource, LemmaReport};
pub use error::{Error, Result};
pub use sdof_theory::{AntennaConfig, CsitMode, Rational, SdofRegion};
