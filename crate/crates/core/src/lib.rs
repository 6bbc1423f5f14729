//! Outage and secrecy analysis of a downlink where one base station serves a
//! multicast stream to `K` users and a confidential unicast stream to one of
//! them, either by power-domain superposition (NOMA) or by time sharing (OMA).

pub mod analysis;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod montecarlo;
pub mod rng;
pub mod transmission;

pub use channel::{
    effective_gains, make_beamformer, sample_channel, sample_gains_direct, select_unicast_user,
    Beamformer, BeamformerKind, ChannelMatrix, EffectiveGains,
};
pub use error::{Error, Result};
pub use experiments::{preset, run_scenario, Overrides, RunMode, Scenario, Settings};
pub use montecarlo::{Estimate, MetricKind, SamplingMode, SimulationPlan, SystemSize};
pub use rng::RngStream;
pub use transmission::{db_to_linear, evaluate, evaluate_mrt, LinkConfig, RateOutcome};
