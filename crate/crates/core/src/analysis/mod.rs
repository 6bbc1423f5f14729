//! Closed-form and quadrature evaluation of the outage probabilities.

mod gamma;
mod quadrature;
mod secrecy;
mod unicast;

pub use gamma::{factorial, inc_gamma_int, IncGamma};
pub use quadrature::{oracle_integrate, ChebyshevRule};
pub use secrecy::{
    joint_minmax_pdf, rate_gap, secrecy_outage_prob, secrecy_outage_prob_with, OuterMapping,
    SecrecyCoefficients, SecrecyOutage,
};
pub use unicast::{
    multicast_outage_prob, pd_lower_bound, unicast_outage_bounds, unicast_outage_prob, PdBound,
    UnicastBounds, UnicastOutage,
};

pub(crate) use gamma::{gamma_p, gamma_p_diff, gamma_q};

use crate::error::{invalid, Result};
use crate::transmission::LinkConfig;

/// Default Chebyshev-Gauss order for the unicast outage integral.
pub const DEFAULT_UNICAST_NODES: usize = 20;
/// Default Chebyshev-Gauss order (per dimension) for the secrecy integrals.
pub const DEFAULT_SECRECY_NODES: usize = 500;

/// System size plus the thresholds derived from a [`LinkConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisParams {
    pub antennas: u32,
    pub users: u32,
    pub rho: f64,
    pub rate_multicast: f64,
    pub rate_secrecy: f64,
    pub eps_m: f64,
    pub eps_u: f64,
    pub eps_s: f64,
}

impl AnalysisParams {
    pub fn new(antennas: u32, users: u32, cfg: &LinkConfig) -> Result<Self> {
        if antennas < 1 {
            return Err(invalid("antennas", "need at least one antenna"));
        }
        if users < 2 {
            return Err(invalid("users", "need at least two users"));
        }
        Ok(Self {
            antennas,
            users,
            rho: cfg.rho,
            rate_multicast: cfg.rate_multicast,
            rate_secrecy: cfg.rate_secrecy,
            eps_m: cfg.eps_multicast(),
            eps_u: cfg.eps_unicast(),
            eps_s: cfg.eps_secrecy(),
        })
    }

    /// `eps_M / rho`: the multicast decoding floor.
    pub fn floor(&self) -> f64 {
        self.eps_m / self.rho
    }

    pub fn psi(&self) -> f64 {
        self.eps_u * (1.0 + self.eps_m) / self.rho
    }

    pub fn phi(&self) -> f64 {
        self.floor() + self.psi()
    }

    pub fn xi(&self) -> f64 {
        self.eps_s * (1.0 + self.eps_m) / self.rho
    }

    /// Lower end of the reciprocal-gain integration range.
    pub fn a(&self) -> f64 {
        1.0 / (self.psi() * (1.0 + self.floor() / self.psi()))
    }

    /// Upper end of the reciprocal-gain integration range, `rho / eps_M`.
    pub fn b(&self) -> f64 {
        self.rho / self.eps_m
    }

    pub(crate) fn k(&self) -> f64 {
        f64::from(self.users)
    }
}
