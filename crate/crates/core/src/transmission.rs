//! NOMA power allocation, the OMA time-sharing benchmark, and the
//! per-realization rates and outage indicators derived from them.
//!
//! All rates are in bits per channel use. Thresholds follow `eps = 2^R - 1`.

use crate::channel::EffectiveGains;
use crate::error::{invalid, Result};

/// `log2(1 + x)` without losing precision for small `x`.
#[inline]
pub(crate) fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Link-level targets and transmit SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    /// Transmit SNR, linear scale.
    pub rho: f64,
    pub rate_multicast: f64,
    pub rate_unicast: f64,
    pub rate_secrecy: f64,
}

impl LinkConfig {
    pub fn new(
        rho: f64,
        rate_multicast: f64,
        rate_unicast: f64,
        rate_secrecy: f64,
    ) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(invalid(
                "rho",
                format!("must be positive and finite, got {rho}"),
            ));
        }
        if !(rate_multicast.is_finite() && rate_multicast > 0.0) {
            return Err(invalid(
                "rate_multicast",
                format!("must be positive, got {rate_multicast}"),
            ));
        }
        if !(rate_unicast.is_finite() && rate_unicast > 0.0) {
            return Err(invalid(
                "rate_unicast",
                format!("must be positive, got {rate_unicast}"),
            ));
        }
        if !(rate_secrecy.is_finite() && rate_secrecy >= 0.0) {
            return Err(invalid(
                "rate_secrecy",
                format!("must be nonnegative, got {rate_secrecy}"),
            ));
        }
        Ok(Self {
            rho,
            rate_multicast,
            rate_unicast,
            rate_secrecy,
        })
    }

    /// Same as [`LinkConfig::new`] with the SNR given in dB.
    pub fn from_db(
        snr_db: f64,
        rate_multicast: f64,
        rate_unicast: f64,
        rate_secrecy: f64,
    ) -> Result<Self> {
        Self::new(
            db_to_linear(snr_db),
            rate_multicast,
            rate_unicast,
            rate_secrecy,
        )
    }

    pub fn eps_multicast(&self) -> f64 {
        self.rate_multicast.exp2() - 1.0
    }

    pub fn eps_unicast(&self) -> f64 {
        self.rate_unicast.exp2() - 1.0
    }

    pub fn eps_secrecy(&self) -> f64 {
        self.rate_secrecy.exp2() - 1.0
    }

    /// Gain below which a user cannot decode the multicast stream at full power.
    pub fn multicast_floor(&self) -> f64 {
        self.eps_multicast() / self.rho
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Fraction of transmit power given to the unicast stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    alpha_u2: f64,
}

impl PowerSplit {
    /// Largest unicast power fraction that keeps every user's multicast SINR
    /// at the target, clamped at zero when some user is in deep fade.
    pub fn noma(gains: &EffectiveGains, cfg: &LinkConfig) -> Self {
        let eps = cfg.eps_multicast();
        let floor = cfg.multicast_floor();
        let mut alpha = f64::INFINITY;
        for &z in std::iter::once(&gains.z1()).chain(gains.others()) {
            if z <= 0.0 {
                return Self { alpha_u2: 0.0 };
            }
            alpha = alpha.min((z - floor) / (z * (1.0 + eps)));
        }
        Self {
            alpha_u2: alpha.max(0.0),
        }
    }

    pub fn alpha_u2(&self) -> f64 {
        self.alpha_u2
    }

    pub fn alpha_m2(&self) -> f64 {
        1.0 - self.alpha_u2
    }

    /// All power goes to the multicast stream.
    pub fn is_multicast_only(&self) -> bool {
        self.alpha_u2 == 0.0
    }

    /// Multicast SINR at a user with gain `z` (unicast treated as noise).
    pub fn multicast_sinr(&self, z: f64, cfg: &LinkConfig) -> f64 {
        self.alpha_m2() * z / (self.alpha_u2 * z + 1.0 / cfg.rho)
    }
}

/// Fraction of the slot spent on multicast in the OMA benchmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSplit {
    gamma: f64,
}

impl TimeSplit {
    /// `gains` must come from the beamformer used in the multicast phase.
    pub fn oma(gains: &EffectiveGains, cfg: &LinkConfig) -> Self {
        let capacity = log2_1p(cfg.rho * gains.min_all());
        let gamma = if capacity > 0.0 {
            (cfg.rate_multicast / capacity).min(1.0)
        } else {
            1.0
        };
        Self { gamma }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_multicast_only(&self) -> bool {
        self.gamma == 1.0
    }
}

/// Unicast rate at the intended user and the eavesdropping rates at the others.
#[derive(Debug, Clone, PartialEq)]
pub struct UnicastRates {
    pub legit: f64,
    pub eaves: Vec<f64>,
}

impl UnicastRates {
    pub fn max_eaves(&self) -> f64 {
        self.eaves.iter().copied().fold(0.0, f64::max)
    }

    /// Positive part of the legitimate rate minus the best eavesdropper's.
    pub fn secrecy(&self) -> f64 {
        secrecy_rate(self.legit, &self.eaves)
    }
}

pub fn noma_rates(gains: &EffectiveGains, split: &PowerSplit, cfg: &LinkConfig) -> UnicastRates {
    let a = split.alpha_u2();
    let rate = |z: f64| log2_1p(cfg.rho * z * a);
    UnicastRates {
        legit: rate(gains.z1()),
        eaves: gains.others().iter().map(|&z| rate(z)).collect(),
    }
}

/// `gains` are the unicast-phase (MRT) gains; `split` may come from a
/// different multicast beamformer.
pub fn oma_rates(gains: &EffectiveGains, split: &TimeSplit, cfg: &LinkConfig) -> UnicastRates {
    let share = 1.0 - split.gamma();
    let rate = |z: f64| share * log2_1p(cfg.rho * z);
    UnicastRates {
        legit: rate(gains.z1()),
        eaves: gains.others().iter().map(|&z| rate(z)).collect(),
    }
}

pub fn secrecy_rate(legit: f64, eaves: &[f64]) -> f64 {
    let best = eaves.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (legit - best).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutageEvents {
    pub multicast: bool,
    pub unicast: bool,
    pub secrecy: bool,
}

/// NOMA outage indicators. The multicast event is the same predicate for
/// NOMA and OMA with a shared MRT beamformer.
pub fn outage_events(gains: &EffectiveGains, cfg: &LinkConfig) -> OutageEvents {
    let split = PowerSplit::noma(gains, cfg);
    outage_events_with(gains, &split, cfg)
}

fn outage_events_with(
    gains: &EffectiveGains,
    split: &PowerSplit,
    cfg: &LinkConfig,
) -> OutageEvents {
    let a = split.alpha_u2();
    let rho = cfg.rho;
    OutageEvents {
        multicast: gains.min_all() < cfg.multicast_floor(),
        unicast: gains.z1() * a < cfg.eps_unicast() / rho,
        secrecy: (gains.z1() - cfg.rate_secrecy.exp2() * gains.v()) * a < cfg.eps_secrecy() / rho,
    }
}

/// Everything the simulator records for one fading realization.
#[derive(Debug, Clone, PartialEq)]
pub struct RateOutcome {
    pub noma_unicast: f64,
    pub noma_eaves: Vec<f64>,
    pub oma_unicast: f64,
    pub oma_eaves: Vec<f64>,
    pub noma_secrecy: f64,
    pub oma_secrecy: f64,
    pub multicast_outage: bool,
    pub unicast_outage: bool,
    pub secrecy_outage: bool,
    /// OMA spends the whole slot on multicast. Equals `multicast_outage`
    /// whenever the OMA multicast phase also uses MRT.
    pub oma_multicast_outage: bool,
    pub oma_unicast_outage: bool,
    pub oma_secrecy_outage: bool,
    pub alpha_u2: f64,
    pub gamma: f64,
}

/// Evaluates both schemes on one realization.
///
/// `gains` are the MRT gains shared by NOMA and the OMA unicast phase;
/// `oma_multicast_gains` are the gains under the OMA multicast beamformer.
pub fn evaluate(
    gains: &EffectiveGains,
    oma_multicast_gains: &EffectiveGains,
    cfg: &LinkConfig,
) -> RateOutcome {
    let split = PowerSplit::noma(gains, cfg);
    let time = TimeSplit::oma(oma_multicast_gains, cfg);
    let noma = noma_rates(gains, &split, cfg);
    let oma = oma_rates(gains, &time, cfg);
    let events = outage_events_with(gains, &split, cfg);
    let noma_secrecy = noma.secrecy();
    let oma_secrecy = oma.secrecy();
    RateOutcome {
        noma_unicast: noma.legit,
        oma_unicast: oma.legit,
        noma_secrecy,
        oma_secrecy,
        multicast_outage: events.multicast,
        unicast_outage: events.unicast,
        secrecy_outage: events.secrecy,
        oma_multicast_outage: time.is_multicast_only(),
        oma_unicast_outage: oma.legit < cfg.rate_unicast,
        oma_secrecy_outage: oma_secrecy < cfg.rate_secrecy,
        alpha_u2: split.alpha_u2(),
        gamma: time.gamma(),
        noma_eaves: noma.eaves,
        oma_eaves: oma.eaves,
    }
}

/// [`evaluate`] with MRT in both OMA phases.
pub fn evaluate_mrt(gains: &EffectiveGains, cfg: &LinkConfig) -> RateOutcome {
    evaluate(gains, gains, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gains(z1: f64, others: &[f64]) -> EffectiveGains {
        EffectiveGains::new(z1, others.to_vec()).unwrap()
    }

    fn cfg(rho: f64, rm: f64, ru: f64, rs: f64) -> LinkConfig {
        LinkConfig::new(rho, rm, ru, rs).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(LinkConfig::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(LinkConfig::new(1.0, 0.0, 1.0, 0.0).is_err());
        assert!(LinkConfig::new(1.0, 1.0, -1.0, 0.0).is_err());
        assert!(LinkConfig::new(1.0, 1.0, 1.0, -0.5).is_err());
        let c = cfg(10.0, 1.0, 6.0, 2.0);
        assert_eq!(c.eps_multicast(), 1.0);
        assert_eq!(c.eps_unicast(), 63.0);
        assert_eq!(c.eps_secrecy(), 3.0);
        assert!((LinkConfig::from_db(20.0, 1.0, 1.0, 0.0).unwrap().rho - 100.0).abs() < 1e-12);
    }

    #[test]
    fn power_split_example() {
        let s = PowerSplit::noma(&gains(3.0, &[2.0]), &cfg(10.0, 1.0, 6.0, 0.0));
        assert!((s.alpha_u2() - 0.475).abs() < 1e-15);
        assert!((s.alpha_u2() + s.alpha_m2() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn power_split_clamps_in_deep_fade() {
        let c = cfg(10.0, 1.0, 6.0, 0.0);
        assert_eq!(
            PowerSplit::noma(&gains(3.0, &[0.05, 2.0]), &c).alpha_u2(),
            0.0
        );
        assert_eq!(PowerSplit::noma(&gains(0.0, &[2.0]), &c).alpha_u2(), 0.0);
    }

    #[test]
    fn power_split_limit() {
        let s = PowerSplit::noma(&gains(1e12, &[1e12]), &cfg(10.0, 1.0, 6.0, 0.0));
        assert!((s.alpha_u2() - 0.5).abs() < 1e-12);
        assert!(s.alpha_u2() < 0.5);
    }

    #[test]
    fn noma_rate_example() {
        let c = cfg(10.0, 1.0, 6.0, 0.0);
        let g = gains(3.0, &[2.0]);
        let r = noma_rates(&g, &PowerSplit::noma(&g, &c), &c);
        assert!((r.legit - 15.25f64.log2()).abs() < 1e-12);
        assert!((r.legit - 3.9307).abs() < 1e-4);
        let zero = noma_rates(&g, &PowerSplit { alpha_u2: 0.0 }, &c);
        assert_eq!(zero.legit, 0.0);
        assert!(zero.eaves.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn binding_user_meets_multicast_target() {
        let c = cfg(10.0, 1.0, 6.0, 0.0);
        let g = gains(3.0, &[2.0, 5.0]);
        let s = PowerSplit::noma(&g, &c);
        let rate = log2_1p(s.multicast_sinr(2.0, &c));
        assert!((rate - 1.0).abs() < 1e-12);
        assert!(log2_1p(s.multicast_sinr(3.0, &c)) > 1.0);
    }

    #[test]
    fn time_split_examples() {
        let c = cfg(10.0, 1.0, 6.0, 0.0);
        let t = TimeSplit::oma(&gains(3.0, &[2.0]), &c);
        assert!((t.gamma() - 1.0 / 21f64.log2()).abs() < 1e-15);
        assert!((t.gamma() - 0.22767).abs() < 1e-5);
        assert_eq!(TimeSplit::oma(&gains(3.0, &[0.05]), &c).gamma(), 1.0);
        assert_eq!(TimeSplit::oma(&gains(3.0, &[0.0]), &c).gamma(), 1.0);
        let tiny = TimeSplit::oma(&gains(3.0, &[2.0]), &cfg(10.0, 1e-9, 6.0, 0.0));
        assert!(tiny.gamma() > 0.0 && tiny.gamma() < 1e-9);
    }

    #[test]
    fn oma_rate_example_and_comparison() {
        let c = cfg(10.0, 1.0, 6.0, 0.0);
        let g = gains(3.0, &[2.0]);
        let oma = oma_rates(&g, &TimeSplit::oma(&g, &c), &c);
        assert!((oma.legit - (1.0 - 1.0 / 21f64.log2()) * 31f64.log2()).abs() < 1e-12);
        assert!((oma.legit - 3.82627).abs() < 1e-5);
        let noma = noma_rates(&g, &PowerSplit::noma(&g, &c), &c);
        assert!(noma.legit > oma.legit);
        let off = oma_rates(&g, &TimeSplit { gamma: 1.0 }, &c);
        assert_eq!(off.legit, 0.0);
    }

    #[test]
    fn secrecy_examples() {
        assert!((secrecy_rate(3.93, &[3.51, 1.0]) - 0.42).abs() < 1e-12);
        assert_eq!(secrecy_rate(1.0, &[2.0]), 0.0);
        let c = cfg(10.0, 1.0, 6.0, 1.0);
        let out = evaluate_mrt(&gains(3.0, &[0.01, 2.0]), &c);
        assert_eq!((out.noma_secrecy, out.oma_secrecy), (0.0, 0.0));
        assert!(out.multicast_outage && out.oma_multicast_outage);
        assert_eq!((out.noma_unicast, out.oma_unicast), (0.0, 0.0));
    }

    #[test]
    fn outage_examples() {
        let c = cfg(10.0, 1.0, 6.0, 1.0);
        let e = outage_events(&gains(3.0, &[2.0]), &c);
        assert!(!e.multicast);
        // z1 * alpha = 1.425 < 6.3
        assert!(e.unicast);
        let deep = outage_events(&gains(3.0, &[0.01]), &c);
        assert!(deep.secrecy && deep.multicast && deep.unicast);
    }

    #[test]
    fn secrecy_predicate_matches_rate_definition() {
        let c = cfg(100.0, 1.0, 6.0, 1.5);
        for &(z1, ref others) in &[
            (9.0, vec![1.0, 2.0]),
            (3.0, vec![1.0, 2.5]),
            (50.0, vec![0.5, 1.0]),
        ] {
            let out = evaluate_mrt(&gains(z1, others), &c);
            assert_eq!(out.secrecy_outage, out.noma_secrecy < c.rate_secrecy);
        }
    }

    proptest! {
        #[test]
        fn rate_identity_after_multicast(rho_db in -10.0f64..50.0, rm in 0.1f64..4.0, t in 1e-3f64..50.0) {
            // log2(1 + rho (z - eps/rho)/(1+eps)) == log2(1 + rho z) - R_M
            let c = cfg(db_to_linear(rho_db), rm, 1.0, 0.0);
            let z1 = c.multicast_floor() * (1.0 + t);
            let lhs = log2_1p(c.rho * (z1 - c.multicast_floor()) / (1.0 + c.eps_multicast()));
            let rhs = log2_1p(c.rho * z1) - rm;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * log2_1p(c.rho * z1).max(1.0));
        }

        #[test]
        fn multicast_outage_is_shared(seed in any::<u64>(), rho_db in -5.0f64..40.0) {
            let g = crate::channel::sample_gains_direct(5, 3, crate::rng::RngStream::new(seed, 0)).unwrap();
            let c = cfg(db_to_linear(rho_db), 1.0, 3.0, 1.0);
            let out = evaluate_mrt(&g, &c);
            prop_assert_eq!(out.multicast_outage, out.oma_multicast_outage);
            prop_assert_eq!(out.multicast_outage, out.alpha_u2 == 0.0);
            if out.multicast_outage {
                prop_assert_eq!(out.noma_unicast, 0.0);
                prop_assert_eq!(out.oma_unicast, 0.0);
            }
        }

        #[test]
        fn rates_nonnegative_and_monotone(seed in any::<u64>(), rho_db in -5.0f64..40.0) {
            let g = crate::channel::sample_gains_direct(6, 2, crate::rng::RngStream::new(seed, 1)).unwrap();
            let c = cfg(db_to_linear(rho_db), 1.0, 3.0, 1.0);
            let split = PowerSplit::noma(&g, &c);
            prop_assert!(split.alpha_u2() < 1.0 / (1.0 + c.eps_multicast()));
            let r = noma_rates(&g, &split, &c);
            for (&z, &rk) in g.others().iter().zip(&r.eaves) {
                prop_assert!(rk >= 0.0);
                if g.z1() >= z { prop_assert!(r.legit >= rk); }
            }
            let out = evaluate_mrt(&g, &c);
            prop_assert!(out.oma_unicast >= 0.0 && out.noma_secrecy >= 0.0 && out.oma_secrecy >= 0.0);
        }
    }
}
