use super::{gamma_p, gamma_q, AnalysisParams, ChebyshevRule};

/// Multicast outage probability, identical for NOMA and OMA:
/// `P(min(z1, u) < eps_M / rho)`.
pub fn multicast_outage_prob(p: &AnalysisParams) -> f64 {
    let c = p.floor();
    1.0 - gamma_q(p.antennas, c) * (-(p.k() - 1.0) * c).exp()
}

/// Unicast outage probability of the NOMA scheme and its three parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnicastOutage {
    /// `q1 + q2 + q3` clamped to `[0, 1]`.
    pub p_n: f64,
    pub raw: f64,
    /// Some user cannot decode the multicast stream.
    pub q1: f64,
    /// Unicast user is the weakest and short of the unicast target.
    pub q2: f64,
    /// Another user is the weakest and the unicast user still falls short.
    pub q3: f64,
    /// `|P_N(n) - P_N(2n)|`.
    pub doubling_delta: f64,
}

impl UnicastOutage {
    /// The rule is too coarse for this operating point.
    pub fn under_resolved(&self) -> bool {
        self.doubling_delta > 1e-4
    }
}

fn q2(p: &AnalysisParams) -> f64 {
    let k = p.k();
    let m = p.antennas;
    (gamma_p(m, k * p.phi()) - gamma_p(m, k * p.floor())) / k.powi(m as i32)
}

fn q3(p: &AnalysisParams, rule: &ChebyshevRule) -> f64 {
    let m = p.antennas;
    let k = p.k();
    let psi = p.psi();
    let c = p.floor();
    // CDF of 1/z1 and density of 1/u.
    let cdf_inv_z1 = |z: f64| if z > 0.0 { gamma_q(m, 1.0 / z) } else { 0.0 };
    let pdf_inv_u = |x: f64| (k - 1.0) / (x * x) * (-(k - 1.0) / x).exp();
    rule.integrate(
        |x| (cdf_inv_z1(x) - cdf_inv_z1((1.0 - c * x) / psi)) * pdf_inv_u(x),
        p.a(),
        p.b(),
    )
}

pub fn unicast_outage_prob(p: &AnalysisParams, rule: &ChebyshevRule) -> UnicastOutage {
    let q1 = multicast_outage_prob(p);
    let q2 = q2(p);
    let q3 = q3(p, rule);
    let raw = q1 + q2 + q3;
    let finer = ChebyshevRule::new(2 * rule.len()).expect("nonempty rule");
    let raw_finer = q1 + q2 + self::q3(p, &finer);
    UnicastOutage {
        p_n: raw.clamp(0.0, 1.0),
        raw,
        q1,
        q2,
        q3,
        doubling_delta: (raw_finer.clamp(0.0, 1.0) - raw.clamp(0.0, 1.0)).abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnicastBounds {
    pub lower: f64,
    pub upper: f64,
    /// High-SNR form of the lower bound, `K eps_M / rho`.
    pub lower_hisnr: f64,
    pub q1: f64,
    pub q2: f64,
    pub q31: f64,
}

pub fn unicast_outage_bounds(p: &AnalysisParams) -> UnicastBounds {
    let q1 = multicast_outage_prob(p);
    let q2 = q2(p);
    let c = p.floor();
    let k1 = p.k() - 1.0;
    let q31 = (-k1 * c).exp() - (-k1 * (c + p.psi())).exp();
    UnicastBounds {
        lower: q1,
        upper: q1 + q2 + q31,
        lower_hisnr: p.k() * c,
        q1,
        q2,
        q31,
    }
}

/// Lower bound on `P(R_{U,1} <= Rbar_{U,1})`, the event `eps_M/rho < z1 < u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdBound {
    pub exact: f64,
    /// `K^{-M}`
    pub hisnr: f64,
}

pub fn pd_lower_bound(p: &AnalysisParams) -> PdBound {
    let k = p.k();
    let km = k.powi(p.antennas as i32);
    PdBound {
        exact: gamma_q(p.antennas, k * p.floor()) / km,
        hisnr: 1.0 / km,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transmission::{db_to_linear, LinkConfig};

    fn params(m: u32, k: u32, rho: f64, rm: f64, ru: f64) -> AnalysisParams {
        AnalysisParams::new(m, k, &LinkConfig::new(rho, rm, ru, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn multicast_outage_closed_form() {
        let p = params(1, 2, 10.0, 1.0, 1.0);
        assert!((multicast_outage_prob(&p) - (1.0 - (-0.2f64).exp())).abs() < 1e-15);
        assert!((multicast_outage_prob(&p) - 0.18127).abs() < 1e-5);
        assert!(multicast_outage_prob(&params(4, 5, 1e15, 1.0, 1.0)) < 1e-12);
    }

    #[test]
    fn unicast_outage_limits() {
        let rule = ChebyshevRule::new(20).unwrap();
        let low = unicast_outage_prob(&params(10, 11, db_to_linear(-30.0), 1.0, 6.0), &rule);
        assert!((low.p_n - 1.0).abs() < 1e-9);
        let high = unicast_outage_prob(&params(2, 11, db_to_linear(80.0), 1.0, 6.0), &rule);
        assert!(high.p_n < 1e-6);
    }

    #[test]
    fn components_are_probabilities() {
        let rule = ChebyshevRule::new(20).unwrap();
        for m in [1, 2, 5, 10] {
            for db in (0..=40).step_by(4) {
                let o =
                    unicast_outage_prob(&params(m, 11, db_to_linear(db as f64), 1.0, 6.0), &rule);
                for q in [o.q1, o.q2, o.q3] {
                    assert!((-1e-12..=1.0).contains(&q), "m={m} db={db} q={q}");
                }
                assert!(o.raw <= 1.0 + 1e-3 && o.raw >= -1e-3);
            }
        }
    }

    #[test]
    fn nonincreasing_in_snr() {
        let rule = ChebyshevRule::new(20).unwrap();
        for m in [2, 10] {
            let v: Vec<f64> = (0..=50)
                .map(|db| {
                    unicast_outage_prob(&params(m, 11, db_to_linear(db as f64), 1.0, 6.0), &rule)
                        .p_n
                })
                .collect();
            assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{v:?}");
        }
    }

    #[test]
    fn bounds_sandwich_outage() {
        let rule = ChebyshevRule::new(200).unwrap();
        for (m, k) in [(2, 3), (2, 11), (10, 11), (4, 6)] {
            for db in (0..=50).step_by(5) {
                let p = params(m, k, db_to_linear(db as f64), 1.0, 6.0);
                let b = unicast_outage_bounds(&p);
                let o = unicast_outage_prob(&p, &rule);
                assert!(
                    b.lower <= o.p_n + 1e-9 && o.p_n <= b.upper + 1e-9,
                    "m={m} k={k} db={db}"
                );
            }
        }
    }

    #[test]
    fn high_snr_lower_bound() {
        let b = unicast_outage_bounds(&params(2, 3, 1e4, 1.0, 6.0));
        assert!((b.lower_hisnr - 3e-4).abs() < 1e-18);
        // the K c form is tight only for single-antenna unicast; with M > 1
        // the unicast user's own fade is negligible and Q1 ~ (K - 1) c
        assert!((b.lower / 2e-4 - 1.0).abs() < 1e-3);
        let single = unicast_outage_bounds(&params(1, 3, 1e6, 1.0, 6.0));
        assert!((single.lower / single.lower_hisnr - 1.0).abs() < 1e-3);
    }

    #[test]
    fn pd_bound_values() {
        let b = pd_lower_bound(&params(2, 3, 30.0, 1.0, 6.0));
        assert!((b.exact - 1.1 * (-0.1f64).exp() / 9.0).abs() < 1e-15);
        assert!((b.exact - 0.110591).abs() < 1e-6);
        let hi = pd_lower_bound(&params(2, 3, 1e6, 1.0, 6.0));
        assert!((hi.exact / hi.hisnr - 1.0).abs() < 0.01);
    }

    #[test]
    fn coarse_rule_is_flagged() {
        let p = params(2, 11, db_to_linear(16.0), 1.0, 6.0);
        let coarse = unicast_outage_prob(&p, &ChebyshevRule::new(2).unwrap());
        assert!(coarse.under_resolved());
        let fine = unicast_outage_prob(&p, &ChebyshevRule::new(500).unwrap());
        assert!(!fine.under_resolved());
    }
}
