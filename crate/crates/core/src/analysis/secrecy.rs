use crate::error::{invalid, Error, Result};
use crate::transmission::log2_1p;

use super::{gamma_p_diff, gamma_q, AnalysisParams, ChebyshevRule};

/// Gap between the NOMA and OMA unicast rates of a user with gain `x`, when
/// the weakest non-unicast gain `u` sets the NOMA power split.
///
/// Zero at `x = u`; increasing in `x` at high SNR.
pub fn rate_gap(u: f64, x: f64, p: &AnalysisParams) -> Result<f64> {
    let c = p.floor();
    if u.is_nan() || u <= c {
        return Err(invalid(
            "u",
            format!("must exceed eps_M/rho = {c}, got {u}"),
        ));
    }
    if !x.is_finite() || x < u {
        return Err(invalid(
            "x",
            format!("must be finite and at least u = {u}, got {x}"),
        ));
    }
    let rho = p.rho;
    let alpha = (u - c) / (u * (1.0 + p.eps_m));
    let time_share = 1.0 - p.rate_multicast / log2_1p(rho * u);
    Ok(log2_1p(rho * x * alpha) - time_share * log2_1p(rho * x))
}

/// Joint density of the smallest and largest of `K - 1` i.i.d. Exp(1) gains.
pub fn joint_minmax_pdf(u: f64, v: f64, users: u32) -> Result<f64> {
    if users < 3 {
        return Err(Error::UnsupportedAnalytics(format!(
            "min/max density needs K >= 3, got K = {users}"
        )));
    }
    if !(0.0 <= u && u <= v) {
        return Err(invalid("u, v", format!("need 0 <= u <= v, got ({u}, {v})")));
    }
    Ok(minmax_pdf(u, v, users))
}

#[inline]
fn minmax_pdf(u: f64, v: f64, users: u32) -> f64 {
    let k = f64::from(users);
    // e^{-u} - e^{-v} without cancellation
    let spread = -(-u).exp() * (u - v).exp_m1();
    (k - 1.0) * (k - 2.0) * (-u - v).exp() * spread.powi(users as i32 - 3)
}

/// Coefficients of the binomial expansion of [`joint_minmax_pdf`]:
/// `f(u, v) = sum_m tau_m e^{-(K-2-m) u} e^{-(m+1) v}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecrecyCoefficients {
    tau: Vec<f64>,
}

impl SecrecyCoefficients {
    pub fn new(users: u32) -> Result<Self> {
        if users < 3 {
            return Err(Error::UnsupportedAnalytics(format!(
                "secrecy analytics need K >= 3, got K = {users}"
            )));
        }
        let k = f64::from(users);
        let n = users - 3;
        let mut binom = 1.0;
        let mut tau = Vec::with_capacity(n as usize + 1);
        for m in 0..=n {
            if m > 0 {
                binom *= f64::from(n - m + 1) / f64::from(m);
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            tau.push((k - 1.0) * (k - 2.0) * binom.round() * sign);
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn pdf(&self, u: f64, v: f64) -> f64 {
        let k2 = self.tau.len() as f64;
        self.tau
            .iter()
            .enumerate()
            .map(|(m, t)| {
                let m = m as f64;
                t * (-(k2 - m) * u).exp() * (-(m + 1.0) * v).exp()
            })
            .sum()
    }
}

/// How the outer integral over the largest eavesdropper gain `v` on
/// `(eps_M/rho, inf)` is mapped onto a finite interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OuterMapping {
    /// `v = eps_M/rho - ln(1 - s)`, `s in (0, 1)`. The map does not depend on
    /// the SNR, so `N_a` nodes keep covering the bulk of `v`.
    #[default]
    ExpTail,
    /// `y = 1/v` on `(0, rho/eps_M]`. Nodes spread over a range growing with
    /// SNR; needs many more than 500 nodes above roughly 30 dB.
    Reciprocal,
}

/// Secrecy outage probability of the NOMA scheme and its three parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyOutage {
    /// `q4 + q5 + q6` clamped to `[0, 1]`.
    pub p_s: f64,
    pub raw: f64,
    /// Unicast user strongest and funded, but short of the secrecy target.
    pub q4: f64,
    /// Unicast user not the strongest of the weak set, or multicast-only.
    pub q5: f64,
    /// Unicast user beats the weakest eavesdropper but not `2^Rs v`.
    pub q6: f64,
}

pub fn secrecy_outage_prob(p: &AnalysisParams, rule: &ChebyshevRule) -> Result<SecrecyOutage> {
    secrecy_outage_prob_with(p, rule, OuterMapping::default())
}

pub fn secrecy_outage_prob_with(
    p: &AnalysisParams,
    rule: &ChebyshevRule,
    mapping: OuterMapping,
) -> Result<SecrecyOutage> {
    if p.users < 3 {
        return Err(Error::UnsupportedAnalytics(format!(
            "secrecy outage closed form needs K >= 3, got K = {}",
            p.users
        )));
    }
    let m = p.antennas;
    let k = p.k();
    let c = p.floor();
    let q5 = 1.0 - gamma_q(m, c) * (-(k - 1.0) * c).exp() + gamma_q(m, k * c) / k.powi(m as i32);

    let scale = p.rate_secrecy.exp2();
    let xi = p.xi();
    // Inner integrals over u in (c, v) for Q4 and Q6 together.
    let inner = |v: f64| -> (f64, f64) {
        let sv = scale * v;
        let half = 0.5 * (v - c);
        let mid = 0.5 * (v + c);
        let (mut s4, mut s6) = (0.0, 0.0);
        for &x in rule.nodes() {
            let u = half * x + mid;
            let w = minmax_pdf(u, v, p.users) * (1.0 - x * x).sqrt();
            s4 += w * gamma_p_diff(m, sv, sv + xi / (1.0 - c / u));
            s6 += w * gamma_p_diff(m, u, sv);
        }
        let f = half * rule.weight();
        (f * s4, f * s6)
    };

    let (mut q4, mut q6) = (0.0, 0.0);
    for &y in rule.nodes() {
        let (v, jacobian) = match mapping {
            OuterMapping::ExpTail => {
                let tail = 0.5 * (1.0 - y);
                (c - tail.ln(), 0.5 / tail)
            }
            OuterMapping::Reciprocal => {
                let b = p.b();
                let t = 0.5 * b * (y + 1.0);
                (1.0 / t, 0.5 * b / (t * t))
            }
        };
        let (i4, i6) = inner(v);
        let w = rule.weight() * (1.0 - y * y).sqrt() * jacobian;
        q4 += w * i4;
        q6 += w * i6;
    }

    let raw = q4 + q5 + q6;
    Ok(SecrecyOutage {
        p_s: raw.clamp(0.0, 1.0),
        raw,
        q4,
        q5,
        q6,
    })
}
