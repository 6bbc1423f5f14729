//! Reference values computed independently of the library's closed forms:
//! probabilities are integrated directly over the gain densities, with
//! statrs supplying the incomplete gamma function.

#![allow(dead_code)]

use nomacast_core::analysis::{oracle_integrate, AnalysisParams};
use nomacast_core::LinkConfig;
use statrs::function::gamma::gamma_lr;

pub fn params(m: u32, k: u32, snr_db: f64, rate_unicast: f64, rate_secrecy: f64) -> AnalysisParams {
    let cfg = LinkConfig::from_db(snr_db, 1.0, rate_unicast, rate_secrecy).unwrap();
    AnalysisParams::new(m, k, &cfg).unwrap()
}

/// CDF of Gamma(m, 1).
pub fn gamma_cdf(m: u32, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        gamma_lr(f64::from(m), x)
    }
}

/// P(c < u < z1, unicast outage): the unicast user beats the weakest other
/// user but `z1 * alpha` stays below `eps_U / rho`, i.e.
/// `u < z1 < psi u / (u - c)`, which is nonempty only for `u < c + psi`.
pub fn q3_reference(p: &AnalysisParams) -> f64 {
    let (c, psi, k1, m) = (p.floor(), p.psi(), f64::from(p.users - 1), p.antennas);
    let integrand = |u: f64| {
        let top = if u > c {
            psi * u / (u - c)
        } else {
            f64::INFINITY
        };
        k1 * (-k1 * u).exp() * (gamma_cdf(m, top) - gamma_cdf(m, u)).max(0.0)
    };
    oracle_integrate(integrand, c, c + psi, 1e-12).unwrap()
}

fn minmax_density(u: f64, v: f64, k: u32) -> f64 {
    let k = f64::from(k);
    (k - 1.0) * (k - 2.0) * (-u - v).exp() * ((-u).exp() - (-v).exp()).powf(k - 3.0)
}

fn nested(p: &AnalysisParams, inner: impl Fn(f64, f64) -> f64 + Copy) -> f64 {
    let c = p.floor();
    oracle_integrate(
        |v| {
            if v <= c {
                return 0.0;
            }
            oracle_integrate(|u| minmax_density(u, v, p.users) * inner(u, v), c, v, 1e-13).unwrap()
        },
        c,
        f64::INFINITY,
        1e-11,
    )
    .unwrap()
}

/// Secrecy outage with `u > c` where the unicast user clears `2^Rs v` but
/// not by enough: `2^Rs v < z1 < 2^Rs v + xi / (1 - c/u)`.
pub fn q4_reference(p: &AnalysisParams) -> f64 {
    let (c, xi, m, scale) = (p.floor(), p.xi(), p.antennas, p.rate_secrecy.exp2());
    nested(p, |u, v| {
        let lo = scale * v;
        gamma_cdf(m, lo + xi / (1.0 - c / u)) - gamma_cdf(m, lo)
    })
}

/// Secrecy outage with `c < u < z1 < 2^Rs v`.
pub fn q6_reference(p: &AnalysisParams) -> f64 {
    let (m, scale) = (p.antennas, p.rate_secrecy.exp2());
    nested(p, |u, v| gamma_cdf(m, scale * v) - gamma_cdf(m, u))
}

/// One-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Critical value at the 1% level (asymptotic).
pub const KS_1PCT: f64 = 1.628;

/// Golden values of the secrecy-dominance pilot run.
#[derive(Debug)]
pub struct Pilot {
    pub seed: u64,
    pub samples: u64,
    pub snr_db: f64,
    pub violations: u64,
    pub mean_gap: f64,
    pub bound: f64,
}

pub fn load_pilot() -> Pilot {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/secrecy_pilot.txt");
    let text = std::fs::read_to_string(path).unwrap();
    let get = |key: &str| -> &str {
        text.lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .filter_map(|l| l.split_once('='))
            .find(|(k, _)| k.trim() == key)
            .map(|(_, v)| v.trim())
            .unwrap_or_else(|| panic!("pilot file lacks `{key}`"))
    };
    Pilot {
        seed: get("seed").parse().unwrap(),
        samples: get("samples").parse().unwrap(),
        snr_db: get("snr_db").parse().unwrap(),
        violations: get("violations").parse().unwrap(),
        mean_gap: get("mean_gap").parse().unwrap(),
        bound: get("bound").parse().unwrap(),
    }
}

/// One-sided 99.9% upper limit on a rate given `k` events in `n` trials.
pub fn violation_bound(k: u64, n: u64) -> f64 {
    let k = k as f64;
    (k + 3.09 * k.sqrt() + 1000f64.ln()) / n as f64
}
