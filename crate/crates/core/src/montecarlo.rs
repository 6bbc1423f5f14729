//! Seeded Monte Carlo estimation of outage probabilities and rates.
//!
//! Realization `i` of a run draws from stream `offset + i` of the plan seed,
//! and partial sums are formed over fixed-size blocks that are combined in
//! index order. The result is therefore bit-identical for any worker count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::{
    effective_gains, make_beamformer_with, sample_channel_with, sample_gains_direct_with,
    select_unicast_user, BeamformerKind, EffectiveGains,
};
use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;
use crate::transmission::{db_to_linear, evaluate, LinkConfig, RateOutcome};

/// Realizations per partial sum.
const BLOCK: u64 = 4096;
/// Bits reserved for the realization index inside a stream id.
pub const POINT_STREAM_SHIFT: u32 = 40;
/// Slack used when comparing rates that coincide in exact arithmetic.
pub const RATE_TIE_TOL: f64 = 1e-9;
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingMode {
    /// Full `K x M` channel draws with explicit beamforming.
    FullMatrix,
    /// Gains drawn from their marginal laws; MRT toward user 0 only.
    DirectGains,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemSize {
    pub antennas: u32,
    pub users: u32,
}

impl SystemSize {
    pub fn new(antennas: u32, users: u32) -> Result<Self> {
        if antennas < 1 {
            return Err(invalid("antennas", "need at least one antenna"));
        }
        if users < 2 {
            return Err(invalid("users", "need at least two users"));
        }
        Ok(Self { antennas, users })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationPlan {
    pub samples: u64,
    pub seed: u64,
    pub mode: SamplingMode,
    pub scheduling: bool,
    pub oma_beamformer: BeamformerKind,
    pub workers: usize,
}

impl SimulationPlan {
    /// Direct-gain sampling with MRT and no scheduling.
    pub fn direct(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            mode: SamplingMode::DirectGains,
            scheduling: false,
            oma_beamformer: BeamformerKind::Mrt,
            workers: 1,
        }
    }

    pub fn full(samples: u64, seed: u64) -> Self {
        Self {
            mode: SamplingMode::FullMatrix,
            ..Self::direct(samples, seed)
        }
    }

    pub fn with_scheduling(mut self, on: bool) -> Self {
        self.scheduling = on;
        self
    }

    pub fn with_oma_beamformer(mut self, kind: BeamformerKind) -> Self {
        self.oma_beamformer = kind;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    /// Falls back to full-matrix sampling when the options need it.
    pub fn fastest_valid(mut self) -> Self {
        if self.scheduling || self.oma_beamformer != BeamformerKind::Mrt {
            self.mode = SamplingMode::FullMatrix;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidPlan("samples must be at least 1".into()));
        }
        if self.samples >= 1 << POINT_STREAM_SHIFT {
            return Err(Error::InvalidPlan(format!(
                "at most 2^{POINT_STREAM_SHIFT} samples per point"
            )));
        }
        if self.workers == 0 {
            return Err(Error::InvalidPlan("workers must be at least 1".into()));
        }
        if self.mode == SamplingMode::DirectGains {
            if self.scheduling {
                return Err(Error::InvalidPlan(
                    "user scheduling requires full-matrix sampling".into(),
                ));
            }
            if self.oma_beamformer != BeamformerKind::Mrt {
                return Err(Error::InvalidPlan(
                    "direct-gain sampling only supports the MRT OMA beamformer".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Gains of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Draw {
    /// MRT gains toward the unicast user (NOMA and OMA unicast phase).
    pub gains: EffectiveGains,
    /// Gains under the OMA multicast beamformer, when it is not MRT.
    pub oma_multicast: Option<EffectiveGains>,
    pub unicast_user: usize,
}

/// Draws realization `stream` according to the plan.
pub fn draw(sys: SystemSize, plan: &SimulationPlan, stream: RngStream) -> Result<Draw> {
    let mut rng = stream.rng();
    let (users, antennas) = (sys.users as usize, sys.antennas as usize);
    match plan.mode {
        SamplingMode::DirectGains => Ok(Draw {
            gains: sample_gains_direct_with(users, antennas, &mut rng)?,
            oma_multicast: None,
            unicast_user: 0,
        }),
        SamplingMode::FullMatrix => {
            let h = sample_channel_with(users, antennas, &mut rng)?;
            let unicast = if plan.scheduling {
                select_unicast_user(&h)
            } else {
                0
            };
            let w = make_beamformer_with(&h, unicast, BeamformerKind::Mrt, &mut rng)?;
            let gains = effective_gains(&h, &w, unicast)?;
            let oma_multicast = match plan.oma_beamformer {
                BeamformerKind::Mrt => None,
                kind => {
                    let p = make_beamformer_with(&h, unicast, kind, &mut rng)?;
                    Some(effective_gains(&h, &p, unicast)?)
                }
            };
            Ok(Draw {
                gains,
                oma_multicast,
                unicast_user: unicast,
            })
        }
    }
}

/// Quantities estimated by the simulator. Outage-rate kinds are
/// `(1 - outage) * target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricKind {
    MulticastOutage,
    UnicastOutage,
    OmaUnicastOutage,
    SecrecyOutage,
    OmaSecrecyOutage,
    /// `P(R_{U,1} <= Rbar_{U,1})`
    PD,
    MeanNomaUnicastRate,
    MeanOmaUnicastRate,
    MeanNomaSecrecyRate,
    MeanOmaSecrecyRate,
    OutageRateUnicast,
    OmaOutageRateUnicast,
    OutageRateSecrecy,
    OmaOutageRateSecrecy,
}

impl MetricKind {
    pub const ALL: [MetricKind; 14] = [
        MetricKind::MulticastOutage,
        MetricKind::UnicastOutage,
        MetricKind::OmaUnicastOutage,
        MetricKind::SecrecyOutage,
        MetricKind::OmaSecrecyOutage,
        MetricKind::PD,
        MetricKind::MeanNomaUnicastRate,
        MetricKind::MeanOmaUnicastRate,
        MetricKind::MeanNomaSecrecyRate,
        MetricKind::MeanOmaSecrecyRate,
        MetricKind::OutageRateUnicast,
        MetricKind::OmaOutageRateUnicast,
        MetricKind::OutageRateSecrecy,
        MetricKind::OmaOutageRateSecrecy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::MulticastOutage => "multicast_outage",
            MetricKind::UnicastOutage => "unicast_outage",
            MetricKind::OmaUnicastOutage => "oma_unicast_outage",
            MetricKind::SecrecyOutage => "secrecy_outage",
            MetricKind::OmaSecrecyOutage => "oma_secrecy_outage",
            MetricKind::PD => "p_d",
            MetricKind::MeanNomaUnicastRate => "mean_noma_unicast_rate",
            MetricKind::MeanOmaUnicastRate => "mean_oma_unicast_rate",
            MetricKind::MeanNomaSecrecyRate => "mean_noma_secrecy_rate",
            MetricKind::MeanOmaSecrecyRate => "mean_oma_secrecy_rate",
            MetricKind::OutageRateUnicast => "outage_rate_unicast",
            MetricKind::OmaOutageRateUnicast => "oma_outage_rate_unicast",
            MetricKind::OutageRateSecrecy => "outage_rate_secrecy",
            MetricKind::OmaOutageRateSecrecy => "oma_outage_rate_secrecy",
        }
    }

    pub fn is_probability(self) -> bool {
        matches!(
            self,
            MetricKind::MulticastOutage
                | MetricKind::UnicastOutage
                | MetricKind::OmaUnicastOutage
                | MetricKind::SecrecyOutage
                | MetricKind::OmaSecrecyOutage
                | MetricKind::PD
        )
    }

    /// Secrecy outage kinds are meaningless without a secrecy target.
    pub fn needs_secrecy_target(self) -> bool {
        matches!(
            self,
            MetricKind::SecrecyOutage
                | MetricKind::OmaSecrecyOutage
                | MetricKind::OutageRateSecrecy
                | MetricKind::OmaOutageRateSecrecy
        )
    }

    fn index(self) -> usize {
        self as usize
    }

    fn value(self, out: &RateOutcome, cfg: &LinkConfig) -> f64 {
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        match self {
            MetricKind::MulticastOutage => ind(out.multicast_outage),
            MetricKind::UnicastOutage => ind(out.unicast_outage),
            MetricKind::OmaUnicastOutage => ind(out.oma_unicast_outage),
            MetricKind::SecrecyOutage => ind(out.secrecy_outage),
            MetricKind::OmaSecrecyOutage => ind(out.oma_secrecy_outage),
            MetricKind::PD => ind(out.noma_unicast <= out.oma_unicast + RATE_TIE_TOL),
            MetricKind::MeanNomaUnicastRate => out.noma_unicast,
            MetricKind::MeanOmaUnicastRate => out.oma_unicast,
            MetricKind::MeanNomaSecrecyRate => out.noma_secrecy,
            MetricKind::MeanOmaSecrecyRate => out.oma_secrecy,
            MetricKind::OutageRateUnicast => ind(!out.unicast_outage) * cfg.rate_unicast,
            MetricKind::OmaOutageRateUnicast => ind(!out.oma_unicast_outage) * cfg.rate_unicast,
            MetricKind::OutageRateSecrecy => ind(!out.secrecy_outage) * cfg.rate_secrecy,
            MetricKind::OmaOutageRateSecrecy => ind(!out.oma_secrecy_outage) * cfg.rate_secrecy,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        MetricKind::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| invalid("metric", format!("unknown metric `{s}`")))
    }
}

/// Sample mean with its standard error and a 95% normal interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
}

impl Estimate {
    fn from_moments(m: &Moments, n: u64, probability: bool) -> Self {
        let nf = n as f64;
        let mean = m.sum.value() / nf;
        let var = if n > 1 {
            ((m.sum_sq.value() - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        let stderr = (var / nf).sqrt();
        let (mut lo, mut hi) = (mean - Z_95 * stderr, mean + Z_95 * stderr);
        if probability {
            lo = lo.max(0.0);
            hi = hi.min(1.0);
        }
        Estimate {
            value: mean,
            stderr,
            ci_low: lo.min(mean),
            ci_high: hi.max(mean),
            samples: n,
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    sum: CompensatedSum,
    sum_sq: CompensatedSum,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.sum.add(x);
        self.sum_sq.add(x * x);
    }

    fn merge(&mut self, other: &Moments) {
        self.sum.add(other.sum.value());
        self.sum_sq.add(other.sum_sq.value());
    }
}

const N_METRICS: usize = MetricKind::ALL.len();
const SLOT_GAP: usize = N_METRICS;
const SLOT_VIOLATION: usize = N_METRICS + 1;
const SLOT_MC_MISMATCH: usize = N_METRICS + 2;
const SLOTS: usize = N_METRICS + 3;

/// Accumulated moments for every metric at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    samples: u64,
    slots: [Moments; SLOTS],
}

impl Summary {
    fn empty() -> Self {
        Self {
            samples: 0,
            slots: [Moments::default(); SLOTS],
        }
    }

    fn record(&mut self, out: &RateOutcome, cfg: &LinkConfig) {
        self.samples += 1;
        for m in MetricKind::ALL {
            self.slots[m.index()].push(m.value(out, cfg));
        }
        self.slots[SLOT_GAP].push(out.noma_secrecy - out.oma_secrecy);
        let violated = out.noma_secrecy < out.oma_secrecy - RATE_TIE_TOL;
        self.slots[SLOT_VIOLATION].push(if violated { 1.0 } else { 0.0 });
        let mismatch = out.multicast_outage != out.oma_multicast_outage;
        self.slots[SLOT_MC_MISMATCH].push(if mismatch { 1.0 } else { 0.0 });
    }

    fn merge(&mut self, other: &Summary) {
        self.samples += other.samples;
        for (a, b) in self.slots.iter_mut().zip(&other.slots) {
            a.merge(b);
        }
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn estimate(&self, metric: MetricKind) -> Estimate {
        Estimate::from_moments(
            &self.slots[metric.index()],
            self.samples,
            metric.is_probability(),
        )
    }

    /// Mean of `R_S - Rbar_S`.
    pub fn secrecy_gap(&self) -> Estimate {
        Estimate::from_moments(&self.slots[SLOT_GAP], self.samples, false)
    }

    /// Fraction of realizations with `R_S < Rbar_S`.
    pub fn secrecy_violations(&self) -> Estimate {
        Estimate::from_moments(&self.slots[SLOT_VIOLATION], self.samples, true)
    }

    /// Realizations whose NOMA and OMA multicast outage indicators differ.
    pub fn multicast_mismatches(&self) -> u64 {
        self.slots[SLOT_MC_MISMATCH].sum.value().round() as u64
    }
}

fn run_block(
    cfg: &LinkConfig,
    sys: SystemSize,
    plan: &SimulationPlan,
    first: u64,
    last: u64,
) -> Result<Summary> {
    let mut acc = Summary::empty();
    for i in first..last {
        let d = draw(sys, plan, RngStream::new(plan.seed, i))?;
        let out = evaluate(&d.gains, d.oma_multicast.as_ref().unwrap_or(&d.gains), cfg);
        acc.record(&out, cfg);
    }
    Ok(acc)
}

/// Runs `plan.samples` realizations drawn from streams `offset..offset + samples`.
pub fn simulate_at(
    cfg: &LinkConfig,
    sys: SystemSize,
    plan: &SimulationPlan,
    offset: u64,
) -> Result<Summary> {
    plan.validate()?;
    let blocks = plan.samples.div_ceil(BLOCK);
    let work = || -> Result<Vec<Summary>> {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let first = offset + b * BLOCK;
                let last = offset + ((b + 1) * BLOCK).min(plan.samples);
                run_block(cfg, sys, plan, first, last)
            })
            .collect()
    };
    let parts = if plan.workers == 1 {
        (0..blocks)
            .map(|b| {
                let first = offset + b * BLOCK;
                let last = offset + ((b + 1) * BLOCK).min(plan.samples);
                run_block(cfg, sys, plan, first, last)
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(plan.workers)
            .build()
            .map_err(|e| Error::InvalidPlan(format!("thread pool: {e}")))?
            .install(work)?
    };
    let mut total = Summary::empty();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

pub fn simulate(cfg: &LinkConfig, sys: SystemSize, plan: &SimulationPlan) -> Result<Summary> {
    simulate_at(cfg, sys, plan, 0)
}

pub fn estimate(
    metric: MetricKind,
    cfg: &LinkConfig,
    sys: SystemSize,
    plan: &SimulationPlan,
) -> Result<Estimate> {
    Ok(simulate(cfg, sys, plan)?.estimate(metric))
}

/// Simulates every SNR point of `grid_db`; point `j` uses streams
/// starting at `j << POINT_STREAM_SHIFT`.
pub fn sweep_all(
    template: &LinkConfig,
    sys: SystemSize,
    grid_db: &[f64],
    plan: &SimulationPlan,
) -> Result<Vec<(f64, Summary)>> {
    grid_db
        .iter()
        .enumerate()
        .map(|(j, &db)| {
            let cfg = LinkConfig {
                rho: db_to_linear(db),
                ..*template
            };
            let s = simulate_at(&cfg, sys, plan, (j as u64) << POINT_STREAM_SHIFT)?;
            Ok((db, s))
        })
        .collect()
}

pub fn sweep(
    metric: MetricKind,
    template: &LinkConfig,
    sys: SystemSize,
    grid_db: &[f64],
    plan: &SimulationPlan,
) -> Result<Vec<(f64, Estimate)>> {
    if grid_db.is_empty() {
        return Err(invalid("snr_grid", "grid must be nonempty"));
    }
    Ok(sweep_all(template, sys, grid_db, plan)?
        .into_iter()
        .map(|(db, s)| (db, s.estimate(metric)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyRateComparison {
    /// Fraction of realizations with `R_S < Rbar_S - 1e-9`.
    pub violation_fraction: f64,
    pub violations: u64,
    pub mean_gap: f64,
    pub mean_gap_stderr: f64,
    pub samples: u64,
}

/// Checks that NOMA's secrecy rate is at least OMA's, realization by realization.
pub fn compare_secrecy_rates(
    template: &LinkConfig,
    sys: SystemSize,
    plan: &SimulationPlan,
    snr_db: f64,
) -> Result<SecrecyRateComparison> {
    let cfg = LinkConfig {
        rho: db_to_linear(snr_db),
        ..*template
    };
    let s = simulate(&cfg, sys, plan)?;
    let v = s.secrecy_violations();
    let gap = s.secrecy_gap();
    Ok(SecrecyRateComparison {
        violation_fraction: v.value,
        violations: s.slots[SLOT_VIOLATION].sum.value().round() as u64,
        mean_gap: gap.value,
        mean_gap_stderr: gap.stderr,
        samples: s.samples,
    })
}
