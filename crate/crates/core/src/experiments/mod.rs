//! Scenario definitions, SNR sweeps, CSV output and analytic-vs-simulation
//! comparison reports.

mod config;
mod output;
mod run;

pub use config::parse_config;
pub use output::{emit_csv, format_sig9, parse_csv, write_csv, Method, Row, CSV_HEADER};
pub use run::{
    analytic_support, run_scenario, write_outputs, ComparisonReport, ComparisonRow, GapRow,
    RunOutput, Support, VariantResult, Verdict,
};

use std::fmt;
use std::str::FromStr;

use crate::channel::BeamformerKind;
use crate::error::{Error, Result};
use crate::montecarlo::{MetricKind, SimulationPlan, SystemSize};
use crate::transmission::{db_to_linear, LinkConfig};

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "fig5"];

const DEFAULT_SAMPLES: u64 = 1_000_000;
const DEFAULT_SEED: u64 = 20_170_101;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Analytic,
    Mc,
    Both,
}

impl RunMode {
    pub fn wants_analytic(self) -> bool {
        matches!(self, RunMode::Analytic | RunMode::Both)
    }

    pub fn wants_mc(self) -> bool {
        matches!(self, RunMode::Mc | RunMode::Both)
    }
}

impl FromStr for RunMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "analytic" => Ok(RunMode::Analytic),
            "mc" => Ok(RunMode::Mc),
            "both" => Ok(RunMode::Both),
            other => Err(Error::Config(format!(
                "mode must be analytic, mc or both, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunMode::Analytic => "analytic",
            RunMode::Mc => "mc",
            RunMode::Both => "both",
        })
    }
}

/// Everything needed to evaluate one curve family.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub antennas: u32,
    pub users: u32,
    pub rate_multicast: f64,
    pub rate_unicast: f64,
    pub rate_secrecy: f64,
    pub snr_db: Vec<f64>,
    /// Quadrature order; `None` uses the per-metric default.
    pub na: Option<usize>,
    pub metrics: Vec<MetricKind>,
    pub scheduling: bool,
    pub oma_beamformer: BeamformerKind,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub mode: RunMode,
    /// Comparison tolerance; `None` uses the per-metric default.
    pub abs_tol: Option<f64>,
}

impl Settings {
    fn base(antennas: u32, users: u32, rate_unicast: f64, rate_secrecy: f64) -> Self {
        Self {
            antennas,
            users,
            rate_multicast: 1.0,
            rate_unicast,
            rate_secrecy,
            snr_db: Vec::new(),
            na: None,
            metrics: Vec::new(),
            scheduling: false,
            oma_beamformer: BeamformerKind::Mrt,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            workers: default_workers(),
            mode: RunMode::Both,
            abs_tol: None,
        }
    }

    pub fn system(&self) -> Result<SystemSize> {
        SystemSize::new(self.antennas, self.users)
    }

    pub fn link(&self, snr_db: f64) -> Result<LinkConfig> {
        LinkConfig::new(
            db_to_linear(snr_db),
            self.rate_multicast,
            self.rate_unicast,
            self.rate_secrecy,
        )
    }

    pub fn plan(&self) -> SimulationPlan {
        SimulationPlan::direct(self.samples, self.seed)
            .with_scheduling(self.scheduling)
            .with_oma_beamformer(self.oma_beamformer)
            .with_workers(self.workers)
            .fastest_valid()
    }

    pub fn validate(&self) -> Result<()> {
        self.system()?;
        self.link(0.0)?;
        if self.snr_db.is_empty() || self.snr_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config(
                "snr grid must be a nonempty list of finite values".into(),
            ));
        }
        if self.metrics.is_empty() {
            return Err(Error::Config("no metrics requested".into()));
        }
        if let Some(m) = self.metrics.iter().find(|m| m.needs_secrecy_target()) {
            if self.rate_secrecy <= 0.0 {
                return Err(Error::Config(format!("{m} needs a positive rate_secrecy")));
            }
        }
        if self.na == Some(0) {
            return Err(Error::Config("na must be at least 1".into()));
        }
        if let Some(t) = self.abs_tol {
            if t.is_nan() || t < 0.0 {
                return Err(Error::Config(format!(
                    "abs_tol must be nonnegative, got {t}"
                )));
            }
        }
        if self.mode.wants_mc() {
            self.plan().validate()?;
        } else if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        let mut s = format!(
            "M={} K={} R_M={} R_U={} R_S={} scheduling={} oma_beamformer={} mode={}",
            self.antennas,
            self.users,
            self.rate_multicast,
            self.rate_unicast,
            self.rate_secrecy,
            if self.scheduling { "on" } else { "off" },
            self.oma_beamformer.name(),
            self.mode,
        );
        if self.mode.wants_mc() {
            s += &format!(" samples={} seed={}", self.samples, self.seed);
        }
        if let Some(na) = self.na {
            s += &format!(" na={na}");
        }
        s
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub name: String,
    pub settings: Settings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub variants: Vec<Variant>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.variants.is_empty() {
            return Err(Error::Config(format!(
                "scenario `{}` has no variants",
                self.name
            )));
        }
        for v in &self.variants {
            v.settings
                .validate()
                .map_err(|e| Error::Config(format!("variant `{}`: {e}", v.name)))?;
        }
        Ok(())
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        for v in &mut self.variants {
            overrides.apply(&mut v.settings);
        }
    }
}

/// Command-line overrides applied to every variant.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub metrics: Option<Vec<MetricKind>>,
    pub mode: Option<RunMode>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub snr_db: Option<Vec<f64>>,
    pub na: Option<usize>,
    pub scheduling: Option<bool>,
    pub oma_beamformer: Option<BeamformerKind>,
}

impl Overrides {
    pub fn apply(&self, s: &mut Settings) {
        if let Some(m) = &self.metrics {
            s.metrics = m.clone();
        }
        if let Some(g) = &self.snr_db {
            s.snr_db = g.clone();
        }
        s.mode = self.mode.unwrap_or(s.mode);
        s.samples = self.samples.unwrap_or(s.samples);
        s.seed = self.seed.unwrap_or(s.seed);
        s.workers = self.workers.unwrap_or(s.workers);
        s.na = self.na.or(s.na);
        s.scheduling = self.scheduling.unwrap_or(s.scheduling);
        s.oma_beamformer = self.oma_beamformer.unwrap_or(s.oma_beamformer);
    }
}

/// Parses `LO:HI:STEP` (inclusive) or a comma-separated list of dB values.
pub fn parse_snr_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Config(format!("bad snr grid `{text}`: {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [lo, hi, step] => {
            let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
            if !lo.is_finite() || !hi.is_finite() || step.is_nan() || step <= 0.0 || hi < lo {
                return Err(bad("need LO <= HI and STEP > 0"));
            }
            let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
            if n > 100_000 {
                return Err(bad("too many points"));
            }
            (0..n)
                .map(|i| {
                    let x = lo + i as f64 * step;
                    (x * 1e9).round() / 1e9
                })
                .collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad("expected LO:HI:STEP or a comma-separated list")),
    };
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
        return Err(bad("empty or non-finite"));
    }
    Ok(grid)
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    parse_snr_grid(&format!("{lo}:{hi}:{step}")).expect("valid preset grid")
}

fn variant(name: &str, settings: Settings) -> Variant {
    Variant {
        name: name.to_string(),
        settings,
    }
}

/// Built-in scenarios for the five published figure setups.
pub fn preset(name: &str) -> Result<Scenario> {
    use MetricKind::*;
    let unicast = vec![
        UnicastOutage,
        OmaUnicastOutage,
        OutageRateUnicast,
        OmaOutageRateUnicast,
    ];
    let unicast_rates = vec![OutageRateUnicast, OmaOutageRateUnicast];
    let secrecy = vec![
        SecrecyOutage,
        OmaSecrecyOutage,
        OutageRateSecrecy,
        OmaOutageRateSecrecy,
    ];

    let variants = match name {
        "fig1" => [2, 10]
            .into_iter()
            .map(|m| {
                let mut s = Settings::base(m, 11, 6.0, 0.0);
                s.snr_db = grid(0.0, 40.0, 4.0);
                s.na = Some(20);
                s.metrics = unicast.clone();
                variant(&format!("m{m}"), s)
            })
            .collect(),
        "fig2" => [("no_scheduling", false), ("scheduling", true)]
            .into_iter()
            .map(|(label, on)| {
                let mut s = Settings::base(2, 11, 7.0, 0.0);
                s.snr_db = grid(0.0, 40.0, 4.0);
                s.metrics = unicast_rates.clone();
                s.scheduling = on;
                variant(label, s)
            })
            .collect(),
        "fig3" => [
            BeamformerKind::Mrt,
            BeamformerKind::EqualGain,
            BeamformerKind::Random,
        ]
        .into_iter()
        .map(|kind| {
            let mut s = Settings::base(10, 11, 6.0, 0.0);
            s.snr_db = grid(0.0, 30.0, 3.0);
            s.metrics = unicast_rates.clone();
            s.oma_beamformer = kind;
            variant(kind.name(), s)
        })
        .collect(),
        "fig4" => [1.0, 2.0, 3.0]
            .into_iter()
            .map(|rs| {
                let mut s = Settings::base(10, 11, 6.0, rs);
                s.snr_db = grid(0.0, 40.0, 5.0);
                s.na = Some(500);
                s.metrics = secrecy.clone();
                variant(&format!("rs{rs}"), s)
            })
            .collect(),
        "fig5" => [("no_scheduling", false), ("scheduling", true)]
            .into_iter()
            .map(|(label, on)| {
                let mut s = Settings::base(10, 11, 6.0, 2.0);
                s.snr_db = grid(0.0, 40.0, 5.0);
                s.metrics = secrecy.clone();
                s.scheduling = on;
                variant(label, s)
            })
            .collect(),
        other => {
            return Err(Error::UnknownScenario(format!(
                "`{other}` (known: {})",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(Scenario {
        name: name.to_string(),
        variants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_snr_grid("0:40:4").unwrap().len(), 11);
        assert_eq!(parse_snr_grid("0:1:0.1").unwrap().len(), 11);
        assert_eq!(parse_snr_grid("0:1:0.1").unwrap()[3], 0.3);
        assert_eq!(parse_snr_grid("10").unwrap(), vec![10.0]);
        assert_eq!(parse_snr_grid("5, 10,20").unwrap(), vec![5.0, 10.0, 20.0]);
        for bad in ["", "1:0:1", "0:10:0", "a:b:c", "1:2", "0:10:-1"] {
            assert!(parse_snr_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn presets_are_valid() {
        for name in PRESETS {
            let s = preset(name).unwrap();
            s.validate().unwrap();
            assert!(!s.variants.is_empty());
        }
        assert!(matches!(preset("fig9"), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn preset_parameters() {
        let f1 = preset("fig1").unwrap();
        let ms: Vec<u32> = f1.variants.iter().map(|v| v.settings.antennas).collect();
        assert_eq!(ms, [2, 10]);
        assert!(f1
            .variants
            .iter()
            .all(|v| v.settings.users == 11 && v.settings.na == Some(20)));
        let f4 = preset("fig4").unwrap();
        let rs: Vec<f64> = f4
            .variants
            .iter()
            .map(|v| v.settings.rate_secrecy)
            .collect();
        assert_eq!(rs, [1.0, 2.0, 3.0]);
        let f5 = preset("fig5").unwrap();
        assert!(f5.variants[1].settings.scheduling);
        assert_eq!(f5.variants[1].settings.rate_secrecy, 2.0);
    }

    #[test]
    fn overrides_apply_everywhere() {
        let mut s = preset("fig5").unwrap();
        s.apply(&Overrides {
            samples: Some(10),
            scheduling: Some(false),
            ..Overrides::default()
        });
        assert!(s
            .variants
            .iter()
            .all(|v| v.settings.samples == 10 && !v.settings.scheduling));
    }

    #[test]
    fn validation_catches_bad_settings() {
        let mut s = preset("fig1").unwrap().variants[0].settings.clone();
        s.metrics = vec![MetricKind::SecrecyOutage];
        assert!(s.validate().is_err());
        let mut s = preset("fig1").unwrap().variants[0].settings.clone();
        s.samples = 0;
        assert!(s.validate().is_err());
        s.mode = RunMode::Analytic;
        assert!(s.validate().is_ok());
    }
}
