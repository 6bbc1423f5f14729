use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, ValueEnum};
use nomacast_core::experiments::{self, parse_config, parse_snr_grid, write_outputs, PRESETS};
use nomacast_core::{BeamformerKind, Error, MetricKind, Overrides, RunMode, Scenario};

/// Sweep NOMA and OMA multicast-unicast outage and secrecy metrics over SNR,
/// analytically and by Monte Carlo, and compare the two.
///
/// Exit status: 0 all comparisons pass, 1 some comparison failed,
/// 2 bad arguments or configuration, 3 closed form unavailable for the request.
#[derive(Debug, Parser)]
#[command(name = "nomacast", version)]
#[command(group(ArgGroup::new("source").required(true).args(["scenario", "config", "list"])))]
struct Args {
    /// Built-in scenario: fig1, fig2, fig3, fig4 or fig5.
    #[arg(long)]
    scenario: Option<String>,

    /// Scenario file (see the README for the format).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Print the built-in scenarios and exit.
    #[arg(long)]
    list: bool,

    /// Metric to evaluate; repeat for several. Replaces the scenario's list.
    #[arg(long = "metric", value_name = "KIND")]
    metrics: Vec<MetricKind>,

    #[arg(long, value_enum)]
    mode: Option<Mode>,

    /// Monte Carlo realizations per SNR point.
    #[arg(long)]
    samples: Option<u64>,

    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads for Monte Carlo; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,

    /// SNR grid in dB, `LO:HI:STEP` or a comma-separated list.
    #[arg(long, value_name = "LO:HI:STEP")]
    snr: Option<String>,

    /// Output directory for the CSV files and summary.txt.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Chebyshev-Gauss quadrature order.
    #[arg(long)]
    na: Option<usize>,

    #[arg(long, value_enum)]
    scheduling: Option<Switch>,

    #[arg(long, value_enum)]
    oma_beamformer: Option<Beam>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Analytic,
    Mc,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Beam {
    Mrt,
    Equal,
    Random,
}

impl Args {
    fn overrides(&self) -> Result<Overrides, Error> {
        Ok(Overrides {
            metrics: (!self.metrics.is_empty()).then(|| self.metrics.clone()),
            mode: self.mode.map(|m| match m {
                Mode::Analytic => RunMode::Analytic,
                Mode::Mc => RunMode::Mc,
                Mode::Both => RunMode::Both,
            }),
            samples: self.samples,
            seed: self.seed,
            workers: self.workers,
            snr_db: self.snr.as_deref().map(parse_snr_grid).transpose()?,
            na: self.na,
            scheduling: self.scheduling.map(|s| matches!(s, Switch::On)),
            oma_beamformer: self.oma_beamformer.map(|b| match b {
                Beam::Mrt => BeamformerKind::Mrt,
                Beam::Equal => BeamformerKind::EqualGain,
                Beam::Random => BeamformerKind::Random,
            }),
        })
    }

    fn scenario(&self) -> Result<Scenario, Error> {
        let mut scenario = match (&self.scenario, &self.config) {
            (Some(name), _) => experiments::preset(name)?,
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                parse_config(&text)?
            }
            (None, None) => unreachable!("clap enforces a source"),
        };
        scenario.apply(&self.overrides()?);
        Ok(scenario)
    }
}

fn list() {
    for name in PRESETS {
        let s = experiments::preset(name).expect("built-in preset");
        println!("{name}");
        for v in &s.variants {
            println!("  {:<14} {}", v.name, v.settings.describe());
        }
    }
}

fn run(args: &Args) -> Result<bool, Error> {
    let scenario = args.scenario()?;
    let out = experiments::run_scenario(&scenario)?;
    print!("{}", out.report.render());
    let dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("results").join(&scenario.name));
    let files = write_outputs(&out, &dir)?;
    eprintln!("wrote {} files under {}", files.len(), dir.display());
    Ok(out.report.passed())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list {
        list();
        return ExitCode::SUCCESS;
    }
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
