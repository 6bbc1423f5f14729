use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::output::{format_sig9, write_csv, Method, Row};
use super::{RunMode, Scenario, Settings, Variant};
use crate::analysis::{
    multicast_outage_prob, pd_lower_bound, secrecy_outage_prob, unicast_outage_prob,
    AnalysisParams, ChebyshevRule, SecrecyOutage as SecrecyResult, UnicastOutage as UnicastResult,
    DEFAULT_SECRECY_NODES, DEFAULT_UNICAST_NODES,
};
use crate::channel::BeamformerKind;
use crate::error::{Error, Result};
use crate::montecarlo::{sweep_all, MetricKind};

/// What the closed forms can say about a metric under given settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    ClosedForm,
    /// The analytic value is a lower bound on the simulated one.
    LowerBound,
    McOnly,
}

/// Errors only when a closed form exists in principle but its assumptions
/// fail (secrecy with fewer than three users).
pub fn analytic_support(metric: MetricKind, s: &Settings) -> Result<Support> {
    use MetricKind::*;
    let support = match metric {
        _ if s.scheduling => Support::McOnly,
        MulticastOutage | UnicastOutage | OutageRateUnicast => Support::ClosedForm,
        SecrecyOutage | OutageRateSecrecy => {
            if s.users < 3 {
                return Err(Error::UnsupportedAnalytics(format!(
                    "{metric} has no closed form for K = {} (needs K >= 3)",
                    s.users
                )));
            }
            Support::ClosedForm
        }
        PD if s.oma_beamformer == BeamformerKind::Mrt => Support::LowerBound,
        _ => Support::McOnly,
    };
    Ok(support)
}

fn default_tolerance(metric: MetricKind, s: &Settings) -> f64 {
    use MetricKind::*;
    match metric {
        SecrecyOutage => 0.01,
        OutageRateSecrecy => 0.01 * s.rate_secrecy,
        OutageRateUnicast => 0.005 * s.rate_unicast,
        _ => 0.005,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub variant: String,
    pub snr_db: f64,
    pub metric: MetricKind,
    pub analytic: f64,
    pub mc: f64,
    pub mc_stderr: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    /// Analytic value is a lower bound; only `mc < analytic - 3 se` fails.
    pub one_sided: bool,
    pub verdict: Verdict,
}

impl ComparisonRow {
    fn new(
        variant: &str,
        snr_db: f64,
        metric: MetricKind,
        analytic: f64,
        mc: &Row,
        tol: f64,
        one_sided: bool,
    ) -> Self {
        let se = mc.stderr.unwrap_or(0.0);
        let abs_diff = (analytic - mc.value).abs();
        let pass = if one_sided {
            mc.value >= analytic - 3.0 * se
        } else {
            abs_diff <= tol.max(3.0 * se)
        };
        ComparisonRow {
            variant: variant.to_string(),
            snr_db,
            metric,
            analytic,
            mc: mc.value,
            mc_stderr: se,
            abs_diff,
            tolerance: tol,
            one_sided,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        }
    }
}

/// NOMA minus OMA for a pair of simulated metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub variant: String,
    pub snr_db: f64,
    pub noma: MetricKind,
    pub noma_value: f64,
    pub oma_value: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonReport {
    pub scenario: String,
    /// `(variant name, settings summary)`
    pub variants: Vec<(String, String)>,
    pub rows: Vec<ComparisonRow>,
    pub gaps: Vec<GapRow>,
    pub notes: Vec<String>,
}

impl ComparisonReport {
    pub fn failures(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.verdict == Verdict::Fail)
            .count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn gap(&self, variant: &str, noma: MetricKind, snr_db: f64) -> Option<f64> {
        self.gaps
            .iter()
            .find(|g| g.variant == variant && g.noma == noma && g.snr_db == snr_db)
            .map(|g| g.gap)
    }

    pub fn render(&self) -> String {
        let g = format_sig9;
        let mut s = format!("scenario: {}\n", self.scenario);
        for (name, desc) in &self.variants {
            let _ = writeln!(s, "variant {name}: {desc}");
        }
        if !self.rows.is_empty() {
            s += "\ncomparisons: PASS iff |analytic - mc| <= max(tol, 3 se); bounds PASS iff mc >= bound - 3 se\n";
            let _ = writeln!(
                s,
                "{:<16} {:>7} {:<24} {:>12} {:>12} {:>12} {:>12} {:>10} verdict",
                "variant", "snr_db", "metric", "analytic", "mc", "stderr", "abs_diff", "tol"
            );
            for r in &self.rows {
                let _ = writeln!(
                    s,
                    "{:<16} {:>7} {:<24} {:>12} {:>12} {:>12} {:>12} {:>10} {}",
                    r.variant,
                    g(r.snr_db),
                    if r.one_sided {
                        format!("{} (bound)", r.metric)
                    } else {
                        r.metric.to_string()
                    },
                    g(r.analytic),
                    g(r.mc),
                    g(r.mc_stderr),
                    g(r.abs_diff),
                    if r.one_sided {
                        "-".to_string()
                    } else {
                        g(r.tolerance)
                    },
                    if r.verdict == Verdict::Pass {
                        "PASS"
                    } else {
                        "FAIL"
                    },
                );
            }
        }
        if !self.gaps.is_empty() {
            s += "\nNOMA - OMA gaps (mc)\n";
            let _ = writeln!(
                s,
                "{:<16} {:>7} {:<24} {:>12} {:>12} {:>12}",
                "variant", "snr_db", "metric", "noma", "oma", "gap"
            );
            for r in &self.gaps {
                let _ = writeln!(
                    s,
                    "{:<16} {:>7} {:<24} {:>12} {:>12} {:>12}",
                    r.variant,
                    g(r.snr_db),
                    r.noma.name(),
                    g(r.noma_value),
                    g(r.oma_value),
                    g(r.gap)
                );
            }
        }
        if !self.notes.is_empty() {
            s += "\nnotes\n";
            for n in &self.notes {
                let _ = writeln!(s, "- {n}");
            }
        }
        let _ = writeln!(
            s,
            "\nresult: {} ({} comparisons, {} failed)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.rows.len(),
            self.failures()
        );
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantResult {
    pub name: String,
    pub rows: Vec<Row>,
}

impl VariantResult {
    pub fn find(&self, snr_db: f64, metric: MetricKind, method: Method) -> Option<&Row> {
        self.rows
            .iter()
            .find(|r| r.snr_db == snr_db && r.metric == metric && r.method == method)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: ComparisonReport,
    pub variants: Vec<VariantResult>,
}

const GAP_PAIRS: [(MetricKind, MetricKind); 4] = [
    (
        MetricKind::OutageRateUnicast,
        MetricKind::OmaOutageRateUnicast,
    ),
    (
        MetricKind::OutageRateSecrecy,
        MetricKind::OmaOutageRateSecrecy,
    ),
    (
        MetricKind::MeanNomaUnicastRate,
        MetricKind::MeanOmaUnicastRate,
    ),
    (
        MetricKind::MeanNomaSecrecyRate,
        MetricKind::MeanOmaSecrecyRate,
    ),
];

pub fn run_scenario(scenario: &Scenario) -> Result<RunOutput> {
    scenario.validate()?;
    let mut report = ComparisonReport {
        scenario: scenario.name.clone(),
        ..ComparisonReport::default()
    };
    let mut variants = Vec::new();
    for v in &scenario.variants {
        report
            .variants
            .push((v.name.clone(), v.settings.describe()));
        variants.push(run_variant(v, &mut report)?);
    }
    Ok(RunOutput { report, variants })
}

fn run_variant(v: &Variant, report: &mut ComparisonReport) -> Result<VariantResult> {
    let s = &v.settings;
    let sys = s.system()?;
    let mut support = BTreeMap::new();
    for &m in &s.metrics {
        let sup = if s.mode.wants_analytic() {
            analytic_support(m, s)?
        } else {
            Support::McOnly
        };
        support.insert(m, sup);
    }
    if s.mode == RunMode::Analytic && support.values().all(|&x| x == Support::McOnly) {
        return Err(Error::UnsupportedAnalytics(format!(
            "variant `{}`: none of the requested metrics has a closed form{}",
            v.name,
            if s.scheduling {
                " under user scheduling"
            } else {
                ""
            }
        )));
    }

    let mut rows = Vec::new();
    if s.mode.wants_analytic() {
        analytic_rows(v, &support, &mut rows, report)?;
    }
    if s.mode.wants_mc() {
        let template = s.link(s.snr_db[0])?;
        for (db, summary) in sweep_all(&template, sys, &s.snr_db, &s.plan())? {
            for &m in &s.metrics {
                rows.push(Row::mc(db, m, &summary.estimate(m)));
            }
            let mismatches = summary.multicast_mismatches();
            if mismatches > 0 {
                report.notes.push(format!(
                    "variant {}, {} dB: NOMA and OMA multicast outage differ on {mismatches} draws",
                    v.name,
                    format_sig9(db)
                ));
            }
        }
    }

    let result = VariantResult {
        name: v.name.clone(),
        rows,
    };
    for &db in &s.snr_db {
        for (&m, &sup) in &support {
            if sup == Support::McOnly {
                continue;
            }
            let (Some(a), Some(mc)) = (
                result.find(db, m, Method::Analytic),
                result.find(db, m, Method::Mc),
            ) else {
                continue;
            };
            let tol = s.abs_tol.unwrap_or_else(|| default_tolerance(m, s));
            report.rows.push(ComparisonRow::new(
                &v.name,
                db,
                m,
                a.value,
                mc,
                tol,
                sup == Support::LowerBound,
            ));
        }
        for (noma, oma) in GAP_PAIRS {
            if let (Some(n), Some(o)) = (
                result.find(db, noma, Method::Mc),
                result.find(db, oma, Method::Mc),
            ) {
                report.gaps.push(GapRow {
                    variant: v.name.clone(),
                    snr_db: db,
                    noma,
                    noma_value: n.value,
                    oma_value: o.value,
                    gap: n.value - o.value,
                });
            }
        }
    }
    Ok(result)
}

fn analytic_rows(
    v: &Variant,
    support: &BTreeMap<MetricKind, Support>,
    rows: &mut Vec<Row>,
    report: &mut ComparisonReport,
) -> Result<()> {
    use MetricKind::*;
    let s = &v.settings;
    let wanted = |m: MetricKind| support.get(&m).is_some_and(|&x| x != Support::McOnly);
    let need_unicast = wanted(UnicastOutage) || wanted(OutageRateUnicast);
    let need_secrecy = wanted(SecrecyOutage) || wanted(OutageRateSecrecy);
    let unicast_rule = ChebyshevRule::new(s.na.unwrap_or(DEFAULT_UNICAST_NODES))?;
    let secrecy_rule = ChebyshevRule::new(s.na.unwrap_or(DEFAULT_SECRECY_NODES))?;

    for &db in &s.snr_db {
        let p = AnalysisParams::new(s.antennas, s.users, &s.link(db)?)?;
        let unicast: Option<UnicastResult> =
            need_unicast.then(|| unicast_outage_prob(&p, &unicast_rule));
        let secrecy: Option<SecrecyResult> = if need_secrecy {
            Some(secrecy_outage_prob(&p, &secrecy_rule)?)
        } else {
            None
        };
        if let Some(u) = unicast.filter(UnicastResult::under_resolved) {
            report.notes.push(format!(
                "variant {}, {} dB: unicast outage moves by {} when the quadrature order doubles",
                v.name,
                format_sig9(db),
                format_sig9(u.doubling_delta)
            ));
        }
        for (&m, &sup) in support {
            let value = match (m, sup) {
                (_, Support::McOnly) => continue,
                (MulticastOutage, _) => multicast_outage_prob(&p),
                (UnicastOutage, _) => unicast.expect("computed").p_n,
                (OutageRateUnicast, _) => (1.0 - unicast.expect("computed").p_n) * s.rate_unicast,
                (SecrecyOutage, _) => secrecy.expect("computed").p_s,
                (OutageRateSecrecy, _) => (1.0 - secrecy.expect("computed").p_s) * s.rate_secrecy,
                (PD, _) => pd_lower_bound(&p).exact,
                _ => continue,
            };
            rows.push(Row::analytic(db, m, value));
        }
    }
    Ok(())
}

/// Writes `DIR/<variant>/<metric>.csv` for every metric and `DIR/summary.txt`.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for v in &out.variants {
        let mut by_metric: BTreeMap<&str, Vec<Row>> = BTreeMap::new();
        for r in &v.rows {
            by_metric
                .entry(r.metric.name())
                .or_default()
                .push(r.clone());
        }
        for (metric, rows) in by_metric {
            let path = dir.join(&v.name).join(format!("{metric}.csv"));
            write_csv(&rows, &path)?;
            written.push(path);
        }
    }
    fs::create_dir_all(dir)?;
    let summary = dir.join("summary.txt");
    fs::write(&summary, out.report.render())?;
    written.push(summary);
    Ok(written)
}
