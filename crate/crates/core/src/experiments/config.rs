//! Scenario files.
//!
//! ```text
//! # comment
//! [scenario]
//! name = my_run
//! antennas = 10
//! users = 11
//! rate_multicast = 1
//! rate_unicast = 6
//! snr_db = 0:40:4
//! metrics = unicast_outage, outage_rate_unicast
//!
//! [variant two_antennas]
//! antennas = 2
//! ```
//!
//! `[scenario]` holds the base settings; each `[variant NAME]` section copies
//! them and overrides the listed keys. Without variant sections the scenario
//! runs once under its own name.

use ini::{Ini, ParseOption, Properties};

use super::{parse_snr_grid, RunMode, Scenario, Settings, Variant};
use crate::channel::BeamformerKind;
use crate::error::{Error, Result};
use crate::montecarlo::MetricKind;

const REQUIRED: [&str; 6] = [
    "antennas",
    "users",
    "rate_multicast",
    "rate_unicast",
    "snr_db",
    "metrics",
];

pub fn parse_config(text: &str) -> Result<Scenario> {
    let opts = ParseOption {
        enabled_quote: false,
        enabled_escape: false,
        ..ParseOption::default()
    };
    let ini = Ini::load_from_str_opt(text, opts)
        .map_err(|e| Error::Config(format!("line {}: {}", e.line, e.msg)))?;

    let mut base: Option<&Properties> = None;
    let mut variants: Vec<(String, &Properties)> = Vec::new();
    for (section, props) in ini.iter() {
        match section.map(str::trim) {
            None if props.is_empty() => {}
            None => {
                let key = props.iter().next().map_or("", |(k, _)| k);
                return Err(Error::Config(format!("key `{key}` outside any section")));
            }
            Some("scenario") => {
                if base.replace(props).is_some() {
                    return Err(Error::Config("duplicate [scenario] section".into()));
                }
            }
            Some(s) => match s.strip_prefix("variant") {
                Some(rest) if rest.starts_with(char::is_whitespace) && !rest.trim().is_empty() => {
                    let name = rest.trim().to_string();
                    if variants.iter().any(|(n, _)| *n == name) {
                        return Err(Error::Config(format!("duplicate variant `{name}`")));
                    }
                    variants.push((name, props));
                }
                _ => return Err(Error::Config(format!("unknown section [{s}]"))),
            },
        }
    }

    let base = base.ok_or_else(|| Error::Config("missing [scenario] section".into()))?;
    let name = base
        .get("name")
        .map(str::trim)
        .filter(|n| !n.is_empty())
        .ok_or_else(|| Error::Config("[scenario] needs a name".into()))?
        .to_string();

    let mut proto = Settings::base(0, 0, 0.0, 0.0);
    proto.rate_multicast = 0.0;
    let mut seen = Vec::new();
    for (k, v) in base.iter() {
        if k != "name" {
            set_key(&mut proto, k, v)?;
            seen.push(k.to_string());
        }
    }

    let mut out = Vec::new();
    if variants.is_empty() {
        check_required(&seen, &name)?;
        out.push(Variant {
            name: name.clone(),
            settings: proto.clone(),
        });
    }
    for (vname, props) in variants {
        let mut s = proto.clone();
        let mut keys = seen.clone();
        for (k, v) in props.iter() {
            set_key(&mut s, k, v).map_err(|e| Error::Config(format!("variant `{vname}`: {e}")))?;
            keys.push(k.to_string());
        }
        check_required(&keys, &vname)?;
        out.push(Variant {
            name: vname,
            settings: s,
        });
    }
    let scenario = Scenario {
        name,
        variants: out,
    };
    scenario.validate()?;
    Ok(scenario)
}

fn check_required(keys: &[String], who: &str) -> Result<()> {
    match REQUIRED.iter().find(|r| !keys.iter().any(|k| k == *r)) {
        Some(missing) => Err(Error::Config(format!("`{who}` is missing `{missing}`"))),
        None => Ok(()),
    }
}

fn set_key(s: &mut Settings, key: &str, value: &str) -> Result<()> {
    let value = value.trim();
    let bad = |what: &str| Error::Config(format!("`{key}`: expected {what}, got `{value}`"));
    let real = || value.parse::<f64>().map_err(|_| bad("a number"));
    match key.trim() {
        "antennas" => s.antennas = value.parse().map_err(|_| bad("a count"))?,
        "users" => s.users = value.parse().map_err(|_| bad("a count"))?,
        "rate_multicast" => s.rate_multicast = real()?,
        "rate_unicast" => s.rate_unicast = real()?,
        "rate_secrecy" => s.rate_secrecy = real()?,
        "snr_db" => s.snr_db = parse_snr_grid(value)?,
        "na" => s.na = Some(value.parse().map_err(|_| bad("a count"))?),
        "metrics" => {
            s.metrics = value
                .split(',')
                .map(|m| {
                    m.parse::<MetricKind>()
                        .map_err(|e| Error::Config(e.to_string()))
                })
                .collect::<Result<_>>()?
        }
        "scheduling" => s.scheduling = parse_switch(value).ok_or_else(|| bad("on or off"))?,
        "oma_beamformer" => {
            s.oma_beamformer = value
                .parse::<BeamformerKind>()
                .map_err(|_| bad("mrt, equal or random"))?
        }
        "samples" => s.samples = value.parse().map_err(|_| bad("a count"))?,
        "seed" => s.seed = value.parse().map_err(|_| bad("an unsigned integer"))?,
        "workers" => s.workers = value.parse().map_err(|_| bad("a count"))?,
        "mode" => s.mode = value.parse::<RunMode>()?,
        "abs_tol" => s.abs_tol = Some(real()?),
        other => return Err(Error::Config(format!("unknown key `{other}`"))),
    }
    Ok(())
}

pub(crate) fn parse_switch(value: &str) -> Option<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Some(true),
        "off" | "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# two curves
[scenario]
name = demo
antennas = 10
users = 11
rate_multicast = 1
rate_unicast = 6
snr_db = 0:20:10
metrics = unicast_outage, outage_rate_unicast
samples = 1000
seed = 7

[variant small]
antennas = 2

[variant sched]
scheduling = on
";

    #[test]
    fn parses_base_and_variants() {
        let s = parse_config(SAMPLE).unwrap();
        assert_eq!(s.name, "demo");
        assert_eq!(s.variants.len(), 2);
        let small = &s.variants[0].settings;
        assert_eq!((small.antennas, small.users), (2, 11));
        assert_eq!(small.snr_db, vec![0.0, 10.0, 20.0]);
        assert_eq!(
            small.metrics,
            vec![MetricKind::UnicastOutage, MetricKind::OutageRateUnicast]
        );
        assert_eq!(small.seed, 7);
        assert!(s.variants[1].settings.scheduling);
        assert_eq!(s.variants[1].settings.antennas, 10);
    }

    #[test]
    fn single_variant_takes_scenario_name() {
        let text = SAMPLE.split("[variant").next().unwrap();
        let s = parse_config(text).unwrap();
        assert_eq!(s.variants.len(), 1);
        assert_eq!(s.variants[0].name, "demo");
    }

    #[test]
    fn rejects_malformed_files() {
        let cases = [
            "antennas = 2\n",
            "[scenario]\nname = x\n",
            "[scenario]\nname = x\nantennas = 2\nusers = 3\nrate_multicast = 1\nrate_unicast = 1\nsnr_db = 0\nmetrics = nope\n",
            "[scenario]\nname = x\nbogus = 1\n",
            "[scenario]\nname = x\nantennas = two\n",
            "[other]\nname = x\n",
            "[scenario]\nname = x\n[variant]\nantennas = 1\n",
            "[scenario]\nantennas = 1\n",
        ];
        for text in cases {
            assert!(
                matches!(parse_config(text), Err(Error::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn switch_spellings() {
        assert_eq!(parse_switch("ON"), Some(true));
        assert_eq!(parse_switch("off"), Some(false));
        assert_eq!(parse_switch("maybe"), None);
    }
}
