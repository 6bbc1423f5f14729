use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::montecarlo::{Estimate, MetricKind};

pub const CSV_HEADER: [&str; 7] = [
    "snr_db", "metric", "method", "value", "stderr", "ci_low", "ci_high",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Analytic,
    Mc,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Mc => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Method::Analytic),
            "mc" => Ok(Method::Mc),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

/// One CSV line. Analytic rows carry no error columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub snr_db: f64,
    pub metric: MetricKind,
    pub method: Method,
    pub value: f64,
    pub stderr: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

impl Row {
    pub fn analytic(snr_db: f64, metric: MetricKind, value: f64) -> Self {
        Row {
            snr_db,
            metric,
            method: Method::Analytic,
            value,
            stderr: None,
            ci_low: None,
            ci_high: None,
        }
    }

    pub fn mc(snr_db: f64, metric: MetricKind, e: &Estimate) -> Self {
        Row {
            snr_db,
            metric,
            method: Method::Mc,
            value: e.value,
            stderr: Some(e.stderr),
            ci_low: Some(e.ci_low),
            ci_high: Some(e.ci_high),
        }
    }

    fn sort_key(&self) -> (f64, &'static str, Method) {
        (self.snr_db, self.metric.name(), self.method)
    }
}

/// Formats like C's `%.9g`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (8 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Renders rows sorted by SNR, then metric name, then method.
pub fn emit_csv(rows: &[Row]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Config("no rows to write".into()));
    }
    let mut sorted: Vec<&Row> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        ka.0.total_cmp(&kb.0)
            .then(ka.1.cmp(kb.1))
            .then(ka.2.cmp(&kb.2))
    });
    let opt = |x: Option<f64>| x.map(format_sig9).unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in sorted {
        w.write_record([
            format_sig9(r.snr_db),
            r.metric.name().to_string(),
            r.method.name().to_string(),
            format_sig9(r.value),
            opt(r.stderr),
            opt(r.ci_low),
            opt(r.ci_high),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

pub fn write_csv(rows: &[Row], path: &Path) -> Result<()> {
    let text = emit_csv(rows)?;
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<Vec<Row>> {
    let bad = |msg: String| Error::Config(format!("csv: {msg}"));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| bad(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let real = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| bad(format!("not a number: `{s}`")))
    };
    let opt = |s: &str| {
        if s.is_empty() {
            Ok(None)
        } else {
            real(s).map(Some)
        }
    };
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            Ok(Row {
                snr_db: real(&rec[0])?,
                metric: rec[1].parse().map_err(|e: Error| bad(e.to_string()))?,
                method: rec[2].parse()?,
                value: real(&rec[3])?,
                stderr: opt(&rec[4])?,
                ci_low: opt(&rec[5])?,
                ci_high: opt(&rec[6])?,
            })
        })
        .collect()
}
