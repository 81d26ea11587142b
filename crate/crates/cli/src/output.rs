use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use markoff_core::ConnectivityReport;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

/// Run parameters echoed at the top of every output.
#[derive(Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub variant: &'static str,
    pub cap: Option<u64>,
    pub seed: Option<u64>,
}

/// One output line per prime.
#[derive(Debug, Serialize)]
pub struct Row {
    pub p: u64,
    pub fact_p_minus_1: String,
    pub fact_p_plus_1: String,
    #[serde(rename = "B_minus")]
    pub b_minus: f64,
    #[serde(rename = "B_plus")]
    pub b_plus: f64,
    #[serde(rename = "L_p")]
    pub l_p: Option<u64>,
    #[serde(rename = "S_hyp")]
    pub s_hyp: u64,
    #[serde(rename = "S_ell")]
    pub s_ell: u64,
    pub bad_hyp: u64,
    pub bad_ell: u64,
    pub bad_total: u64,
    pub four_p: u64,
    pub verdict: &'static str,
    pub max_orbit_checks: u64,
    pub capped_orbits: u64,
    pub elapsed_ms: u64,
    pub variant: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<&'static str>,
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

impl Row {
    pub fn new(r: &ConnectivityReport, timing: bool) -> Self {
        Row {
            p: r.p,
            fact_p_minus_1: r.minus.render(),
            fact_p_plus_1: r.plus.render(),
            b_minus: round2(r.b_minus),
            b_plus: round2(r.b_plus),
            l_p: r.middle,
            s_hyp: r.s_hyperbolic,
            s_ell: r.s_elliptic,
            bad_hyp: r.bad_hyperbolic,
            bad_ell: r.bad_elliptic,
            bad_total: r.bad_total,
            four_p: r.four_p,
            verdict: r.verdict.as_str(),
            max_orbit_checks: r.max_orbit_checks,
            capped_orbits: r.capped_orbits,
            elapsed_ms: if timing { r.elapsed_ms } else { 0 },
            variant: r.config.middle.variant.name(),
            oracle: None,
        }
    }
}

pub enum Sink {
    Csv(csv::Writer<Box<dyn Write>>),
    Jsonl(Box<dyn Write>),
}

impl Sink {
    pub fn open(path: Option<&Path>, format: Format, meta: &Meta) -> io::Result<Self> {
        let mut out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        let meta_json = serde_json::to_string(meta)?;
        Ok(match format {
            Format::Csv => {
                writeln!(out, "# {meta_json}")?;
                Sink::Csv(csv::Writer::from_writer(out))
            }
            Format::Jsonl => {
                writeln!(out, "{{\"meta\":{meta_json}}}")?;
                Sink::Jsonl(out)
            }
        })
    }

    pub fn write(&mut self, row: &Row) -> io::Result<()> {
        match self {
            Sink::Csv(w) => w.serialize(row).map_err(io::Error::other)?,
            Sink::Jsonl(w) => {
                serde_json::to_writer(&mut *w, row)?;
                writeln!(w)?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> io::Result<()> {
        match self {
            Sink::Csv(mut w) => w.flush(),
            Sink::Jsonl(mut w) => w.flush(),
        }
    }
}
