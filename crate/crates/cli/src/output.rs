//! CSV and JSON emitters. Floats go out with 17 significant digits in CSV
//! and shortest round-trip form in JSON, so both re-read bit-exactly.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};
use crate::CliError;

pub trait Row: Serialize {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub summary: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<R> {
    pub meta: Meta,
    pub rows: Vec<R>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    #[serde(rename = "omega_eV")]
    pub omega: f64,
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(rename = "W_free")]
    pub w_free: f64,
    #[serde(rename = "W_bulk")]
    pub w_bulk: f64,
    #[serde(rename = "W_C")]
    pub w_c: f64,
}

impl Row for SpectrumRow {
    const HEADER: &'static [&'static str] = &["omega_eV", "W", "W_free", "W_bulk", "W_C"];
    fn cells(&self) -> Vec<String> {
        [self.omega, self.w, self.w_free, self.w_bulk, self.w_c].map(num).to_vec()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    #[serde(rename = "x_inv_eV")]
    pub x: f64,
    pub region: String,
    #[serde(rename = "dE2")]
    pub d_e2: f64,
    #[serde(rename = "dB2")]
    pub d_b2: f64,
    pub u: f64,
}

impl Row for VarianceRow {
    const HEADER: &'static [&'static str] = &["x_inv_eV", "region", "dE2", "dB2", "u"];
    fn cells(&self) -> Vec<String> {
        vec![num(self.x), self.region.clone(), num(self.d_e2), num(self.d_b2), num(self.u)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TotalEnergyRow {
    #[serde(rename = "L_inv_eV")]
    pub length: f64,
    #[serde(rename = "L")]
    pub label: String,
    #[serde(rename = "E_C")]
    pub energy: f64,
    pub error_estimate: f64,
    pub tail_estimate: f64,
    #[serde(rename = "omega_max_eV")]
    pub omega_max: f64,
    pub panels: usize,
    /// `ok`, or the failure for a flagged row.
    pub status: String,
}

impl Row for TotalEnergyRow {
    const HEADER: &'static [&'static str] =
        &["L_inv_eV", "L", "E_C", "error_estimate", "tail_estimate", "omega_max_eV", "panels", "status"];
    fn cells(&self) -> Vec<String> {
        vec![
            num(self.length),
            self.label.clone(),
            num(self.energy),
            num(self.error_estimate),
            num(self.tail_estimate),
            num(self.omega_max),
            self.panels.to_string(),
            self.status.clone(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KramersKronigRow {
    #[serde(rename = "omega_eV")]
    pub omega: f64,
    pub re_eps_minus_1: f64,
    pub reconstructed: f64,
    pub difference: f64,
}

impl Row for KramersKronigRow {
    const HEADER: &'static [&'static str] = &["omega_eV", "re_eps_minus_1", "reconstructed", "difference"];
    fn cells(&self) -> Vec<String> {
        [self.omega, self.re_eps_minus_1, self.reconstructed, self.difference].map(num).to_vec()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub check: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Row for VerifyRow {
    const HEADER: &'static [&'static str] = &["check", "measured", "threshold", "passed"];
    fn cells(&self) -> Vec<String> {
        vec![self.check.clone(), num(self.measured), num(self.threshold), self.passed.to_string()]
    }
}

fn io_error(config: &RunConfig, e: impl std::fmt::Display) -> CliError {
    match &config.output {
        Some(path) => CliError::Io(format!("{}: {e}", path.display())),
        None => CliError::Io(format!("stdout: {e}")),
    }
}

fn write_to<R: Row>(sink: &mut dyn Write, document: &Document<R>) -> Result<(), String> {
    match document.meta.config.format {
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(sink);
            writer.write_record(R::HEADER).map_err(|e| e.to_string())?;
            for row in &document.rows {
                writer.write_record(row.cells()).map_err(|e| e.to_string())?;
            }
            writer.flush().map_err(|e| e.to_string())
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *sink, document).map_err(|e| e.to_string())?;
            sink.write_all(b"\n").map_err(|e| e.to_string())?;
            sink.flush().map_err(|e| e.to_string())
        }
    }
}

pub fn emit<R: Row>(document: &Document<R>) -> Result<(), CliError> {
    let config = &document.meta.config;
    match &config.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_error(config, e))?;
            write_to(&mut BufWriter::new(file), document).map_err(|e| io_error(config, e))
        }
        None => write_to(&mut io::stdout().lock(), document).map_err(|e| io_error(config, e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, std::f64::consts::PI] {
            let text = num(x);
            assert_eq!(text.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{text}");
            let mantissa = text.split('e').next().unwrap().replace(['-', '.'], "");
            assert!(mantissa.len() >= 15);
        }
    }
}
