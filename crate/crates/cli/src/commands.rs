use block_casimir::materials::{kramers_kronig_residual, response_sample};
use block_casimir::quadrature::{integrate_spectrum, SpectralQuantity, Tolerance};
use block_casimir::spectra::{spectrum_scan, variance_density};
use block_casimir::verify::{self, VerifyOptions};
use block_casimir::{BlockGreen, Error, MaterialModel};
use serde_json::{json, Map, Value};

use crate::config::{parse_length, Grid, Length, RunConfig};
use crate::output::{
    emit, Document, KramersKronigRow, Meta, Row, SpectrumRow, TotalEnergyRow, VarianceRow, VerifyRow,
};
use crate::CliError;

/// Whether every row came out clean. Flagged rows are still written.
pub enum Status {
    Clean,
    Flagged(String),
}

fn numerical(e: Error) -> CliError {
    CliError::Numerical(e.to_string())
}

fn document<R: Row>(command: &str, config: &RunConfig, summary: Map<String, Value>, rows: Vec<R>) -> Document<R> {
    Document {
        meta: Meta {
            tool: "block-casimir".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: config.clone(),
            summary,
        },
        rows,
    }
}

fn tolerance(config: &RunConfig) -> Tolerance {
    Tolerance::new(config.tolerance).with_mode(config.mode())
}

pub fn spectrum(config: &RunConfig) -> Result<Status, CliError> {
    let records = spectrum_scan(&config.material.model, config.length.inv_ev, &config.grid.points(), config.mode())
        .map_err(numerical)?;
    let rows = records
        .into_iter()
        .map(|r| SpectrumRow {
            omega: r.omega,
            w: r.w,
            w_free: r.w_free,
            w_bulk: r.w_bulk,
            w_c: r.w_c,
        })
        .collect();
    emit(&document("spectrum", config, Map::new(), rows))?;
    Ok(Status::Clean)
}

pub fn variance(config: &RunConfig) -> Result<Status, CliError> {
    let omega = config
        .omega
        .ok_or_else(|| CliError::Usage("missing `omega`: variance needs --omega <eV>".into()))?;
    let length = config.length.inv_ev;
    // Default: half a block length of vacuum on each side, no point on a face.
    let positions = config.positions.unwrap_or(Grid {
        start: -0.5 * length,
        stop: 1.5 * length,
        count: 400,
    });
    let xs = positions.points();
    if let Some(x) = xs.iter().find(|&&x| x == 0.0 || x == length) {
        return Err(CliError::Usage(format!("invalid `positions`: x = {x} lies on a face of the block")));
    }
    let green = BlockGreen::new(response_sample(&config.material.model, omega).map_err(numerical)?, length)
        .map_err(numerical)?;
    let rows = xs
        .iter()
        .map(|&x| {
            variance_density(&green, x).map(|v| VarianceRow {
                x,
                region: v.region.name().to_string(),
                d_e2: v.d_e2,
                d_b2: v.d_b2,
                u: v.u,
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(numerical)?;
    emit(&document("variance", config, Map::new(), rows))?;
    Ok(Status::Clean)
}

pub fn total_energy(config: &RunConfig) -> Result<Status, CliError> {
    let lengths: Vec<Length> = config.lengths.clone().unwrap_or_else(|| vec![config.length]);
    let tol = tolerance(config);
    let mut flagged = Vec::new();
    let rows = lengths
        .iter()
        .map(|length| {
            let label = length.to_string();
            match integrate_spectrum(&config.material.model, length.inv_ev, SpectralQuantity::TotalCasimir, &tol) {
                Ok(r) => TotalEnergyRow {
                    length: length.inv_ev,
                    label,
                    energy: r.result.value,
                    error_estimate: r.result.error_estimate,
                    tail_estimate: r.result.tail_estimate,
                    omega_max: r.omega_max,
                    panels: r.result.panels,
                    status: "ok".to_string(),
                },
                Err(e) => {
                    flagged.push(format!("L = {label}: {e}"));
                    let (energy, error_estimate, panels) = match e {
                        Error::NonConvergence {
                            value,
                            error_estimate,
                            panels,
                        } => (value, error_estimate, panels),
                        _ => (f64::NAN, f64::NAN, 0),
                    };
                    TotalEnergyRow {
                        length: length.inv_ev,
                        label,
                        energy,
                        error_estimate,
                        tail_estimate: f64::NAN,
                        omega_max: f64::NAN,
                        panels,
                        status: e.to_string(),
                    }
                }
            }
        })
        .collect();
    emit(&document("total-energy", config, Map::new(), rows))?;
    Ok(if flagged.is_empty() {
        Status::Clean
    } else {
        Status::Flagged(flagged.join("; "))
    })
}

pub fn kk_check(config: &RunConfig) -> Result<Status, CliError> {
    let cutoff = config.cutoff.unwrap_or(1e3);
    if cutoff <= config.grid.stop {
        return Err(CliError::Usage(format!(
            "invalid `cutoff`: must exceed the grid stop {}, got {cutoff}",
            config.grid.stop
        )));
    }
    let check = kramers_kronig_residual(&config.material.model, &config.grid.points(), cutoff, &tolerance(config))
        .map_err(numerical)?;
    let rows = check
        .points
        .iter()
        .map(|&(omega, analytic, reconstructed)| KramersKronigRow {
            omega,
            re_eps_minus_1: analytic,
            reconstructed,
            difference: reconstructed - analytic,
        })
        .collect();
    let mut summary = Map::new();
    summary.insert("cutoff_eV".into(), json!(check.cutoff));
    summary.insert("max_residual".into(), json!(check.max_residual));
    summary.insert("quadrature_error".into(), json!(check.quadrature_error));
    emit(&document("kk-check", config, summary, rows))?;
    Ok(Status::Clean)
}

pub fn verify(config: &RunConfig, corrupt_alpha_sign: bool) -> Result<Status, CliError> {
    let models: Vec<(String, MaterialModel)> = if config.all_presets {
        vec![
            ("gold".to_string(), MaterialModel::gold()),
            ("dielectric".to_string(), MaterialModel::dielectric()),
        ]
    } else {
        vec![(config.material.source.clone(), config.material.model)]
    };
    let lengths = match &config.lengths {
        Some(list) => list.iter().map(|l| l.inv_ev).collect(),
        None => ["1um", "10um"]
            .iter()
            .map(|s| parse_length("lengths", s).map(|l| l.inv_ev))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let options = VerifyOptions {
        models,
        lengths,
        corrupt_alpha_sign,
        mode: config.mode(),
    };
    let report = verify::run(&options).map_err(numerical)?;
    let failed: Vec<String> = report.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    let rows = report
        .into_iter()
        .map(|c| VerifyRow {
            check: c.name,
            measured: c.measured,
            threshold: c.threshold,
            passed: c.passed,
        })
        .collect();
    emit(&document("verify", config, Map::new(), rows))?;
    Ok(if failed.is_empty() {
        Status::Clean
    } else {
        Status::Flagged(format!("failed checks: {}", failed.join(", ")))
    })
}
