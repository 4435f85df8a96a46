//! Total Casimir energy: `W_C` integrated over the real frequency axis.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{refine_panels, sum_values, QuadratureResult, Tolerance};
use crate::error::{Error, Result};
use crate::exec::compensated_sum;
use crate::greenfn::BlockGeometry;
use crate::materials::{response_sample, MaterialModel};
use crate::spectra::casimir_spectral_energy;

/// Lower end of the frequency integral (eV). Below it the integrand is not
/// evaluated; its contribution is bounded and folded into the tail estimate.
pub const OMEGA_MIN: f64 = 1e-3;

/// Frequencies above this (eV) are never needed for the presets; reaching it
/// means the envelope criterion could not be met.
const OMEGA_CEILING: f64 = 1e6;

/// Widest initial panel (eV), whatever the optical thickness.
const MAX_PANEL_WIDTH: f64 = 1.0;

/// Spectral quantity to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralQuantity {
    /// `W_C`, giving the total Casimir energy.
    TotalCasimir,
}

/// Integral over frequency together with its panel diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumIntegral {
    pub result: QuadratureResult,
    pub omega_min: f64,
    pub omega_max: f64,
    /// Largest accepted panel width divided by the local oscillation period
    /// `pi / (Re n L)` of the round-trip factor.
    pub max_period_fraction: f64,
    /// Fitted `C` of the `|W_C| <= C / omega^2` envelope on the last segment.
    pub envelope: f64,
}

fn oscillation_period(model: &MaterialModel, length: f64, omega: f64) -> f64 {
    match response_sample(model, omega) {
        Ok(s) if s.n.re.abs() > 0.0 => PI / (s.n.re.abs() * length),
        _ => f64::INFINITY,
    }
}

/// Panel edges on `[lo, hi]`, each panel at most one eighth of the local
/// period (checked at both ends), at most `MAX_PANEL_WIDTH`, and at most
/// its own left edge (geometric growth away from zero).
fn period_breaks(model: &MaterialModel, length: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut breaks = vec![lo];
    let mut a = lo;
    while a < hi {
        let mut width = (oscillation_period(model, length, a) / 8.0).min(MAX_PANEL_WIDTH).min(a);
        for _ in 0..4 {
            let end_period = oscillation_period(model, length, (a + width).min(hi));
            if end_period / 8.0 >= width {
                break;
            }
            width = end_period / 8.0;
        }
        let b = if a + width >= hi || hi - (a + width) < 0.25 * width { hi } else { a + width };
        breaks.push(b);
        a = b;
    }
    breaks
}

/// Integrates the chosen spectral quantity over `[OMEGA_MIN, omega_max]`.
///
/// The axis is covered in segments `[1e-3, s], [s, 2s], [2s, 4s], ...`
/// with `s` a few times the material frequency scale. After each segment the
/// envelope `C = max |W_C| omega^2` is refitted on that segment, and the
/// integration stops once `C / omega_max^2 <= tol.relative * |value|`. The
/// tail estimate assumes the `omega^-2` envelope beyond `omega_max` and
/// bounds the sliver below `OMEGA_MIN` by a rectangle.
pub fn integrate_spectrum(
    model: &MaterialModel,
    length: f64,
    quantity: SpectralQuantity,
    tol: &Tolerance,
) -> Result<SpectrumIntegral> {
    model.validate()?;
    tol.validate()?;
    BlockGeometry::new(length)?;
    let SpectralQuantity::TotalCasimir = quantity;

    let integrand = |w: f64| casimir_spectral_energy(model, length, w).unwrap_or(f64::NAN);
    let first_end = (4.0 * model.frequency_scale()).max(8.0);

    let mut values = Vec::new();
    let mut quadrature_error = 0.0;
    let mut panels = 0usize;
    let mut max_period_fraction: f64 = 0.0;
    let mut lo = OMEGA_MIN;
    let mut hi = first_end;
    loop {
        let running = compensated_sum(values.iter().copied()).abs();
        let segment_tol = if values.is_empty() {
            Tolerance {
                relative: 0.5 * tol.relative,
                ..*tol
            }
        } else {
            Tolerance {
                relative: 0.0,
                absolute: (0.05 * tol.relative * running).max(tol.absolute),
                ..*tol
            }
        };
        let breaks = period_breaks(model, length, lo, hi);
        let (segment, accepted) = refine_panels(&integrand, &breaks, &segment_tol).map_err(|(r, _)| Error::NonConvergence {
            value: compensated_sum(values.iter().copied()) + r.value,
            error_estimate: quadrature_error + r.error_estimate,
            panels: panels + r.panels,
        })?;
        if !segment.value.is_finite() {
            return Err(Error::NonConvergence {
                value: segment.value,
                error_estimate: f64::INFINITY,
                panels: panels + segment.panels,
            });
        }
        for p in &accepted {
            let period = oscillation_period(model, length, p.a)
                .min(oscillation_period(model, length, p.b))
                .min(oscillation_period(model, length, 0.5 * (p.a + p.b)));
            max_period_fraction = max_period_fraction.max((p.b - p.a) / period);
        }
        values.push(sum_values(accepted.iter().map(|p| p.value)));
        quadrature_error += segment.error_estimate;
        panels += segment.panels;

        let envelope = breaks.iter().map(|&w| integrand(w).abs() * w * w).fold(0.0, f64::max);
        let value = compensated_sum(values.iter().copied());
        let envelope_at_end = envelope / (hi * hi);
        if envelope_at_end <= tol.relative * value.abs() || envelope_at_end <= tol.absolute {
            let sliver = integrand(OMEGA_MIN).abs() * OMEGA_MIN;
            let tail = envelope / hi + sliver;
            return Ok(SpectrumIntegral {
                result: QuadratureResult {
                    value,
                    error_estimate: quadrature_error + tail,
                    panels,
                    tail_estimate: tail,
                },
                omega_min: OMEGA_MIN,
                omega_max: hi,
                max_period_fraction,
                envelope,
            });
        }
        if hi >= OMEGA_CEILING {
            return Err(Error::NonConvergence {
                value,
                error_estimate: quadrature_error + envelope / hi,
                panels,
            });
        }
        lo = hi;
        hi *= 2.0;
    }
}
