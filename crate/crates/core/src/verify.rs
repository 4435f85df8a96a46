//! Cross-checks of every module against its independent oracle, with fixed
//! pass thresholds. The CLI `verify` command prints this report.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::exec::{map_ordered, ExecMode};
use crate::greenfn::{scatter_coefficients, BlockGreen, NumericGreen};
use crate::materials::{kramers_kronig_residual, response_sample, MaterialModel, ResponseSample};
use crate::modealg::{build_transform, commutator_gram, verify_independence};
use crate::quadrature::Tolerance;
use crate::spectra::{integrate_inside_energy, outside_density, spectral_energy_of};

pub const GREEN_ORACLE_TOL: f64 = 1e-8;
pub const WRONSKIAN_TOL: f64 = 1e-10;
pub const OUTSIDE_ENERGY_TOL: f64 = 1e-12;
pub const SPATIAL_INTEGRAL_TOL: f64 = 1e-8;
pub const MODE_ALGEBRA_TOL: f64 = 1e-12;
pub const DERIVATIVE_TOL: f64 = 1e-6;
pub const DERIVATIVE_RESONANT_TOL: f64 = 1e-4;
pub const KRAMERS_KRONIG_TOL: f64 = 1e-3;
pub const FREE_SPACE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        CheckOutcome {
            name: name.into(),
            measured,
            threshold,
            passed: measured.is_finite() && measured < threshold,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub models: Vec<(String, MaterialModel)>,
    pub lengths: Vec<f64>,
    /// Test hook: flip the sign of `alpha` in the energy-density path only.
    pub corrupt_alpha_sign: bool,
    pub mode: ExecMode,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            models: vec![
                ("gold".to_string(), MaterialModel::gold()),
                ("dielectric".to_string(), MaterialModel::dielectric()),
            ],
            lengths: vec![5.068, 50.68],
            corrupt_alpha_sign: false,
            mode: ExecMode::default(),
        }
    }
}

/// Deterministic low-discrepancy points in `[0, 1)`.
fn weyl(i: usize, dim: usize) -> f64 {
    const ALPHAS: [f64; 3] = [0.618_033_988_749_894_9, 0.754_877_666_246_692_7, 0.569_840_290_998_053_3];
    ((i as f64 + 0.5) * ALPHAS[dim % 3]).fract()
}

/// Length for check names, without float noise: `50.68`, not `50.67999999999999`.
fn label(length: f64) -> String {
    let text = format!("{length:.9}");
    text.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn green_oracle(model: &MaterialModel, length: f64, mode: ExecMode) -> Result<f64> {
    let idx: Vec<usize> = (0..300).collect();
    let deviations = map_ordered(mode, &idx, |&i| -> Result<f64> {
        let omega = 0.5 + 19.5 * weyl(i, 0);
        let closed = BlockGreen::new(response_sample(model, omega)?, length)?;
        let numeric = NumericGreen::new(model, length, omega)?;
        let (x, xp) = match i % 3 {
            0 => (length * weyl(i, 1), length * weyl(i, 2)),
            1 => (length * (1.0 + weyl(i, 1)), length * (1.0 + weyl(i, 2))),
            _ => (-length * weyl(i, 1) - 1e-3, -length * weyl(i, 2) - 1e-3),
        };
        Ok(rel(closed.eval(x, xp)?, numeric.eval(x, xp)?))
    });
    deviations.into_iter().try_fold(0.0_f64, |m, d| Ok(m.max(d?)))
}

fn wronskian(model: &MaterialModel, length: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for omega in [0.5, 1.0, 5.0, 9.0, 12.0, 20.0] {
        worst = worst.max(NumericGreen::new(model, length, omega)?.wronskian_spread());
    }
    Ok(worst)
}

fn outside_cancellation(model: &MaterialModel, length: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let omega = 0.1 + 19.9 * weyl(i, 0);
        let green = BlockGreen::new(response_sample(model, omega)?, length)?;
        let x = if i % 2 == 0 {
            length * (1.0 + 2.0 * weyl(i, 1))
        } else {
            -2.0 * length * weyl(i, 1) - 1e-3
        };
        let u = outside_density(&green, x)?.u;
        let expected = omega / (2.0 * PI);
        worst = worst.max((u - expected).abs() / expected);
    }
    Ok(worst)
}

fn spatial_integral(model: &MaterialModel, length: f64, corrupt: bool) -> Result<f64> {
    let tol = Tolerance::new(1e-12).with_absolute(1e-15);
    let mut worst: f64 = 0.0;
    for omega in [1.0, 5.0, 9.0] {
        let green = BlockGreen::new(response_sample(model, omega)?, length)?;
        let w = spectral_energy_of(&green).w;
        let integrated_green = if corrupt {
            let mut coefficients = green.coefficients;
            coefficients.alpha = -coefficients.alpha;
            BlockGreen::with_coefficients(green.sample, length, coefficients)?
        } else {
            green
        };
        let integral = integrate_inside_energy(&integrated_green, &tol)?.value;
        worst = worst.max((integral - w).abs() / w.abs().max(1e-300));
    }
    Ok(worst)
}

fn mode_algebra(model: &MaterialModel, length: f64) -> Result<(f64, f64)> {
    let mut worst: f64 = 0.0;
    let mut max_zeta: f64 = 0.0;
    for i in 0..400 {
        let omega = 10f64.powf(-3.0 + 6.0 * i as f64 / 399.0);
        let zeta = scatter_coefficients(&response_sample(model, omega)?, length)?.zeta;
        max_zeta = max_zeta.max(zeta.norm());
        let transform = build_transform(zeta)?;
        worst = worst.max(verify_independence(&transform, &commutator_gram(zeta)).max_deviation());
    }
    Ok((worst, max_zeta))
}

/// `(off-resonance worst, near-resonance worst)` relative deviation of the
/// analytic dispersion derivatives from central differences.
pub fn derivative_deviation(model: &MaterialModel, grid: &[f64]) -> Result<(f64, f64)> {
    type Pick = fn(&ResponseSample) -> Complex64;
    let picks: [(Pick, Pick); 4] = [
        (|s| s.d_omega_n, |s| s.omega * s.n),
        (|s| s.d_n_over_mu, |s| s.n / s.mu),
        (|s| s.d_omega_eps, |s| s.omega * s.epsilon),
        (|s| s.d_omega_mu, |s| s.omega * s.mu),
    ];
    let (mut off, mut near) = (0.0_f64, 0.0_f64);
    for &omega in grid {
        let h = 1e-5 * omega;
        let s = response_sample(model, omega)?;
        let up = response_sample(model, omega + h)?;
        let down = response_sample(model, omega - h)?;
        for (analytic, value) in picks {
            let exact = analytic(&s);
            let fd = (value(&up) - value(&down)) / (2.0 * h);
            let d = if exact.norm() == 0.0 { fd.norm() } else { rel(fd, exact) };
            if (omega - model.omega0).abs() < 10.0 * model.gamma {
                near = near.max(d);
            } else {
                off = off.max(d);
            }
        }
    }
    Ok((off, near))
}

fn free_space(length: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 1..=100 {
        let omega = 0.2 * i as f64;
        let one = Complex64::new(1.0, 0.0);
        let green = BlockGreen::new(ResponseSample::constant(omega, one, one)?, length)?;
        let r = spectral_energy_of(&green);
        worst = worst.max((r.w - r.w_free).abs() / r.w_free).max(r.w_c.abs() / r.w_free);
    }
    Ok(worst)
}

/// Runs every check and returns one outcome per (check, model, length).
pub fn run(options: &VerifyOptions) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for &length in &options.lengths {
        out.push(CheckOutcome::new(format!("free-space reduction L={}", label(length)), free_space(length)?, FREE_SPACE_TOL));
    }
    for (name, model) in &options.models {
        let grid: Vec<f64> = (0..200).map(|i| 0.1 + 0.1 * i as f64).collect();
        let (off, near) = derivative_deviation(model, &grid)?;
        out.push(CheckOutcome::new(format!("{name}: derivatives off resonance"), off, DERIVATIVE_TOL));
        out.push(CheckOutcome::new(format!("{name}: derivatives near resonance"), near, DERIVATIVE_RESONANT_TOL));

        let kk_grid: Vec<f64> = (0..40).map(|i| 0.5 + 0.5 * i as f64).collect();
        let kk = kramers_kronig_residual(model, &kk_grid, 1e3, &Tolerance::new(1e-12).with_absolute(1e-14))?;
        out.push(CheckOutcome::new(format!("{name}: Kramers-Kronig residual"), kk.max_residual, KRAMERS_KRONIG_TOL));

        for &length in &options.lengths {
            let tag = format!("{name} L={}", label(length));
            out.push(CheckOutcome::new(
                format!("{tag}: Green function vs transfer matrix"),
                green_oracle(model, length, options.mode)?,
                GREEN_ORACLE_TOL,
            ));
            out.push(CheckOutcome::new(format!("{tag}: Wronskian constancy"), wronskian(model, length)?, WRONSKIAN_TOL));
            out.push(CheckOutcome::new(
                format!("{tag}: outside energy density = omega/2pi"),
                outside_cancellation(model, length)?,
                OUTSIDE_ENERGY_TOL,
            ));
            out.push(CheckOutcome::new(
                format!("{tag}: integral of u over block = W"),
                spatial_integral(model, length, options.corrupt_alpha_sign)?,
                SPATIAL_INTEGRAL_TOL,
            ));
            let (deviation, max_zeta) = mode_algebra(model, length)?;
            out.push(CheckOutcome::new(format!("{tag}: mode independence M G M^+ = 1"), deviation, MODE_ALGEBRA_TOL));
            out.push(CheckOutcome::new(format!("{tag}: max |zeta|"), max_zeta, 1.0));
        }
    }
    Ok(out)
}
