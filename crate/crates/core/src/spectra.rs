//! Zero-point field variances, energy density and spectral energies.
//!
//! Everything here is per unit frequency in natural units (hbar = c = 1,
//! mu0 = eps0 = 1): a variance density `dE2` is the integrand of `<E^2>`
//! over omega, and `W(omega)` is the zero-point energy per unit frequency
//! stored in the block.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_ordered, ExecMode};
use crate::greenfn::{BlockGreen, Region, ScatterCoefficients};
use crate::materials::{response_sample, MaterialModel, ResponseSample};
use crate::quadrature::{integrate_with_breaks, QuadratureResult, Tolerance};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Spectral densities of the field variances and of the energy per unit
/// length at one `(omega, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceDensity {
    pub omega: f64,
    pub x: f64,
    pub region: Region,
    pub d_e2: f64,
    pub d_b2: f64,
    pub u: f64,
}

/// Spectral energies of the block at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralRecord {
    pub omega: f64,
    /// Zero-point energy per unit frequency inside the block.
    pub w: f64,
    /// Same region without the block, `omega L / 2 pi`.
    pub w_free: f64,
    /// Bulk part: `L` times the energy density of an infinite medium.
    pub w_bulk: f64,
    /// Casimir spectral energy, evaluated from its own closed form.
    pub w_c: f64,
}

/// Complex integrands whose imaginary parts are `dE2` and `dB2`.
#[derive(Debug, Clone, Copy)]
struct PreIm {
    electric: Complex64,
    magnetic: Complex64,
}

fn energy_density(p: PreIm, d_omega_eps: Complex64, d_omega_mu: Complex64, mu: Complex64) -> f64 {
    0.5 * (d_omega_eps * p.electric + d_omega_mu / (mu * mu) * p.magnetic).im
}

fn density(omega: f64, x: f64, region: Region, p: PreIm, d_omega_eps: Complex64, d_omega_mu: Complex64, mu: Complex64) -> VarianceDensity {
    VarianceDensity {
        omega,
        x,
        region,
        d_e2: p.electric.im,
        d_b2: p.magnetic.im,
        u: energy_density(p, d_omega_eps, d_omega_mu, mu),
    }
}

fn region_error(green: &BlockGreen, x: f64, expected: &'static str) -> Error {
    Error::Region {
        x,
        length: green.geometry.length(),
        expected,
    }
}

/// Outside the block (`x < 0` or `x > L`): the variances oscillate as
/// `1 -/+ |zeta| sin(2 omega x + phi_zeta)` and the energy density is the
/// free-space `omega / 2 pi`.
pub fn outside_density(green: &BlockGreen, x: f64) -> Result<VarianceDensity> {
    let region = green.geometry.region(x);
    let distance = match region {
        Region::Right => x,
        Region::Left => green.geometry.length() - x,
        Region::Inside => return Err(region_error(green, x, "outside")),
    };
    let omega = green.sample.omega;
    let ScatterCoefficients { abs_zeta, phi_zeta, .. } = green.coefficients;
    let ripple = abs_zeta * (2.0 * omega * distance + phi_zeta).sin();
    let d_e2 = omega / (2.0 * PI) * (1.0 - ripple);
    let d_b2 = omega / (2.0 * PI) * (1.0 + ripple);
    Ok(VarianceDensity {
        omega,
        x,
        region,
        d_e2,
        d_b2,
        u: 0.5 * (d_e2 + d_b2),
    })
}

fn inside_pre_im(green: &BlockGreen, x: f64) -> PreIm {
    let s = &green.sample;
    let ScatterCoefficients { alpha, beta, .. } = green.coefficients;
    let q = s.n * s.omega;
    let l = green.geometry.length();
    let standing = (2.0 * I * q * x).exp() + (-2.0 * I * q * (x - l)).exp();
    let base = 1.0 + 2.0 * alpha;
    let scale = I * s.mu * s.omega / (2.0 * PI);
    PreIm {
        electric: scale / s.n * (base + beta * standing),
        magnetic: scale * s.n * (base - beta * standing),
    }
}

/// Inside the block, `0 <= x <= L`, with the dispersion factors
/// `d(omega eps)/d omega` and `d(omega mu)/d omega / mu^2` applied to the
/// per-frequency integrands before the imaginary part is taken.
pub fn inside_density(green: &BlockGreen, x: f64) -> Result<VarianceDensity> {
    if green.geometry.region(x) != Region::Inside {
        return Err(region_error(green, x, "inside"));
    }
    let s = &green.sample;
    Ok(density(s.omega, x, Region::Inside, inside_pre_im(green, x), s.d_omega_eps, s.d_omega_mu, s.mu))
}

/// Dispatches to [`outside_density`] or [`inside_density`].
pub fn variance_density(green: &BlockGreen, x: f64) -> Result<VarianceDensity> {
    match green.geometry.region(x) {
        Region::Inside => inside_density(green, x),
        _ => outside_density(green, x),
    }
}

pub fn variance_density_outside(sample: &ResponseSample, length: f64, x: f64) -> Result<VarianceDensity> {
    outside_density(&BlockGreen::new(*sample, length)?, x)
}

pub fn variance_density_inside(sample: &ResponseSample, length: f64, x: f64) -> Result<VarianceDensity> {
    inside_density(&BlockGreen::new(*sample, length)?, x)
}

/// Variance densities from the coincidence limits of the Green function:
/// `dE2 = -Im[omega^2 g(x, x)] / pi`, `dB2 = -Im[d_x d_x' g] / pi`.
pub fn variance_from_green(model: &MaterialModel, length: f64, omega: f64, x: f64) -> Result<VarianceDensity> {
    let green = BlockGreen::new(response_sample(model, omega)?, length)?;
    variance_from_block_green(&green, x)
}

pub fn variance_from_block_green(green: &BlockGreen, x: f64) -> Result<VarianceDensity> {
    let omega = green.sample.omega;
    let mixed = green.mixed_derivative_coincident(x)?;
    let g = green.eval(x, x)?;
    let p = PreIm {
        electric: -omega * omega * g / PI,
        magnetic: -mixed / PI,
    };
    let region = green.geometry.region(x);
    let one = Complex64::new(1.0, 0.0);
    let (d_omega_eps, d_omega_mu, mu) = match region {
        Region::Inside => (green.sample.d_omega_eps, green.sample.d_omega_mu, green.sample.mu),
        _ => (one, one, one),
    };
    Ok(density(omega, x, region, p, d_omega_eps, d_omega_mu, mu))
}

/// `W`, `W_bulk` and `W_C` for a prepared block Green function.
pub fn spectral_energy_of(green: &BlockGreen) -> SpectralRecord {
    let s = &green.sample;
    let l = green.geometry.length();
    let ScatterCoefficients {
        alpha, beta, round_trip, ..
    } = green.coefficients;
    let prefactor = s.omega / (2.0 * PI);
    let boundary = beta * (round_trip - 1.0) * (s.mu / s.n) * s.d_n_over_mu;
    let w = prefactor * (I * l * (1.0 + 2.0 * alpha) * s.d_omega_n + boundary).im;
    let w_bulk = prefactor * l * s.d_omega_n.re;
    let w_c = prefactor * (2.0 * I * l * alpha * s.d_omega_n + boundary).im;
    SpectralRecord {
        omega: s.omega,
        w,
        w_free: prefactor * l,
        w_bulk,
        w_c,
    }
}

pub fn spectral_energy(sample: &ResponseSample, length: f64) -> Result<SpectralRecord> {
    Ok(spectral_energy_of(&BlockGreen::new(*sample, length)?))
}

/// `W_C(omega)` straight from the model.
pub fn casimir_spectral_energy(model: &MaterialModel, length: f64, omega: f64) -> Result<f64> {
    Ok(spectral_energy(&response_sample(model, omega)?, length)?.w_c)
}

pub(crate) fn check_grid(omega_grid: &[f64]) -> Result<()> {
    if let Some(bad) = omega_grid.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::InvalidGrid(format!("frequency {bad} is not positive")));
    }
    if omega_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("frequency grid must be strictly increasing".into()));
    }
    Ok(())
}

/// One [`SpectralRecord`] per grid frequency.
pub fn spectrum_scan(model: &MaterialModel, length: f64, omega_grid: &[f64], mode: ExecMode) -> Result<Vec<SpectralRecord>> {
    model.validate()?;
    check_grid(omega_grid)?;
    map_ordered(mode, omega_grid, |&w| spectral_energy(&response_sample(model, w)?, length))
        .into_iter()
        .collect()
}

/// `int_0^L u(omega, x) dx` by adaptive quadrature, panelled finely enough to
/// resolve the standing-wave terms near both faces.
pub fn integrate_inside_energy(green: &BlockGreen, tol: &Tolerance) -> Result<QuadratureResult> {
    let l = green.geometry.length();
    let q = (green.sample.n * green.sample.omega).norm();
    let count = ((4.0 * q * l / PI).ceil() as usize).clamp(16, 1 << 16);
    let breaks: Vec<f64> = (0..=count).map(|j| l * j as f64 / count as f64).collect();
    let integrand = |x: f64| energy_density(inside_pre_im(green, x), green.sample.d_omega_eps, green.sample.d_omega_mu, green.sample.mu);
    integrate_with_breaks(integrand, &breaks, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn block(model: &MaterialModel, omega: f64, l: f64) -> BlockGreen {
        BlockGreen::new(response_sample(model, omega).unwrap(), l).unwrap()
    }

    #[test]
    fn unreflecting_exterior_has_no_ripple() {
        let s = ResponseSample::constant(2.0, c(3.0, 0.2), c(3.0, 0.2)).unwrap();
        let a = variance_density_outside(&s, 4.0, 5.0).unwrap();
        let b = variance_density_outside(&s, 4.0, 5.37).unwrap();
        assert_eq!(a.d_e2, a.d_b2);
        assert_eq!(a.d_e2, b.d_e2);
    }

    #[test]
    fn outside_energy_is_free_space() {
        let g = block(&MaterialModel::gold(), 2.0, 5.068);
        for x in [5.5, 7.0, 12.3, -0.5, -9.0] {
            let v = outside_density(&g, x).unwrap();
            let expected = 2.0 / (2.0 * PI);
            assert!((v.u - expected).abs() <= 1e-14 * expected);
        }
    }

    #[test]
    fn outside_ripple_period() {
        let g = block(&MaterialModel::gold(), 2.0, 5.068);
        let period = PI / 2.0;
        let a = outside_density(&g, 6.0).unwrap();
        let b = outside_density(&g, 6.0 + period).unwrap();
        let mid = outside_density(&g, 6.0 + period / 4.0).unwrap();
        assert!((a.d_e2 - b.d_e2).abs() < 1e-13);
        assert!((a.d_e2 - mid.d_e2).abs() > 1e-3);
    }

    #[test]
    fn free_space_reduction_inside() {
        let s = ResponseSample::constant(3.0, c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let v = variance_density_inside(&s, 2.0, 0.7).unwrap();
        assert!((v.u - 3.0 / (2.0 * PI)).abs() < 1e-15);
        let r = spectral_energy(&s, 2.0).unwrap();
        assert!((r.w - r.w_free).abs() < 1e-15);
        assert_eq!(r.w_c, 0.0);
    }

    #[test]
    fn region_checks() {
        let s = response_sample(&MaterialModel::gold(), 2.0).unwrap();
        assert!(variance_density_outside(&s, 5.0, 2.0).is_err());
        assert!(variance_density_inside(&s, 5.0, 6.0).is_err());
        assert!(variance_from_green(&MaterialModel::gold(), 5.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn green_route_matches_closed_forms() {
        for model in [MaterialModel::gold(), MaterialModel::dielectric()] {
            for w in [0.7, 5.5, 11.0] {
                let g = block(&model, w, 5.068);
                for x in [-3.0, 0.4, 2.5, 5.0, 6.2] {
                    let a = variance_density(&g, x).unwrap();
                    let b = variance_from_block_green(&g, x).unwrap();
                    for (p, q) in [(a.d_e2, b.d_e2), (a.d_b2, b.d_b2), (a.u, b.u)] {
                        assert!((p - q).abs() <= 1e-10 * p.abs().max(q.abs()), "{model:?} w={w} x={x}: {p} vs {q}");
                    }
                }
            }
        }
    }

    #[test]
    fn thin_block_energies_vanish() {
        let s = response_sample(&MaterialModel::dielectric(), 6.0).unwrap();
        let r = spectral_energy(&s, 1e-10).unwrap();
        assert!(r.w.abs() < 1e-8 && r.w_c.abs() < 1e-8);
    }

    #[test]
    fn gold_damped_below_plasma_frequency() {
        let s = response_sample(&MaterialModel::gold(), 5.0).unwrap();
        let r = spectral_energy(&s, 5.068).unwrap();
        assert!(r.w < r.w_free);
    }

    #[test]
    fn difference_matches_direct_casimir_form() {
        for model in [MaterialModel::gold(), MaterialModel::dielectric()] {
            for w in [0.2, 3.0, 8.0, 19.0, 250.0] {
                let r = spectral_energy(&response_sample(&model, w).unwrap(), 50.68).unwrap();
                assert!((r.w - r.w_bulk - r.w_c).abs() < 1e-12, "{}", r.w - r.w_bulk - r.w_c);
            }
        }
    }

    #[test]
    fn scan_validates_grid() {
        let m = MaterialModel::gold();
        assert!(spectrum_scan(&m, 5.0, &[], ExecMode::Serial).unwrap().is_empty());
        assert!(spectrum_scan(&m, 5.0, &[1.0, 0.5], ExecMode::Serial).is_err());
        assert!(spectrum_scan(&m, 5.0, &[0.0, 0.5], ExecMode::Serial).is_err());
    }

    #[test]
    fn spatial_integral_reproduces_w() {
        let g = block(&MaterialModel::dielectric(), 5.0, 5.068);
        let tol = Tolerance::new(1e-12).with_absolute(1e-14);
        let integral = integrate_inside_energy(&g, &tol).unwrap();
        let w = spectral_energy_of(&g).w;
        assert!((integral.value - w).abs() <= 1e-8 * w.abs(), "{} vs {w}", integral.value);
    }
}
