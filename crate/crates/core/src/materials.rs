//! Single-oscillator material response and its frequency derivatives.
//!
//! All frequencies are in eV (natural units, hbar = c = 1).

use std::f64::consts::FRAC_2_PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{principal_value, QuadratureResult, Tolerance};

/// One Lorentz oscillator, `1 - Omega^2 / (omega^2 - omega0^2 + i gamma omega)`.
/// `omega0 = 0` gives the Drude metal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Oscillator {
    /// Resonance frequency (eV).
    pub omega0: f64,
    /// Oscillator strength (plasma frequency for a metal), eV.
    pub omega_p: f64,
    /// Damping rate (eV).
    pub gamma: f64,
}

impl Oscillator {
    pub fn new(omega0: f64, omega_p: f64, gamma: f64) -> Result<Self> {
        let osc = Oscillator { omega0, omega_p, gamma };
        osc.validate()?;
        Ok(osc)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: &str| Error::InvalidMaterial {
            name,
            reason: reason.to_string(),
        };
        if !(self.omega0.is_finite() && self.omega0 >= 0.0) {
            return Err(bad("omega0", "must be finite and non-negative"));
        }
        if !(self.omega_p.is_finite() && self.omega_p >= 0.0) {
            return Err(bad("omega_p", "must be finite and non-negative"));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(bad("gamma", "must be finite and strictly positive (absorptive medium)"));
        }
        Ok(())
    }

    fn denominator(&self, omega: f64) -> Complex64 {
        Complex64::new(omega * omega - self.omega0 * self.omega0, self.gamma * omega)
    }

    /// Response value and its derivative with respect to omega.
    pub fn response(&self, omega: f64) -> (Complex64, Complex64) {
        let strength = self.omega_p * self.omega_p;
        if strength == 0.0 {
            return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        }
        let d = self.denominator(omega);
        let value = 1.0 - strength / d;
        let slope = strength * Complex64::new(2.0 * omega, self.gamma) / (d * d);
        (value, slope)
    }

    /// `omega * Im(response)`, finite down to omega = 0 (including the Drude case).
    pub fn omega_times_imag(&self, omega: f64) -> f64 {
        let strength = self.omega_p * self.omega_p;
        if strength == 0.0 {
            return 0.0;
        }
        if omega == 0.0 {
            return if self.omega0 == 0.0 { strength / self.gamma } else { 0.0 };
        }
        let detuning = omega - self.omega0 * self.omega0 / omega;
        strength * self.gamma / (detuning * detuning + self.gamma * self.gamma)
    }
}

/// Magnetic response of the block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Permeability {
    #[default]
    Unity,
    Lorentz(Oscillator),
}

/// Dielectric/magnetic model of the block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialModel {
    pub omega0: f64,
    pub omega_p: f64,
    pub gamma: f64,
    #[serde(default)]
    pub mu: Permeability,
}

impl MaterialModel {
    /// Non-magnetic model, validated.
    pub fn new(omega0: f64, omega_p: f64, gamma: f64) -> Result<Self> {
        let model = MaterialModel {
            omega0,
            omega_p,
            gamma,
            mu: Permeability::Unity,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_magnetic(mut self, mu: Oscillator) -> Result<Self> {
        mu.validate()?;
        self.mu = Permeability::Lorentz(mu);
        Ok(self)
    }

    /// Drude approximation for gold.
    pub fn gold() -> Self {
        MaterialModel {
            omega0: 0.0,
            omega_p: 8.45,
            gamma: 0.047,
            mu: Permeability::Unity,
        }
    }

    /// Non-metallic single-resonance dielectric.
    pub fn dielectric() -> Self {
        MaterialModel {
            omega0: 5.0,
            omega_p: 8.0,
            gamma: 0.5,
            mu: Permeability::Unity,
        }
    }

    /// `eps = mu = 1`. The damping value is irrelevant with zero strength.
    pub fn vacuum() -> Self {
        MaterialModel {
            omega0: 0.0,
            omega_p: 0.0,
            gamma: 1.0,
            mu: Permeability::Unity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.electric().validate()?;
        if let Permeability::Lorentz(osc) = self.mu {
            osc.validate()?;
        }
        Ok(())
    }

    pub fn electric(&self) -> Oscillator {
        Oscillator {
            omega0: self.omega0,
            omega_p: self.omega_p,
            gamma: self.gamma,
        }
    }

    /// Largest frequency scale of the model (eV).
    pub fn frequency_scale(&self) -> f64 {
        let mut scale = self.omega0 + self.omega_p;
        if let Permeability::Lorentz(osc) = self.mu {
            scale = scale.max(osc.omega0 + osc.omega_p);
        }
        scale
    }

    pub fn is_vacuum(&self) -> bool {
        let magnetic_free = match self.mu {
            Permeability::Unity => true,
            Permeability::Lorentz(osc) => osc.omega_p == 0.0,
        };
        self.omega_p == 0.0 && magnetic_free
    }

    fn permeability_response(&self, omega: f64) -> (Complex64, Complex64) {
        match self.mu {
            Permeability::Unity => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            Permeability::Lorentz(osc) => osc.response(omega),
        }
    }
}

fn check_frequency(omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(omega))
    }
}

/// `eps(omega)` on the positive real axis.
pub fn permittivity(model: &MaterialModel, omega: f64) -> Result<Complex64> {
    check_frequency(omega)?;
    Ok(model.electric().response(omega).0)
}

/// `mu(omega)` on the positive real axis.
pub fn permeability(model: &MaterialModel, omega: f64) -> Result<Complex64> {
    check_frequency(omega)?;
    Ok(model.permeability_response(omega).0)
}

/// Square root of `eps * mu` with `Im n >= 0`; when `Im n` vanishes to
/// machine precision the root with `Re n >= 0` is taken.
pub fn refractive_index(epsilon: Complex64, mu: Complex64) -> Result<Complex64> {
    let product = epsilon * mu;
    if product.re == 0.0 && product.im == 0.0 {
        return Err(Error::SingularResponse);
    }
    let mut n = product.sqrt();
    if n.im.abs() <= 4.0 * f64::EPSILON * n.norm() {
        if n.re < 0.0 {
            n = -n;
        }
        n.im = n.im.max(0.0);
    } else if n.im < 0.0 {
        n = -n;
    }
    Ok(n)
}

/// Material response and the dispersion factors used by the energy formulas,
/// all at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseSample {
    pub omega: f64,
    pub epsilon: Complex64,
    pub mu: Complex64,
    pub n: Complex64,
    pub d_epsilon: Complex64,
    pub d_mu: Complex64,
    pub d_n: Complex64,
    /// d(omega n)/d omega
    pub d_omega_n: Complex64,
    /// d(n/mu)/d omega, in eV^-1
    pub d_n_over_mu: Complex64,
    /// d(omega eps)/d omega
    pub d_omega_eps: Complex64,
    /// d(omega mu)/d omega
    pub d_omega_mu: Complex64,
}

impl ResponseSample {
    /// Builds a sample from raw response values and slopes. Used directly by
    /// tests that need non-physical (e.g. impedance-matched) media.
    pub fn from_response(
        omega: f64,
        epsilon: Complex64,
        d_epsilon: Complex64,
        mu: Complex64,
        d_mu: Complex64,
    ) -> Result<Self> {
        check_frequency(omega)?;
        let n = refractive_index(epsilon, mu)?;
        let d_n = (mu * d_epsilon + epsilon * d_mu) / (2.0 * n);
        Ok(ResponseSample {
            omega,
            epsilon,
            mu,
            n,
            d_epsilon,
            d_mu,
            d_n,
            d_omega_n: n + omega * d_n,
            d_n_over_mu: d_n / mu - n * d_mu / (mu * mu),
            d_omega_eps: epsilon + omega * d_epsilon,
            d_omega_mu: mu + omega * d_mu,
        })
    }

    /// Non-dispersive medium with constant `eps`, `mu`.
    pub fn constant(omega: f64, epsilon: Complex64, mu: Complex64) -> Result<Self> {
        let zero = Complex64::new(0.0, 0.0);
        Self::from_response(omega, epsilon, zero, mu, zero)
    }
}

/// Evaluates the material and its analytic derivatives at `omega`.
pub fn response_sample(model: &MaterialModel, omega: f64) -> Result<ResponseSample> {
    check_frequency(omega)?;
    let (epsilon, d_epsilon) = model.electric().response(omega);
    let (mu, d_mu) = model.permeability_response(omega);
    ResponseSample::from_response(omega, epsilon, d_epsilon, mu, d_mu)
}

/// Result of reconstructing `Re eps - 1` from `Im eps` by a Hilbert transform.
#[derive(Debug, Clone, PartialEq)]
pub struct KramersKronigCheck {
    pub cutoff: f64,
    /// `(omega, analytic Re eps - 1, reconstructed)` per grid point.
    pub points: Vec<(f64, f64, f64)>,
    /// Largest `|reconstructed - analytic|`, divided by the largest
    /// `|analytic|` on the grid (0 when the model is vacuum).
    pub max_residual: f64,
    pub quadrature_error: f64,
}

/// Reconstructs `Re eps(omega) - 1` on `omega_grid` from
/// `(2/pi) PV int_0^cutoff t Im eps(t) / (t^2 - omega^2) dt` and compares it
/// with the closed form.
pub fn kramers_kronig_residual(
    model: &MaterialModel,
    omega_grid: &[f64],
    cutoff: f64,
    tol: &Tolerance,
) -> Result<KramersKronigCheck> {
    model.validate()?;
    for w in omega_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidGrid("frequency grid must be strictly increasing".into()));
        }
    }
    if let Some(&first) = omega_grid.first() {
        check_frequency(first)?;
    }
    if let Some(&last) = omega_grid.last() {
        if cutoff.is_nan() || cutoff <= last {
            return Err(Error::InvalidGrid(format!("cutoff {cutoff} must exceed the largest grid frequency {last}")));
        }
    }

    let osc = model.electric();
    let mut points = Vec::with_capacity(omega_grid.len());
    let mut quadrature_error: f64 = 0.0;
    for &omega in omega_grid {
        let analytic = osc.response(omega).0.re - 1.0;
        let reconstructed = if osc.omega_p == 0.0 {
            0.0
        } else {
            let integrand = |t: f64| FRAC_2_PI * osc.omega_times_imag(t) / ((t + omega) * (t - omega));
            let r: QuadratureResult = principal_value(integrand, omega, 0.0, cutoff, tol)?;
            quadrature_error = quadrature_error.max(r.error_estimate);
            r.value
        };
        points.push((omega, analytic, reconstructed));
    }
    let scale = points.iter().fold(0.0_f64, |m, p| m.max(p.1.abs()));
    let worst = points.iter().fold(0.0_f64, |m, p| m.max((p.2 - p.1).abs()));
    let max_residual = if scale == 0.0 { worst } else { worst / scale };
    Ok(KramersKronigCheck {
        cutoff,
        points,
        max_residual,
        quadrature_error,
    })
}
