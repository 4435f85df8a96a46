//! Retarded Green function of `(d/dx (1/mu) d/dx + omega^2 eps) g = delta(x - x')`
//! for a homogeneous block `0 <= x <= L` in vacuum.
//!
//! The closed forms are written in terms of the round-trip factor
//! `E = exp(2 i n omega L)`, which has `|E| <= 1` on the `Im n >= 0` branch,
//! so thick absorbing blocks never overflow. [`green_numeric`] builds the same
//! function independently from transfer matrices and serves as the oracle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::{response_sample, MaterialModel, ResponseSample};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const DEGENERATE: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Left,
    Inside,
    Right,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Left => "left",
            Region::Inside => "inside",
            Region::Right => "right",
        }
    }
}

/// Block occupying `0 <= x <= length` (eV^-1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockGeometry {
    length: f64,
}

impl BlockGeometry {
    pub fn new(length: f64) -> Result<Self> {
        if length.is_finite() && length > 0.0 {
            Ok(BlockGeometry { length })
        } else {
            Err(Error::InvalidLength(length))
        }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn region(&self, x: f64) -> Region {
        if x < 0.0 {
            Region::Left
        } else if x > self.length {
            Region::Right
        } else {
            Region::Inside
        }
    }

    fn expect(&self, x: f64, region: Region) -> Result<()> {
        if self.region(x) == region {
            Ok(())
        } else {
            Err(Error::Region {
                x,
                length: self.length,
                expected: region.name(),
            })
        }
    }
}

/// Scattering coefficients of the block at one `(omega, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterCoefficients {
    pub zeta: Complex64,
    pub abs_zeta: f64,
    pub phi_zeta: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
    /// `exp(2 i n omega L)`
    pub round_trip: Complex64,
}

fn guard(denominator: Complex64, omega: f64) -> Result<Complex64> {
    let magnitude = denominator.norm();
    if magnitude < DEGENERATE || !magnitude.is_finite() {
        Err(Error::DegenerateGeometry { omega, magnitude })
    } else {
        Ok(denominator)
    }
}

fn round_trip(sample: &ResponseSample, length: f64) -> Complex64 {
    (2.0 * I * sample.n * sample.omega * length).exp()
}

/// Exterior coupling coefficient
/// `zeta = i e^{-2i w L} (eps - mu)(E - 1) / [(eps + mu)(E - 1) - 2n(E + 1)]`.
pub fn zeta(sample: &ResponseSample, length: f64) -> Result<Complex64> {
    let geometry = BlockGeometry::new(length)?;
    let e = round_trip(sample, geometry.length);
    zeta_from_round_trip(sample, geometry.length, e)
}

fn zeta_from_round_trip(s: &ResponseSample, length: f64, e: Complex64) -> Result<Complex64> {
    let den = guard((s.epsilon + s.mu) * (e - 1.0) - 2.0 * s.n * (e + 1.0), s.omega)?;
    let phase = Complex64::from_polar(1.0, -2.0 * s.omega * length);
    Ok(I * phase * (s.epsilon - s.mu) * (e - 1.0) / den)
}

/// Interior coefficients `(alpha, beta)`.
pub fn alpha_beta(sample: &ResponseSample, length: f64) -> Result<(Complex64, Complex64)> {
    let geometry = BlockGeometry::new(length)?;
    let e = round_trip(sample, geometry.length);
    alpha_beta_from_round_trip(sample, e)
}

fn alpha_beta_from_round_trip(s: &ResponseSample, e: Complex64) -> Result<(Complex64, Complex64)> {
    let minus = (s.n - s.mu) * (s.n - s.mu);
    let plus = (s.n + s.mu) * (s.n + s.mu);
    let alpha = minus * e / guard(plus - minus * e, s.omega)?;
    let beta_den = 2.0 * s.n + s.epsilon + s.mu + (2.0 * s.n - s.epsilon - s.mu) * e;
    let beta = (s.epsilon - s.mu) / guard(beta_den, s.omega)?;
    Ok((alpha, beta))
}

/// All scattering coefficients in one pass.
pub fn scatter_coefficients(sample: &ResponseSample, length: f64) -> Result<ScatterCoefficients> {
    let geometry = BlockGeometry::new(length)?;
    let e = round_trip(sample, geometry.length);
    let zeta = zeta_from_round_trip(sample, geometry.length, e)?;
    let (alpha, beta) = alpha_beta_from_round_trip(sample, e)?;
    Ok(ScatterCoefficients {
        zeta,
        abs_zeta: zeta.norm(),
        phi_zeta: zeta.arg(),
        alpha,
        beta,
        round_trip: e,
    })
}

/// `zeta` through the cotangent of `n omega L`. Overflows for thick
/// absorbing blocks; kept as an independent cross-check of [`zeta`].
pub fn zeta_cotangent_form(s: &ResponseSample, length: f64) -> Complex64 {
    let theta = s.n * s.omega * length;
    let cot = theta.cos() / theta.sin();
    let phase = Complex64::from_polar(1.0, -2.0 * s.omega * length);
    I * phase * (s.epsilon - s.mu) / (2.0 * I * s.n * cot + s.epsilon + s.mu)
}

/// `alpha = [((n + mu)/(n - mu))^2 e^{-2 i n omega L} - 1]^{-1}`, evaluated
/// literally. Overflows for thick absorbing blocks.
pub fn alpha_growing_form(s: &ResponseSample, length: f64) -> Complex64 {
    let ratio = (s.n + s.mu) / (s.n - s.mu);
    let growing = (-2.0 * I * s.n * s.omega * length).exp();
    ONE / (ratio * ratio * growing - 1.0)
}

/// Closed-form Green function of one block at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockGreen {
    pub sample: ResponseSample,
    pub geometry: BlockGeometry,
    pub coefficients: ScatterCoefficients,
}

impl BlockGreen {
    pub fn new(sample: ResponseSample, length: f64) -> Result<Self> {
        let geometry = BlockGeometry::new(length)?;
        let coefficients = scatter_coefficients(&sample, length)?;
        Ok(BlockGreen {
            sample,
            geometry,
            coefficients,
        })
    }

    /// Uses caller-supplied coefficients (for mutation testing of downstream checks).
    pub fn with_coefficients(sample: ResponseSample, length: f64, coefficients: ScatterCoefficients) -> Result<Self> {
        Ok(BlockGreen {
            sample,
            geometry: BlockGeometry::new(length)?,
            coefficients,
        })
    }

    fn k0(&self) -> f64 {
        self.sample.omega
    }

    fn q(&self) -> Complex64 {
        self.sample.n * self.sample.omega
    }

    /// `x, x' > L`.
    pub fn right(&self, x: f64, x_prime: f64) -> Result<Complex64> {
        self.geometry.expect(x, Region::Right)?;
        self.geometry.expect(x_prime, Region::Right)?;
        Ok(self.right_unchecked(x, x_prime))
    }

    fn right_unchecked(&self, x: f64, x_prime: f64) -> Complex64 {
        let k = self.k0();
        let direct = -I / (2.0 * k) * Complex64::from_polar(1.0, k * (x - x_prime).abs());
        let reflected = self.coefficients.zeta / (2.0 * k) * Complex64::from_polar(1.0, k * (x + x_prime));
        direct + reflected
    }

    /// `x, x' < 0`, from the mirror image `x -> L - x` of the right region.
    pub fn left(&self, x: f64, x_prime: f64) -> Result<Complex64> {
        self.geometry.expect(x, Region::Left)?;
        self.geometry.expect(x_prime, Region::Left)?;
        let l = self.geometry.length();
        Ok(self.right_unchecked(l - x, l - x_prime))
    }

    /// `0 <= x, x' <= L`.
    pub fn inside(&self, x: f64, x_prime: f64) -> Result<Complex64> {
        self.geometry.expect(x, Region::Inside)?;
        self.geometry.expect(x_prime, Region::Inside)?;
        let q = self.q();
        let l = self.geometry.length();
        let ScatterCoefficients {
            alpha, beta, round_trip, ..
        } = self.coefficients;
        let d = x - x_prime;
        let s = x + x_prime;
        // alpha ~ E underflows in thick opaque blocks while exp(-i q d) grows,
        // so carry E inside the exponentials: alpha e^{+-iqd} = (alpha/E) e^{iq(2L +- d)}.
        let alpha_over_e = if round_trip.norm() > 1e-150 {
            alpha / round_trip
        } else {
            let (n, mu) = (self.sample.n, self.sample.mu);
            (n - mu) * (n - mu) / ((n + mu) * (n + mu))
        };
        let bracket = (I * q * d.abs()).exp()
            + alpha_over_e * ((I * q * (2.0 * l + d)).exp() + (I * q * (2.0 * l - d)).exp())
            + beta * ((I * q * s).exp() + (-I * q * (s - 2.0 * l)).exp());
        Ok(-I * self.sample.mu / (2.0 * q) * bracket)
    }

    /// Dispatches on the region; both points must share a region.
    pub fn eval(&self, x: f64, x_prime: f64) -> Result<Complex64> {
        match self.geometry.region(x) {
            Region::Left => self.left(x, x_prime),
            Region::Inside => self.inside(x, x_prime),
            Region::Right => self.right(x, x_prime),
        }
    }

    /// `lim_{x' -> x} d_x d_x' g(x, x')`, from term-by-term differentiation
    /// of the regional closed form (the `|x - x'|` kink contributes only its
    /// smooth part). `x` must not sit on an interface.
    pub fn mixed_derivative_coincident(&self, x: f64) -> Result<Complex64> {
        let l = self.geometry.length();
        if x == 0.0 || x == l {
            return Err(Error::Region {
                x,
                length: l,
                expected: "open (non-interface)",
            });
        }
        Ok(match self.geometry.region(x) {
            Region::Right => self.right_mixed(x),
            Region::Left => self.right_mixed(l - x),
            Region::Inside => {
                let q = self.q();
                let ScatterCoefficients { alpha, beta, .. } = self.coefficients;
                let standing = (2.0 * I * q * x).exp() + (-2.0 * I * q * (x - l)).exp();
                -I * self.sample.mu * q / 2.0 * (1.0 + 2.0 * alpha - beta * standing)
            }
        })
    }

    fn right_mixed(&self, x: f64) -> Complex64 {
        let k = self.k0();
        -k / 2.0 * (I + self.coefficients.zeta * Complex64::from_polar(1.0, 2.0 * k * x))
    }

    /// Material response `(eps, mu)` at position `x`.
    pub fn local_response(&self, x: f64) -> (Complex64, Complex64) {
        match self.geometry.region(x) {
            Region::Inside => (self.sample.epsilon, self.sample.mu),
            _ => (ONE, ONE),
        }
    }
}

/// Outside-right closed form for a single evaluation.
pub fn green_right(sample: &ResponseSample, length: f64, x: f64, x_prime: f64) -> Result<Complex64> {
    BlockGreen::new(*sample, length)?.right(x, x_prime)
}

/// Inside closed form for a single evaluation.
pub fn green_inside(sample: &ResponseSample, length: f64, x: f64, x_prime: f64) -> Result<Complex64> {
    BlockGreen::new(*sample, length)?.inside(x, x_prime)
}

/// State vector `(psi, psi' / mu)`; continuous across interfaces.
type State = [Complex64; 2];

/// State with its magnitude split off: the true state is `state * exp(log_scale)`.
/// Opaque layers grow solutions far past the `f64` range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledState {
    pub state: State,
    pub log_scale: f64,
}

impl ScaledState {
    fn unit(slope: Complex64) -> Self {
        ScaledState {
            state: [ONE, slope],
            log_scale: 0.0,
        }
    }
}

/// Propagates a state by `d` through a homogeneous layer with wavenumber `q`
/// and permeability `mu`. The factor `exp(|Im q d|)` goes into the scale.
fn propagate(start: ScaledState, q: Complex64, mu: Complex64, d: f64) -> ScaledState {
    if d == 0.0 {
        return start;
    }
    let phase = q * d;
    let grow = phase.im.abs();
    let (up, down) = ((I * phase - grow).exp(), (-I * phase - grow).exp());
    let c = 0.5 * (up + down);
    let s = (up - down) / (2.0 * I);
    let st = start.state;
    let state = [c * st[0] + mu / q * s * st[1], -(q / mu) * s * st[0] + c * st[1]];
    let norm = state[0].norm().max(state[1].norm());
    if norm > 0.0 && norm.is_finite() {
        ScaledState {
            state: [state[0] / norm, state[1] / norm],
            log_scale: start.log_scale + grow + norm.ln(),
        }
    } else {
        ScaledState {
            state,
            log_scale: start.log_scale + grow,
        }
    }
}

/// Transfer-matrix construction of the Green function, valid for any pair of
/// positions.
#[derive(Debug, Clone, Copy)]
pub struct NumericGreen {
    omega: f64,
    length: f64,
    q_block: Complex64,
    mu_block: Complex64,
    left_at_l: ScaledState,
    right_at_0: ScaledState,
}

impl NumericGreen {
    pub fn new(model: &MaterialModel, length: f64, omega: f64) -> Result<Self> {
        let sample = response_sample(model, omega)?;
        Self::from_sample(&sample, length)
    }

    pub fn from_sample(sample: &ResponseSample, length: f64) -> Result<Self> {
        let geometry = BlockGeometry::new(length)?;
        let q_block = sample.n * sample.omega;
        let mu_block = sample.mu;
        // psi_L = exp(-i w x) for x <= 0, psi_R = exp(i w (x - L)) for x >= L.
        let left_at_0 = ScaledState::unit(Complex64::new(0.0, -sample.omega));
        let right_at_l = ScaledState::unit(Complex64::new(0.0, sample.omega));
        Ok(NumericGreen {
            omega: sample.omega,
            length: geometry.length(),
            q_block,
            mu_block,
            left_at_l: propagate(left_at_0, q_block, mu_block, geometry.length()),
            right_at_0: propagate(right_at_l, q_block, mu_block, -geometry.length()),
        })
    }

    fn vacuum_q(&self) -> Complex64 {
        Complex64::new(self.omega, 0.0)
    }

    /// Left-outgoing solution at `x`.
    pub fn left_solution(&self, x: f64) -> ScaledState {
        let k = self.vacuum_q();
        let start = ScaledState::unit(Complex64::new(0.0, -self.omega));
        if x <= 0.0 {
            propagate(start, k, ONE, x)
        } else if x <= self.length {
            propagate(start, self.q_block, self.mu_block, x)
        } else {
            propagate(self.left_at_l, k, ONE, x - self.length)
        }
    }

    /// Right-outgoing solution at `x`.
    pub fn right_solution(&self, x: f64) -> ScaledState {
        let k = self.vacuum_q();
        let start = ScaledState::unit(Complex64::new(0.0, self.omega));
        if x >= self.length {
            propagate(start, k, ONE, x - self.length)
        } else if x >= 0.0 {
            propagate(start, self.q_block, self.mu_block, x - self.length)
        } else {
            propagate(self.right_at_0, k, ONE, x)
        }
    }

    /// `(1/mu)(psi_L psi_R' - psi_L' psi_R)` at `x`, as (mantissa, log scale).
    pub fn wronskian_at(&self, x: f64) -> (Complex64, f64) {
        let l = self.left_solution(x);
        let r = self.right_solution(x);
        (l.state[0] * r.state[1] - l.state[1] * r.state[0], l.log_scale + r.log_scale)
    }

    /// Largest relative spread of the Wronskian over points in all three regions.
    pub fn wronskian_spread(&self) -> f64 {
        let l = self.length;
        let probes = [-0.7 * l - 1.0, 0.0, 0.31 * l, 0.77 * l, l, 1.4 * l + 0.5];
        let (reference, ref_log) = self.wronskian_at(0.5 * l);
        probes
            .iter()
            .map(|&x| {
                let (w, log) = self.wronskian_at(x);
                (w * (log - ref_log).exp() - reference).norm() / reference.norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64, x_prime: f64) -> Result<Complex64> {
        let (lo, hi) = if x <= x_prime { (x, x_prime) } else { (x_prime, x) };
        let (wr, wr_log) = self.wronskian_at(lo);
        if wr.norm() < 1e-250 || !wr.norm().is_finite() {
            return Err(Error::ResonanceDegeneracy(wr.norm()));
        }
        let l = self.left_solution(lo);
        let r = self.right_solution(hi);
        Ok(l.state[0] * r.state[0] / wr * (l.log_scale + r.log_scale - wr_log).exp())
    }
}

/// Independent transfer-matrix evaluation of `g(x, x', omega)`.
pub fn green_numeric(model: &MaterialModel, length: f64, omega: f64, x: f64, x_prime: f64) -> Result<Complex64> {
    NumericGreen::new(model, length, omega)?.eval(x, x_prime)
}

/// Outcome of applying the discrete wave operator to sampled `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub max_residual: f64,
    /// Grid resolves fewer than ~12 points per local wavelength or decay length.
    pub coarse: bool,
}

/// Applies `(1/mu) d^2/dx^2 + omega^2 eps` with a second-order stencil to
/// samples `g[j] = g(xs[j], x')` and returns the largest absolute residual
/// over interior points.
pub fn residual_check(
    xs: &[f64],
    g: &[Complex64],
    model: &MaterialModel,
    length: f64,
    omega: f64,
    x_prime: f64,
) -> Result<ResidualReport> {
    let geometry = BlockGeometry::new(length)?;
    if xs.len() != g.len() || xs.len() < 3 {
        return Err(Error::InvalidGrid("need at least three samples, one value per point".into()));
    }
    let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    if h.is_nan() || h <= 0.0 || xs.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::InvalidGrid("grid must be uniform and increasing".into()));
    }
    let (lo, hi) = (xs[0] - 2.0 * h, xs[xs.len() - 1] + 2.0 * h);
    for point in [0.0, geometry.length(), x_prime] {
        if point >= lo && point <= hi {
            return Err(Error::InvalidGrid(format!(
                "grid must stay two steps away from x = {point} (interface or source)"
            )));
        }
    }
    let sample = response_sample(model, omega)?;
    let (eps, mu) = match geometry.region(xs[0]) {
        Region::Inside => (sample.epsilon, sample.mu),
        _ => (ONE, ONE),
    };
    let mut worst: f64 = 0.0;
    for j in 1..xs.len() - 1 {
        let second = (g[j + 1] - 2.0 * g[j] + g[j - 1]) / (h * h);
        let r = second / mu + omega * omega * eps * g[j];
        worst = worst.max(r.norm());
    }
    let local_q = (eps * mu).sqrt().norm() * omega;
    Ok(ResidualReport {
        max_residual: worst,
        coarse: local_q * h > 0.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn impedance_matched_block_is_invisible() {
        let s = ResponseSample::constant(2.0, c(2.0, 0.3), c(2.0, 0.3)).unwrap();
        let k = scatter_coefficients(&s, 3.0).unwrap();
        assert_eq!(k.zeta, c(0.0, 0.0));
        // n = sqrt(eps * mu) equals mu only to rounding, and alpha ~ (n - mu)^2.
        assert!(k.alpha.norm() < 1e-30);
        assert_eq!(k.beta, c(0.0, 0.0));
    }

    #[test]
    fn thin_block_limit() {
        let s = response_sample(&MaterialModel::gold(), 2.0).unwrap();
        let z = zeta(&s, 1e-12).unwrap();
        assert!(z.norm() < 1e-9);
    }

    #[test]
    fn thick_block_limit() {
        let s = response_sample(&MaterialModel::dielectric(), 7.0).unwrap();
        let (alpha, beta) = alpha_beta(&s, 1e4).unwrap();
        assert!(alpha.norm() < 1e-300);
        let expected = (s.epsilon - s.mu) / (2.0 * s.n + s.epsilon + s.mu);
        assert!(rel(beta, expected) < 1e-14);
    }

    #[test]
    fn rejects_bad_length() {
        let s = response_sample(&MaterialModel::gold(), 2.0).unwrap();
        assert_eq!(zeta(&s, 0.0), Err(Error::InvalidLength(0.0)));
        assert!(alpha_beta(&s, -1.0).is_err());
    }

    #[test]
    fn cotangent_form_matches_at_moderate_length() {
        let s = response_sample(&MaterialModel::gold(), 3.0).unwrap();
        let stable = zeta(&s, 5.068).unwrap();
        let naive = zeta_cotangent_form(&s, 5.068);
        assert!(rel(stable, naive) < 1e-10, "{stable} vs {naive}");
    }

    #[test]
    fn free_space_diagonal() {
        let s = ResponseSample::constant(2.0, ONE, ONE).unwrap();
        let g = green_right(&s, 1.0, 4.0, 4.0).unwrap();
        assert!(rel(g, c(0.0, -0.25)) < 1e-15);
        let inside = green_inside(&s, 1.0, 0.2, 0.7).unwrap();
        let expected = -I / 4.0 * Complex64::from_polar(1.0, 2.0 * 0.5);
        assert!(rel(inside, expected) < 1e-15);
    }

    #[test]
    fn region_errors() {
        let s = response_sample(&MaterialModel::gold(), 2.0).unwrap();
        assert!(matches!(green_right(&s, 5.0, 4.0, 6.0), Err(Error::Region { .. })));
        assert!(matches!(green_inside(&s, 5.0, -1.0, 2.0), Err(Error::Region { .. })));
        let g = BlockGreen::new(s, 5.0).unwrap();
        assert!(g.mixed_derivative_coincident(5.0).is_err());
    }

    #[test]
    fn numeric_free_space() {
        let g = green_numeric(&MaterialModel::vacuum(), 2.0, 3.0, -1.0, 4.5).unwrap();
        let expected = -I / 6.0 * Complex64::from_polar(1.0, 3.0 * 5.5);
        assert!(rel(g, expected) < 1e-13);
    }

    #[test]
    fn numeric_matches_closed_forms() {
        let cases = [
            (MaterialModel::gold(), 2.0, 5.068, 6.0, 6.0),
            (MaterialModel::dielectric(), 6.0, 5.068, 1.0, 3.0),
            (MaterialModel::gold(), 12.0, 5.068, -0.4, -2.5),
        ];
        for (model, w, l, x, xp) in cases {
            let s = response_sample(&model, w).unwrap();
            let closed = BlockGreen::new(s, l).unwrap().eval(x, xp).unwrap();
            let numeric = green_numeric(&model, l, w, x, xp).unwrap();
            assert!(rel(closed, numeric) < 1e-8, "{closed} vs {numeric}");
        }
    }

    #[test]
    fn wronskian_constant() {
        for model in [MaterialModel::gold(), MaterialModel::dielectric()] {
            for w in [1.0, 5.0, 12.0] {
                let g = NumericGreen::new(&model, 5.068, w).unwrap();
                assert!(g.wronskian_spread() < 1e-10);
            }
        }
    }

    fn residual_at(model: &MaterialModel, x0: f64, x1: f64, n: usize, x_prime: f64) -> ResidualReport {
        let (l, w) = (5.068, 2.0);
        let oracle = NumericGreen::new(model, l, w).unwrap();
        let xs: Vec<f64> = (0..=n).map(|j| x0 + (x1 - x0) * j as f64 / n as f64).collect();
        let g: Vec<Complex64> = xs.iter().map(|&x| oracle.eval(x, x_prime).unwrap()).collect();
        residual_check(&xs, &g, model, l, w, x_prime).unwrap()
    }

    #[test]
    fn residual_is_second_order() {
        let vac = MaterialModel::vacuum();
        let coarse = residual_at(&vac, 6.0, 9.0, 40, 5.5);
        let fine = residual_at(&vac, 6.0, 9.0, 80, 5.5);
        let ratio = coarse.max_residual / fine.max_residual;
        assert!((ratio - 4.0).abs() < 0.2, "free-space ratio {ratio}");

        let diel = MaterialModel::dielectric();
        let coarse = residual_at(&diel, 2.0, 4.5, 100, 1.0);
        let fine = residual_at(&diel, 2.0, 4.5, 200, 1.0);
        let ratio = coarse.max_residual / fine.max_residual;
        assert!((ratio - 4.0).abs() < 0.2, "inside ratio {ratio}");
        assert!(!fine.coarse);
    }

    #[test]
    fn residual_rejects_grid_touching_source() {
        let xs = [1.0, 1.1, 1.2, 1.3];
        let g = [ONE; 4];
        let err = residual_check(&xs, &g, &MaterialModel::gold(), 5.0, 2.0, 1.35).unwrap_err();
        assert!(matches!(err, Error::InvalidGrid(_)));
    }
}
