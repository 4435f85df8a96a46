//! Commutator algebra of the exterior right/left-going modes at one
//! frequency, and the transform to independent modes `b1`, `b2`.
//!
//! Operators are never built. A mode is its coefficient row over the basis
//! `(a+, a-)`, and the algebra is the Gram matrix `G_ij = [a_i, a_j^dagger]`
//! with the `delta(omega - omega')` factor normalised to one.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn adjoint(a: &Matrix2) -> Matrix2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn transpose(a: &Matrix2) -> Matrix2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Gram matrix of `[a_i, a_j^dagger]` for `(a+, a-)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorGram {
    pub matrix: Matrix2,
}

impl CommutatorGram {
    pub fn is_hermitian(&self) -> bool {
        let m = &self.matrix;
        m[0][0].im == 0.0 && m[1][1].im == 0.0 && m[0][1] == m[1][0].conj()
    }

    /// Eigenvalues (ascending) from the characteristic polynomial
    /// `l^2 - tr l + det = 0`.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let m = &self.matrix;
        let trace = (m[0][0] + m[1][1]).re;
        let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).re;
        let disc = (0.25 * trace * trace - det).max(0.0).sqrt();
        [0.5 * trace - disc, 0.5 * trace + disc]
    }
}

/// `G = [[1, i zeta], [-i conj(zeta), 1]]`; Hermitian by construction.
pub fn commutator_gram(zeta: Complex64) -> CommutatorGram {
    let off = I * zeta;
    CommutatorGram {
        matrix: [[ONE, off], [off.conj(), ONE]],
    }
}

/// Coefficients of `(b1, b2)` over `(a+, a-)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTransform {
    pub matrix: Matrix2,
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub phi_zeta: f64,
}

/// Builds the independent-mode transform for `|zeta| < 1`.
pub fn build_transform(zeta: Complex64) -> Result<ModeTransform> {
    let magnitude = zeta.norm();
    if magnitude.is_nan() || magnitude >= 1.0 {
        return Err(Error::AlgebraBreakdown(magnitude));
    }
    let phi = zeta.arg();
    let delta_plus = (1.0 + magnitude).sqrt().recip();
    let delta_minus = (1.0 - magnitude).sqrt().recip();
    let sum = 0.5 * (delta_plus + delta_minus);
    let diff = 0.5 * (delta_plus - delta_minus);
    let half = Complex64::from_polar(1.0, 0.5 * phi);
    let half_conj = half.conj();
    Ok(ModeTransform {
        matrix: [
            [sum * half_conj, I * diff * half],
            [-I * diff * half_conj, sum * half],
        ],
        delta_plus,
        delta_minus,
        phi_zeta: phi,
    })
}

/// Deviations of the transformed algebra from canonical form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndependenceReport {
    /// `max |M G M^dagger - 1|` over entries: the `[b_i, b_j^dagger]` check.
    pub dagger_deviation: f64,
    /// `max |M C M^T|` with `C = [a_i, a_j] = 0`: the `[b_i, b_j]` check.
    pub plain_deviation: f64,
}

impl IndependenceReport {
    pub fn max_deviation(&self) -> f64 {
        self.dagger_deviation.max(self.plain_deviation)
    }
}

pub fn verify_independence(transform: &ModeTransform, gram: &CommutatorGram) -> IndependenceReport {
    let m = &transform.matrix;
    let product = mul(&mul(m, &gram.matrix), &adjoint(m));
    let mut dagger_deviation: f64 = 0.0;
    for (i, row) in product.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            dagger_deviation = dagger_deviation.max((cell - target).norm());
        }
    }
    // [a+, a-] = 0 and [a_i, a_i] = 0 identically.
    let plain = [[ZERO; 2]; 2];
    let plain_product = mul(&mul(m, &plain), &transpose(m));
    let plain_deviation = plain_product.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    IndependenceReport {
        dagger_deviation,
        plain_deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coupling_is_identity() {
        let g = commutator_gram(ZERO);
        assert_eq!(g.matrix, [[ONE, ZERO], [ZERO, ONE]]);
        let t = build_transform(ZERO).unwrap();
        assert_eq!(t.delta_plus, 1.0);
        assert_eq!(t.delta_minus, 1.0);
        assert_eq!(t.matrix, [[ONE, ZERO], [ZERO, ONE]]);
        assert_eq!(verify_independence(&t, &g).max_deviation(), 0.0);
    }

    #[test]
    fn half_coupling() {
        let z = Complex64::new(0.5, 0.0);
        let t = build_transform(z).unwrap();
        assert!((t.delta_plus - 0.816_496_580_927_726).abs() < 1e-15);
        assert!((t.delta_minus - std::f64::consts::SQRT_2).abs() < 1e-15);
        let [lo, hi] = commutator_gram(z).eigenvalues();
        assert!((lo - 0.5).abs() < 1e-15 && (hi - 1.5).abs() < 1e-15);
        assert!(verify_independence(&t, &commutator_gram(z)).max_deviation() < 1e-15);
    }

    #[test]
    fn gram_is_hermitian() {
        for (re, im) in [(0.3, -0.2), (-0.7, 0.1), (0.0, 0.99)] {
            assert!(commutator_gram(Complex64::new(re, im)).is_hermitian());
        }
    }

    #[test]
    fn breakdown_at_unit_coupling() {
        assert_eq!(build_transform(Complex64::new(0.0, 1.0)), Err(Error::AlgebraBreakdown(1.0)));
        assert!(build_transform(Complex64::new(f64::NAN, 0.0)).is_err());
        let t = build_transform(Complex64::from_polar(0.999, 2.0)).unwrap();
        assert!(t.matrix.iter().flatten().all(|c| c.re.is_finite() && c.im.is_finite()));
    }
}
