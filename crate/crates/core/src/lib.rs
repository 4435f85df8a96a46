//! Zero-point energy of one-dimensionally propagating light around a
//! dispersive, absorbing block.
//!
//! The block occupies `0 <= x <= L` and is surrounded by vacuum. For each
//! real frequency the crate evaluates the scattering coefficients of the
//! block, the zero-point field variances and energy density everywhere, the
//! spectral energy `W(omega)` stored in the block and its regularised
//! (bulk-subtracted) Casimir part `W_C(omega)`, and integrates `W_C` over
//! frequency to obtain the total Casimir energy.
//!
//! Units are natural throughout: hbar = c = 1, frequencies in eV, lengths in
//! eV^-1, spectral energies dimensionless.
//!
//! Grid-shaped work (spectra, quadrature panels) runs on rayon when the
//! default `parallel` feature is enabled; [`ExecMode::Serial`] forces the
//! sequential path, and both produce bit-identical results.

pub mod error;
pub mod exec;
pub mod greenfn;
pub mod materials;
pub mod modealg;
pub mod quadrature;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use exec::ExecMode;
pub use greenfn::{BlockGeometry, BlockGreen, NumericGreen, Region, ScatterCoefficients};
pub use materials::{MaterialModel, Oscillator, Permeability, ResponseSample};
pub use quadrature::{QuadratureResult, SpectralQuantity, SpectrumIntegral, Tolerance};
pub use spectra::{SpectralRecord, VarianceDensity};
