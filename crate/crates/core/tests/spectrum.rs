use block_casimir::materials::response_sample;
use block_casimir::quadrature::{integrate_spectrum, SpectralQuantity, Tolerance};
use block_casimir::spectra::{casimir_spectral_energy, spectral_energy, spectrum_scan, variance_density_outside};
use block_casimir::{ExecMode, MaterialModel};

fn total(model: &MaterialModel, length: f64, tol: Tolerance) -> block_casimir::SpectrumIntegral {
    integrate_spectrum(model, length, SpectralQuantity::TotalCasimir, &tol).unwrap()
}

#[test]
fn tolerance_halving_stays_inside_error_bar() {
    for model in [MaterialModel::gold(), MaterialModel::dielectric()] {
        let mut previous = total(&model, 5.068, Tolerance::new(1e-4)).result;
        for relative in [5e-5, 2.5e-5, 1.25e-5] {
            let next = total(&model, 5.068, Tolerance::new(relative)).result;
            assert!(
                (next.value - previous.value).abs() < previous.error_estimate,
                "{relative}: {} vs {} +- {}",
                next.value,
                previous.value,
                previous.error_estimate
            );
            previous = next;
        }
    }
}

#[test]
fn panels_resolve_the_round_trip_oscillation() {
    for model in [MaterialModel::gold(), MaterialModel::dielectric()] {
        for length in [0.5068, 5.068, 50.68] {
            let r = total(&model, length, Tolerance::new(1e-4));
            assert!(r.max_period_fraction <= 0.5, "{length}: {}", r.max_period_fraction);
            assert!(r.result.value > r.result.error_estimate);
        }
    }
}

#[test]
fn vacuum_total_is_zero() {
    let r = total(&MaterialModel::vacuum(), 5.068, Tolerance::new(1e-6)).result;
    assert_eq!(r.value, 0.0);
}

#[test]
fn serial_and_parallel_agree_bitwise() {
    let gold = MaterialModel::gold();
    let serial = total(&gold, 5.068, Tolerance::new(1e-6).with_mode(ExecMode::Serial));
    let parallel = total(&gold, 5.068, Tolerance::new(1e-6).with_mode(ExecMode::Parallel));
    assert_eq!(serial.result.value.to_bits(), parallel.result.value.to_bits());
    assert_eq!(serial.result.error_estimate.to_bits(), parallel.result.error_estimate.to_bits());

    let grid: Vec<f64> = (1..=500).map(|i| 0.04 * i as f64).collect();
    let a = spectrum_scan(&gold, 50.68, &grid, ExecMode::Serial).unwrap();
    let b = spectrum_scan(&gold, 50.68, &grid, ExecMode::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn empty_grid_gives_empty_scan() {
    assert!(spectrum_scan(&MaterialModel::gold(), 5.068, &[], ExecMode::Serial).unwrap().is_empty());
}

#[test]
fn transparent_at_high_frequency() {
    for model in [MaterialModel::gold(), MaterialModel::dielectric()] {
        for length in [5.068, 50.68] {
            let r = spectral_energy(&response_sample(&model, 1e3).unwrap(), length).unwrap();
            assert!((r.w - r.w_free).abs() < 1e-4 * r.w_free);
            assert!(r.w_c.abs() < 1e-4 * r.w_free);
        }
    }
}

#[test]
fn casimir_spectrum_decays_at_least_as_inverse_square() {
    // Fitted C = max |W_C| w^2 over each decade above 10 Omega must not grow.
    for model in [MaterialModel::gold(), MaterialModel::dielectric()] {
        for length in [5.068, 50.68] {
            let start = 10.0 * model.omega_p;
            let fits: Vec<f64> = (0..2)
                .map(|decade| {
                    let lo = start * 10f64.powi(decade);
                    (0..4000)
                        .map(|i| lo * 10f64.powf(i as f64 / 4000.0))
                        .map(|w| casimir_spectral_energy(&model, length, w).unwrap().abs() * w * w)
                        .fold(0.0, f64::max)
                })
                .collect();
            assert!(fits[1] <= fits[0], "{fits:?}");
        }
    }
}

#[test]
fn gold_damped_below_plasma_frequency() {
    let r = spectral_energy(&response_sample(&MaterialModel::gold(), 5.0).unwrap(), 5.068).unwrap();
    assert!(r.w < r.w_free);
}

#[test]
fn exterior_ripple_has_half_wavelength_period() {
    let gold = MaterialModel::gold();
    let omega = 2.0;
    let s = response_sample(&gold, omega).unwrap();
    let period = std::f64::consts::PI / omega;
    for x in [6.0, 7.3, 11.9] {
        let a = variance_density_outside(&s, 5.068, x).unwrap();
        let b = variance_density_outside(&s, 5.068, x + period).unwrap();
        assert!((a.d_e2 - b.d_e2).abs() < 1e-12 * a.d_e2.abs());
        let c = variance_density_outside(&s, 5.068, x + 0.5 * period).unwrap();
        assert!((a.d_e2 - c.d_e2).abs() > 1e-3 * a.d_e2.abs());
    }
}
