//! Property-based invariants.

use levylab::levy::{dispersion_energy, eta_relativistic, LevyExponent};
use levylab::propagation::{evolve, propagator_multiplier, Grid1D, WaveState};
use levylab::spectrum::{cutoff_from_roots, mass_spectrum, roots_from_cutoff};
use proptest::prelude::*;

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponent_is_even_nonpositive_and_zero_at_origin(
        u in -50.0f64..50.0,
        m in log_uniform(0.1, 10.0),
    ) {
        let eta = eta_relativistic(u, m).unwrap();
        prop_assert!(eta <= 0.0);
        prop_assert_eq!(eta, eta_relativistic(-u, m).unwrap());
        prop_assert_eq!(eta_relativistic(0.0, m).unwrap(), 0.0);
        // dispersion identity E0 = -eta/tau with tau = 1/m
        let e0 = dispersion_energy(u, m).unwrap();
        prop_assert!((e0 + m * eta).abs() <= 1e-12 * e0.max(1.0));
    }

    #[test]
    fn cutoff_round_trip(
        x_plus in log_uniform(0.1, 100.0),
        x_minus in log_uniform(0.1, 100.0),
        lambda3 in log_uniform(0.05, 10.0),
        negate in any::<bool>(),
    ) {
        let l3 = if negate { -lambda3 } else { lambda3 };
        let cutoff = cutoff_from_roots(x_plus, x_minus, l3).unwrap();
        // f(1) constraint within roundoff of the coefficient magnitudes
        let scale: f64 = cutoff.coefficients().iter().map(|l| l.abs()).sum();
        prop_assert!(cutoff.eval(1.0).abs() <= 1e-14 * scale.max(1.0));

        let rs = roots_from_cutoff(&cutoff).unwrap();
        let mut got: Vec<f64> = rs.accepted().map(|r| r.value).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut want = [1.0, x_plus, x_minus];
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assert_eq!(got.len(), 3);
        for (g, w) in got.iter().zip(want.iter()) {
            prop_assert!((g - w).abs() <= 1e-12 * w.max(1.0));
        }
    }

    #[test]
    fn mass_spectrum_scales_linearly(
        x_plus in log_uniform(0.2, 50.0),
        x_minus in log_uniform(0.2, 50.0),
        m in log_uniform(0.1, 10.0),
        kappa in log_uniform(0.1, 10.0),
    ) {
        let cutoff = cutoff_from_roots(x_plus, x_minus, 1.0).unwrap();
        let base = mass_spectrum(m, &cutoff).unwrap();
        let scaled = mass_spectrum(kappa * m, &cutoff).unwrap();
        prop_assert_eq!(base.masses.len(), scaled.masses.len());
        for (a, b) in scaled.masses.iter().zip(base.masses.iter()) {
            prop_assert!((a.mass - kappa * b.mass).abs() <= 1e-13 * a.mass.max(1.0));
        }
    }

    #[test]
    fn multiplier_semigroup(
        dt1 in -2.0f64..2.0,
        dt2 in -2.0f64..2.0,
        m in log_uniform(0.5, 2.0),
    ) {
        let grid = Grid1D::new(32, 16.0).unwrap();
        let exponent = LevyExponent::relativistic(m).unwrap();
        let m1 = propagator_multiplier(&exponent, dt1, &grid).unwrap();
        let m2 = propagator_multiplier(&exponent, dt2, &grid).unwrap();
        let m12 = propagator_multiplier(&exponent, dt1 + dt2, &grid).unwrap();
        for k in 0..grid.n() {
            prop_assert!((m1[k] * m2[k] - m12[k]).norm() <= 1e-12);
            prop_assert!((m1[k].norm() - 1.0).abs() <= 1e-13);
        }
    }

    #[test]
    fn evolution_composes_and_conserves_norm(
        dt1 in 1e-3f64..0.5,
        dt2 in 1e-3f64..0.5,
        u0 in -1.0f64..1.0,
    ) {
        let grid = Grid1D::new(64, 24.0).unwrap();
        let exponent = LevyExponent::relativistic(1.0).unwrap();
        let psi = WaveState::gaussian_packet(grid, 0.0, 2.0, u0).unwrap();
        let n0 = psi.norm();
        let one = evolve(&evolve(&psi, dt1, &exponent).unwrap(), dt2, &exponent).unwrap();
        let two = evolve(&psi, dt1 + dt2, &exponent).unwrap();
        prop_assert!((one.norm() - n0).abs() <= 1e-10 * n0);
        let sup = one
            .amplitudes
            .iter()
            .zip(two.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        prop_assert!(sup <= 1e-10);
    }
}
