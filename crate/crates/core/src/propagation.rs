//! Spectral evolution of the free Lévy-Schrödinger particle.
//!
//! Wave functions live on a uniform periodic grid; one time step multiplies
//! the Fourier coefficients by exp(i dt eta(u)/tau). For real symmetric
//! exponents every multiplier has unit modulus, so evolution is unitary and
//! forms a semigroup. Transition densities come from the same machinery with
//! the real weight exp((dt/tau) eta(u)). The mass-energy phase is absorbed:
//! plane waves rotate at the kinetic rate E0(u) only; pass
//! `include_rest_energy` to [`evolve_with_options`] to compare against
//! total-energy conventions.

use crate::error::{Error, Result};
use crate::exec;
use crate::levy::LevyExponent;
use crate::quad::{self, QuadratureSpec};
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Uniform periodic 1D grid with its dual wavenumber grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    n: usize,
    length: f64,
}

impl Grid1D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Domain(format!(
                "grid size must be a power of two >= 8, got {n}"
            )));
        }
        if !(length > 0.0) {
            return Err(Error::Domain(format!(
                "grid length must be positive, got {length}"
            )));
        }
        Ok(Grid1D { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// x_j = (j - n/2) dx, so x = 0 sits on the grid.
    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - self.n as f64 / 2.0) * self.dx()
    }

    /// Dual wavenumber of FFT bin k: u = 2 pi k~ / L with k~ in [-n/2, n/2).
    pub fn wavenumber(&self, k: usize) -> f64 {
        let k_signed = if k < self.n / 2 {
            k as isize
        } else {
            k as isize - self.n as isize
        };
        2.0 * std::f64::consts::PI * k_signed as f64 / self.length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.wavenumber(k)).collect()
    }

    /// FFT bin index of a wavenumber that lies exactly on the dual grid.
    pub fn mode_index(&self, u: f64) -> Result<usize> {
        let du = 2.0 * std::f64::consts::PI / self.length;
        let k_real = u / du;
        let k = k_real.round() as isize;
        if (k_real - k as f64).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "wavenumber {u} is not on the dual grid (spacing {du})"
            )));
        }
        let half = self.n as isize / 2;
        if k < -half || k >= half {
            return Err(Error::Domain(format!(
                "wavenumber {u} exceeds the Nyquist range of the grid"
            )));
        }
        Ok(k.rem_euclid(self.n as isize) as usize)
    }
}

/// Complex amplitudes on a grid at a given time.
#[derive(Debug, Clone)]
pub struct WaveState {
    pub grid: Grid1D,
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl WaveState {
    pub fn new(grid: Grid1D, amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        if amplitudes.len() != grid.n() {
            return Err(Error::Shape(format!(
                "amplitude count {} does not match grid size {}",
                amplitudes.len(),
                grid.n()
            )));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Domain("amplitudes must be finite".into()));
        }
        Ok(WaveState {
            grid,
            amplitudes,
            time,
        })
    }

    /// Plane wave e^{iux}; u must sit on the dual grid so the mode is exact.
    pub fn plane_wave(grid: Grid1D, u: f64) -> Result<Self> {
        grid.mode_index(u)?;
        let amplitudes = (0..grid.n())
            .map(|j| (Complex64::i() * u * grid.x(j)).exp())
            .collect();
        WaveState::new(grid, amplitudes, 0.0)
    }

    /// Normalized Gaussian packet centered at x0 with the given width,
    /// carrying momentum u0.
    pub fn gaussian_packet(grid: Grid1D, x0: f64, width: f64, u0: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::Domain(format!(
                "packet width must be positive, got {width}"
            )));
        }
        let norm = (width * std::f64::consts::PI.sqrt()).powf(-0.5);
        let amplitudes = (0..grid.n())
            .map(|j| {
                let x = grid.x(j);
                let envelope = (-(x - x0) * (x - x0) / (2.0 * width * width)).exp();
                Complex64::from_polar(norm * envelope, u0 * x)
            })
            .collect();
        WaveState::new(grid, amplitudes, 0.0)
    }

    /// Discrete L2 norm sqrt(sum |psi|^2 dx).
    pub fn norm(&self) -> f64 {
        let dx = self.grid.dx();
        (self
            .amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            * dx)
            .sqrt()
    }
}

/// Probability density of the increment over a horizon dt.
#[derive(Debug, Clone)]
pub struct TransitionDensity {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub horizon: f64,
    /// Raw discrete integral before renormalization to 1.
    pub normalization_correction: f64,
    /// Most negative raw value when spectral ringing produced values below
    /// the -1e-12 clip, `None` if no clipping happened.
    pub negative_clip: Option<f64>,
}

impl TransitionDensity {
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }
}

const EDGE_MASS_THRESHOLD: f64 = 1e-6;
const NEGATIVITY_CLIP: f64 = -1e-12;

/// Fourier inversion of the increment characteristic function
/// exp((dt/tau) eta(u)) onto the grid.
pub fn transition_density(
    exponent: &LevyExponent,
    dt: f64,
    grid: &Grid1D,
) -> Result<TransitionDensity> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!(
            "transition horizon must be positive, got {dt}"
        )));
    }
    let n = grid.n();
    let scale = dt / exponent.tau;
    let us = grid.wavenumbers();
    let eta = exponent.eta_batch(&us)?;
    let weights: Vec<f64> = eta.iter().map(|e| (scale * e).exp()).collect();

    // spectral tail: the characteristic function must have decayed at the
    // Nyquist edge or the density width is unresolved
    let edge_weight = weights[n / 2];
    if edge_weight > EDGE_MASS_THRESHOLD {
        return Err(Error::Resolution(format!(
            "characteristic function still {edge_weight:.3e} at the Nyquist edge; refine dx"
        )));
    }

    // p_j = (1/L) sum_k w_k (-1)^k e^{-2 pi i k j / n}  (forward kernel)
    let mut buf: Vec<Complex64> = weights
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(w * sign, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let mut values: Vec<f64> = buf.iter().map(|c| c.re / grid.length()).collect();

    // spatial tail: density mass near the periodic boundary means wrap-around
    let dx = grid.dx();
    let edge_mass: f64 = values[..2]
        .iter()
        .chain(values[n - 2..].iter())
        .map(|v| v.abs() * dx)
        .sum();
    if edge_mass > EDGE_MASS_THRESHOLD {
        return Err(Error::Resolution(format!(
            "density mass {edge_mass:.3e} at the grid edge; enlarge the domain"
        )));
    }

    let raw_integral: f64 = values.iter().sum::<f64>() * dx;
    for v in values.iter_mut() {
        *v /= raw_integral;
    }

    let min_value = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut negative_clip = None;
    if min_value < NEGATIVITY_CLIP {
        negative_clip = Some(min_value);
        for v in values.iter_mut() {
            if *v < NEGATIVITY_CLIP {
                *v = NEGATIVITY_CLIP;
            }
        }
    }

    Ok(TransitionDensity {
        grid: grid.clone(),
        values,
        horizon: dt,
        normalization_correction: raw_integral,
        negative_clip,
    })
}

/// The Fourier multiplier exp(i dt eta(u_k)/tau) per FFT bin; unit modulus
/// for real eta, identity at dt = 0, additive in dt.
pub fn propagator_multiplier(
    exponent: &LevyExponent,
    dt: f64,
    grid: &Grid1D,
) -> Result<Vec<Complex64>> {
    let us = grid.wavenumbers();
    let eta = exponent.eta_batch(&us)?;
    let rate = dt / exponent.tau;
    Ok(eta
        .iter()
        .map(|e| (Complex64::i() * (rate * e)).exp())
        .collect())
}

/// One spectral step: FFT, multiply, inverse FFT; advances `state.time`.
pub fn evolve(state: &WaveState, dt: f64, exponent: &LevyExponent) -> Result<WaveState> {
    evolve_with_options(state, dt, exponent, false)
}

/// As [`evolve`], optionally re-inserting the absorbed rest-energy phase
/// e^{-i dt / tau} for comparison against total-energy conventions.
pub fn evolve_with_options(
    state: &WaveState,
    dt: f64,
    exponent: &LevyExponent,
    include_rest_energy: bool,
) -> Result<WaveState> {
    let n = state.grid.n();
    let multiplier = propagator_multiplier(exponent, dt, &state.grid)?;
    if multiplier.len() != state.amplitudes.len() {
        return Err(Error::Shape(format!(
            "multiplier length {} vs state length {}",
            multiplier.len(),
            state.amplitudes.len()
        )));
    }

    let mut planner = FftPlanner::new();
    let mut buf = state.amplitudes.clone();
    planner.plan_fft_forward(n).process(&mut buf);
    for (b, m) in buf.iter_mut().zip(multiplier.iter()) {
        *b *= m;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let inv_n = 1.0 / n as f64;
    for b in buf.iter_mut() {
        *b *= inv_n;
    }

    if include_rest_energy {
        let phase = (-Complex64::i() * (dt / exponent.tau)).exp();
        for b in buf.iter_mut() {
            *b *= phase;
        }
    }

    WaveState::new(state.grid.clone(), buf, state.time + dt)
}

const BANDLIMIT_THRESHOLD: f64 = 1e-6;

/// Real-space generator application
/// (H psi)(x) = -(1/tau) int [psi(x+y) - psi(x)] W(y) dy,
/// evaluated by symmetric quadrature over y with trigonometric
/// interpolation of psi between grid points. Serves as an oracle for the
/// spectral route: on plane waves it reproduces -eta(u)/tau = E0(u).
pub fn generator_apply(
    state: &WaveState,
    exponent: &LevyExponent,
    spec: &QuadratureSpec,
) -> Result<WaveState> {
    let density = exponent.jump_density()?.ok_or_else(|| {
        Error::Domain("generator_apply needs a jump component (no Lévy density present)".into())
    })?;
    let n = state.grid.n();
    let us = state.grid.wavenumbers();

    // Fourier coefficients c_k with psi(x) = sum_k c_k e^{i u_k x}:
    // c_k = (1/n) sum_j psi_j e^{-i u_k x_j} = (-1)^k / n * DFT[psi]_k
    // (the (-1)^k absorbs the half-domain grid offset x_j = (j - n/2) dx)
    let mut coeffs = state.amplitudes.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut coeffs);
    let inv_n = 1.0 / n as f64;
    for (k, c) in coeffs.iter_mut().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *c *= sign * inv_n;
    }

    // bandlimit diagnostic: top-quarter spectral mass must be negligible
    let total_mass: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let high_mass: f64 = (0..n)
        .filter(|&k| {
            let k_signed = if k < n / 2 { k as isize } else { k as isize - n as isize };
            k_signed.unsigned_abs() >= n / 4
        })
        .map(|k| coeffs[k].norm_sqr())
        .sum();
    if total_mass > 0.0 && high_mass / total_mass > BANDLIMIT_THRESHOLD {
        return Err(Error::Resolution(format!(
            "state is not bandlimited on this grid (high-frequency mass fraction {:.3e})",
            high_mass / total_mass
        )));
    }

    let rate = 1.0 / exponent.tau;
    let tail_scale = density.tail_scale;
    let split = spec.split_points.first().copied().unwrap_or(1.0);

    let results = exec::map_indexed(n, |j| -> Result<Complex64> {
        let x = state.grid.x(j);
        // S(y) = psi(x+y) + psi(x-y) - 2 psi(x), bandlimited interpolation
        let sym = |y: f64| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, c) in coeffs.iter().enumerate() {
                let u = us[k];
                let s = (0.5 * u * y).sin();
                // e^{iu(x+y)} + e^{iu(x-y)} - 2 e^{iux} = -4 sin^2(uy/2) e^{iux}
                acc += c * (Complex64::i() * u * x).exp() * (-4.0 * s * s);
            }
            acc
        };
        let dens = &density;
        let re = |y: f64| sym(y).re * dens.density_unchecked(y);
        let inner_re = quad::integrate(re, 0.0, split, spec)?;
        let tail_re = quad::integrate_tail(re, split, tail_scale, spec)?;
        let im = |y: f64| sym(y).im * dens.density_unchecked(y);
        let inner_im = quad::integrate(im, 0.0, split, spec)?;
        let tail_im = quad::integrate_tail(im, split, tail_scale, spec)?;
        // -(1/tau) * integral over the full line (the symmetrized integrand
        // already pairs +y with -y)
        Ok(Complex64::new(
            -rate * (inner_re.value + tail_re.value),
            -rate * (inner_im.value + tail_im.value),
        ))
    });

    let out: Vec<Complex64> = results.into_iter().collect::<Result<_>>()?;
    WaveState::new(state.grid.clone(), out, state.time)
}

/// Evolves the plane wave e^{iux} one step and reads the kinetic energy off
/// the phase rotation rate. |E dt| must stay below pi to avoid wrapping.
pub fn dispersion_probe(
    exponent: &LevyExponent,
    u: f64,
    dt: f64,
    grid: &Grid1D,
) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    let before = WaveState::plane_wave(grid.clone(), u)?;
    let after = evolve(&before, dt, exponent)?;
    let dx = grid.dx();
    let overlap: Complex64 = before
        .amplitudes
        .iter()
        .zip(after.amplitudes.iter())
        .map(|(b, a)| b.conj() * a)
        .sum::<Complex64>()
        * dx;
    let norm_sq = before.norm().powi(2);
    let rotation = (overlap / norm_sq).arg();
    Ok(-rotation / dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{dispersion_energy, LevyDensity};

    fn relativistic() -> LevyExponent {
        LevyExponent::relativistic(1.0).unwrap()
    }

    #[test]
    fn grid_constructors() {
        assert!(Grid1D::new(7, 1.0).is_err());
        assert!(Grid1D::new(12, 1.0).is_err());
        assert!(Grid1D::new(16, 0.0).is_err());
        let g = Grid1D::new(16, 8.0).unwrap();
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.x(8), 0.0);
        // dual grid round trip
        for k in 0..16 {
            let u = g.wavenumber(k);
            assert_eq!(g.mode_index(u).unwrap(), k);
        }
        assert!(g.mode_index(0.3).is_err());
    }

    #[test]
    fn multiplier_identity_unitarity_semigroup() {
        let g = Grid1D::new(64, 16.0).unwrap();
        let exp = relativistic();

        let id = propagator_multiplier(&exp, 0.0, &g).unwrap();
        assert!(id.iter().all(|m| (m - Complex64::new(1.0, 0.0)).norm() == 0.0));

        let m1 = propagator_multiplier(&exp, 0.7, &g).unwrap();
        assert!(m1.iter().all(|m| (m.norm() - 1.0).abs() < 1e-14));

        let m2 = propagator_multiplier(&exp, 0.4, &g).unwrap();
        let m12 = propagator_multiplier(&exp, 1.1, &g).unwrap();
        for k in 0..g.n() {
            assert!((m1[k] * m2[k] - m12[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_acquires_group_phase() {
        let g = Grid1D::new(128, 16.0 * std::f64::consts::PI).unwrap();
        let exp = relativistic();
        let u = g.wavenumber(10);
        let dt = 0.05;
        let psi = WaveState::plane_wave(g.clone(), u).unwrap();
        let out = evolve(&psi, dt, &exp).unwrap();
        let expected_phase = dt * exp.eta(u).unwrap() / exp.tau;
        for j in 0..g.n() {
            let ratio = out.amplitudes[j] / psi.amplitudes[j];
            assert!((ratio.arg() - expected_phase).abs() < 1e-6);
        }
    }

    #[test]
    fn norm_conservation_over_many_steps() {
        let g = Grid1D::new(256, 40.0).unwrap();
        let exp = relativistic();
        let mut psi = WaveState::gaussian_packet(g, 0.0, 1.5, 2.0).unwrap();
        let n0 = psi.norm();
        for _ in 0..100 {
            psi = evolve(&psi, 0.01, &exp).unwrap();
        }
        assert!((psi.norm() - n0).abs() <= 1e-8 * n0);
        assert!((psi.time - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolution_composes() {
        let g = Grid1D::new(128, 32.0).unwrap();
        let exp = relativistic();
        let psi = WaveState::gaussian_packet(g, -2.0, 1.0, 1.0).unwrap();
        let a = evolve(&evolve(&psi, 0.3, &exp).unwrap(), 0.45, &exp).unwrap();
        let b = evolve(&psi, 0.75, &exp).unwrap();
        let sup = a
            .amplitudes
            .iter()
            .zip(b.amplitudes.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(sup < 1e-10, "sup diff {sup}");
    }

    #[test]
    fn rest_energy_phase_option() {
        let g = Grid1D::new(64, 16.0).unwrap();
        let exp = relativistic();
        let psi = WaveState::plane_wave(g, 0.0).unwrap();
        let dt = 0.2;
        let kinetic = evolve(&psi, dt, &exp).unwrap();
        // u = 0: kinetic evolution is the identity
        assert!((kinetic.amplitudes[0] - psi.amplitudes[0]).norm() < 1e-14);
        let total = evolve_with_options(&psi, dt, &exp, true).unwrap();
        let expected = (-Complex64::i() * (dt / exp.tau)).exp();
        assert!((total.amplitudes[0] / psi.amplitudes[0] - expected).norm() < 1e-14);
    }

    #[test]
    fn transition_density_gaussian_matches_normal() {
        let exp = LevyExponent::gaussian(1.0, 1.0).unwrap();
        let g = Grid1D::new(1024, 32.0).unwrap();
        let dt = 1.0;
        let td = transition_density(&exp, dt, &g).unwrap();
        let sigma2 = dt; // beta^2 dt / tau
        let mut sup = 0.0f64;
        for j in 0..g.n() {
            let x = g.x(j);
            let exact = (-x * x / (2.0 * sigma2)).exp() / (2.0 * std::f64::consts::PI * sigma2).sqrt();
            sup = sup.max((td.values[j] - exact).abs());
        }
        assert!(sup < 1e-8, "sup-norm {sup}");
        assert!((td.integral() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn transition_density_relativistic_closed_form() {
        // for m = 1, dt = tau: p(x) = (e/pi) K1(sqrt(1+x^2)) / sqrt(1+x^2)
        let exp = relativistic();
        let g = Grid1D::new(512, 40.0).unwrap();
        let td = transition_density(&exp, 1.0, &g).unwrap();
        for j in (0..g.n()).step_by(31) {
            let x = g.x(j);
            if x.abs() > 12.0 {
                continue;
            }
            let r = (1.0 + x * x).sqrt();
            let exact = std::f64::consts::E / std::f64::consts::PI
                * crate::special::bessel_k(1, r).unwrap()
                / r;
            assert!(
                (td.values[j] - exact).abs() < 1e-6,
                "x = {x}: {} vs {exact}",
                td.values[j]
            );
        }
    }

    #[test]
    fn transition_density_resolution_errors() {
        let exp = relativistic();
        // dx too coarse: CF at Nyquist edge still large
        let coarse = Grid1D::new(8, 40.0).unwrap();
        assert!(matches!(
            transition_density(&exp, 1.0, &coarse),
            Err(Error::Resolution(_))
        ));
        // domain too small: wrap-around mass at the edges
        let small = Grid1D::new(64, 3.0).unwrap();
        assert!(matches!(
            transition_density(&exp, 1.0, &small),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn generator_vanishes_on_constants() {
        let g = Grid1D::new(32, 8.0).unwrap();
        let exp = relativistic();
        let psi = WaveState::new(
            g.clone(),
            vec![Complex64::new(1.0, 0.0); g.n()],
            0.0,
        )
        .unwrap();
        let spec = QuadratureSpec::with_tolerance(1e-10, 1e-10);
        let out = generator_apply(&psi, &exp, &spec).unwrap();
        for a in out.amplitudes {
            assert!(a.norm() < 1e-10);
        }
    }

    #[test]
    fn generator_reproduces_dispersion_on_plane_waves() {
        let g = Grid1D::new(64, 8.0 * std::f64::consts::PI).unwrap();
        let exp = relativistic();
        let spec = QuadratureSpec::with_tolerance(1e-10, 1e-10);
        for k in [1usize, 3, 5] {
            let u = g.wavenumber(k);
            let psi = WaveState::plane_wave(g.clone(), u).unwrap();
            let out = generator_apply(&psi, &exp, &spec).unwrap();
            let e0 = dispersion_energy(u, 1.0).unwrap();
            for j in (0..g.n()).step_by(17) {
                let ratio = out.amplitudes[j] / psi.amplitudes[j];
                assert!(
                    (ratio.re - e0).abs() < 1e-5 * e0.max(1e-3),
                    "u = {u}: got {}, want {e0}",
                    ratio.re
                );
                assert!(ratio.im.abs() < 1e-7);
            }
        }
    }

    #[test]
    fn generator_matches_time_derivative_richardson() {
        let g = Grid1D::new(128, 32.0).unwrap();
        let exp = relativistic();
        let psi = WaveState::gaussian_packet(g.clone(), 0.0, 2.0, 1.0).unwrap();
        let spec = QuadratureSpec::with_tolerance(1e-10, 1e-10);
        let h_psi = generator_apply(&psi, &exp, &spec).unwrap();

        // i d/dt psi = H psi; Richardson-extrapolated forward difference
        let diff = |dt: f64| -> Vec<Complex64> {
            let fwd = evolve(&psi, dt, &exp).unwrap();
            psi.amplitudes
                .iter()
                .zip(fwd.amplitudes.iter())
                .map(|(p, f)| Complex64::i() * (f - p) / dt)
                .collect()
        };
        let d1 = diff(2e-3);
        let d2 = diff(1e-3);
        let mut sup = 0.0f64;
        for j in 0..g.n() {
            let richardson = 2.0 * d2[j] - d1[j];
            sup = sup.max((richardson - h_psi.amplitudes[j]).norm());
        }
        assert!(sup < 1e-4, "sup {sup}");
    }

    #[test]
    fn generator_rejects_rough_states() {
        let g = Grid1D::new(32, 8.0).unwrap();
        let exp = relativistic();
        // alternating-sign state: all mass at the Nyquist mode
        let amplitudes = (0..g.n())
            .map(|j| Complex64::new(if j % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
            .collect();
        let psi = WaveState::new(g, amplitudes, 0.0).unwrap();
        let spec = QuadratureSpec::default();
        assert!(matches!(
            generator_apply(&psi, &exp, &spec),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn probe_measures_dispersion() {
        let g = Grid1D::new(256, 16.0 * std::f64::consts::PI).unwrap();
        let exp = relativistic();
        assert_eq!(dispersion_probe(&exp, 0.0, 0.1, &g).unwrap(), 0.0);

        let u = 0.75; // on the dual grid: du = 0.125
        let e = dispersion_probe(&exp, u, 0.05, &g).unwrap();
        assert!((e - 0.25).abs() < 1e-6, "E(3/4) = {e}");

        let u = 2.0;
        let e = dispersion_probe(&exp, u, 0.05, &g).unwrap();
        assert!((e - (5.0f64.sqrt() - 1.0)).abs() < 1e-6);

        assert!(dispersion_probe(&exp, 0.33, 0.05, &g).is_err());
    }

    #[test]
    fn measure_defined_exponent_evolves() {
        // spectral evolution built from the quadrature route must agree
        // with the closed-form relativistic exponent
        let g = Grid1D::new(32, 16.0).unwrap();
        let quad_exp = LevyExponent::measure_defined(
            0.0,
            LevyDensity::relativistic(1.0).unwrap(),
            1.0,
        )
        .unwrap();
        let exact_exp = relativistic();
        let psi = WaveState::gaussian_packet(g, 0.0, 2.0, 0.5).unwrap();
        let a = evolve(&psi, 0.3, &quad_exp).unwrap();
        let b = evolve(&psi, 0.3, &exact_exp).unwrap();
        let sup = a
            .amplitudes
            .iter()
            .zip(b.amplitudes.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(sup < 1e-7, "sup {sup}");
    }
}
