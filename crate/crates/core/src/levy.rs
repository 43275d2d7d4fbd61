//! Infinitely divisible characteristic exponents and their Lévy measures.
//!
//! Natural units hbar = c = 1 throughout: the relativistic exponent of a
//! particle of mass m is eta(u) = 1 - sqrt(1 + u^2/m^2) with time scale
//! tau = 1/m, and its pure-jump measure has the Bessel kernel density
//! W(x) = K1(m|x|) / (pi |x|). Only symmetric (even, real, nonpositive)
//! exponents are representable; drifted laws are rejected at construction.

use crate::error::{Error, Result};
use crate::exec;
use crate::quad::{self, QuadratureSpec};
use crate::special::bessel_k;
use std::fmt;
use std::sync::Arc;

/// Symmetric Lévy jump density W(x), evaluated at |x| (W is even).
#[derive(Clone)]
pub struct LevyDensity {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Exponent s such that W(x) |x|^s has a finite nonzero limit at 0.
    pub singularity_order: f64,
    /// Decay length of the exponential tail; drives tail truncation.
    pub tail_scale: f64,
}

impl fmt::Debug for LevyDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevyDensity")
            .field("singularity_order", &self.singularity_order)
            .field("tail_scale", &self.tail_scale)
            .finish()
    }
}

impl LevyDensity {
    pub fn new<F>(eval: F, singularity_order: f64, tail_scale: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(tail_scale > 0.0) {
            return Err(Error::Domain("tail_scale must be positive".into()));
        }
        Ok(LevyDensity {
            eval: Arc::new(eval),
            singularity_order,
            tail_scale,
        })
    }

    /// Bessel-kernel density of the relativistic pure-jump process,
    /// W(x) = K1(m|x|) / (pi |x|); behaves like 1/(pi m x^2) near zero and
    /// decays like e^{-m|x|}.
    pub fn relativistic(m: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::Domain(format!("mass must be positive, got {m}")));
        }
        LevyDensity::new(
            move |x| levy_density_1d(x, m).unwrap_or(0.0),
            2.0,
            1.0 / m,
        )
    }

    /// W at x != 0 (symmetric: evaluated at |x|).
    pub fn density(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Err(Error::Domain("Lévy density is singular at x = 0".into()));
        }
        Ok((self.eval)(x.abs()))
    }

    pub(crate) fn density_unchecked(&self, x: f64) -> f64 {
        (self.eval)(x.abs())
    }
}

/// Which infinitely divisible family the exponent belongs to.
#[derive(Debug, Clone)]
pub enum ExponentKind {
    /// eta(u) = 1 - sqrt(1 + u^2/m^2), the non-stable relativistic law.
    Relativistic { m: f64 },
    /// eta(u) = -beta^2 u^2 / 2, the Wiener case.
    Gaussian { beta: f64 },
    /// Lévy-Khintchin exponent with diffusion scale beta and jump density W.
    MeasureDefined { beta: f64, density: LevyDensity },
}

/// A symmetric logarithmic characteristic eta(u) with its time scale tau.
///
/// Invariants: eta(0) = 0, eta even, eta <= 0, eta real.
#[derive(Debug, Clone)]
pub struct LevyExponent {
    pub kind: ExponentKind,
    pub tau: f64,
}

impl LevyExponent {
    /// Relativistic exponent; tau is fixed to 1/m.
    pub fn relativistic(m: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::Domain(format!("mass must be positive, got {m}")));
        }
        Ok(LevyExponent {
            kind: ExponentKind::Relativistic { m },
            tau: 1.0 / m,
        })
    }

    pub fn gaussian(beta: f64, tau: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Domain(format!("beta must be positive, got {beta}")));
        }
        if !(tau > 0.0) {
            return Err(Error::Domain(format!("tau must be positive, got {tau}")));
        }
        Ok(LevyExponent {
            kind: ExponentKind::Gaussian { beta },
            tau,
        })
    }

    pub fn measure_defined(beta: f64, density: LevyDensity, tau: f64) -> Result<Self> {
        if beta < 0.0 {
            return Err(Error::Domain(format!("beta must be >= 0, got {beta}")));
        }
        if !(tau > 0.0) {
            return Err(Error::Domain(format!("tau must be positive, got {tau}")));
        }
        Ok(LevyExponent {
            kind: ExponentKind::MeasureDefined { beta, density },
            tau,
        })
    }

    /// eta(u), closed form where available, quadrature with default
    /// tolerances for measure-defined exponents.
    pub fn eta(&self, u: f64) -> Result<f64> {
        match &self.kind {
            ExponentKind::Relativistic { m } => eta_relativistic(u, *m),
            ExponentKind::Gaussian { beta } => Ok(-0.5 * beta * beta * u * u),
            ExponentKind::MeasureDefined { .. } => {
                eta_from_measure(u, self, &QuadratureSpec::default()).map(|r| r.value)
            }
        }
    }

    /// eta on a batch of wavenumbers (parallel when the feature is on).
    pub fn eta_batch(&self, us: &[f64]) -> Result<Vec<f64>> {
        let vals = exec::map_indexed(us.len(), |i| self.eta(us[i]));
        vals.into_iter().collect()
    }

    /// The jump density seen by quadrature-based evaluation: explicit for
    /// measure-defined exponents, the Bessel kernel for the relativistic
    /// kind, absent for the Gaussian kind.
    pub fn jump_density(&self) -> Result<Option<LevyDensity>> {
        match &self.kind {
            ExponentKind::Relativistic { m } => Ok(Some(LevyDensity::relativistic(*m)?)),
            ExponentKind::Gaussian { .. } => Ok(None),
            ExponentKind::MeasureDefined { density, .. } => Ok(Some(density.clone())),
        }
    }

    pub fn diffusion_scale(&self) -> f64 {
        match &self.kind {
            ExponentKind::Relativistic { .. } => 0.0,
            ExponentKind::Gaussian { beta } => *beta,
            ExponentKind::MeasureDefined { beta, .. } => *beta,
        }
    }
}

/// Relativistic exponent eta(u) = 1 - sqrt(1 + u^2/m^2), exact closed form.
pub fn eta_relativistic(u: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {m}")));
    }
    let a = 1.0 / m;
    Ok(1.0 - (1.0 + a * a * u * u).sqrt())
}

/// Quadrature value plus the integrator's error estimate.
#[derive(Debug, Clone, Copy)]
pub struct EtaEstimate {
    pub value: f64,
    pub error: f64,
}

/// Symmetric Lévy-Khintchin evaluation
/// eta(u) = -beta^2 u^2 / 2 + int (cos(ux) - 1) W(x) dx
/// with the singularity at x = 0 tamed by writing cos(ux) - 1 as
/// -2 sin^2(ux/2) and the tail handled by the exponential map.
pub fn eta_from_measure(
    u: f64,
    exponent: &LevyExponent,
    spec: &QuadratureSpec,
) -> Result<EtaEstimate> {
    spec.validate()?;
    let beta = exponent.diffusion_scale();
    let gaussian_part = -0.5 * beta * beta * u * u;

    let density = match exponent.jump_density()? {
        Some(d) => d,
        None => {
            return Ok(EtaEstimate {
                value: gaussian_part,
                error: 0.0,
            })
        }
    };

    if u == 0.0 {
        // integrand is identically zero
        return Ok(EtaEstimate {
            value: 0.0,
            error: 0.0,
        });
    }

    let tail_scale = density.tail_scale;
    let integrand = move |x: f64| {
        let s = (0.5 * u * x).sin();
        -2.0 * s * s * density.density_unchecked(x)
    };

    let split = spec
        .split_points
        .first()
        .copied()
        .unwrap_or(1.0)
        .max(f64::MIN_POSITIVE);
    let inner = quad::integrate(&integrand, 0.0, split, spec)?;
    let tail = quad::integrate_tail(&integrand, split, tail_scale, spec)?;

    // factor 2 from symmetry of the measure
    Ok(EtaEstimate {
        value: gaussian_part + 2.0 * (inner.value + tail.value),
        error: 2.0 * (inner.error + tail.error),
    })
}

/// 1D Bessel-kernel Lévy density W(x) = K1(m|x|) / (pi |x|).
pub fn levy_density_1d(x: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {m}")));
    }
    if x == 0.0 {
        return Err(Error::Domain("density is singular at x = 0".into()));
    }
    let ax = x.abs();
    Ok(bessel_k(1, m * ax)? / (std::f64::consts::PI * ax))
}

/// 3D radial Bessel-kernel Lévy density W(r) = m K2(m r) / (2 pi^2 r^2);
/// pointwise evaluation only.
pub fn levy_density_3d(r: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {m}")));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    Ok(m * bessel_k(2, m * r)? / (2.0 * pi2 * r * r))
}

/// Numerical certificate of the Lévy-measure condition
/// int (x^2 and 1) W(x) dx < inf.
#[derive(Debug, Clone)]
pub struct MeasureReport {
    /// int_{|x|<=1} x^2 W(x) dx estimate.
    pub small_jump_mass: f64,
    /// int_{|x|>1} W(x) dx estimate.
    pub tail_mass: f64,
    pub ok: bool,
    pub diagnostic: Option<String>,
}

/// Checks both halves of the Lévy-measure condition by quadrature; a
/// divergent small-jump integral shows up as panel-budget exhaustion and is
/// reported rather than propagated.
pub fn validate_levy_measure(density: &LevyDensity, spec: &QuadratureSpec) -> MeasureReport {
    let d_small = density.clone();
    let small = quad::integrate(move |x| x * x * d_small.density_unchecked(x), 0.0, 1.0, spec);
    let d_tail = density.clone();
    let tail = quad::integrate_tail(
        move |x| d_tail.density_unchecked(x),
        1.0,
        density.tail_scale,
        spec,
    );

    let mut ok = true;
    let mut diagnostic = None;
    let small_jump_mass = match small {
        Ok(r) => 2.0 * r.value,
        Err(Error::Convergence {
            estimate, panels, ..
        }) => {
            ok = false;
            diagnostic = Some(format!(
                "small-jump integral did not converge within {panels} panels (x^2 W too singular at 0)"
            ));
            2.0 * estimate
        }
        Err(e) => {
            ok = false;
            diagnostic = Some(e.to_string());
            f64::NAN
        }
    };
    let tail_mass = match tail {
        Ok(r) => 2.0 * r.value,
        Err(Error::Convergence {
            estimate, panels, ..
        }) => {
            ok = false;
            diagnostic = Some(format!(
                "tail integral did not converge within {panels} panels"
            ));
            2.0 * estimate
        }
        Err(e) => {
            ok = false;
            diagnostic = Some(e.to_string());
            f64::NAN
        }
    };

    MeasureReport {
        small_jump_mass,
        tail_mass,
        ok,
        diagnostic,
    }
}

/// Relativistic kinetic energy E0(p) = sqrt(m^2 + p^2) - m; equals
/// -eta(p)/tau for the relativistic exponent with tau = 1/m.
pub fn dispersion_energy(p: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {m}")));
    }
    Ok((m * m + p * p).sqrt() - m)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn eta_relativistic_values() {
        assert_eq!(eta_relativistic(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(eta_relativistic(0.0, 0.3).unwrap(), 0.0);
        let v = eta_relativistic(1.0, 1.0).unwrap();
        assert!((v - (1.0 - 2.0f64.sqrt())).abs() < 1e-15);
        // symmetry
        for &(u, m) in &[(0.7, 1.0), (3.2, 0.5), (11.0, 2.0)] {
            assert_eq!(
                eta_relativistic(u, m).unwrap(),
                eta_relativistic(-u, m).unwrap()
            );
        }
        assert!(eta_relativistic(1.0, 0.0).is_err());
        assert!(eta_relativistic(1.0, -2.0).is_err());
    }

    #[test]
    fn eta_from_measure_gaussian_and_zero() {
        let spec = QuadratureSpec::default();
        let gauss = LevyExponent::gaussian(1.0, 1.0).unwrap();
        let r = eta_from_measure(2.0, &gauss, &spec).unwrap();
        assert_eq!(r.value, -2.0);

        let rel = LevyExponent::relativistic(1.0).unwrap();
        let z = eta_from_measure(0.0, &rel, &spec).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn eta_quadrature_matches_closed_form() {
        // the module's central cross-validation: Lévy-Khintchin quadrature
        // over the Bessel kernel vs the closed-form exponent
        let spec = QuadratureSpec::default();
        let density = LevyDensity::relativistic(1.0).unwrap();
        let exp = LevyExponent::measure_defined(0.0, density, 1.0).unwrap();
        let got = eta_from_measure(1.0, &exp, &spec).unwrap().value;
        assert!(
            (got - (-0.4142136)).abs() < 1e-6,
            "eta(1) via measure = {got}"
        );
        let exact = eta_relativistic(1.0, 1.0).unwrap();
        assert!((got - exact).abs() < 1e-8);
    }

    #[test]
    fn eta_invariants_on_grid() {
        let spec = QuadratureSpec::default();
        for &m in &[0.5, 1.0, 2.0] {
            let exp = LevyExponent::relativistic(m).unwrap();
            for i in 0..32 {
                let u = -10.0 + 20.0 * i as f64 / 31.0;
                let v = exp.eta(u).unwrap();
                assert!(v <= 0.0);
                assert!((v - exp.eta(-u).unwrap()).abs() < 1e-15);
            }
            // quadrature route obeys the same invariants
            let md = LevyExponent::measure_defined(
                0.0,
                LevyDensity::relativistic(m).unwrap(),
                1.0 / m,
            )
            .unwrap();
            for &u in &[0.5, 4.0, 9.5] {
                let v = eta_from_measure(u, &md, &spec).unwrap().value;
                let w = eta_from_measure(-u, &md, &spec).unwrap().value;
                assert!(v <= 0.0);
                assert!((v - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn density_1d_properties() {
        // symmetry
        for &x in &[0.1, 1.0, 10.0] {
            assert_eq!(
                levy_density_1d(x, 1.0).unwrap(),
                levy_density_1d(-x, 1.0).unwrap()
            );
        }
        // small-x: W(x) x^2 -> 1/(pi m)
        let x = 1e-5;
        let w = levy_density_1d(x, 1.0).unwrap();
        assert!((w * x * x - 1.0 / PI).abs() < 1e-6);
        // large-x Bessel asymptotic envelope
        let x = 10.0;
        let w = levy_density_1d(x, 1.0).unwrap();
        let envelope = (-x).exp() * (PI / (2.0 * x)).sqrt() / (PI * x);
        let ratio = w / envelope;
        assert!((0.95..=1.05).contains(&ratio), "ratio {ratio}");
        assert!(levy_density_1d(0.0, 1.0).is_err());
    }

    #[test]
    fn density_3d_properties() {
        // small-r: W(r) r^4 -> 1/(pi^2 m)
        let r = 1e-4;
        let w = levy_density_3d(r, 1.0).unwrap();
        assert!((w * r.powi(4) - 1.0 / (PI * PI)).abs() < 1e-5);
        // monotone decreasing on [0.1, 20]
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let r = 0.1 + 19.9 * i as f64 / 99.0;
            let w = levy_density_3d(r, 1.0).unwrap();
            assert!(w < prev, "not decreasing at r = {r}");
            prev = w;
        }
        // scale covariance W(r; m) = m^3 W(m r; 1)
        let (r, m) = (0.5, 2.0);
        let lhs = levy_density_3d(r, m).unwrap();
        let rhs = m.powi(3) * levy_density_3d(m * r, 1.0).unwrap();
        assert!((lhs / rhs - 1.0).abs() < 1e-14);
        assert!(levy_density_3d(-1.0, 1.0).is_err());
        assert!(levy_density_3d(0.0, 1.0).is_err());
    }

    #[test]
    fn measure_validation() {
        let spec = QuadratureSpec {
            max_panels: 2000,
            ..QuadratureSpec::default()
        };
        // relativistic measure is valid
        let rel = LevyDensity::relativistic(1.0).unwrap();
        let report = validate_levy_measure(&rel, &spec);
        assert!(report.ok, "diagnostic: {:?}", report.diagnostic);

        // 1/|x|^3 has a divergent small-jump integral
        let bad = LevyDensity::new(|x| x.powi(-3), 3.0, 1.0).unwrap();
        let report = validate_levy_measure(&bad, &spec);
        assert!(!report.ok);
        assert!(report.diagnostic.unwrap().contains("small-jump"));

        // e^{-|x|}: tail mass 2/e, small-jump mass 2(2 - 5/e)
        let exp_density = LevyDensity::new(|x| (-x).exp(), 0.0, 1.0).unwrap();
        let report = validate_levy_measure(&exp_density, &spec);
        assert!(report.ok);
        let tail_exact = 2.0 * (-1.0f64).exp();
        assert!(
            (report.tail_mass - tail_exact).abs() < 1e-8,
            "tail {} vs {}",
            report.tail_mass,
            tail_exact
        );
        let small_exact = 2.0 * (2.0 - 5.0 * (-1.0f64).exp());
        assert!((report.small_jump_mass - small_exact).abs() < 1e-8);
    }

    #[test]
    fn dispersion_identities() {
        assert_eq!(dispersion_energy(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(dispersion_energy(0.0, 3.7).unwrap(), 0.0);
        // Pythagorean case
        let e = dispersion_energy(0.75, 1.0).unwrap();
        assert!((e - 0.25).abs() < 1e-15);
        // identity with the exponent
        let (p, m) = (2.3, 1.7);
        let lhs = dispersion_energy(p, m).unwrap();
        let rhs = -m * eta_relativistic(p, m).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
        assert!(dispersion_energy(1.0, 0.0).is_err());
    }

    #[test]
    fn nonrelativistic_limit() {
        // |E0(p) - p^2/2m| <= p^4/m^3 for |p| <= 0.01 m
        for &m in &[0.5, 1.0, 2.0] {
            for i in 1..=10 {
                let p = 0.001 * m * i as f64;
                let e = dispersion_energy(p, m).unwrap();
                let newtonian = p * p / (2.0 * m);
                assert!(
                    (e - newtonian).abs() <= p.powi(4) / m.powi(3),
                    "p = {p}, m = {m}"
                );
            }
        }
    }

    #[test]
    fn constructor_validation() {
        assert!(LevyExponent::relativistic(-1.0).is_err());
        assert!(LevyExponent::gaussian(0.0, 1.0).is_err());
        assert!(LevyExponent::gaussian(1.0, 0.0).is_err());
        let d = LevyDensity::relativistic(1.0).unwrap();
        assert!(LevyExponent::measure_defined(-0.1, d, 1.0).is_err());
        let rel = LevyExponent::relativistic(2.0).unwrap();
        assert!((rel.tau - 0.5).abs() < 1e-15);
    }
}
