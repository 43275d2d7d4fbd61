//! Monte-Carlo sampling of the pure-jump process.
//!
//! Compound-Poisson approximation: jumps below the truncation level epsilon
//! are dropped (optionally replaced by a Gaussian with the matching variance
//! sigma^2(eps)), jumps above it arrive at rate Lambda(eps) = int_{|x|>eps} W
//! and are drawn by inverse CDF from a precomputed monotone table. Every
//! path owns a counter-indexed RNG substream, so ensembles are bit-identical
//! regardless of execution order or thread count.

use crate::error::{Error, Result};
use crate::exec;
use crate::levy::{LevyDensity, LevyExponent};
use crate::quad::{self, QuadratureSpec};
use num_complex::Complex64;
use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Normal, Poisson};

/// Sampling parameters; `seed` plus the exponent determine the ensemble
/// exactly.
#[derive(Debug, Clone)]
pub struct JumpSimConfig {
    /// Small-jump truncation level.
    pub epsilon: f64,
    pub n_paths: usize,
    /// Physical horizon t; the process runs t/tau units of internal time.
    pub horizon: f64,
    pub seed: u64,
    /// Replace truncated jumps by N(0, sigma^2(eps) t/tau).
    pub gaussian_compensation: bool,
}

impl JumpSimConfig {
    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Domain(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::Domain("n_paths must be >= 1".into()));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::Domain(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpCountStats {
    pub mean: f64,
    pub max: u64,
}

/// Terminal increments X(t) for every path, with provenance.
#[derive(Debug, Clone)]
pub struct PathEnsemble {
    pub increments: Vec<f64>,
    pub config: JumpSimConfig,
    pub jump_stats: JumpCountStats,
}

/// sigma^2(eps) = int_{|x|<eps} x^2 W(x) dx.
pub fn small_jump_variance(
    density: &LevyDensity,
    epsilon: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let d = density.clone();
    let r = quad::integrate(move |x| x * x * d.density_unchecked(x), 0.0, epsilon, spec)?;
    Ok(2.0 * r.value)
}

/// Inverse-CDF table for the normalized tail density W(x) 1_{x>eps} / (Lambda/2),
/// on a log-spaced grid.
struct JumpTable {
    xs: Vec<f64>,
    cdf: Vec<f64>, // cumulative, cdf[0] = 0, cdf[last] = half tail mass
    half_rate: f64,
}

const TABLE_KNOTS: usize = 4096;
const MAX_JUMPS_PER_PATH: f64 = 1e7;

impl JumpTable {
    fn build(density: &LevyDensity, epsilon: f64, spec: &QuadratureSpec) -> Result<Self> {
        let x_max = epsilon + 745.0 * density.tail_scale;
        let log_eps = epsilon.ln();
        let log_max = x_max.ln();
        let xs: Vec<f64> = (0..=TABLE_KNOTS)
            .map(|i| (log_eps + (log_max - log_eps) * i as f64 / TABLE_KNOTS as f64).exp())
            .collect();

        // per-segment fixed GK15 panels accumulated into a monotone CDF
        let seg: Vec<f64> = exec::map_indexed(TABLE_KNOTS, |i| {
            let d = density.clone();
            let tight = QuadratureSpec {
                max_panels: 64,
                ..spec.clone()
            };
            quad::integrate(move |x| d.density_unchecked(x), xs[i], xs[i + 1], &tight)
                .map(|r| r.value)
                .unwrap_or(f64::NAN)
        });
        if seg.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Convergence {
                estimate: f64::NAN,
                error_bound: f64::NAN,
                panels: 0,
            });
        }
        let mut cdf = Vec::with_capacity(TABLE_KNOTS + 1);
        let mut acc = 0.0;
        cdf.push(0.0);
        for v in &seg {
            acc += v;
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::Domain(
                "tail density has no mass beyond epsilon".into(),
            ));
        }
        Ok(JumpTable {
            xs,
            cdf,
            half_rate: acc,
        })
    }

    /// Quantile of the absolute jump size for v in [0, 1).
    fn invert(&self, v: f64) -> f64 {
        let target = v * self.half_rate;
        // binary search for the segment with cdf[i] <= target < cdf[i+1]
        let mut lo = 0usize;
        let mut hi = self.cdf.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.cdf[mid] <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let span = self.cdf[hi] - self.cdf[lo];
        let frac = if span > 0.0 {
            (target - self.cdf[lo]) / span
        } else {
            0.0
        };
        self.xs[lo] + frac * (self.xs[hi] - self.xs[lo])
    }
}

/// Samples terminal increments of the compound-Poisson approximation.
pub fn sample_increments(
    exponent: &LevyExponent,
    config: &JumpSimConfig,
) -> Result<PathEnsemble> {
    config.validate()?;
    let density = exponent.jump_density()?.ok_or_else(|| {
        Error::Domain("sampling requires a jump component (Gaussian kind has none)".into())
    })?;

    let spec = QuadratureSpec::default();
    let report = crate::levy::validate_levy_measure(&density, &spec);
    if !report.ok {
        return Err(Error::Domain(format!(
            "invalid Lévy measure: {}",
            report.diagnostic.unwrap_or_default()
        )));
    }

    let table = JumpTable::build(&density, config.epsilon, &spec)?;
    let internal_time = config.horizon / exponent.tau;
    let rate = 2.0 * table.half_rate * internal_time;
    if rate > MAX_JUMPS_PER_PATH {
        return Err(Error::Budget(format!(
            "expected {rate:.3e} jumps per path exceeds the 1e7 budget; increase epsilon"
        )));
    }

    let compensation_sigma = if config.gaussian_compensation {
        (small_jump_variance(&density, config.epsilon, &spec)? * internal_time).sqrt()
    } else {
        0.0
    };
    // diffusion component of measure-defined exponents
    let beta = exponent.diffusion_scale();
    let diffusion_sigma = beta * internal_time.sqrt();
    let gauss_sigma = (compensation_sigma * compensation_sigma
        + diffusion_sigma * diffusion_sigma)
        .sqrt();

    let poisson = Poisson::new(rate).map_err(|e| Error::Domain(format!("poisson rate: {e}")))?;
    let normal = Normal::new(0.0, 1.0).unwrap();
    let seed = config.seed;

    let per_path: Vec<(f64, u64)> = exec::map_indexed(config.n_paths, |path| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(path as u64 + 1);
        let n_jumps = poisson.sample(&mut rng) as u64;
        let mut x = 0.0;
        for _ in 0..n_jumps {
            let v: f64 = rng.gen();
            let size = table.invert(v);
            let sign: bool = rng.gen();
            x += if sign { size } else { -size };
        }
        if gauss_sigma > 0.0 {
            x += gauss_sigma * normal.sample(&mut rng);
        }
        (x, n_jumps)
    });

    let increments: Vec<f64> = per_path.iter().map(|p| p.0).collect();
    let total_jumps: u64 = per_path.iter().map(|p| p.1).sum();
    let max_jumps = per_path.iter().map(|p| p.1).max().unwrap_or(0);

    Ok(PathEnsemble {
        increments,
        config: config.clone(),
        jump_stats: JumpCountStats {
            mean: total_jumps as f64 / config.n_paths as f64,
            max: max_jumps,
        },
    })
}

/// Empirical characteristic function with per-component standard errors.
#[derive(Debug, Clone)]
pub struct EmpiricalCf {
    pub u_values: Vec<f64>,
    pub values: Vec<Complex64>,
    pub stderr_re: Vec<f64>,
    pub stderr_im: Vec<f64>,
}

pub fn empirical_cf(ensemble: &PathEnsemble, u_values: &[f64]) -> Result<EmpiricalCf> {
    let n = ensemble.increments.len();
    if n == 0 {
        return Err(Error::Domain("empty ensemble".into()));
    }
    let nf = n as f64;
    let mut values = Vec::with_capacity(u_values.len());
    let mut stderr_re = Vec::with_capacity(u_values.len());
    let mut stderr_im = Vec::with_capacity(u_values.len());

    for &u in u_values {
        let mut sum_re = 0.0;
        let mut sum_im = 0.0;
        for &x in &ensemble.increments {
            sum_re += (u * x).cos();
            sum_im += (u * x).sin();
        }
        let mean_re = sum_re / nf;
        let mean_im = sum_im / nf;
        values.push(Complex64::new(mean_re, mean_im));

        if n > 1 {
            let mut var_re = 0.0;
            let mut var_im = 0.0;
            for &x in &ensemble.increments {
                var_re += ((u * x).cos() - mean_re).powi(2);
                var_im += ((u * x).sin() - mean_im).powi(2);
            }
            stderr_re.push((var_re / (nf * (nf - 1.0))).sqrt());
            stderr_im.push((var_im / (nf * (nf - 1.0))).sqrt());
        } else {
            stderr_re.push(0.0);
            stderr_im.push(0.0);
        }
    }

    Ok(EmpiricalCf {
        u_values: u_values.to_vec(),
        values,
        stderr_re,
        stderr_im,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevyDensity;

    fn config(seed: u64) -> JumpSimConfig {
        JumpSimConfig {
            epsilon: 1e-2,
            n_paths: 2000,
            horizon: 1.0,
            seed,
            gaussian_compensation: true,
        }
    }

    #[test]
    fn small_jump_variance_oracles() {
        let spec = QuadratureSpec::default();
        let rel = LevyDensity::relativistic(1.0).unwrap();
        // monotone, vanishing at 0
        let mut prev = 0.0;
        for &eps in &[1e-4, 1e-3, 1e-2, 1e-1] {
            let v = small_jump_variance(&rel, eps, &spec).unwrap();
            assert!(v > prev);
            prev = v;
        }
        // x^2 W ~ 1/pi near zero => sigma^2(eps) ~ 2 eps / pi
        let eps = 1e-3;
        let v = small_jump_variance(&rel, eps, &spec).unwrap();
        let approx = 2.0 * eps / std::f64::consts::PI;
        assert!((v / approx - 1.0).abs() < 0.05, "{v} vs {approx}");

        // closed-form oracle: W = e^{-|x|}, eps = 1:
        // 2 int_0^1 x^2 e^-x dx = 2 (2 - 5/e)
        let exp_density = LevyDensity::new(|x| (-x).exp(), 0.0, 1.0).unwrap();
        let v = small_jump_variance(&exp_density, 1.0, &spec).unwrap();
        let exact = 2.0 * (2.0 - 5.0 * (-1.0f64).exp());
        assert!((v - exact).abs() < 1e-8);

        assert!(small_jump_variance(&rel, 0.0, &spec).is_err());
    }

    #[test]
    fn ensembles_are_deterministic() {
        let exp = LevyExponent::relativistic(1.0).unwrap();
        let a = sample_increments(&exp, &config(7)).unwrap();
        let b = sample_increments(&exp, &config(7)).unwrap();
        assert_eq!(a.increments, b.increments); // bitwise
        let c = sample_increments(&exp, &config(8)).unwrap();
        assert_ne!(a.increments, c.increments);
    }

    #[test]
    fn sample_mean_is_centered() {
        let exp = LevyExponent::relativistic(1.0).unwrap();
        let ens = sample_increments(&exp, &config(11)).unwrap();
        let n = ens.increments.len() as f64;
        let mean = ens.increments.iter().sum::<f64>() / n;
        let var = ens
            .increments
            .iter()
            .map(|x| (x - mean) * (x - mean))
            .sum::<f64>()
            / (n - 1.0);
        let stderr = (var / n).sqrt();
        assert!(mean.abs() < 4.0 * stderr, "mean {mean}, stderr {stderr}");
    }

    #[test]
    fn empirical_variance_matches_exponent_curvature() {
        // Var X(t) = -eta''(0) t/tau = t/tau for m = 1 (eta'' from finite
        // differences of the closed form)
        let exp = LevyExponent::relativistic(1.0).unwrap();
        let cfg = JumpSimConfig {
            epsilon: 1e-3,
            n_paths: 100_000,
            horizon: 1.0,
            seed: 20_250_811,
            gaussian_compensation: true,
        };
        let ens = sample_increments(&exp, &cfg).unwrap();
        let n = ens.increments.len() as f64;
        let mean = ens.increments.iter().sum::<f64>() / n;
        let var = ens
            .increments
            .iter()
            .map(|x| (x - mean) * (x - mean))
            .sum::<f64>()
            / (n - 1.0);

        let h = 1e-4;
        let eta_h = crate::levy::eta_relativistic(h, 1.0).unwrap();
        let expected = -(2.0 * eta_h / (h * h)); // -eta''(0), eta(0)=0, even
        let mu4 = ens
            .increments
            .iter()
            .map(|x| (x - mean).powi(4))
            .sum::<f64>()
            / n;
        let var_stderr = ((mu4 - var * var) / n).sqrt();
        assert!(
            (var - expected).abs() < 4.0 * var_stderr,
            "var {var}, expected {expected}, stderr {var_stderr}"
        );
    }

    #[test]
    fn empirical_cf_basics() {
        let exp = LevyExponent::relativistic(1.0).unwrap();
        let ens = sample_increments(&exp, &config(3)).unwrap();
        let cf = empirical_cf(&ens, &[0.0, 0.5, 1.0, 2.0]).unwrap();
        // u = 0: exactly one, zero stderr
        assert_eq!(cf.values[0], Complex64::new(1.0, 0.0));
        assert_eq!(cf.stderr_re[0], 0.0);
        // imaginary parts within 3 stderr of zero (symmetric law)
        for i in 1..cf.values.len() {
            assert!(
                cf.values[i].im.abs() <= 3.0 * cf.stderr_im[i],
                "im {} stderr {}",
                cf.values[i].im,
                cf.stderr_im[i]
            );
        }
    }

    #[test]
    fn empirical_cf_matches_exponent() {
        let exp = LevyExponent::relativistic(1.0).unwrap();
        let cfg = JumpSimConfig {
            epsilon: 1e-3,
            n_paths: 100_000,
            horizon: 1.0,
            seed: 42,
            gaussian_compensation: true,
        };
        let ens = sample_increments(&exp, &cfg).unwrap();
        let us = [0.5, 1.0, 2.0];
        let cf = empirical_cf(&ens, &us).unwrap();
        for (i, &u) in us.iter().enumerate() {
            let theory = crate::levy::eta_relativistic(u, 1.0).unwrap().exp();
            assert!(
                (cf.values[i].re - theory).abs() <= 3.0 * cf.stderr_re[i],
                "u = {u}: {} vs {theory} (stderr {})",
                cf.values[i].re,
                cf.stderr_re[i]
            );
        }
    }

    #[test]
    fn truncation_convergence_under_epsilon_halving() {
        let exp = LevyExponent::relativistic(1.0).unwrap();
        let mk = |eps: f64| JumpSimConfig {
            epsilon: eps,
            n_paths: 100_000,
            horizon: 1.0,
            seed: 99,
            gaussian_compensation: true,
        };
        let coarse = sample_increments(&exp, &mk(1e-3)).unwrap();
        let fine = sample_increments(&exp, &mk(5e-4)).unwrap();
        let us = [0.5, 1.0, 2.0, 3.0];
        let cf_a = empirical_cf(&coarse, &us).unwrap();
        let cf_b = empirical_cf(&fine, &us).unwrap();
        for (i, &u) in us.iter().enumerate() {
            let diff = (cf_a.values[i].re - cf_b.values[i].re).abs();
            let combined =
                (cf_a.stderr_re[i].powi(2) + cf_b.stderr_re[i].powi(2)).sqrt();
            assert!(
                diff <= 3.0 * combined,
                "u = {u}: diff {diff}, stat {combined}"
            );
        }
    }

    #[test]
    fn budget_and_validation_errors() {
        let exp = LevyExponent::relativistic(1.0).unwrap();
        let tiny_eps = JumpSimConfig {
            epsilon: 1e-9,
            n_paths: 10,
            horizon: 1.0,
            seed: 1,
            gaussian_compensation: false,
        };
        assert!(matches!(
            sample_increments(&exp, &tiny_eps),
            Err(Error::Budget(_))
        ));

        let bad_cfg = JumpSimConfig {
            epsilon: 0.0,
            ..config(1)
        };
        assert!(sample_increments(&exp, &bad_cfg).is_err());

        let gauss = LevyExponent::gaussian(1.0, 1.0).unwrap();
        assert!(sample_increments(&gauss, &config(1)).is_err());

        // invalid measure rejected up front
        let bad = LevyDensity::new(|x| x.powi(-3), 3.0, 1.0).unwrap();
        let exp_bad = LevyExponent::measure_defined(0.0, bad, 1.0).unwrap();
        assert!(matches!(
            sample_increments(&exp_bad, &config(1)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn jump_stats_are_plausible() {
        let exp = LevyExponent::relativistic(1.0).unwrap();
        let cfg = config(5);
        let ens = sample_increments(&exp, &cfg).unwrap();
        // Lambda(1e-2) ~ 2/(pi eps) ~ 63; jumps/path should be nearby
        assert!(ens.jump_stats.mean > 20.0 && ens.jump_stats.mean < 200.0);
        assert!(ens.jump_stats.max >= ens.jump_stats.mean as u64);
    }
}
