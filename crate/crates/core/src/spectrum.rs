//! Cutoff polynomial, root structure and the induced mass spectrum.
//!
//! The energy-momentum relation is deformed by a cubic
//! f(x) = l0 + l1 x + l2 x^2 + l3 x^3 constrained by f(1) = 0. Squared-mass
//! ratios x = p^2/m^2 solve g(x) = x - f(x) = 1, which factors as
//! g(x) - 1 = -l3 (x - 1)(x - x+)(x - x-); the three real positive roots
//! carry masses M = m sqrt(x).

use crate::error::{Error, Result};

const F_AT_ONE_TOL: f64 = 1e-12;
const ROOT_RESIDUAL_TOL: f64 = 1e-10;

/// f(x) = l0 + l1 x + l2 x^2 + l3 x^3 with l0 + l1 + l2 + l3 = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPolynomial {
    lambda: [f64; 4],
}

impl CutoffPolynomial {
    /// Builds from the three free coefficients; l0 is fixed by f(1) = 0.
    pub fn new(lambda1: f64, lambda2: f64, lambda3: f64) -> Self {
        CutoffPolynomial {
            lambda: [-(lambda1 + lambda2 + lambda3), lambda1, lambda2, lambda3],
        }
    }

    /// Builds from all four coefficients, validating the f(1) = 0 constraint.
    pub fn from_coefficients(lambda: [f64; 4]) -> Result<Self> {
        let f1: f64 = lambda.iter().sum();
        if f1.abs() > F_AT_ONE_TOL {
            return Err(Error::Domain(format!(
                "cutoff polynomial must satisfy f(1) = 0, got f(1) = {f1:e}"
            )));
        }
        Ok(CutoffPolynomial { lambda })
    }

    /// The unmodified theory, f = 0.
    pub fn zero() -> Self {
        CutoffPolynomial { lambda: [0.0; 4] }
    }

    pub fn coefficients(&self) -> [f64; 4] {
        self.lambda
    }

    pub fn lambda3(&self) -> f64 {
        self.lambda[3]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let [l0, l1, l2, l3] = self.lambda;
        l0 + x * (l1 + x * (l2 + x * l3))
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let [_, l1, l2, l3] = self.lambda;
        l1 + x * (2.0 * l2 + x * 3.0 * l3)
    }

    /// g(x) = x - f(x).
    pub fn g(&self, x: f64) -> f64 {
        x - self.eval(x)
    }

    pub fn g_deriv(&self, x: f64) -> f64 {
        1.0 - self.deriv(x)
    }

    /// Degree of the polynomial as written (leading nonzero coefficient).
    pub fn degree(&self) -> usize {
        self.lambda
            .iter()
            .rposition(|&l| l != 0.0)
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootStatus {
    Accepted,
    RejectedNonPositive,
    RejectedComplex,
}

/// One root of g(x) = 1 with its validation data.
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub value: f64,
    /// Imaginary part of a rejected complex pair; 0 for real roots.
    pub imag: f64,
    pub multiplicity: u8,
    pub status: RootStatus,
    /// |g(x) - 1| after the Newton polish (real roots only).
    pub residual: f64,
}

/// Roots of g(x) = 1: always contains x = 1 plus the quadratic pair.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub discriminant: f64,
    pub roots: Vec<Root>,
}

impl RootSet {
    pub fn accepted(&self) -> impl Iterator<Item = &Root> {
        self.roots
            .iter()
            .filter(|r| r.status == RootStatus::Accepted)
    }

    /// True when the three roots coincide.
    pub fn is_degenerate(&self) -> bool {
        self.roots.iter().any(|r| r.multiplicity > 1)
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Compensated Horner evaluation (coefficients descending); accurate to
/// ~eps regardless of cancellation, which is what lets Newton polish roots
/// of badly scaled cubics to full precision.
fn comp_horner(coeffs: &[f64], x: f64) -> f64 {
    let mut r = coeffs[0];
    let mut c = 0.0;
    for &a in &coeffs[1..] {
        let (p, pe) = two_prod(r, x);
        let (s, se) = two_sum(p, a);
        r = s;
        c = c * x + (pe + se);
    }
    r + c
}

impl CutoffPolynomial {
    /// g(x) - 1 with compensated evaluation.
    pub(crate) fn g_minus_one_accurate(&self, x: f64) -> f64 {
        let [l0, l1, l2, l3] = self.lambda;
        comp_horner(&[-l3, -l2, 1.0 - l1, -(1.0 + l0)], x)
    }
}

/// Inverse problem: coefficients from the prescribed quadratic roots
/// (x = 1 is a root by construction; lambda3 is the free overall scale).
pub fn cutoff_from_roots(x_plus: f64, x_minus: f64, lambda3: f64) -> Result<CutoffPolynomial> {
    if lambda3 == 0.0 {
        return Err(Error::Degenerate(
            "lambda3 must be nonzero for a spectrum-producing cubic".into(),
        ));
    }
    if !(x_plus > 0.0) || !(x_minus > 0.0) {
        return Err(Error::Domain(format!(
            "roots must be positive, got ({x_plus}, {x_minus})"
        )));
    }
    let lambda2 = -lambda3 * (1.0 + x_plus + x_minus);
    let lambda1 = 1.0 + lambda3 * (x_plus + x_minus + x_plus * x_minus);
    Ok(CutoffPolynomial::new(lambda1, lambda2, lambda3))
}

/// Forward problem: closed-form roots of g(x) = 1 for a cubic cutoff, with
/// discriminant Delta = (l2 - l3)^2 - 4 l1 l3 - 4 l3^2 + 4 l3 and
/// x+- = (-l2 - l3 +- sqrt(Delta)) / (2 l3). Each real root gets one Newton
/// polish step and a residual check.
pub fn roots_from_cutoff(cutoff: &CutoffPolynomial) -> Result<RootSet> {
    let [_, l1, l2, l3] = cutoff.coefficients();
    if l3 == 0.0 {
        return Err(Error::Degenerate(
            "roots_from_cutoff needs a cubic cutoff (lambda3 != 0)".into(),
        ));
    }
    let discriminant = (l2 - l3) * (l2 - l3) - 4.0 * l1 * l3 - 4.0 * l3 * l3 + 4.0 * l3;

    let polish = |x0: f64| -> (f64, f64) {
        let mut x = x0;
        for _ in 0..3 {
            let d = cutoff.g_deriv(x);
            if d == 0.0 {
                break;
            }
            let step = cutoff.g_minus_one_accurate(x) / d;
            x -= step;
            if step.abs() <= f64::EPSILON * x.abs() {
                break;
            }
        }
        (x, cutoff.g_minus_one_accurate(x).abs())
    };

    // the residual bound scales with the magnitude of the terms entering
    // g(x) - 1, which is what limits achievable cancellation
    let conditioning = |x: f64| -> f64 {
        let ax = x.abs();
        let [l0, l1, l2, l3] = cutoff.coefficients();
        1.0 + ax
            + l0.abs()
            + l1.abs() * ax
            + l2.abs() * ax * ax
            + l3.abs() * ax * ax * ax
    };
    let classify = |x: f64, residual: f64| -> RootStatus {
        if x > 0.0 && residual <= ROOT_RESIDUAL_TOL * conditioning(x) {
            RootStatus::Accepted
        } else {
            RootStatus::RejectedNonPositive
        }
    };

    let mut roots = Vec::with_capacity(3);
    // x = 1 is exact by the f(1) = 0 constraint
    let (one, res_one) = polish(1.0);
    roots.push(Root {
        value: one,
        imag: 0.0,
        multiplicity: 1,
        status: classify(one, res_one),
        residual: res_one,
    });

    if discriminant >= 0.0 {
        let sq = discriminant.sqrt();
        let mut pair = [
            (-l2 - l3 + sq) / (2.0 * l3),
            (-l2 - l3 - sq) / (2.0 * l3),
        ];
        pair.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for x0 in pair {
            let (x, residual) = polish(x0);
            roots.push(Root {
                value: x,
                imag: 0.0,
                multiplicity: 1,
                status: classify(x, residual),
                residual,
            });
        }
    } else {
        let re = (-l2 - l3) / (2.0 * l3);
        let im = (-discriminant).sqrt() / (2.0 * l3).abs();
        for sign in [1.0, -1.0] {
            roots.push(Root {
                value: re,
                imag: sign * im,
                multiplicity: 1,
                status: RootStatus::RejectedComplex,
                residual: f64::NAN,
            });
        }
    }

    // multiplicity detection among real accepted roots
    let snapshot: Vec<(usize, f64)> = roots
        .iter()
        .enumerate()
        .filter(|(_, r)| r.imag == 0.0)
        .map(|(i, r)| (i, r.value))
        .collect();
    for (i, xi) in &snapshot {
        let mult = snapshot
            .iter()
            .filter(|(_, xj)| {
                (xi - xj).abs() <= 1e-9 * xi.abs().max(1.0)
            })
            .count() as u8;
        roots[*i].multiplicity = mult;
    }

    Ok(RootSet {
        discriminant,
        roots,
    })
}

/// A mass with the squared-mass ratio that produced it.
#[derive(Debug, Clone, Copy)]
pub struct MassEntry {
    pub mass: f64,
    pub root: f64,
}

/// The spectrum M_i = m sqrt(x_i) over the accepted roots, ascending.
#[derive(Debug, Clone)]
pub struct MassSpectrum {
    pub m_base: f64,
    pub masses: Vec<MassEntry>,
    pub rejected: Vec<Root>,
    pub degenerate: bool,
}

pub fn mass_spectrum(m: f64, cutoff: &CutoffPolynomial) -> Result<MassSpectrum> {
    if !(m > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {m}")));
    }
    let root_set = roots_from_cutoff(cutoff)?;
    let mut masses: Vec<MassEntry> = root_set
        .accepted()
        .map(|r| MassEntry {
            mass: m * r.value.sqrt(),
            root: r.value,
        })
        .collect();
    masses.sort_by(|a, b| a.mass.partial_cmp(&b.mass).unwrap());
    let rejected: Vec<Root> = root_set
        .roots
        .iter()
        .filter(|r| r.status != RootStatus::Accepted)
        .cloned()
        .collect();
    Ok(MassSpectrum {
        m_base: m,
        masses,
        degenerate: root_set.is_degenerate(),
        rejected,
    })
}

/// Modified total energy E(p) = sqrt(m^2 x + p^2) on the branch with
/// squared-mass ratio x = branch_x (so the rest energy is M = m sqrt(x)).
pub fn modified_dispersion(p: f64, m: f64, branch_x: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {m}")));
    }
    if !(branch_x > 0.0) {
        return Err(Error::Domain(format!(
            "branch requires a positive squared-mass ratio, got {branch_x}"
        )));
    }
    Ok((m * m * branch_x + p * p).sqrt())
}

/// Kinetic part with the rescaled rest mass subtracted:
/// E0(p) = E(p) - m sqrt(branch_x).
pub fn modified_kinetic_energy(p: f64, m: f64, branch_x: f64) -> Result<f64> {
    Ok(modified_dispersion(p, m, branch_x)? - m * branch_x.sqrt())
}

/// Bracketing root finder for g(x) = 1 with a generic smooth f.
/// Scans `panels` subintervals for sign changes, bisects, then polishes by
/// Newton with a finite-difference derivative.
pub fn g_solve<F: Fn(f64) -> f64>(
    f: F,
    interval: (f64, f64),
    tolerance: f64,
    panels: usize,
) -> Result<Vec<f64>> {
    let (lo, hi) = interval;
    if !(lo < hi) {
        return Err(Error::Domain(format!(
            "invalid interval ({lo}, {hi})"
        )));
    }
    if !(tolerance > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let h = |x: f64| x - f(x) - 1.0;

    let scan = |offset: f64| -> Vec<(f64, f64)> {
        let width = (hi - lo) / panels as f64;
        let mut brackets = Vec::new();
        let mut x_prev = lo + offset * width;
        let mut h_prev = h(x_prev);
        for i in 1..=panels {
            let x = lo + (i as f64 + offset) * width;
            let x = x.min(hi);
            let h_x = h(x);
            if h_prev == 0.0 {
                // root exactly on a panel node; defer to the perturbed scan
            } else if h_prev * h_x < 0.0 {
                brackets.push((x_prev, x));
            }
            x_prev = x;
            h_prev = h_x;
            if x >= hi {
                break;
            }
        }
        brackets
    };

    let mut brackets = scan(0.0);
    // exact zeros at panel nodes make sign changes invisible; re-scan with
    // the grid shifted by a fraction of a panel
    let hits_node = {
        let width = (hi - lo) / panels as f64;
        (0..=panels).any(|i| h(lo + i as f64 * width) == 0.0)
    };
    if hits_node {
        brackets = scan(0.382);
        // ensure interval ends participate
        if h(lo) != 0.0 && h(lo + 0.382 * (hi - lo) / panels as f64) * h(lo) < 0.0 {
            brackets.insert(0, (lo, lo + 0.382 * (hi - lo) / panels as f64));
        }
    }

    let mut roots = Vec::new();
    for (mut a, mut b) in brackets {
        let mut ha = h(a);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let hm = h(mid);
            if hm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if ha * hm < 0.0 {
                b = mid;
            } else {
                a = mid;
                ha = hm;
            }
            if (b - a).abs() <= 0.25 * tolerance * a.abs().max(1.0) {
                break;
            }
        }
        let mut x = 0.5 * (a + b);
        // Newton polish with a central finite-difference derivative
        for _ in 0..3 {
            let dx = 1e-7 * x.abs().max(1e-3);
            let d = (h(x + dx) - h(x - dx)) / (2.0 * dx);
            if d == 0.0 {
                break;
            }
            let step = h(x) / d;
            x -= step;
            if step.abs() < 0.1 * tolerance {
                break;
            }
        }
        if h(x).abs() <= tolerance {
            roots.push(x);
        } else {
            // fall back to the bisection midpoint if Newton wandered
            let mid = 0.5 * (a + b);
            if h(mid).abs() <= tolerance {
                roots.push(mid);
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= tolerance.max(1e-12));
    Ok(roots)
}
