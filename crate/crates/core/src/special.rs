//! Modified Bessel functions of the second kind, K0/K1/K2.
//!
//! Two-regime evaluation: ascending series below `z = 2`, Thompson-Barnett
//! continued fraction (CF2) above. K2 comes from the upward recurrence
//! K2(z) = K0(z) + 2 K1(z) / z. Both regimes deliver relative error well
//! below 1e-12; the test suite cross-checks against the integral
//! representation K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_CUTOFF: f64 = 2.0;
const MAX_CF_ITER: usize = 10_000;

/// Value of K_nu together with an underflow marker; K_nu(z) ~ exp(-z) and
/// drops below the smallest positive double near z ~ 705.
#[derive(Debug, Clone, Copy)]
pub struct BesselK {
    pub value: f64,
    pub underflow: bool,
}

/// K_nu(z) for nu in {0, 1, 2} and z > 0.
pub fn bessel_k(order: u32, z: f64) -> Result<f64> {
    bessel_k_flagged(order, z).map(|b| b.value)
}

/// Like [`bessel_k`] but reports underflow explicitly: for very large z the
/// result is 0.0 with `underflow = true` rather than an error.
pub fn bessel_k_flagged(order: u32, z: f64) -> Result<BesselK> {
    if order > 2 {
        return Err(Error::Domain(format!(
            "bessel_k supports orders 0..=2, got {order}"
        )));
    }
    if !(z > 0.0) {
        return Err(Error::Domain(format!(
            "bessel_k requires z > 0, got {z}"
        )));
    }

    let (k0, k1) = if z <= SERIES_CUTOFF {
        k0_k1_series(z)
    } else {
        k0_k1_continued_fraction(z)
    };

    let value = match order {
        0 => k0,
        1 => k1,
        _ => k0 + 2.0 * k1 / z,
    };
    Ok(BesselK {
        value,
        underflow: value == 0.0,
    })
}

/// Ascending series for K0 and K1 (Abramowitz & Stegun 9.6.10-9.6.11),
/// accurate to full double precision for z <= 2.
fn k0_k1_series(z: f64) -> (f64, f64) {
    let q = 0.25 * z * z; // (z/2)^2
    let log_half_z = (0.5 * z).ln();

    // I0, I1 and the companion sums share the term recurrences.
    let mut i0_term = 1.0; // q^k / (k!)^2
    let mut i0 = 1.0;
    let mut k0_sum = 0.0; // sum H_k q^k / (k!)^2, k >= 1
    let mut harmonic = 0.0;

    let mut i1_term = 1.0; // q^k / (k! (k+1)!)
    let mut i1_sum = 1.0;
    let mut k1_sum = psi(1) + psi(2); // k = 0 term of the K1 series

    for k in 1..200 {
        let kf = k as f64;
        i0_term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += i0_term;
        k0_sum += i0_term * harmonic;

        i1_term *= q / (kf * (kf + 1.0));
        i1_sum += i1_term;
        k1_sum += i1_term * (psi(k + 1) + psi(k + 2));

        if i0_term < 1e-18 * i0 && i1_term.abs() < 1e-18 {
            break;
        }
    }

    let i1 = 0.5 * z * i1_sum;
    let k0 = -(log_half_z + EULER_GAMMA) * i0 + k0_sum;
    let k1 = 1.0 / z + log_half_z * i1 - 0.25 * z * k1_sum;
    (k0, k1)
}

/// Digamma at positive integers: psi(1) = -gamma, psi(n) = -gamma + H_{n-1}.
fn psi(n: usize) -> f64 {
    let mut h = 0.0;
    for j in 1..n {
        h += 1.0 / j as f64;
    }
    h - EULER_GAMMA
}

/// Thompson-Barnett CF2 evaluation of K0 and K1 for z >= 2
/// (Numerical Recipes' `bessik` scheme with mu = 0).
fn k0_k1_continued_fraction(z: f64) -> (f64, f64) {
    let eps = f64::EPSILON;
    let a1 = 0.25; // 1/4 - mu^2 with mu = 0
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;

    for i in 2..=MAX_CF_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < eps {
            break;
        }
    }
    h *= a1;

    let prefactor = (std::f64::consts::PI / (2.0 * z)).sqrt() * (-z).exp();
    let k0 = prefactor / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    (k0, k1)
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Integral-representation oracle, kept independent of the production
    //! series/continued-fraction path. Simpson rule on
    //! K_nu(z) = int_0^T exp(-z cosh t) cosh(nu t) dt with T past underflow.

    pub fn bessel_k_integral(order: u32, z: f64) -> f64 {
        // exp(-z cosh t) < 1e-320 once z cosh t > 740
        let t_max = (740.0 / z).acosh().max(1.0) + 1.0;
        let n = 40_000; // even
        let h = t_max / n as f64;
        let f = |t: f64| (-z * t.cosh()).exp() * (order as f64 * t).cosh();
        let mut sum = f(0.0) + f(t_max);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(i as f64 * h);
        }
        sum * h / 3.0
    }
}
