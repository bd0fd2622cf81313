//! Bessel functions of the first kind for the orders -1/2, 0, 1/2 and the
//! Neumann function Y_0 used by the tabulated Green's kernel.

use crate::error::{Error, Result};
use std::f64::consts::{FRAC_2_PI, FRAC_PI_4, PI};

const SERIES_MAX: f64 = 8.0;
const ASYMPTOTIC_MIN: f64 = 25.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// J_nu(x) for nu in {-1/2, 0, 1/2} and x >= 0.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("bessel_j needs x >= 0, got {x}")));
    }
    if nu == 0.0 {
        Ok(j0(x))
    } else if nu == 0.5 {
        if x == 0.0 {
            return Ok(0.0);
        }
        Ok((FRAC_2_PI / x).sqrt() * x.sin())
    } else if nu == -0.5 {
        if x == 0.0 {
            return Err(Error::Singularity("J_{-1/2} is unbounded at x = 0".into()));
        }
        Ok((FRAC_2_PI / x).sqrt() * x.cos())
    } else {
        Err(Error::Domain(format!("unsupported Bessel order {nu}; supported: -1/2, 0, 1/2")))
    }
}

/// J_0 by regime: power series, trapezoidal Bessel integral, Hankel asymptotics.
pub fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_MAX {
        j0_series(x)
    } else if x < ASYMPTOTIC_MIN {
        j0_integral(x)
    } else {
        let (p, q) = hankel_pq(x);
        (FRAC_2_PI / x).sqrt() * (p * (x - FRAC_PI_4).cos() - q * (x - FRAC_PI_4).sin())
    }
}

/// Y_0 for x > 0.
pub(crate) fn y0(x: f64) -> f64 {
    if x <= SERIES_MAX {
        // Y0 = (2/pi)(ln(x/2) + gamma) J0 + (2/pi) sum (-1)^{k+1} H_k (x^2/4)^k / (k!)^2
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut hk = 0.0;
        let mut sum = 0.0;
        for k in 1..80 {
            term *= -q / ((k * k) as f64);
            hk += 1.0 / k as f64;
            let t = -term * hk;
            sum += t;
            if t.abs() < 1e-18 * sum.abs().max(1e-300) && k > 4 {
                break;
            }
        }
        FRAC_2_PI * (((0.5 * x).ln() + EULER_GAMMA) * j0_series(x) + sum)
    } else if x < ASYMPTOTIC_MIN {
        y0_integral(x)
    } else {
        let (p, q) = hankel_pq(x);
        (FRAC_2_PI / x).sqrt() * (p * (x - FRAC_PI_4).sin() + q * (x - FRAC_PI_4).cos())
    }
}

fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= -q / ((k * k) as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// J_0(x) = (1/pi) int_0^pi cos(x sin t) dt; the trapezoid rule is spectrally
/// accurate for this periodic integrand.
fn j0_integral(x: f64) -> f64 {
    let n = 96usize;
    let h = PI / n as f64;
    let mut s = 0.5 * (1.0 + 1.0);
    for i in 1..n {
        s += (x * (i as f64 * h).sin()).cos();
    }
    s / n as f64
}

/// Y_0(x) = (1/pi) int_0^pi sin(x sin t) dt - (2/pi) int_0^inf e^{-x sinh s} ds,
/// both integrals by Gauss-Legendre.
fn y0_integral(x: f64) -> f64 {
    let rule = crate::quad::gauss_legendre(96);
    let (nodes, weights) = (&rule.0, &rule.1);
    let half = 0.25 * PI;
    let mut first = 0.0;
    for (&u, &w) in nodes.iter().zip(weights.iter()) {
        let t = half * (u + 1.0);
        first += w * (x * t.sin()).sin();
    }
    // symmetric about pi/2
    first *= 2.0 * half / PI;
    let smax = (60.0 / x).asinh();
    let hs = 0.5 * smax;
    let mut second = 0.0;
    for (&u, &w) in nodes.iter().zip(weights.iter()) {
        let s = hs * (u + 1.0);
        second += w * (-x * s.sinh()).exp();
    }
    second *= hs;
    first - FRAC_2_PI * second
}

/// Hankel asymptotic amplitudes P_0(x), Q_0(x).
fn hankel_pq(x: f64) -> (f64, f64) {
    // a_k(0) = prod_{j=1}^k (-(2j-1)^2) / (k! 8^k)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let f = ((2 * k - 1) * (2 * k - 1)) as f64;
        a *= -f / (k as f64 * 8.0 * x);
        if a.abs() > prev {
            break;
        }
        prev = a.abs();
        // a_k multiplies i^k
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}
