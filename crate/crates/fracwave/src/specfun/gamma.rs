//! Complex Gamma function.
//!
//! Lanczos approximation (g = 607/128, 15 terms) on Re z >= 1/2 and the
//! reflection formula elsewhere. Large phases and log-magnitudes are carried
//! in double-double form so that the result keeps close to full relative
//! precision far up the imaginary axis.

use super::dd::{Dd, PI};
use crate::error::{Error, Result};
use num_complex::Complex64;

const LANCZOS_G: f64 = 607.0 / 128.0;

const LANCZOS_C: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    3.399_464_998_481_189e-5,
    4.652_362_892_704_858e-5,
    -9.837_447_530_487_956e-5,
    1.580_887_032_249_125e-4,
    -2.102_644_417_241_049e-4,
    2.174_396_181_152_126_4e-4,
    -1.643_181_065_367_639e-4,
    8.441_822_398_385_275e-5,
    -2.619_083_840_158_141e-5,
    3.689_918_265_953_162_7e-6,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;
const LN_2: f64 = std::f64::consts::LN_2;

/// log Gamma with the real part as a double-double and the imaginary part
/// reduced modulo 2 pi.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LnGamma {
    pub re: Dd,
    pub im: Dd,
}

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn lanczos(z: Complex64) -> LnGamma {
    let (x, y) = (z.re, z.im);
    let tx = x + (LANCZOS_G - 0.5);
    let t = Complex64::new(tx, y);
    let l = t.norm().ln();
    let th = t.arg();

    let zm1 = z - 1.0;
    let mut a = Complex64::new(LANCZOS_C[0], 0.0);
    for (k, &c) in LANCZOS_C.iter().enumerate().skip(1) {
        a += c / (zm1 + k as f64);
    }
    let la = a.ln();

    let xh = x - 0.5;
    // re = 1/2 ln 2pi + (x - 1/2) ln|t| - y arg t - tx + Re ln A
    let re = Dd::prod(xh, l)
        .sub(Dd::prod(y, th))
        .add_f64(-tx)
        .add_f64(HALF_LN_2PI)
        .add_f64(la.re);
    // im = (x - 1/2) arg t + y ln|t| - y + Im ln A
    let im = Dd::prod(y, l)
        .add(Dd::prod(xh, th))
        .add_f64(-y)
        .add_f64(la.im);
    LnGamma { re, im }
}

/// ln sin(pi z) with the same double-double conventions.
fn ln_sin_pi(z: Complex64) -> LnGamma {
    let x = z.re - 2.0 * (z.re / 2.0).round();
    let y = z.im;
    if y.abs() <= 2.0 {
        let (s, c) = (std::f64::consts::PI * x).sin_cos();
        let py = std::f64::consts::PI * y;
        let w = Complex64::new(s * py.cosh(), c * py.sinh()).ln();
        return LnGamma { re: Dd::new(w.re), im: Dd::new(w.im) };
    }
    // For y > 0: sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z}).
    let ya = y.abs();
    let e2 = Complex64::new(0.0, 2.0 * std::f64::consts::PI * x).exp()
        * (-2.0 * std::f64::consts::PI * ya).exp();
    let corr = (Complex64::new(1.0, 0.0) - e2).ln();
    let re = PI.scale(ya).add_f64(-LN_2).add_f64(corr.re);
    let im = Dd::new(std::f64::consts::FRAC_PI_2 - std::f64::consts::PI * x).add_f64(corr.im);
    if y > 0.0 {
        LnGamma { re, im }
    } else {
        LnGamma { re, im: im.neg() }
    }
}

pub(crate) fn ln_gamma_dd(z: Complex64) -> LnGamma {
    if z.re >= 0.5 {
        lanczos(z)
    } else {
        let g1 = lanczos(Complex64::new(1.0, 0.0) - z);
        let s = ln_sin_pi(z);
        LnGamma {
            re: Dd::new(LN_PI).sub(s.re).sub(g1.re),
            im: s.im.neg().sub(g1.im),
        }
    }
}

/// Principal-sheet-free log Gamma: real part is ln|Γ(z)|, imaginary part is
/// arg Γ(z) reduced to (-π, π].
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Domain(format!("Gamma has a pole at z = {}", z.re)));
    }
    let g = ln_gamma_dd(z);
    Ok(Complex64::new(g.re.value(), g.im.reduce_angle()))
}

/// Complex Gamma function.
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Domain(format!("Gamma has a pole at z = {}", z.re)));
    }
    let g = ln_gamma_dd(z);
    let mag = g.re.hi.exp() * g.re.lo.exp();
    let ph = g.im.reduce_angle();
    Ok(Complex64::from_polar(mag, ph))
}
