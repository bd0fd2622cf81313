//! The Fox H-function H^{2,1}_{2,4} that encodes the fractional Helmholtz
//! fundamental solution, evaluated by Mellin-Barnes contour quadrature, by its
//! leading oscillatory asymptotics, or by the full large-argument expansion
//! (exact oscillatory part plus the algebraic residue series).

use super::bessel;
use super::dd::Dd;
use super::gamma::{gamma_complex, ln_gamma_dd, LnGamma};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

/// Parameters of the H^{2,1}_{2,4} kernel for a given dimension and order.
///
/// `a` holds the two upper pairs (a_i, alpha_i) and `b` the four lower pairs
/// (b_j, beta_j); the first `N_UPPER` upper and `M_LOWER` lower pairs sit in
/// the numerator of the Mellin-Barnes kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HParams {
    pub d: usize,
    pub alpha: f64,
    pub a: [(f64, f64); 2],
    pub b: [(f64, f64); 4],
}

const N_UPPER: usize = 1;
const M_LOWER: usize = 2;

impl HParams {
    pub fn new(d: usize, alpha: f64) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::UnsupportedDimension(d, "dimension must be 1, 2 or 3".into()));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("fractional order must lie in (0, 1), got {alpha}")));
        }
        let df = d as f64;
        let w = 1.0 / (2.0 * alpha);
        let r = df / (2.0 * alpha);
        Ok(HParams {
            d,
            alpha,
            a: [(1.0 - r, w), (0.5 - r, w)],
            b: [(0.0, 0.5), (1.0 - r, w), (1.0 - df / 2.0, 0.5), (0.5 - r, w)],
        })
    }

    /// Balance parameter a*; the weights cancel pairwise, so the grouping
    /// below returns exactly zero.
    pub fn a_star(&self) -> f64 {
        let (al, be) = (self.a.map(|p| p.1), self.b.map(|p| p.1));
        (al[0] - al[1]) + (be[0] - be[2]) + (be[1] - be[3])
    }

    /// Delta = sum beta_j - sum alpha_i, exactly one for this family.
    pub fn delta(&self) -> f64 {
        let (al, be) = (self.a.map(|p| p.1), self.b.map(|p| p.1));
        (be[0] + be[2]) + ((be[1] + be[3]) - (al[0] + al[1]))
    }

    /// Rightmost pole of the left family and leftmost pole of the right family.
    pub fn pole_gap(&self) -> (f64, f64) {
        let left = (0..M_LOWER)
            .map(|j| -self.b[j].0 / self.b[j].1)
            .fold(f64::NEG_INFINITY, f64::max);
        let right = (0..N_UPPER)
            .map(|i| (1.0 - self.a[i].0) / self.a[i].1)
            .fold(f64::INFINITY, f64::min);
        (left, right)
    }

    pub fn poles_disjoint(&self) -> bool {
        let (l, r) = self.pole_gap();
        l < r
    }

    /// Admissible open interval for the contour abscissa.
    pub fn strip(&self) -> (f64, f64) {
        let df = self.d as f64;
        ((df - 2.0 * self.alpha).max(0.0), df / 2.0 + 0.5)
    }

    /// log of the Mellin-Barnes kernel at s (without the z^{-s} factor).
    /// Returns None where a denominator Gamma has a pole (the kernel vanishes).
    fn ln_kernel(&self, s: Complex64) -> Option<LnGamma> {
        let one = Complex64::new(1.0, 0.0);
        let mut re = Dd::default();
        let mut im = Dd::default();
        let mut acc = |arg: Complex64, sign: f64| -> bool {
            if arg.im == 0.0 && arg.re <= 0.0 && arg.re == arg.re.round() {
                return false;
            }
            let g = ln_gamma_dd(arg);
            if sign > 0.0 {
                re = re.add(g.re);
                im = im.add(g.im);
            } else {
                re = re.sub(g.re);
                im = im.sub(g.im);
            }
            true
        };
        for j in 0..M_LOWER {
            acc(self.b[j].0 + self.b[j].1 * s, 1.0);
        }
        for i in 0..N_UPPER {
            acc(one - self.a[i].0 - self.a[i].1 * s, 1.0);
        }
        for i in N_UPPER..2 {
            if !acc(self.a[i].0 + self.a[i].1 * s, -1.0) {
                return None;
            }
        }
        for j in M_LOWER..4 {
            if !acc(one - self.b[j].0 - self.b[j].1 * s, -1.0) {
                return None;
            }
        }
        Some(LnGamma { re, im })
    }

    /// Mellin-Barnes kernel value at s (test helper and residue checks).
    pub fn kernel(&self, s: Complex64) -> Complex64 {
        match self.ln_kernel(s) {
            None => Complex64::new(0.0, 0.0),
            Some(g) => Complex64::from_polar(g.re.hi.exp() * g.re.lo.exp(), g.im.reduce_angle()),
        }
    }
}

/// Vertical Mellin-Barnes contour settings.
///
/// `half_height` is the minimum truncation height (extended adaptively),
/// `step` the initial quadrature spacing (0 selects it from the pole
/// distance) and `tol` the relative accuracy target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    pub gamma: f64,
    pub half_height: f64,
    pub step: f64,
    pub tol: f64,
}

impl ContourSpec {
    /// Abscissa at the midpoint of the admissible strip.
    pub fn default_for(p: &HParams) -> Self {
        let (lo, hi) = p.strip();
        ContourSpec { gamma: 0.5 * (lo + hi), half_height: 0.0, step: 0.0, tol: 1e-13 }
    }

    pub fn with_gamma(p: &HParams, gamma: f64) -> Self {
        ContourSpec { gamma, ..Self::default_for(p) }
    }

    pub fn validate(&self, p: &HParams) -> Result<()> {
        let (lo, hi) = p.strip();
        if !(self.gamma > lo && self.gamma < hi) {
            return Err(Error::InvalidSpec(format!(
                "contour abscissa {} outside the admissible strip ({lo}, {hi})",
                self.gamma
            )));
        }
        if !(self.tol > 0.0) || self.step < 0.0 || self.half_height < 0.0 {
            return Err(Error::InvalidSpec("contour tol must be > 0, step and half_height >= 0".into()));
        }
        Ok(())
    }
}

/// H-function value with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FoxEval {
    pub value: Complex64,
    pub err_est: f64,
}

/// Closed form of the principal-value Mellin transform of (x^{2α} - k^{2α})^{-1}.
pub fn mellin_g2(s: Complex64, alpha: f64, k: f64) -> Result<Complex64> {
    if !(alpha > 0.0 && alpha < 1.0) || !(k > 0.0) {
        return Err(Error::Domain(format!("need alpha in (0,1) and k > 0, got alpha = {alpha}, k = {k}")));
    }
    if !(s.re > 0.0 && s.re < 2.0 * alpha) {
        return Err(Error::Domain(format!("Re s = {} outside (0, {})", s.re, 2.0 * alpha)));
    }
    let w = s / (2.0 * alpha);
    let n = w.re.round();
    if (w - n).norm() < 1e-8 {
        return Err(Error::Domain(format!("s = {s} lies on a cotangent pole")));
    }
    let arg = PI * w;
    let cot = arg.cos() / arg.sin();
    let kpow = ((s - 2.0 * alpha) * k.ln()).exp();
    Ok(-(PI / (2.0 * alpha)) * kpow * cot)
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Geometry of the bent contour s(t) = gamma + i t - bend(t) and the
/// stretching map t = L sinh(u / L) used for the trapezoid rule in u.
struct Contour {
    gamma: f64,
    t0: f64,
    width: f64,
    stretch: f64,
}

impl Contour {
    fn new(z: f64, gamma: f64) -> Self {
        let width = z.sqrt().max(1.0);
        Contour { gamma, t0: 2.0 * z + 2.0, width, stretch: width.max(5.0) }
    }

    /// Returns (s, ds/du, t).
    fn point(&self, u: f64) -> (Complex64, Complex64, f64) {
        let l = self.stretch;
        let t = l * (u / l).sinh();
        let dt = (u / l).cosh();
        let w = self.width;
        // shifted so that the contour crosses the real axis exactly at gamma
        let bend = w * (softplus((t - self.t0) / w) + softplus((-t - self.t0) / w) - 2.0 * softplus(-self.t0 / w));
        let dbend = logistic((t - self.t0) / w) - logistic((-t - self.t0) / w);
        let s = Complex64::new(self.gamma - bend, t);
        let ds = Complex64::new(-dbend, 1.0) * dt;
        (s, ds, t)
    }
}

const MAX_NODES: usize = 4_000_000;

struct SumResult {
    sum: f64,
    l1: f64,
    tail: f64,
}

/// Folded trapezoid sum over u = (j + offset) h, j >= 0, of
/// Im[F(s) z^{-s} s'(u)] (the kernel is conjugate-symmetric on the contour).
fn contour_sum(p: &HParams, c: &Contour, lnz: f64, h: f64, offset: f64, t_min: f64) -> Result<SumResult> {
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut l1 = 0.0;
    let mut max_term: f64 = 0.0;
    let mut quiet = 0usize;
    let mut last = 0.0;
    let t_needed = (c.t0 + 10.0 * c.width).max(t_min);
    for j in 0..MAX_NODES {
        let u = (j as f64 + offset) * h;
        let (s, ds, t) = c.point(u);
        let term = match p.ln_kernel(s) {
            None => 0.0,
            Some(g) => {
                // z^{-s}: magnitude exp(-Re s ln z), phase -Im s ln z
                let re = g.re.add(Dd::prod(-s.re, lnz));
                let im = g.im.add(Dd::prod(-s.im, lnz));
                let v = Complex64::from_polar(re.hi.exp() * re.lo.exp(), im.reduce_angle()) * ds;
                let w = if j == 0 && offset == 0.0 { 0.5 } else { 1.0 };
                w * v.im
            }
        };
        // Kahan summation
        let y = term - comp;
        let tt = sum + y;
        comp = (tt - sum) - y;
        sum = tt;
        l1 += term.abs();
        max_term = max_term.max(term.abs());
        last = term.abs();
        if t > t_needed && term.abs() <= 1e-18 * max_term {
            quiet += 1;
            if quiet >= 20 {
                return Ok(SumResult { sum: sum * h / PI, l1: l1 * h / PI, tail: 20.0 * last * h / PI });
            }
        } else {
            quiet = 0;
        }
        if !term.is_finite() {
            return Err(Error::Accuracy {
                msg: format!("non-finite contour integrand at u = {u}"),
                partial: Complex64::new(sum * h / PI, 0.0),
            });
        }
    }
    Err(Error::Accuracy {
        msg: format!("contour tail did not decay within {MAX_NODES} nodes (last term {last:.3e})"),
        partial: Complex64::new(sum * h / PI, 0.0),
    })
}

/// H^{2,1}_{2,4}(z) by trapezoidal quadrature along the Mellin-Barnes contour.
///
/// The contour leaves the vertical line gamma + i t only beyond the saddle
/// points at |t| = 2z, where it bends left smoothly so the kernel decays
/// super-exponentially; the step is halved until two successive sums agree.
pub fn fox_h_2124(z: f64, p: &HParams, c: &ContourSpec) -> Result<FoxEval> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("Fox H argument must be positive and finite, got {z}")));
    }
    c.validate(p)?;
    let (left, right) = p.pole_gap();
    let dist = (c.gamma - left).min(right - c.gamma);
    let mut h = if c.step > 0.0 { c.step } else { (dist / 3.0).min(0.5) };
    let contour = Contour::new(z, c.gamma);
    let lnz = z.ln();
    let mut cur = contour_sum(p, &contour, lnz, h, 0.0, c.half_height)?;
    let mut prev_diff = f64::INFINITY;
    for _ in 0..10 {
        let mid = contour_sum(p, &contour, lnz, h, 0.5, c.half_height)?;
        let next = SumResult {
            sum: 0.5 * (cur.sum + mid.sum),
            l1: 0.5 * (cur.l1 + mid.l1),
            tail: cur.tail.max(mid.tail),
        };
        let diff = (next.sum - cur.sum).abs();
        h *= 0.5;
        cur = next;
        let floor = 64.0 * f64::EPSILON * cur.l1;
        if diff <= c.tol * cur.sum.abs() || diff <= floor || (diff <= 1e3 * floor && diff >= 0.5 * prev_diff) {
            let err = diff + cur.tail + 64.0 * f64::EPSILON * cur.l1;
            return Ok(FoxEval { value: Complex64::new(cur.sum, 0.0), err_est: err });
        }
        prev_diff = diff;
    }
    Err(Error::Accuracy {
        msg: format!("step refinement did not converge at z = {z}"),
        partial: Complex64::new(cur.sum, 0.0),
    })
}

/// Coefficients (c_plus, c_minus, power) of the leading large-z behaviour
/// c_plus e^{2iz} + c_minus e^{-2iz}, both scaled by (2z)^{-power}.
fn leading_coefficients(d: usize) -> (Complex64, Complex64, f64) {
    let sp = PI.sqrt();
    match d {
        1 => (Complex64::new(0.0, -1.0 / sp), Complex64::new(0.0, 1.0 / sp), 0.0),
        2 => (Complex64::new(-1.0, -1.0) / sp, Complex64::new(-1.0, 1.0) / sp, 0.5),
        _ => (Complex64::new(-2.0 / sp, 0.0), Complex64::new(-2.0 / sp, 0.0), 1.0),
    }
}

/// Leading oscillatory terms of H^{2,1}_{2,4}(z) for large z; the phase in z
/// is e^{±2iz}, i.e. e^{±ik|x|} for z = k|x|/2.
pub fn fox_h_asymptotic(z: f64, p: &HParams) -> Complex64 {
    let (cp, cm, pw) = leading_coefficients(p.d);
    let rho = 2.0 * z;
    let scale = rho.powf(-pw);
    (cp * Complex64::from_polar(1.0, rho) + cm * Complex64::from_polar(1.0, -rho)) * scale
}

/// Envelope of the leading asymptotic terms, used to normalise comparisons.
pub fn asymptotic_envelope(z: f64, p: &HParams) -> f64 {
    let (cp, cm, pw) = leading_coefficients(p.d);
    (cp.norm() + cm.norm()) * (2.0 * z).powf(-pw)
}

/// Multiplier taking H(k|x|/2) to G^{k,delta}(x) at k = 1.
pub(crate) fn green_prefactor(d: usize, alpha: f64) -> f64 {
    let df = d as f64;
    -(2.0f64).powf(-df - 1.0) * PI.powf(1.0 - df / 2.0) / alpha
}

/// Classical (alpha = 1) principal-value kernel at rho = |x| for k = 1:
/// -sin(rho)/2, -Y_0(rho)/4, cos(rho)/(4 pi rho).
pub(crate) fn classical_pv(d: usize, rho: f64) -> f64 {
    match d {
        1 => -0.5 * rho.sin(),
        2 => -0.25 * bessel::y0(rho),
        _ => rho.cos() / (4.0 * PI * rho),
    }
}

/// Algebraic large-z series: the sum of residues at the right pole family,
/// truncated at its smallest term. Returns (value, size of the last term).
pub(crate) fn algebraic_series(z: f64, p: &HParams) -> (f64, f64) {
    let df = p.d as f64;
    let a = p.alpha;
    let lnz = z.ln();
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut last = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let sk = df + 2.0 * a * kf;
        let sn = (PI * a * kf).sin();
        if sn.abs() < 1e-15 {
            continue;
        }
        // -(2a/pi^2) sin(pi a k) Gamma(1 + a k) Gamma(s_k / 2) z^{-s_k}
        let lg = ln_gamma_real(1.0 + a * kf) + ln_gamma_real(0.5 * sk) - sk * lnz;
        let term = -(2.0 * a / (PI * PI)) * sn * lg.exp();
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        sum += term;
        last = term.abs();
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    (sum, last)
}

fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma_dd(Complex64::new(x, 0.0)).re.value()
}

/// Large-argument form: exact oscillatory part plus the algebraic series.
pub fn fox_h_large(z: f64, p: &HParams) -> FoxEval {
    let rho = 2.0 * z;
    let pref = green_prefactor(p.d, p.alpha);
    let osc = classical_pv(p.d, rho) / (p.alpha * pref);
    let (alg, last) = algebraic_series(z, p);
    FoxEval { value: Complex64::new(osc + alg, 0.0), err_est: last + 1e-15 * osc.abs() }
}

/// Reference H-value used to check the Gamma-based kernel at a single point.
pub fn kernel_direct(p: &HParams, s: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let num = gamma_complex(p.b[0].0 + p.b[0].1 * s)?
        * gamma_complex(p.b[1].0 + p.b[1].1 * s)?
        * gamma_complex(one - p.a[0].0 - p.a[0].1 * s)?;
    let den = gamma_complex(p.a[1].0 + p.a[1].1 * s)?
        * gamma_complex(one - p.b[2].0 - p.b[2].1 * s)?
        * gamma_complex(one - p.b[3].0 - p.b[3].1 * s)?;
    Ok(num / den)
}

const CROSSOVER_TOL: f64 = 1e-4;
const CROSSOVER_SCAN_MAX: f64 = 2.0e4;

fn crossover_cache() -> &'static Mutex<HashMap<(usize, u64), f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64), f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Smallest z beyond which the leading asymptotic form agrees with the
/// contour value to 1e-4 relative to the asymptotic envelope; scanned once
/// per (d, alpha) and cached.
pub fn crossover(p: &HParams) -> f64 {
    let key = (p.d, p.alpha.to_bits());
    if let Some(&z) = crossover_cache().lock().unwrap().get(&key) {
        return z;
    }
    let z = scan_crossover(p);
    *crossover_cache().lock().unwrap().entry(key).or_insert(z)
}

fn scan_crossover(p: &HParams) -> f64 {
    use rayon::prelude::*;
    let mut zs = Vec::new();
    let mut z = 1.0;
    while z <= CROSSOVER_SCAN_MAX {
        zs.push(z);
        z *= 1.25;
    }
    let c = ContourSpec::default_for(p);
    let ok: Vec<bool> = zs
        .par_iter()
        .map(|&z| match fox_h_2124(z, p, &c) {
            Ok(h) => (h.value - fox_h_asymptotic(z, p)).norm() <= CROSSOVER_TOL * asymptotic_envelope(z, p),
            Err(_) => false,
        })
        .collect();
    let mut idx = zs.len();
    for i in (0..zs.len()).rev() {
        if ok[i] {
            idx = i;
        } else {
            break;
        }
    }
    if idx == zs.len() {
        CROSSOVER_SCAN_MAX
    } else {
        zs[idx]
    }
}
