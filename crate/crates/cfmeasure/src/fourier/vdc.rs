//! Van der Corput bounds for `int e(f)` with interval-certified derivative hypotheses.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::quad::{e, integrate_oscillatory, range_over, Iv};
use crate::error::{Error, Result};

/// Subintervals used when certifying derivative bounds.
pub const CERT_PIECES: usize = 256;

/// Quadrature panel cap per integral.
pub const PANEL_CAP: usize = 1 << 22;

/// A real phase with interval extensions of its first two derivatives.
pub trait Phase: Sync {
    fn f(&self, x: f64) -> f64;
    fn d1(&self, x: f64) -> f64;
    fn d1_iv(&self, x: Iv) -> Option<Iv>;
    fn d2_iv(&self, x: Iv) -> Option<Iv>;
}

/// A phase with `f'(x) = (c1 x + c2) g(x)`.
pub trait FactoredPhase: Phase {
    fn c1(&self) -> f64;
    fn c2(&self) -> f64;
    fn g_iv(&self, x: Iv) -> Option<Iv>;
    fn dg_iv(&self, x: Iv) -> Option<Iv>;
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn horner_iv(c: &[f64], x: Iv) -> Iv {
    c.iter().rev().fold(Iv::point(0.0), |acc, &a| acc.mul(x).add(Iv::point(a)))
}

fn deriv(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect()
}

fn antideriv(c: &[f64]) -> Vec<f64> {
    std::iter::once(0.0).chain(c.iter().enumerate().map(|(k, a)| a / (k + 1) as f64)).collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Polynomial phase `sum c_k x^k`.
#[derive(Clone, Debug)]
pub struct PolyPhase {
    pub coeffs: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl PolyPhase {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let d1 = deriv(&coeffs);
        let d2 = deriv(&d1);
        PolyPhase { coeffs, d1, d2 }
    }
}

impl Phase for PolyPhase {
    fn f(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }
    fn d1(&self, x: f64) -> f64 {
        horner(&self.d1, x)
    }
    fn d1_iv(&self, x: Iv) -> Option<Iv> {
        Some(horner_iv(&self.d1, x))
    }
    fn d2_iv(&self, x: Iv) -> Option<Iv> {
        Some(horner_iv(&self.d2, x))
    }
}

/// Phase with `f' = (c1 x + c2) g(x)` for a polynomial `g`, and `f(0) = 0`.
#[derive(Clone, Debug)]
pub struct FactoredPoly {
    pub c1: f64,
    pub c2: f64,
    pub g: Vec<f64>,
    dg: Vec<f64>,
    inner: PolyPhase,
}

impl FactoredPoly {
    pub fn new(c1: f64, c2: f64, g: Vec<f64>) -> Self {
        let fp = poly_mul(&[c2, c1], &g);
        let inner = PolyPhase::new(antideriv(&fp));
        let dg = deriv(&g);
        FactoredPoly { c1, c2, g, dg, inner }
    }
}

impl Phase for FactoredPoly {
    fn f(&self, x: f64) -> f64 {
        self.inner.f(x)
    }
    fn d1(&self, x: f64) -> f64 {
        self.inner.d1(x)
    }
    fn d1_iv(&self, x: Iv) -> Option<Iv> {
        self.inner.d1_iv(x)
    }
    fn d2_iv(&self, x: Iv) -> Option<Iv> {
        self.inner.d2_iv(x)
    }
}

impl FactoredPhase for FactoredPoly {
    fn c1(&self) -> f64 {
        self.c1
    }
    fn c2(&self) -> f64 {
        self.c2
    }
    fn g_iv(&self, x: Iv) -> Option<Iv> {
        Some(horner_iv(&self.g, x))
    }
    fn dg_iv(&self, x: Iv) -> Option<Iv> {
        Some(if self.dg.is_empty() { Iv::point(0.0) } else { horner_iv(&self.dg, x) })
    }
}

/// Result of a van der Corput check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct VdcResult {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub quad_err: f64,
    pub a: f64,
    pub b: f64,
    pub bound: f64,
    pub pass: bool,
}

impl VdcResult {
    pub fn integral(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Certified `(min |f'|, max |f''|)` on `[lo, hi]`; errors if `f'` may vanish.
pub fn certify_nonstationary(f: &dyn Phase, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let d1 = range_over(|x| f.d1_iv(x), lo, hi, CERT_PIECES)
        .ok_or_else(|| Error::Precondition("phase derivative not enclosable".into()))?;
    if d1.contains_zero() {
        return Err(Error::Precondition(format!(
            "f' may vanish on [{lo}, {hi}] (enclosure [{:.3e}, {:.3e}])",
            d1.lo, d1.hi
        )));
    }
    let d2 = range_over(|x| f.d2_iv(x), lo, hi, CERT_PIECES)
        .ok_or_else(|| Error::Precondition("second derivative not enclosable".into()))?;
    Ok((d1.mig(), d2.mag()))
}

/// `|int_lo^hi e(f)| <= A^-1/pi + (hi - lo) B / (2 pi A^2)` with certified `A`, `B`.
pub fn vdc_nonstationary(f: &dyn Phase, lo: f64, hi: f64) -> Result<VdcResult> {
    let (a, b) = certify_nonstationary(f, lo, hi)?;
    let bound = 1.0 / (PI * a) + (hi - lo) * b / (2.0 * PI * a * a);
    let rate = range_over(|x| f.d1_iv(x), lo, hi, CERT_PIECES).map(|r| r.mag()).unwrap_or(1.0);
    let q = integrate_oscillatory(&|x| e(f.f(x)), lo, hi, rate, PANEL_CAP)?;
    let modulus = q.value.norm();
    Ok(VdcResult {
        re: q.value.re,
        im: q.value.im,
        modulus,
        quad_err: q.err,
        a,
        b,
        bound,
        pass: modulus <= bound + q.err,
    })
}

/// Certified `(min |g|, max |g'|)` on `[lo, hi]`, with `B` raised just above `A` when needed.
pub fn certify_stationary(f: &dyn FactoredPhase, lo: f64, hi: f64) -> Result<(f64, f64)> {
    if f.c1() == 0.0 {
        return Err(Error::Precondition("C1 = 0: phase has no linear factor".into()));
    }
    let g = range_over(|x| f.g_iv(x), lo, hi, CERT_PIECES)
        .ok_or_else(|| Error::Precondition("g not enclosable".into()))?;
    if g.contains_zero() {
        return Err(Error::Precondition(format!("g may vanish on [{lo}, {hi}]")));
    }
    let dg = range_over(|x| f.dg_iv(x), lo, hi, CERT_PIECES)
        .ok_or_else(|| Error::Precondition("g' not enclosable".into()))?;
    let a = g.mig();
    let b = dg.mag().max(a * (1.0 + 2f64.powi(-20)));
    Ok((a, b))
}

/// The stationary-phase bound without its absolute constant: `(1 + (b - a)) B A^-3/2 |C1|^-1/2`.
pub fn stationary_shape(a: f64, b: f64, c1: f64, len: f64) -> f64 {
    (1.0 + len) * b * a.powf(-1.5) * c1.abs().powf(-0.5)
}

/// Width of the critical window around `-C2/C1`: `2 |A C1|^-1/2`.
pub fn critical_window(a: f64, c1: f64) -> f64 {
    2.0 / (a * c1.abs()).sqrt()
}

/// Explicit constant obtained by summing the window, boundary and the two remainder terms.
pub fn stationary_k_ceiling() -> f64 {
    2.0 + 4.0 / PI
}

/// Stationary-phase check against the constant `k`.
pub fn vdc_stationary(f: &dyn FactoredPhase, lo: f64, hi: f64, k: f64) -> Result<VdcResult> {
    let (a, b) = certify_stationary(f, lo, hi)?;
    let bound = k * stationary_shape(a, b, f.c1(), hi - lo);
    let rate = range_over(|x| f.d1_iv(x), lo, hi, CERT_PIECES).map(|r| r.mag()).unwrap_or(1.0);
    let q = integrate_oscillatory(&|x| e(f.f(x)), lo, hi, rate, PANEL_CAP)?;
    let modulus = q.value.norm();
    Ok(VdcResult {
        re: q.value.re,
        im: q.value.im,
        modulus,
        quad_err: q.err,
        a,
        b,
        bound,
        pass: modulus < bound + q.err,
    })
}

/// Ratio `|int| / shape` for calibration of the stationary constant.
pub fn stationary_ratio(f: &dyn FactoredPhase, lo: f64, hi: f64) -> Result<f64> {
    let r = vdc_stationary(f, lo, hi, 1.0)?;
    Ok(r.modulus / r.bound)
}

/// Deterministic family of synthetic phases used for calibration and for theorem checks.
pub mod synthetic {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// `f(x) = s (A x + c x^2)` on `[0, L]` with `|2cL| < A/2`, so `|f'| >= A/2`.
    pub fn nonstationary(seed: u64, i: u64) -> (PolyPhase, f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let a: f64 = rng.gen_range(0.5..200.0);
        let len: f64 = rng.gen_range(0.2..4.0);
        let c = rng.gen_range(-1.0..1.0) * a / (4.0 * len);
        let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        (PolyPhase::new(vec![0.0, s * a, s * c]), 0.0, len)
    }

    /// `f' = (C1 x + C2)(g0 + g1 x)` with `g` bounded away from zero on `[0, L]`.
    pub fn stationary(seed: u64, i: u64) -> (FactoredPoly, f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let len: f64 = rng.gen_range(0.5..4.0);
        let c1: f64 = rng.gen_range(1.0..300.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let xstar: f64 = rng.gen_range(-0.5 * len..1.5 * len);
        let c2 = -c1 * xstar;
        let g0: f64 = rng.gen_range(0.2..5.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let g1 = g0 * rng.gen_range(-0.4..0.4) / len;
        (FactoredPoly::new(c1, c2, vec![g0, g1]), 0.0, len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_phase_closed_form() {
        let a = 7.25;
        let r = vdc_nonstationary(&PolyPhase::new(vec![0.0, a]), 0.0, 1.0).unwrap();
        let exact = (PI * a).sin().abs() / (PI * a);
        assert!((r.modulus - exact).abs() < 1e-12);
        assert!((r.bound - 1.0 / (PI * a)).abs() < 1e-9);
        assert!(r.pass);
    }

    #[test]
    fn quadratic_perturbation_passes() {
        let r = vdc_nonstationary(&PolyPhase::new(vec![0.0, 10.0, 0.01]), 0.0, 1.0).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn sign_change_rejected() {
        let f = PolyPhase::new(vec![0.0, -1.0, 1.0]);
        assert!(matches!(vdc_nonstationary(&f, 0.0, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn window_inside_interval() {
        let f = FactoredPoly::new(50.0, -25.0, vec![2.0]);
        let (a, _) = certify_stationary(&f, 0.45, 0.55).unwrap();
        let w = critical_window(a, 50.0);
        assert!(w >= 0.1);
        let r = vdc_stationary(&f, 0.45, 0.55, 1.0).unwrap();
        assert!(r.modulus <= 0.1 + 1e-12);
    }
}
