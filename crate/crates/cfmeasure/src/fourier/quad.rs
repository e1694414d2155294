//! Interval enclosures and composite Gauss-Legendre quadrature for oscillatory integrands.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `e(x) = exp(2 pi i x)`, with the phase reduced mod 1 first.
pub fn e(x: f64) -> Complex64 {
    let t = x.fract();
    let (s, c) = (2.0 * PI * t).sin_cos();
    Complex64::new(c, s)
}

/// Closed interval with outward-widened arithmetic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Iv {
    pub lo: f64,
    pub hi: f64,
}

const WIDEN: f64 = 4.0 * f64::EPSILON;

fn out(lo: f64, hi: f64) -> Iv {
    Iv { lo: lo - WIDEN * lo.abs() - f64::MIN_POSITIVE, hi: hi + WIDEN * hi.abs() + f64::MIN_POSITIVE }
}

impl Iv {
    pub fn new(lo: f64, hi: f64) -> Self {
        Iv { lo, hi }
    }
    pub fn point(x: f64) -> Self {
        Iv { lo: x, hi: x }
    }
    pub fn add(self, o: Iv) -> Iv {
        out(self.lo + o.lo, self.hi + o.hi)
    }
    pub fn sub(self, o: Iv) -> Iv {
        out(self.lo - o.hi, self.hi - o.lo)
    }
    pub fn mul(self, o: Iv) -> Iv {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        out(c.iter().cloned().fold(f64::INFINITY, f64::min), c.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
    }
    pub fn scale(self, k: f64) -> Iv {
        self.mul(Iv::point(k))
    }
    /// Reciprocal of an interval not containing zero.
    pub fn recip(self) -> Option<Iv> {
        if self.lo <= 0.0 && self.hi >= 0.0 {
            return None;
        }
        Some(out(1.0 / self.hi, 1.0 / self.lo))
    }
    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && self.hi >= 0.0
    }
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
    /// Smallest absolute value (0 if the interval straddles 0).
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }
    pub fn hull(self, o: Iv) -> Iv {
        Iv { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }
}

/// Certified range of `f` over `[a, b]` by evaluating an interval extension on `pieces` subintervals.
pub fn range_over(f: impl Fn(Iv) -> Option<Iv>, a: f64, b: f64, pieces: usize) -> Option<Iv> {
    let mut acc: Option<Iv> = None;
    for i in 0..pieces {
        let x0 = a + (b - a) * i as f64 / pieces as f64;
        let x1 = if i + 1 == pieces { b } else { a + (b - a) * (i + 1) as f64 / pieces as f64 };
        let r = f(Iv::new(x0, x1))?;
        acc = Some(match acc {
            None => r,
            Some(h) => h.hull(r),
        });
    }
    acc
}

const GL_N: usize = 16;

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
fn gl() -> &'static (Vec<f64>, Vec<f64>) {
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL.get_or_init(|| {
        let n = GL_N;
        let mut xs = vec![0.0; n];
        let mut ws = vec![0.0; n];
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            xs[i] = x;
            ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (xs, ws)
    })
}

/// Composite 16-point Gauss-Legendre with `panels` equal panels.
pub fn gl_composite(f: &(impl Fn(f64) -> Complex64 + ?Sized), a: f64, b: f64, panels: usize) -> Complex64 {
    let (xs, ws) = gl();
    let h = (b - a) / panels as f64;
    let mut s = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let c = a + h * (p as f64 + 0.5);
        let mut ps = Complex64::new(0.0, 0.0);
        for (x, w) in xs.iter().zip(ws) {
            ps += f(c + 0.5 * h * x) * *w;
        }
        s += ps * (0.5 * h);
    }
    s
}

/// Quadrature result with the difference from a half-resolution run.
#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: Complex64,
    pub err: f64,
    pub panels: usize,
}

/// `int_a^b f` with panels no wider than `1 / (2 max(rate, 1))`, where `rate` bounds the
/// number of oscillations per unit length; validated against the doubled panel count.
pub fn integrate_oscillatory(
    f: &(impl Fn(f64) -> Complex64 + ?Sized),
    a: f64,
    b: f64,
    rate: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    let base = (((b - a) * 2.0 * rate.max(1.0)).ceil() as usize).max(1);
    if 2 * base > max_panels {
        return Err(Error::Budget(format!("quadrature needs {} panels (cap {max_panels})", 2 * base)));
    }
    let v1 = gl_composite(f, a, b, base);
    let v2 = gl_composite(f, a, b, 2 * base);
    Ok(QuadResult { value: v2, err: (v2 - v1).norm(), panels: 2 * base })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_polynomial_exact() {
        let v = gl_composite(&|x: f64| Complex64::new(x.powi(31), 0.0), 0.0, 1.0, 1);
        assert!((v.re - 1.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn oscillatory_linear_phase() {
        let a = 37.3;
        let r = integrate_oscillatory(&|x: f64| e(a * x), 0.0, 1.0, a, 1 << 20).unwrap();
        let exact = (e(a) - Complex64::new(1.0, 0.0)) / Complex64::new(0.0, 2.0 * PI * a);
        assert!((r.value - exact).norm() < 1e-13);
    }

    #[test]
    fn interval_recip_rejects_zero() {
        assert!(Iv::new(-1.0, 1.0).recip().is_none());
        let r = Iv::new(2.0, 4.0).recip().unwrap();
        assert!(r.lo <= 0.25 && r.hi >= 0.5);
    }
}
