//! Bounding `int |F| d mu` from a derivative bound, `int |F|^2` and a ball condition on `mu`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::quad::{e, integrate_oscillatory};
use crate::admissible::AdmissibleSeq;
use crate::error::{Error, Result};
use crate::measure::{ln_sum_exp, MeasureTree};
use num_complex::Complex64;

/// A measure seen through intervals: positions, masses and widths of its pieces.
#[derive(Clone, Debug)]
pub struct PieceMeasure {
    /// `(lo, hi, mass)` sorted by `lo`, pairwise disjoint.
    pub pieces: Vec<(f64, f64, f64)>,
}

impl PieceMeasure {
    pub fn atoms(points: &[f64], masses: &[f64]) -> Self {
        let mut pieces: Vec<(f64, f64, f64)> = points.iter().zip(masses).map(|(&x, &m)| (x, x, m)).collect();
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
        PieceMeasure { pieces }
    }

    /// Uniform probability on `[a, b]` split into `n` equal pieces.
    pub fn uniform(a: f64, b: f64, n: usize) -> Self {
        let h = (b - a) / n as f64;
        PieceMeasure {
            pieces: (0..n).map(|i| (a + h * i as f64, a + h * (i + 1) as f64, 1.0 / n as f64)).collect(),
        }
    }

    /// `lambda_G` pushed to the tail coordinate, resolved to `extra` further elements.
    pub fn relative_view(tree: &MeasureTree, g: &AdmissibleSeq, extra: usize, node_limit: usize) -> Result<Self> {
        let nodes = tree.enumerate_from(g, 0.0, extra, node_limit, node_limit)?;
        let skip = g.cf.len();
        let mut pieces = Vec::with_capacity(nodes.len());
        for (s, lw) in nodes {
            let tail = crate::cf::FiniteCF::from_big(&s.cf.quotients()[skip..])?;
            let (a, b) = tail.cylinder_f64();
            pieces.push((a, b, lw.exp()));
        }
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(PieceMeasure { pieces })
    }

    pub fn total(&self) -> f64 {
        self.pieces.iter().map(|p| p.2).sum()
    }

    /// Upper bound for the mass of any closed interval of length `2 radius`.
    pub fn ball_sup(&self, radius: f64) -> f64 {
        let n = self.pieces.len();
        let mut best: f64 = 0.0;
        let mut j = 0;
        let mut acc = 0.0;
        for i in 0..n {
            if j < i {
                j = i;
                acc = 0.0;
            }
            let reach = self.pieces[i].1 + 2.0 * radius;
            while j < n && self.pieces[j].0 <= reach {
                acc += self.pieces[j].2;
                j += 1;
            }
            best = best.max(acc);
            acc -= self.pieces[i].2;
        }
        best
    }

    /// Upper bound on `int |F| d mu` for `|F|` with Lipschitz constant `m`.
    pub fn integrate_abs(&self, f: &(impl Fn(f64) -> f64 + ?Sized), m: f64) -> f64 {
        self.pieces
            .iter()
            .map(|&(a, b, w)| w * (f(0.5 * (a + b)) + 0.5 * m * (b - a)))
            .sum()
    }
}

/// `ln (2 r + (r/M)^beta (1 + m2 M r^-3))` from `ln r`.
pub fn ln_qr_rhs(ln_r: f64, m: f64, m2: f64, beta: f64) -> f64 {
    let ln_rm = ln_r - m.ln();
    let mut terms = vec![std::f64::consts::LN_2 + ln_r, beta * ln_rm];
    if m2 > 0.0 {
        terms.push(beta * ln_rm + m2.ln() + m.ln() - 3.0 * ln_r);
    }
    ln_sum_exp(&terms)
}

#[derive(Clone, Debug, Serialize)]
pub struct QrResult {
    pub ln_r: f64,
    pub m: f64,
    pub m2: f64,
    pub beta: f64,
    /// `ln` of the certified ball mass at radius `r/M` and of `(r/M)^beta`.
    pub ln_ball: f64,
    pub ln_ball_allowed: f64,
    pub lhs: f64,
    pub ln_rhs: f64,
    pub pass: bool,
}

/// Largest `beta` for which the view certifies the ball condition at radius `e^ln_rho`.
pub fn certified_beta(mu: &PieceMeasure, ln_rho: f64) -> f64 {
    let s = mu.ball_sup(ln_rho.exp()).min(1.0);
    if s <= 0.0 {
        return 1.0;
    }
    (s.ln() / ln_rho).max(0.0)
}

/// Checks `int |F| d mu <= 2r + (r/M)^beta (1 + m2 M r^-3)` after certifying the ball
/// condition `mu(B(x, r/M)) <= (r/M)^beta`; `beta = None` uses the largest certified value.
pub fn qr_combine(
    abs_f: &(impl Fn(f64) -> f64 + ?Sized),
    m: f64,
    m2: f64,
    mu: &PieceMeasure,
    ln_r: f64,
    beta: Option<f64>,
) -> Result<QrResult> {
    if !(m > 0.0) {
        return Err(Error::InvalidInput("derivative bound must be positive".into()));
    }
    let ln_rho = ln_r - m.ln();
    let beta = beta.unwrap_or_else(|| certified_beta(mu, ln_rho));
    let ball = mu.ball_sup(ln_rho.exp());
    let ln_ball = if ball > 0.0 { ball.ln() } else { f64::NEG_INFINITY };
    let ln_allowed = beta * ln_rho;
    if ln_ball > ln_allowed + 1e-12 {
        return Err(Error::Precondition(format!(
            "lemma inapplicable: ball mass {ball:.6e} at radius e^{ln_rho:.3} exceeds (r/M)^beta with beta = {beta}"
        )));
    }
    let lhs = mu.integrate_abs(abs_f, m);
    let ln_rhs = ln_qr_rhs(ln_r, m, m2, beta);
    Ok(QrResult { ln_r, m, m2, beta, ln_ball, ln_ball_allowed: ln_allowed, lhs, ln_rhs, pass: lhs.ln() <= ln_rhs })
}

/// The range of `ln r` on a grid where the right side is at least `1`, for `F = 1`.
pub fn constant_f_r_range(m: f64, m2: f64, beta: f64, ln_r_grid: &[f64]) -> Option<(f64, f64)> {
    let ok: Vec<f64> = ln_r_grid.iter().cloned().filter(|&l| ln_qr_rhs(l, m, m2, beta) >= 0.0).collect();
    Some((*ok.first()?, *ok.last()?))
}

/// A trigonometric polynomial `sum c_k e(w_k x + phi_k)` on `[1, N + 1]`.
#[derive(Clone, Debug)]
pub struct TrigPoly {
    pub coeffs: Vec<(f64, f64, f64)>,
    pub n: u32,
}

impl TrigPoly {
    pub fn eval(&self, x: f64) -> Complex64 {
        self.coeffs.iter().map(|&(c, w, phi)| e(w * x + phi) * c).sum()
    }

    /// `sum |c_k| 2 pi |w_k|`.
    pub fn deriv_bound(&self) -> f64 {
        self.coeffs.iter().map(|&(c, w, _)| c.abs() * 2.0 * PI * w.abs()).sum()
    }

    pub fn m2(&self) -> Result<f64> {
        let rate = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.1.abs())) * 2.0;
        let q = integrate_oscillatory(&|x| Complex64::new(self.eval(x).norm_sqr(), 0.0), 1.0, self.n as f64 + 1.0, rate, 1 << 22)?;
        Ok(q.value.re + q.err)
    }
}

/// One randomized instance: a trigonometric polynomial, a measure, `ln r` and `beta`.
#[derive(Clone, Debug)]
pub struct QrInstance {
    pub f: TrigPoly,
    pub mu: PieceMeasure,
    pub ln_r: f64,
    pub beta: f64,
}

/// Draws instances until one satisfies the ball condition; `None` after 50 attempts.
pub fn random_instance(seed: u64, i: u64) -> Option<QrInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    let n: u32 = rng.gen_range(1..=6);
    for _ in 0..50 {
        let terms = rng.gen_range(1..6);
        let coeffs = (0..terms)
            .map(|_| (rng.gen_range(0.05..1.0) / terms as f64, rng.gen_range(-80.0..80.0), rng.gen_range(0.0..1.0)))
            .collect();
        let f = TrigPoly { coeffs, n };
        let mu = if rng.gen_bool(0.5) {
            PieceMeasure::uniform(1.0, n as f64 + 1.0, 4096)
        } else {
            let k = rng.gen_range(50..400);
            let pts: Vec<f64> = (0..k).map(|_| rng.gen_range(1.0..n as f64 + 1.0)).collect();
            let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
            let s: f64 = w.iter().sum();
            PieceMeasure::atoms(&pts, &w.iter().map(|x| x / s).collect::<Vec<_>>())
        };
        let m = f.deriv_bound();
        let ln_r = rng.gen_range(-4.0..0.0);
        let ln_rho = ln_r - m.ln();
        let beta = rng.gen_range(0.05..1.0f64).min(certified_beta(&mu, ln_rho));
        if beta > 0.0 && mu.ball_sup(ln_rho.exp()).ln() <= beta * ln_rho + 1e-12 {
            return Some(QrInstance { f, mu, ln_r, beta });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_sup_uniform() {
        let mu = PieceMeasure::uniform(0.0, 1.0, 100);
        let s = mu.ball_sup(0.05);
        assert!(s >= 0.1 - 1e-12 && s <= 0.13);
    }

    #[test]
    fn constant_f_range_nonempty() {
        let grid: Vec<f64> = (0..200).map(|i| -20.0 + 0.1 * i as f64).collect();
        let r = constant_f_r_range(1.0, 1.0, 0.5, &grid).unwrap();
        assert!(r.0 <= r.1);
    }

    #[test]
    fn inapplicable_reported() {
        let mu = PieceMeasure::atoms(&[1.5], &[1.0]);
        let r = qr_combine(&|_| 1.0, 1.0, 1.0, &mu, -2.0, Some(0.5));
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
