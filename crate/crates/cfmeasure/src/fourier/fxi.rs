//! The function `F(x) = sum_G lambda(cyl G) e(-xi M_G(x))` over one partition box, its
//! derivative bound, and the pairwise decomposition of `int |F|^2`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use super::quad::{e, integrate_oscillatory, Iv};
use super::vdc::{
    certify_nonstationary, certify_stationary, stationary_shape, FactoredPhase, Phase, PANEL_CAP,
};
use crate::admissible::AdmissibleSeq;
use crate::cf::{alternate_expansion, cf_of_rational, ratio_f64};
use crate::error::{Error, Result};
use crate::geometry::{ClassBox, ClassPartition};

/// One phasor of `F`.
#[derive(Clone, Debug)]
pub struct Term {
    pub seq: AdmissibleSeq,
    pub weight: f64,
    pub p: f64,
    pub pp: f64,
    pub q: f64,
    pub qp: f64,
    /// `p q' - p' q`, either 1 or -1.
    pub det: f64,
}

impl Term {
    pub fn mobius(&self, x: f64) -> f64 {
        (self.p * x + self.pp) / (self.q * x + self.qp)
    }

    pub fn mobius_d1(&self, x: f64) -> f64 {
        let u = self.q * x + self.qp;
        self.det / (u * u)
    }
}

/// `F` for one box at frequency `xi`, defined on `[1, N + 1]`.
#[derive(Clone, Debug)]
pub struct FXi {
    pub xi: f64,
    pub n: u32,
    pub terms: Vec<Term>,
}

fn exact_f64(x: &BigUint) -> Result<f64> {
    if x.bits() > 53 {
        return Err(Error::Budget(format!("matrix entry with {} bits exceeds f64 exactness", x.bits())));
    }
    Ok(x.to_f64().unwrap_or(f64::NAN))
}

/// Builds `F` from a box of the partition.
pub fn build_f_xi(partition: &ClassPartition, box_index: usize, xi: f64, n: u32) -> Result<FXi> {
    let b = partition
        .boxes
        .get(box_index)
        .ok_or_else(|| Error::InvalidInput(format!("no box {box_index}")))?;
    f_xi_of_box(b, xi, n)
}

pub fn f_xi_of_box(b: &ClassBox, xi: f64, n: u32) -> Result<FXi> {
    if b.members.is_empty() {
        return Err(Error::Precondition("empty box".into()));
    }
    let mut terms = Vec::with_capacity(b.members.len());
    for m in &b.members {
        let (p, pp, q, qp) = m.seq.cf.mobius();
        let det = if m.seq.cf.determinant() > BigInt::from(0) { 1.0 } else { -1.0 };
        terms.push(Term {
            seq: m.seq.clone(),
            weight: m.ln_weight.exp(),
            p: exact_f64(p)?,
            pp: exact_f64(pp)?,
            q: exact_f64(q)?,
            qp: exact_f64(qp)?,
            det,
        });
    }
    Ok(FXi { xi, n, terms })
}

impl FXi {
    pub fn lo(&self) -> f64 {
        1.0
    }

    pub fn hi(&self) -> f64 {
        self.n as f64 + 1.0
    }

    pub fn mass(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms.iter().map(|t| e(-self.xi * t.mobius(x)) * t.weight).sum()
    }

    pub fn deriv(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| e(-self.xi * t.mobius(x)) * Complex64::new(0.0, -2.0 * PI * self.xi * t.mobius_d1(x) * t.weight))
            .sum()
    }

    pub fn eval_grid(&self, xs: &[f64]) -> Vec<Complex64> {
        xs.par_iter().map(|&x| self.eval(x)).collect()
    }

    /// Largest phase speed `|xi| max_G |M_G'|` on `[1, N + 1]`, attained at `x = 1`.
    pub fn phase_rate(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| self.xi.abs() / ((t.q + t.qp) * (t.q + t.qp)))
            .fold(0.0, f64::max)
    }

    /// `sum_G lambda(G) 2 pi |xi| / (q + q')^2`, an upper bound for `max |F'|`.
    pub fn deriv_sum_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.weight * 2.0 * PI * self.xi.abs() / ((t.q + t.qp) * (t.q + t.qp)))
            .sum()
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MBound {
    pub m_numeric: f64,
    pub m_bound: f64,
    pub m_sum_bound: f64,
    pub grid_points: usize,
    pub pass: bool,
}

/// Grid-refined `max |F'|` against `|xi|^(1 - 2 alpha + 3 eps)`.
pub fn m_bound_check(f: &FXi, alpha: f64, eps: f64, max_points: usize) -> Result<MBound> {
    let (lo, hi) = (f.lo(), f.hi());
    let step = 1.0 / (10.0 * f.phase_rate().max(1.0));
    let n = ((hi - lo) / step).ceil() as usize + 1;
    if n > max_points {
        return Err(Error::Budget(format!("derivative grid needs {n} points (cap {max_points})")));
    }
    let h = (hi - lo) / (n - 1) as f64;
    let vals: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = lo + h * i as f64;
            (x, f.deriv(x).norm())
        })
        .collect();
    let mut best = vals.iter().cloned().fold((lo, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].1.total_cmp(&vals[a].1));
    for &i in order.iter().take(8) {
        let c = vals[i].0;
        for k in -20i32..=20 {
            let x = (c + h * k as f64 / 20.0).clamp(lo, hi);
            let v = f.deriv(x).norm();
            if v > best.1 {
                best = (x, v);
            }
        }
    }
    let m_bound = ((1.0 - 2.0 * alpha + 3.0 * eps) * f.xi.abs().ln()).exp();
    Ok(MBound {
        m_numeric: best.1,
        m_bound,
        m_sum_bound: f.deriv_sum_bound(),
        grid_points: n,
        pass: best.1 <= m_bound,
    })
}

/// Case of a pair `(G, G~)` by the denominators of their Mobius maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PhaseCaseKind {
    /// `q = q~`, `q' != q'~`.
    C1,
    /// `q != q~`.
    C2,
    /// `q = q~`, `q' = q'~`.
    C3,
}

pub fn phase_case(g: &Term, h: &Term) -> PhaseCaseKind {
    if g.q != h.q {
        PhaseCaseKind::C2
    } else if g.qp != h.qp {
        PhaseCaseKind::C1
    } else {
        PhaseCaseKind::C3
    }
}

/// `Phi(x) = -xi (M_G(x) - M_H(x))` written over the common denominator `u v`.
#[derive(Clone, Debug)]
pub struct PairPhase {
    xi: f64,
    g: (f64, f64, f64, f64, f64),
    h: (f64, f64, f64, f64, f64),
    num: [f64; 3],
}

impl PairPhase {
    pub fn new(xi: f64, g: &Term, h: &Term) -> Self {
        let bi = |x: f64| BigInt::from(x as u64);
        let (p, pp, q, qp) = (bi(g.p), bi(g.pp), bi(g.q), bi(g.qp));
        let (pt, ppt, qt, qpt) = (bi(h.p), bi(h.pp), bi(h.q), bi(h.qp));
        let n2 = &p * &qt - &pt * &q;
        let n1 = &p * &qpt + &pp * &qt - &pt * &qp - &ppt * &q;
        let n0 = &pp * &qpt - &ppt * &qp;
        let f = |x: BigInt| x.to_f64().unwrap_or(f64::NAN);
        PairPhase {
            xi,
            g: (g.p, g.pp, g.q, g.qp, g.det),
            h: (h.p, h.pp, h.q, h.qp, h.det),
            num: [f(n0), f(n1), f(n2)],
        }
    }

    fn u(&self, x: Iv) -> Iv {
        x.scale(self.g.2).add(Iv::point(self.g.3))
    }

    fn v(&self, x: Iv) -> Iv {
        x.scale(self.h.2).add(Iv::point(self.h.3))
    }

    pub fn same_det(&self) -> bool {
        self.g.4 == self.h.4
    }
}

impl Phase for PairPhase {
    fn f(&self, x: f64) -> f64 {
        let u = self.g.2 * x + self.g.3;
        let v = self.h.2 * x + self.h.3;
        let n = (self.num[2] * x + self.num[1]) * x + self.num[0];
        -self.xi * n / (u * v)
    }
    fn d1(&self, x: f64) -> f64 {
        let u = self.g.2 * x + self.g.3;
        let v = self.h.2 * x + self.h.3;
        -self.xi * (self.g.4 / (u * u) - self.h.4 / (v * v))
    }
    fn d1_iv(&self, x: Iv) -> Option<Iv> {
        let u = self.u(x);
        let v = self.v(x);
        if self.same_det() {
            // -xi d (v - u)(v + u) / (u^2 v^2)
            let c1 = self.h.2 - self.g.2;
            let c2 = self.h.3 - self.g.3;
            let lin = x.scale(c1).add(Iv::point(c2));
            return Some(lin.mul(self.g_iv(x)?));
        }
        let a = u.mul(u).recip()?.scale(self.g.4);
        let b = v.mul(v).recip()?.scale(self.h.4);
        Some(a.sub(b).scale(-self.xi))
    }
    fn d2_iv(&self, x: Iv) -> Option<Iv> {
        let u = self.u(x);
        let v = self.v(x);
        let a = u.mul(u).mul(u).recip()?.scale(-2.0 * self.g.4 * self.g.2);
        let b = v.mul(v).mul(v).recip()?.scale(-2.0 * self.h.4 * self.h.2);
        Some(a.sub(b).scale(-self.xi))
    }
}

impl FactoredPhase for PairPhase {
    fn c1(&self) -> f64 {
        self.h.2 - self.g.2
    }
    fn c2(&self) -> f64 {
        self.h.3 - self.g.3
    }
    /// `g = -xi d (u + v) / (u^2 v^2)`.
    fn g_iv(&self, x: Iv) -> Option<Iv> {
        let u = self.u(x);
        let v = self.v(x);
        let den = u.mul(u).mul(v).mul(v).recip()?;
        Some(u.add(v).mul(den).scale(-self.xi * self.g.4))
    }
    fn dg_iv(&self, x: Iv) -> Option<Iv> {
        let u = self.u(x);
        let v = self.v(x);
        let (q, qt) = (self.g.2, self.h.2);
        let u2v2 = u.mul(u).mul(v).mul(v);
        let t1 = u2v2.recip()?.scale(q + qt);
        let t2 = u.mul(u2v2).recip()?.scale(2.0 * q);
        let t3 = v.mul(u2v2).recip()?.scale(2.0 * qt);
        let s = u.add(v);
        Some(t1.sub(s.mul(t2.add(t3))).scale(-self.xi * self.g.4))
    }
}

/// One off-diagonal pair of the decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    pub case: PhaseCaseKind,
    pub re: f64,
    pub im: f64,
    pub quad_err: f64,
    /// Bound used for the pair (`NaN` for C3, which has constant modulus).
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct M2Report {
    pub m2_quadrature: f64,
    pub m2_quadrature_err: f64,
    pub m2_pairwise: f64,
    pub rel_diff: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub diagonal: f64,
    pub pairs: Vec<PairRecord>,
    pub bound_rhs: f64,
    pub pass: bool,
    pub pair_bounds_pass: bool,
}

/// Constants entering the `m2` bound.
#[derive(Clone, Copy, Debug)]
pub struct M2Constants {
    pub k_stationary: f64,
    pub k_m2: f64,
    pub c_eps: f64,
}

/// `int_1^{N+1} |F|^2` by quadrature and by the sum over pairs, with per-pair bound checks.
pub fn m2_decompose(f: &FXi, alpha: f64, tau: f64, eps: f64, consts: &M2Constants, pair_cap: usize) -> Result<M2Report> {
    let m = f.terms.len();
    if m * m > pair_cap {
        return Err(Error::Budget(format!("{} pairs exceed the cap {pair_cap}", m * m)));
    }
    let (lo, hi) = (f.lo(), f.hi());
    let rate = 2.0 * f.phase_rate();
    let direct = integrate_oscillatory(&|x| Complex64::new(f.eval(x).norm_sqr(), 0.0), lo, hi, rate, PANEL_CAP)?;
    let diagonal: f64 = f.terms.iter().map(|t| t.weight * t.weight).sum::<f64>() * (hi - lo);
    let idx: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let pairs: Vec<Result<PairRecord>> = idx
        .par_iter()
        .map(|&(i, j)| pair_record(f, i, j, consts.k_stationary))
        .collect();
    let pairs: Vec<PairRecord> = pairs.into_iter().collect::<Result<_>>()?;
    let (mut c1, mut c2, mut c3) = (0.0, 0.0, 0.0);
    for p in &pairs {
        let w = 2.0 * f.terms[p.i].weight * f.terms[p.j].weight * p.re;
        match p.case {
            PhaseCaseKind::C1 => c1 += w,
            PhaseCaseKind::C2 => c2 += w,
            PhaseCaseKind::C3 => c3 += w,
        }
    }
    c3 += diagonal;
    let pairwise = c1 + c2 + c3;
    let ln_xi = f.xi.abs().ln();
    let bound_rhs = consts.k_m2
        * ((((3.0 * alpha - 1.0) / 2.0 + consts.c_eps * eps) * ln_xi).exp()
            + ((-tau * alpha / (tau - 1.0) + consts.c_eps * eps) * ln_xi).exp());
    let m2 = direct.value.re;
    Ok(M2Report {
        m2_quadrature: m2,
        m2_quadrature_err: direct.err,
        m2_pairwise: pairwise,
        rel_diff: (m2 - pairwise).abs() / m2.abs().max(f64::MIN_POSITIVE),
        c1,
        c2,
        c3,
        diagonal,
        pair_bounds_pass: pairs.iter().all(|p| p.pass),
        pairs,
        bound_rhs,
        pass: m2 <= bound_rhs,
    })
}

fn pair_record(f: &FXi, i: usize, j: usize, k: f64) -> Result<PairRecord> {
    let (g, h) = (&f.terms[i], &f.terms[j]);
    let case = phase_case(g, h);
    let ph = PairPhase::new(f.xi, g, h);
    let (lo, hi) = (f.lo(), f.hi());
    let rate = f.xi.abs() * (1.0 / ((g.q + g.qp) * (g.q + g.qp)) + 1.0 / ((h.q + h.qp) * (h.q + h.qp)));
    let q = integrate_oscillatory(&|x| e(ph.f(x)), lo, hi, rate, PANEL_CAP)?;
    let modulus = q.value.norm();
    let (bound, pass) = match case {
        PhaseCaseKind::C3 => (f64::NAN, (modulus - (hi - lo)).abs() <= 1e-9 * (hi - lo) + q.err),
        PhaseCaseKind::C1 => {
            let (a, b) = certify_nonstationary(&ph, lo, hi)?;
            let bd = 1.0 / (PI * a) + (hi - lo) * b / (2.0 * PI * a * a);
            (bd, modulus <= bd + q.err)
        }
        PhaseCaseKind::C2 if !ph.same_det() => {
            let (a, b) = certify_nonstationary(&ph, lo, hi)?;
            let bd = 1.0 / (PI * a) + (hi - lo) * b / (2.0 * PI * a * a);
            (bd, modulus <= bd + q.err)
        }
        PhaseCaseKind::C2 => {
            let (a, b) = certify_stationary(&ph, lo, hi)?;
            let bd = k * stationary_shape(a, b, ph.c1(), hi - lo);
            (bd, modulus < bd + q.err)
        }
    };
    Ok(PairRecord { i, j, case, re: q.value.re, im: q.value.im, quad_err: q.err, bound, pass })
}

/// Outcome of recovering prefixes from their continuant pair.
#[derive(Clone, Debug, Serialize)]
pub struct RecoveryReport {
    pub groups: usize,
    pub max_group: usize,
    pub n: u32,
    pub mismatches: usize,
    pub pass: bool,
}

/// Every member shares its `(K, K')` with at most `N` members, and its quotients after the
/// integer part are recovered from `K / K'` by the Euclidean algorithm.
pub fn c3_recovery(members: &[AdmissibleSeq], n: u32) -> Result<RecoveryReport> {
    let mut groups: HashMap<(BigUint, BigUint), Vec<&AdmissibleSeq>> = HashMap::new();
    for s in members {
        groups.entry((s.cf.k(), s.cf.k_prime())).or_default().push(s);
    }
    let mut mismatches = 0;
    let mut max_group = 0;
    for ((k, kp), g) in &groups {
        max_group = max_group.max(g.len());
        let tails: Vec<Vec<BigUint>> = if kp.is_one() && k.is_one() {
            vec![vec![BigUint::one()]]
        } else {
            let c = cf_of_rational(k, kp)?;
            let mut v = vec![c.quotients().iter().rev().cloned().collect::<Vec<_>>()];
            if let Some(alt) = alternate_expansion(&c) {
                v.push(alt.quotients().iter().rev().cloned().collect());
            }
            v
        };
        for s in g {
            let tail = &s.cf.quotients()[1..];
            if !tails.iter().any(|t| t.as_slice() == tail) {
                mismatches += 1;
            }
            let c0 = ratio_f64(&s.cf.quotients()[0], &BigUint::one());
            if c0 < 1.0 || c0 > n as f64 {
                mismatches += 1;
            }
        }
    }
    Ok(RecoveryReport {
        groups: groups.len(),
        max_group,
        n,
        mismatches,
        pass: mismatches == 0 && max_group <= n as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Member;

    fn box_of(keys: &[&str]) -> ClassBox {
        let members: Vec<Member> = keys
            .iter()
            .map(|k| Member { seq: AdmissibleSeq::parse_key(k).unwrap(), ln_weight: -(keys.len() as f64).ln() })
            .collect();
        ClassBox { key: (BigUint::one(), BigUint::one()), ln_m1: 0.0, ln_m2: 0.0, members, representative: 0 }
    }

    #[test]
    fn single_member_constant_modulus() {
        let f = f_xi_of_box(&box_of(&["1,2|2,1"]), 1000.0, 2).unwrap();
        for x in [1.0, 1.5, 2.7] {
            assert!((f.eval(x).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let f = f_xi_of_box(&box_of(&["1,2|2,1|1,2", "2,1|2,1|1,2", "1,2|1,2|2,1"]), 50.0, 2).unwrap();
        for x in [1.1, 1.9, 2.6] {
            let h = 1e-3;
            let fd = (f.eval(x - 2.0 * h) - f.eval(x + 2.0 * h) + (f.eval(x + h) - f.eval(x - h)) * 8.0) / (12.0 * h);
            let d = f.deriv(x);
            assert!((fd - d).norm() <= 1e-6 * d.norm().max(1e-3), "{fd} vs {d}");
        }
    }
}
