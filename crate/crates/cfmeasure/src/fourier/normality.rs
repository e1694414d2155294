//! Digit statistics of sampled points and partial sums of the exponential-sum criterion.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::eval::CylinderTable;
use crate::cf::FiniteCF;
use crate::error::{Error, Result};

/// A point given by a cylinder (any real inside it) or an exact rational.
#[derive(Clone, Debug)]
pub enum NormalityInput {
    Cylinder(FiniteCF),
    Rational(BigUint, BigUint),
}

/// Base-`b` digits after the point of `n/d`, up to `count`, with period detection.
fn rational_digits(n: &BigUint, d: &BigUint, base: u32, count: usize) -> (Vec<u8>, Option<(usize, usize)>) {
    let mut r = n.mod_floor(d);
    let mut seen: HashMap<BigUint, usize> = HashMap::new();
    let mut out = Vec::with_capacity(count);
    let mut period = None;
    for i in 0..count {
        if period.is_none() {
            if let Some(&j) = seen.get(&r) {
                period = Some((j, i - j));
            } else {
                seen.insert(r.clone(), i);
            }
        }
        r *= base;
        let (q, rem) = r.div_rem(d);
        out.push(q.to_u32_digits().first().copied().unwrap_or(0) as u8);
        r = rem;
    }
    if period.is_none() && seen.contains_key(&r) {
        let j = seen[&r];
        period = Some((j, count - j));
    }
    (out, period)
}

/// Digits shared by every point of the closed hull of the cylinder.
pub fn certified_digits(cf: &FiniteCF, base: u32, max: usize) -> Result<Vec<u8>> {
    let c = cf.cylinder()?;
    let (ln, ld) = (c.lo.numer().magnitude().clone(), c.lo.denom().magnitude().clone());
    let (hn, hd) = (c.hi.numer().magnitude().clone(), c.hi.denom().magnitude().clone());
    if ln.div_floor(&ld) != hn.div_floor(&hd) {
        return Ok(Vec::new());
    }
    let mut rl = ln.mod_floor(&ld);
    let mut rh = hn.mod_floor(&hd);
    let mut out = Vec::new();
    while out.len() < max {
        rl *= base;
        rh *= base;
        let (ql, rl2) = rl.div_rem(&ld);
        let (qh, rh2) = rh.div_rem(&hd);
        if ql != qh {
            break;
        }
        out.push(if ql.is_zero() { 0 } else { ql.to_u32_digits()[0] as u8 });
        rl = rl2;
        rh = rh2;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: f64,
    pub p_value: f64,
}

fn chi_square(counts: &[u64]) -> Result<ChiSquare> {
    let total: u64 = counts.iter().sum();
    let cells = counts.len() as f64;
    let expect = total as f64 / cells;
    let statistic = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
    let dof = cells - 1.0;
    let dist = ChiSquared::new(dof).map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(ChiSquare { statistic, dof, p_value: dist.sf(statistic) })
}

#[derive(Clone, Debug, Serialize)]
pub struct BaseReport {
    pub base: u32,
    pub digits: usize,
    pub samples: usize,
    pub digit_counts: Vec<u64>,
    pub digraph_counts: Vec<u64>,
    pub digit_chi2: ChiSquare,
    pub digraph_chi2: ChiSquare,
    /// Indices of rational inputs with eventually periodic expansions.
    pub periodic: Vec<usize>,
}

/// Pooled digit and digraph frequencies per base.
pub fn normality_diagnostics(samples: &[NormalityInput], bases: &[u32], digits: usize) -> Result<Vec<BaseReport>> {
    let mut out = Vec::new();
    for &b in bases {
        if !(2..=36).contains(&b) {
            return Err(Error::InvalidInput(format!("base {b} outside 2..=36")));
        }
        let mut dc = vec![0u64; b as usize];
        let mut gc = vec![0u64; (b * b) as usize];
        let mut periodic = Vec::new();
        for (i, s) in samples.iter().enumerate() {
            let ds = match s {
                NormalityInput::Cylinder(cf) => certified_digits(cf, b, digits)?,
                NormalityInput::Rational(n, d) => {
                    let (ds, per) = rational_digits(n, d, b, digits);
                    if per.is_some() {
                        periodic.push(i);
                    }
                    ds
                }
            };
            if ds.len() < digits {
                return Err(Error::Precondition(format!(
                    "insufficient certified digits: sample {i} has {} < {digits} in base {b}",
                    ds.len()
                )));
            }
            for &d in &ds {
                dc[d as usize] += 1;
            }
            for w in ds.windows(2) {
                gc[(w[0] as u32 * b + w[1] as u32) as usize] += 1;
            }
        }
        out.push(BaseReport {
            base: b,
            digits,
            samples: samples.len(),
            digit_chi2: chi_square(&dc)?,
            digraph_chi2: chi_square(&gc)?,
            digit_counts: dc,
            digraph_counts: gc,
            periodic,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct DelRow {
    pub n: usize,
    /// `N^-3 sum_{j,k <= N} Re lambda^(m (a^j - a^k))`.
    pub term: f64,
    pub partial_sum: f64,
    /// Accumulated evaluation error.
    pub error: f64,
}

/// Partial sums `sum_{N <= n0} N^-3 sum_{j,k <= N} lambda^(m (a^j - a^k))`.
pub fn del_partial_sums(table: &CylinderTable, a: u32, m: f64, n0: usize) -> Vec<DelRow> {
    let pw: Vec<f64> = (1..=n0).map(|j| (a as f64).powi(j as i32)).collect();
    let mut cache: HashMap<u64, (f64, f64)> = HashMap::new();
    let mut val = |diff: f64| -> (f64, f64) {
        let key = diff.to_bits();
        *cache.entry(key).or_insert_with(|| {
            let (v, e) = table.eval(m * diff);
            (v.re, e)
        })
    };
    let mut rows = Vec::with_capacity(n0);
    let mut s = 0.0;
    let mut err = 0.0;
    for n in 1..=n0 {
        let mut inner = 0.0;
        let mut inner_err = 0.0;
        for j in 0..n {
            for k in 0..n {
                let (v, e) = val(pw[j] - pw[k]);
                inner += v;
                inner_err += e;
            }
        }
        let scale = (n as f64).powi(-3);
        s += scale * inner;
        err += scale * inner_err;
        rows.push(DelRow { n, term: scale * inner, partial_sum: s, error: err });
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_is_periodic() {
        let (ds, per) = rational_digits(&BigUint::from(1u32), &BigUint::from(7u32), 10, 20);
        assert_eq!(&ds[..6], &[1, 4, 2, 8, 5, 7]);
        assert_eq!(per, Some((0, 6)));
    }

    #[test]
    fn certified_digits_of_cylinder() {
        // cylinder of (1; 2, 2, 2, 2, 2, 2, 2, 2, 2, 2) sits near sqrt 2
        let cf = FiniteCF::from_slice(&[1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2]).unwrap();
        let d = certified_digits(&cf, 10, 50).unwrap();
        assert!(d.len() >= 6);
        assert_eq!(&d[..6], &[4, 1, 4, 2, 1, 3]);
    }
}
