//! Direct evaluation of the Fourier transform of the pushed-forward measure and decay scans.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quad::e;
use crate::error::{Error, Result};
use crate::geometry::{choose_alpha, AlphaPolicy, ScaleKind};
use crate::measure::{fmt17, MeasureTree};

/// How a sample was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Method {
    CylinderSum { depth: usize },
    MonteCarlo { n: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FourierSample {
    pub xi: f64,
    pub re: f64,
    pub im: f64,
    /// Bracket radius: first-order midpoint error for cylinder sums, one standard error
    /// plus the midpoint bias for Monte Carlo.
    pub error_bound: f64,
    pub method: Method,
    pub alpha_used: f64,
    pub scale_kind: Option<ScaleKind>,
}

impl FourierSample {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Cylinder midpoints and masses at one depth.
#[derive(Clone, Debug)]
pub struct CylinderTable {
    pub depth: usize,
    pub mids: Vec<f64>,
    pub weights: Vec<f64>,
    pub max_width: f64,
}

/// Relative error of an `f64` midpoint of a cylinder with big endpoints.
const MID_REL: f64 = 4.0 * f64::EPSILON;

impl CylinderTable {
    pub fn from_tree(tree: &MeasureTree, depth: usize, node_limit: usize) -> Result<Self> {
        let nodes = tree.enumerate(depth, node_limit, node_limit)?;
        let mut mids = Vec::with_capacity(nodes.len());
        let mut weights = Vec::with_capacity(nodes.len());
        let mut max_width: f64 = 0.0;
        for (s, lw) in &nodes {
            let (a, b) = s.cf.cylinder_f64();
            mids.push(0.5 * (a + b));
            weights.push(lw.exp());
            max_width = max_width.max(s.cf.ln_cylinder_width().exp());
        }
        Ok(CylinderTable { depth, mids, weights, max_width })
    }

    /// Point masses with zero width.
    pub fn atoms(points: Vec<f64>, weights: Vec<f64>) -> Self {
        CylinderTable { depth: 0, mids: points, weights, max_width: 0.0 }
    }

    pub fn error_bound(&self, xi: f64) -> f64 {
        let top = self.mids.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        2.0 * PI * xi.abs() * (self.max_width + MID_REL * top)
    }

    /// `sum_G lambda(G) e(-xi mid(G))`; exactly `1` at `xi = 0`.
    pub fn eval(&self, xi: f64) -> (Complex64, f64) {
        if xi == 0.0 {
            return (Complex64::new(1.0, 0.0), 0.0);
        }
        let s: Complex64 = self.mids.iter().zip(&self.weights).map(|(m, w)| e(-xi * m) * *w).sum();
        (s, self.error_bound(xi))
    }
}

/// Smallest depth whose cylinder sum meets `target` at `xi`.
pub fn depth_for(tree: &MeasureTree, xi: f64, target: f64, max_depth: usize, node_limit: usize) -> Result<CylinderTable> {
    for d in 1..=max_depth {
        let t = match CylinderTable::from_tree(tree, d, node_limit) {
            Ok(t) => t,
            Err(Error::Budget(m)) => return Err(Error::Deepen(format!("error target {target:e} at xi = {xi}: {m}"))),
            Err(e) => return Err(e),
        };
        if t.error_bound(xi) <= target {
            return Ok(t);
        }
    }
    Err(Error::Deepen(format!("error target {target:e} at xi = {xi} not met by depth {max_depth}")))
}

/// Cylinder-sum evaluation at a fixed depth; fails with `Deepen` when the bound exceeds `target`.
pub fn fourier_cylinder_sum(tree: &MeasureTree, xi: f64, depth: usize, target: f64, node_limit: usize) -> Result<FourierSample> {
    let t = CylinderTable::from_tree(tree, depth, node_limit)?;
    let (v, err) = t.eval(xi);
    if err > target {
        return Err(Error::Deepen(format!("depth {depth} gives error bound {err:e} > {target:e} at xi = {xi}")));
    }
    Ok(sample_from(tree, xi, v, err, Method::CylinderSum { depth }))
}

/// Empirical mean of `e(-xi x)` over sampled cylinder midpoints.
pub fn fourier_monte_carlo(tree: &MeasureTree, xi: f64, n: usize, depth: usize, seed: u64) -> Result<FourierSample> {
    let pts = sample_points(tree, n, depth, seed)?;
    let (v, stderr, bias) = mc_mean(&pts, xi);
    Ok(sample_from(tree, xi, v, stderr + bias, Method::MonteCarlo { n, seed }))
}

/// Sampled midpoints with their cylinder widths.
pub fn sample_points(tree: &MeasureTree, n: usize, depth: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    Ok(tree
        .sample(depth, n, seed)?
        .into_par_iter()
        .map(|s| {
            let (a, b) = s.cf.cylinder_f64();
            (0.5 * (a + b), s.cf.ln_cylinder_width().exp())
        })
        .collect())
}

/// `(mean, standard error, midpoint bias bound)`.
pub fn mc_mean(pts: &[(f64, f64)], xi: f64) -> (Complex64, f64, f64) {
    let n = pts.len() as f64;
    let sum: Complex64 = pts.iter().map(|(x, _)| e(-xi * x)).sum();
    let mean = sum / n;
    let var = (1.0 - mean.norm_sqr()).max(0.0);
    let wmax = pts.iter().fold(0.0f64, |m, p| m.max(p.1 + MID_REL * p.0.abs()));
    (mean, (var / n).sqrt(), 2.0 * PI * xi.abs() * wmax)
}

fn sample_from(tree: &MeasureTree, xi: f64, v: Complex64, err: f64, method: Method) -> FourierSample {
    let (alpha, kind) = if xi.abs() > 1.0 {
        match choose_alpha(xi.abs().ln(), &tree.schedule, AlphaPolicy::Adaptive) {
            Ok(c) => (c.alpha, Some(c.chosen.kind)),
            Err(_) => (f64::NAN, None),
        }
    } else {
        (f64::NAN, None)
    };
    FourierSample { xi, re: v.re, im: v.im, error_bound: err, method, alpha_used: alpha, scale_kind: kind }
}

/// Least-squares slope of `y` against `x`; `None` with fewer than two distinct abscissae.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// `count` points geometrically spaced from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DecayRow {
    pub xi: f64,
    pub alpha: f64,
    pub scale_kind: String,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub error_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayScan {
    pub slope: Option<f64>,
    pub depth: usize,
    pub rows: Vec<DecayRow>,
}

pub const DECAY_COLUMNS: [&str; 7] = ["xi", "alpha", "scale_kind", "re", "im", "modulus", "error_bound"];

fn kind_label(k: Option<ScaleKind>) -> String {
    match k {
        Some(ScaleKind::Typical) => "typical".into(),
        Some(ScaleKind::Exceptional { k }) => format!("exceptional{k}"),
        None => "none".into(),
    }
}

/// Evaluates the transform on `grid` from one cylinder table, deep enough that every
/// point meets `target`, and fits `ln |value|` against `ln xi`.
pub fn decay_scan(
    tree: &MeasureTree,
    grid: &[f64],
    policy: AlphaPolicy,
    target: f64,
    max_depth: usize,
    node_limit: usize,
) -> Result<DecayScan> {
    let top = grid.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let table = depth_for(tree, top, target, max_depth, node_limit)?;
    decay_scan_table(&table, grid, |xi| {
        choose_alpha(xi.abs().ln(), &tree.schedule, policy).ok().map(|c| (c.alpha, c.chosen.kind))
    })
}

/// Decay scan over a prepared table; `alpha_of` supplies the exponent and scale kind per point.
pub fn decay_scan_table(
    table: &CylinderTable,
    grid: &[f64],
    alpha_of: impl Fn(f64) -> Option<(f64, ScaleKind)> + Sync,
) -> Result<DecayScan> {
    let rows: Vec<DecayRow> = grid
        .par_iter()
        .map(|&xi| {
            let (v, err) = table.eval(xi);
            let choice = alpha_of(xi);
            DecayRow {
                xi,
                alpha: choice.map(|c| c.0).unwrap_or(f64::NAN),
                scale_kind: kind_label(choice.map(|c| c.1)),
                re: v.re,
                im: v.im,
                modulus: v.norm(),
                error_bound: err,
            }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.xi.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.modulus.ln()).collect();
    Ok(DecayScan { slope: fit_slope(&xs, &ys), depth: table.depth, rows })
}

/// Writes the decay table as CSV after a `#`-prefixed header line.
pub fn write_decay_csv<W: Write>(mut w: W, header: &str, rows: &[DecayRow]) -> Result<()> {
    writeln!(w, "# {header}")?;
    let mut c = csv::Writer::from_writer(w);
    c.write_record(DECAY_COLUMNS)?;
    for r in rows {
        c.write_record([
            fmt17(r.xi),
            fmt17(r.alpha),
            r.scale_kind.clone(),
            fmt17(r.re),
            fmt17(r.im),
            fmt17(r.modulus),
            fmt17(r.error_bound),
        ])?;
    }
    c.flush()?;
    Ok(())
}

/// Reads a table written by [`write_decay_csv`].
pub fn read_decay_csv(text: &str) -> Result<Vec<DecayRow>> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

/// Largest absolute difference over numeric columns; errors when the tables differ in shape.
pub fn max_table_diff(a: &[DecayRow], b: &[DecayRow]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Verification(format!("table lengths differ: {} vs {}", a.len(), b.len())));
    }
    let mut worst: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        if x.scale_kind != y.scale_kind {
            return Err(Error::Verification(format!("scale kind differs at xi = {}", x.xi)));
        }
        for (u, v) in [(x.xi, y.xi), (x.alpha, y.alpha), (x.re, y.re), (x.im, y.im), (x.modulus, y.modulus), (x.error_bound, y.error_bound)] {
            if !(u.is_nan() && v.is_nan()) {
                worst = worst.max((u - v).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_slope_zero() {
        let t = CylinderTable::atoms(vec![1.5], vec![1.0]);
        let s = decay_scan_table(&t, &geometric_grid(1e2, 1e5, 9), |_| None).unwrap();
        assert_eq!(s.slope, Some(0.0));
    }

    #[test]
    fn single_point_slope_undefined() {
        let t = CylinderTable::atoms(vec![1.5, 2.5], vec![0.5, 0.5]);
        let s = decay_scan_table(&t, &[10.0], |_| None).unwrap();
        assert!(s.slope.is_none());
    }

    #[test]
    fn csv_roundtrip() {
        let t = CylinderTable::atoms(vec![1.25, 2.75], vec![0.25, 0.75]);
        let s = decay_scan_table(&t, &geometric_grid(1.0, 100.0, 5), |_| None).unwrap();
        let mut buf = Vec::new();
        write_decay_csv(&mut buf, "test", &s.rows).unwrap();
        let back = read_decay_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(max_table_diff(&s.rows, &back).unwrap(), 0.0);
    }
}
