//! Frozen constants: fitted once on the desk configuration, then used for regression checks.

use serde::{Deserialize, Serialize};

use crate::admissible::ScheduleParams;
use crate::error::Result;
use crate::fourier::eval::geometric_grid;
use crate::fourier::fxi::{build_f_xi, m2_decompose, M2Constants};
use crate::fourier::vdc::{stationary_ratio, synthetic};
use crate::geometry::{
    alpha0, alpha1, ball_condition_scan, partition_classes, partition_classes_with_side, relative_ball_check,
    BallScanOptions, PrefixKind, RelMode,
};
use crate::measure::MeasureTree;
use crate::profile::ApproxProfile;

pub const LEDGER_SCHEMA: u32 = 1;

/// Frequency used for partition-level calibration.
pub const DESK_XI: f64 = 1e6;
/// Coarse box side `e^6` used where the natural boxes are singletons.
pub const COARSE_LN_SIDE: f64 = 6.0;
/// Seed of the synthetic calibration suite; checks use other seeds.
pub const CALIBRATION_SEED: u64 = 1;
pub const CALIBRATION_COUNT: u64 = 1000;
/// Multiplicative slack applied to fitted constants before freezing.
pub const SLACK: f64 = 1.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub schema_version: u32,
    /// Constant in the stationary-phase bound, frozen.
    pub vdc_stationary_k: f64,
    /// Largest calibration ratio before slack.
    pub vdc_stationary_k_fit: f64,
    /// Constant and `eps` coefficient in the `m2` bound.
    pub m2_k: f64,
    pub m2_c_eps: f64,
    /// `T2` relative mass threshold `k |xi|^(-c eps)`.
    pub t2_k: f64,
    pub t2_c_eps: f64,
    /// `eps` coefficient and log constant of the relative ball condition.
    pub rel_ball_c_eps: f64,
    pub rel_ball_ln_c: f64,
    pub beta_hat: f64,
    pub exp_terminal_a: f64,
    pub exp_b_seq: f64,
    pub exp_general_a: f64,
    pub exponent_tol: f64,
    /// Decay slope of the reference scan, recorded for information.
    pub decay_slope: f64,
}

const FROZEN: &str = include_str!("../data/constants.json");

/// The committed constants.
pub fn frozen() -> Constants {
    serde_json::from_str(FROZEN).expect("committed constants parse")
}

pub fn desk_tree() -> Result<MeasureTree> {
    MeasureTree::build(&ApproxProfile::power(2.5), &ScheduleParams::desk())
}

/// Ball scan settings reaching the second exceptional level.
pub fn desk_ball_options(tree: &MeasureTree) -> BallScanOptions {
    BallScanOptions {
        depth: 18,
        ln_widths: vec![-2.0, -4.0, -8.0, -12.0, -16.0],
        windows_per_width: 20,
        path_depth: tree.schedule.j(2) + 3,
        paths: 20,
        seed: 3,
        min_prefix: 2,
    }
}

/// Decay grid: 31 points from `1e2` to `1e5`.
pub fn desk_decay_grid() -> Vec<f64> {
    geometric_grid(1e2, 1e5, 31)
}

pub const DECAY_TARGET: f64 = 1e-4;
pub const DECAY_MAX_DEPTH: usize = 15;

fn kind_exp(scan: &crate::geometry::BallScan, k: PrefixKind) -> f64 {
    scan.kinds.iter().find(|e| e.kind == k).map(|e| e.min_exponent).unwrap_or(f64::NAN)
}

fn round_up(x: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (x * s).ceil() / s
}

fn round(x: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (x * s).round() / s
}

/// Largest `|int| / shape` over the synthetic stationary suite.
pub fn fit_stationary_k(seed: u64, count: u64) -> Result<f64> {
    let mut mx: f64 = 0.0;
    for i in 0..count {
        let (f, a, b) = synthetic::stationary(seed, i);
        mx = mx.max(stationary_ratio(&f, a, b)?);
    }
    Ok(mx)
}

/// Largest `m2 / shape` over the calibration boxes, with `c_eps = 1`.
pub fn fit_m2(tree: &MeasureTree) -> Result<f64> {
    let sched = &tree.schedule;
    let ln_xi = DESK_XI.ln();
    let unit = M2Constants { k_stationary: f64::INFINITY, k_m2: 1.0, c_eps: 1.0 };
    let mut mx: f64 = 0.0;
    let mut parts = Vec::new();
    for a in [alpha0(), alpha1(sched.tau, sched.epsilon)] {
        parts.push((a, partition_classes(tree, ln_xi, a)?));
    }
    let a1 = alpha1(sched.tau, sched.epsilon);
    parts.push((a1, partition_classes_with_side(tree, ln_xi, a1, COARSE_LN_SIDE)?));
    for (a, p) in &parts {
        for i in 0..p.boxes.len() {
            if p.boxes[i].members.len() > 10 {
                continue;
            }
            let f = build_f_xi(p, i, DESK_XI, sched.n)?;
            let r = m2_decompose(&f, *a, sched.tau, sched.epsilon, &unit, 10_000)?;
            mx = mx.max(r.m2_quadrature / r.bound_rhs);
        }
    }
    Ok(mx)
}

/// Smallest `c` with the relative ball condition passing at every representative.
pub fn fit_rel_ball(tree: &MeasureTree) -> Result<f64> {
    let sched = &tree.schedule;
    let ln_xi = DESK_XI.ln();
    let p = partition_classes(tree, ln_xi, alpha0())?;
    let mut c: f64 = 0.0;
    for b in &p.boxes {
        let r = relative_ball_check(tree, &b.rep().seq, ln_xi, alpha0(), RelMode::Bad, 0.0, 0.0, 14, 30)?;
        c = c.max(r.worst_excess / (-r.ln_width) / sched.epsilon);
    }
    Ok(c)
}

/// Recomputes every fitted constant from scratch.
pub fn calibrate(tree: &MeasureTree) -> Result<Constants> {
    let k_fit = fit_stationary_k(CALIBRATION_SEED, CALIBRATION_COUNT)?;
    let m2 = fit_m2(tree)?;
    let rel = fit_rel_ball(tree)?;
    let scan = ball_condition_scan(tree, &desk_ball_options(tree))?;
    let decay = crate::fourier::eval::decay_scan(
        tree,
        &desk_decay_grid(),
        crate::geometry::AlphaPolicy::Adaptive,
        DECAY_TARGET,
        DECAY_MAX_DEPTH,
        4_000_000,
    )?;
    Ok(Constants {
        schema_version: LEDGER_SCHEMA,
        vdc_stationary_k: round_up(k_fit * SLACK, 3),
        vdc_stationary_k_fit: round(k_fit, 6),
        m2_k: round_up(m2 * SLACK, 6),
        m2_c_eps: 1.0,
        t2_k: 1.0,
        t2_c_eps: 1.0,
        rel_ball_c_eps: round_up(rel + 0.05, 3),
        rel_ball_ln_c: 0.0,
        beta_hat: round(scan.beta_hat, 6),
        exp_terminal_a: round(kind_exp(&scan, PrefixKind::TerminalA), 6),
        exp_b_seq: round(kind_exp(&scan, PrefixKind::BSeq), 6),
        exp_general_a: round(kind_exp(&scan, PrefixKind::GeneralA), 6),
        exponent_tol: 0.02,
        decay_slope: round(decay.slope.unwrap_or(f64::NAN), 6),
    })
}
