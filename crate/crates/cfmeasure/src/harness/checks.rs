//! Check suites shared by the verify pipelines and the test suite. Each returns raw
//! counts and margins; callers decide what counts as a failure.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::admissible::{verify_growth, Element};
use crate::error::{Error, Result};
use crate::fourier::diag::{approx_error_diagnostics, ApproxErrorReport, T2Threshold};
use crate::fourier::fxi::{build_f_xi, c3_recovery, m2_decompose, m_bound_check, M2Constants, RecoveryReport};
use crate::fourier::qr::{qr_combine, random_instance, PieceMeasure, QrResult};
use crate::fourier::vdc::{synthetic, vdc_nonstationary, vdc_stationary};
use crate::geometry::{alpha0, alpha1, partition_classes, partition_classes_with_side, scale_members};
use crate::ledger::{Constants, COARSE_LN_SIDE, DESK_XI};
use crate::measure::{fmt17, ln_sum_exp, MeasureTree, Snapshot, SNAPSHOT_SCHEMA};
use crate::profile::{check_claim1, claim2_holds};

fn violated(invariant: &str, detail: String) -> Error {
    Error::Verification(format!("invariant {invariant} violated: {detail}"))
}

#[derive(Clone, Debug, Serialize)]
pub struct SnapshotCheck {
    pub nodes: usize,
    pub depth: usize,
    pub ln_total_mass: f64,
}

/// Recomputes every node of a snapshot against the tree. Errors name the first broken invariant.
pub fn verify_snapshot(tree: &MeasureTree, snap: &Snapshot) -> Result<SnapshotCheck> {
    if snap.schema_version != SNAPSHOT_SCHEMA {
        return Err(violated("schema-version", format!("{} != {SNAPSHOT_SCHEMA}", snap.schema_version)));
    }
    if snap.schedule != tree.schedule {
        return Err(violated("schedule-match", "stored schedule differs from the rebuilt one".into()));
    }
    if snap.nubar != tree.nubar {
        return Err(violated("block-measure-match", "stored block measure differs from the rebuilt one".into()));
    }
    let mut seen = HashSet::new();
    let mut lws = Vec::with_capacity(snap.nodes.len());
    for node in &snap.nodes {
        if !seen.insert(node.key.as_str()) {
            return Err(violated("node-unique", format!("{} appears twice", node.key)));
        }
        let seq = crate::admissible::AdmissibleSeq::parse_key(&node.key)
            .map_err(|e| violated("node-admissible", format!("{}: {e}", node.key)))?;
        if seq.len() != snap.depth {
            return Err(violated("node-depth", format!("{} has {} elements", node.key, seq.len())));
        }
        let lw = tree
            .ln_weight(&seq)
            .map_err(|e| violated("node-admissible", format!("{}: {e}", node.key)))?;
        if fmt17(lw) != node.ln_weight {
            return Err(violated("node-weight", format!("{}: stored {} recomputed {}", node.key, node.ln_weight, fmt17(lw))));
        }
        lws.push(lw);
    }
    let total = ln_sum_exp(&lws);
    if total.abs() > 1e-12 {
        return Err(violated("total-mass", format!("ln total mass {total:.3e}")));
    }
    Ok(SnapshotCheck { nodes: snap.nodes.len(), depth: snap.depth, ln_total_mass: total })
}

#[derive(Clone, Debug, Serialize)]
pub struct EncodingReport {
    pub samples: usize,
    pub depth: usize,
    pub exceptional_checked: usize,
    pub exceptional_failures: usize,
    pub side_failures: usize,
    pub typical_checked: usize,
    pub typical_failures: usize,
}

/// Exceptional and typical follow-up checks in exact rationals along sampled sequences.
pub fn encoding_check(tree: &MeasureTree, count: usize, depth: usize, seed: u64) -> Result<EncodingReport> {
    let sched = &tree.schedule;
    let seqs = tree.sample(depth, count, seed)?;
    let rows: Vec<Result<[usize; 5]>> = seqs
        .par_iter()
        .map(|s| {
            let mut r = [0usize; 5];
            let mut cur = crate::cf::FiniteCF::new();
            let mut stage = 0;
            for e in &s.elems {
                match e {
                    Element::A(block) => {
                        for &c in block {
                            if !cur.is_empty() {
                                r[3] += 1;
                                if !claim2_holds(&cur, c as u64, sched.n as u64)? {
                                    r[4] += 1;
                                }
                            }
                            cur.push_u64(c as u64)?;
                        }
                    }
                    Element::B(b) => {
                        stage += 1;
                        let w = check_claim1(&cur, b, sched.eta(stage), &tree.profile)?;
                        r[0] += 1;
                        if !w.holds {
                            r[1] += 1;
                        }
                        if !w.side_check {
                            r[2] += 1;
                        }
                        cur.push(b.clone())?;
                    }
                }
            }
            Ok(r)
        })
        .collect();
    let mut t = [0usize; 5];
    for r in rows {
        let r = r?;
        for i in 0..5 {
            t[i] += r[i];
        }
    }
    Ok(EncodingReport {
        samples: count,
        depth,
        exceptional_checked: t[0],
        exceptional_failures: t[1],
        side_failures: t[2],
        typical_checked: t[3],
        typical_failures: t[4],
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthSummary {
    pub samples: usize,
    pub depth: usize,
    pub passed: usize,
    pub heart_failures: usize,
    pub spade_failures: usize,
    pub first_failure: Option<String>,
}

pub fn growth_summary(tree: &MeasureTree, count: usize, depth: usize, seed: u64) -> Result<GrowthSummary> {
    let seqs = tree.sample(depth, count, seed)?;
    let reports: Vec<_> = seqs.par_iter().map(|s| verify_growth(s, &tree.schedule)).collect();
    Ok(GrowthSummary {
        samples: count,
        depth,
        passed: reports.iter().filter(|r| r.heart && r.spade).count(),
        heart_failures: reports.iter().filter(|r| !r.heart).count(),
        spade_failures: reports.iter().filter(|r| !r.spade).count(),
        first_failure: reports.iter().find_map(|r| r.first_failure.clone()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockSummary {
    pub support: usize,
    pub thinned_mass: f64,
    pub property_a_factor: Option<f64>,
    pub property_b: Option<bool>,
    pub sigma: f64,
}

pub fn block_summary(tree: &MeasureTree) -> BlockSummary {
    BlockSummary {
        support: tree.nubar.len(),
        thinned_mass: tree.schedule.thinned_mass,
        property_a_factor: tree.nubar.property_a_factor(),
        property_b: tree.nubar.property_b_holds(),
        sigma: tree.schedule.sigma,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionSummary {
    pub alpha: f64,
    pub ln_xi: f64,
    pub ln_side: f64,
    pub boxes: usize,
    pub members: usize,
    pub k_window_margin: f64,
    pub cyl_window_margin: f64,
    pub ratio_checked: usize,
    pub ratio_failures: usize,
}

/// Natural partitions at `xi` for both exponents; window violations surface as errors.
pub fn partition_summaries(tree: &MeasureTree, xi: f64) -> Result<Vec<PartitionSummary>> {
    let sched = &tree.schedule;
    [alpha0(), alpha1(sched.tau, sched.epsilon)]
        .into_iter()
        .map(|a| {
            let p = partition_classes(tree, xi.ln(), a)?;
            Ok(PartitionSummary {
                alpha: a,
                ln_xi: xi.ln(),
                ln_side: p.ln_side,
                boxes: p.boxes.len(),
                members: p.member_count,
                k_window_margin: p.k_window_margin,
                cyl_window_margin: p.cyl_window_margin,
                ratio_checked: p.ratio_checked,
                ratio_failures: p.ratio_failures,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct VdcSuite {
    pub seed: u64,
    pub count: u64,
    pub nonstationary_failures: usize,
    pub stationary_failures: usize,
    pub stationary_k: f64,
    pub max_stationary_ratio: f64,
}

/// Both van der Corput bounds on the synthetic family, the stationary one with constant `k`.
pub fn vdc_suite(seed: u64, count: u64, k: f64) -> Result<VdcSuite> {
    let rows: Vec<Result<(bool, bool, f64)>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let (f, a, b) = synthetic::nonstationary(seed, i);
            let ns = vdc_nonstationary(&f, a, b)?;
            let (g, a, b) = synthetic::stationary(seed, i);
            let st = vdc_stationary(&g, a, b, k)?;
            Ok((ns.pass, st.pass, st.modulus / st.bound * k))
        })
        .collect();
    let mut out = VdcSuite {
        seed,
        count,
        nonstationary_failures: 0,
        stationary_failures: 0,
        stationary_k: k,
        max_stationary_ratio: 0.0,
    };
    for r in rows {
        let (ns, st, ratio) = r?;
        out.nonstationary_failures += usize::from(!ns);
        out.stationary_failures += usize::from(!st);
        out.max_stationary_ratio = out.max_stationary_ratio.max(ratio);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct M2Box {
    pub box_index: usize,
    pub members: usize,
    pub m2_quadrature: f64,
    pub m2_pairwise: f64,
    pub rel_diff: f64,
    pub bound_rhs: f64,
    pub pair_failures: usize,
    pub c1_pairs: usize,
    pub c2_pairs: usize,
    pub c3_pairs: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct M2Suite {
    pub xi: f64,
    pub alpha: f64,
    pub ln_side: f64,
    pub boxes: Vec<M2Box>,
    pub max_rel_diff: f64,
    pub pair_failures: usize,
    pub bound_failures: usize,
    pub recovery: RecoveryReport,
}

/// Dual computation of `int |F|^2` on every coarse box with at most `max_members` members,
/// plus prefix recovery over all members of the scale.
pub fn m2_suite(tree: &MeasureTree, consts: &Constants, max_members: usize) -> Result<M2Suite> {
    use crate::fourier::fxi::PhaseCaseKind;
    let sched = &tree.schedule;
    let a1 = alpha1(sched.tau, sched.epsilon);
    let p = partition_classes_with_side(tree, DESK_XI.ln(), a1, COARSE_LN_SIDE)?;
    let mc = M2Constants { k_stationary: consts.vdc_stationary_k, k_m2: consts.m2_k, c_eps: consts.m2_c_eps };
    let mut boxes = Vec::new();
    for (i, b) in p.boxes.iter().enumerate() {
        if b.members.len() > max_members {
            continue;
        }
        let f = build_f_xi(&p, i, DESK_XI, sched.n)?;
        let r = m2_decompose(&f, a1, sched.tau, sched.epsilon, &mc, 10_000)?;
        let count = |k: PhaseCaseKind| r.pairs.iter().filter(|q| q.case == k).count();
        boxes.push(M2Box {
            box_index: i,
            members: b.members.len(),
            m2_quadrature: r.m2_quadrature,
            m2_pairwise: r.m2_pairwise,
            rel_diff: r.rel_diff,
            bound_rhs: r.bound_rhs,
            pair_failures: r.pairs.iter().filter(|q| !q.pass).count(),
            c1_pairs: count(PhaseCaseKind::C1),
            c2_pairs: count(PhaseCaseKind::C2),
            c3_pairs: count(PhaseCaseKind::C3),
        });
    }
    let members: Vec<_> = scale_members(tree, &p.scale, 5_000_000)?.into_iter().map(|m| m.seq).collect();
    let recovery = c3_recovery(&members, sched.n)?;
    Ok(M2Suite {
        xi: DESK_XI,
        alpha: a1,
        ln_side: COARSE_LN_SIDE,
        max_rel_diff: boxes.iter().map(|b| b.rel_diff).fold(0.0, f64::max),
        pair_failures: boxes.iter().map(|b| b.pair_failures).sum(),
        bound_failures: boxes.iter().filter(|b| b.m2_quadrature > b.bound_rhs).count(),
        boxes,
        recovery,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct QrSuite {
    pub seed: u64,
    pub requested: u64,
    pub instances: usize,
    pub passed: usize,
}

/// Randomized instances that satisfy the ball hypothesis by construction.
pub fn qr_suite(seed: u64, count: u64) -> Result<QrSuite> {
    let rows: Vec<Result<Option<bool>>> = (0..count)
        .into_par_iter()
        .map(|i| match random_instance(seed, i) {
            None => Ok(None),
            Some(inst) => {
                let m2 = inst.f.m2()?;
                let r = qr_combine(&|x| inst.f.eval(x).norm(), inst.f.deriv_bound(), m2, &inst.mu, inst.ln_r, Some(inst.beta))?;
                Ok(Some(r.pass))
            }
        })
        .collect();
    let mut out = QrSuite { seed, requested: count, instances: 0, passed: 0 };
    for r in rows {
        if let Some(p) = r? {
            out.instances += 1;
            out.passed += usize::from(p);
        }
    }
    Ok(out)
}

/// The combination applied to `F` of the first coarse box at the desk frequency, with
/// `r = |xi|^(-1000 eps)` and the ball exponent certified from the relative measure.
pub fn qr_end_to_end(tree: &MeasureTree) -> Result<QrResult> {
    let sched = &tree.schedule;
    let a1 = alpha1(sched.tau, sched.epsilon);
    let ln_xi = DESK_XI.ln();
    let p = partition_classes_with_side(tree, ln_xi, a1, COARSE_LN_SIDE)?;
    let bi = p
        .boxes
        .iter()
        .position(|b| b.members.len() <= 10)
        .ok_or_else(|| Error::Precondition("no coarse box with at most 10 members".into()))?;
    let f = build_f_xi(&p, bi, DESK_XI, sched.n)?;
    let unit = M2Constants { k_stationary: f64::INFINITY, k_m2: 1.0, c_eps: 1.0 };
    let m2 = m2_decompose(&f, a1, sched.tau, sched.epsilon, &unit, 10_000)?;
    let mb = m_bound_check(&f, a1, sched.epsilon, 50_000_000)?;
    let mu = PieceMeasure::relative_view(tree, &p.boxes[bi].rep().seq, 6, 1_000_000)?;
    qr_combine(&|x| f.eval(x).norm(), mb.m_numeric, m2.m2_quadrature, &mu, -1000.0 * sched.epsilon * ln_xi, None)
}

/// Approximation-error diagnostics on the natural partitions, one member per box.
pub fn diag_suite(tree: &MeasureTree, consts: &Constants, per_partition: usize) -> Result<Vec<ApproxErrorReport>> {
    let sched = &tree.schedule;
    let th = T2Threshold { k: consts.t2_k, c_eps: consts.t2_c_eps };
    let mut out = Vec::new();
    for a in [alpha0(), alpha1(sched.tau, sched.epsilon)] {
        let p = partition_classes(tree, DESK_XI.ln(), a)?;
        for bi in 0..p.boxes.len().min(per_partition) {
            let last = p.boxes[bi].members.len() - 1;
            out.push(approx_error_diagnostics(tree, &p, bi, last, DESK_XI, th, 1 << 20)?);
        }
    }
    Ok(out)
}

