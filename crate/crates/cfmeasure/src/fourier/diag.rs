//! Replacing the relative measure of a prefix by that of its box representative.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::quad::e;
use crate::admissible::{AdmissibleSeq, Element};
use crate::cf::{interior_continuant, ln_big, FiniteCF};
use crate::error::{Error, Result};
use crate::geometry::ClassPartition;
use crate::measure::{ln_sum_exp, MeasureTree};

#[derive(Clone, Debug, Serialize)]
pub struct ApproxErrorReport {
    pub box_index: usize,
    pub member: usize,
    pub stage: usize,
    /// Blocks in each tail `H`.
    pub h_blocks: usize,
    pub t_count: usize,
    pub t2_count: usize,
    /// `ln theta` interval admitting every `K(H)`; empty when `lo > hi`.
    pub ln_theta_lo: f64,
    pub ln_theta_hi: f64,
    pub theta_exists: bool,
    /// Whether `theta > |xi|^5` can hold.
    pub theta_large: bool,
    /// Every `lambda_G(H)` equals the representative's, compared bit for bit.
    pub weights_identical: bool,
    pub t2_mass_g: f64,
    pub t2_mass_rep: f64,
    /// `|sum over T1 cylinders of e(-xi M_G) d(lambda_G - lambda_rep)|` one level past `H`.
    pub claim2_gap: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Threshold `k |xi|^(-c eps)` for the relative mass of `T2`.
#[derive(Clone, Copy, Debug)]
pub struct T2Threshold {
    pub k: f64,
    pub c_eps: f64,
}

/// All tails `H` of `blocks` a-blocks from the thinned support.
fn tails(tree: &MeasureTree, blocks: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
    let s = tree.nubar.len();
    let total = (s as f64).powi(blocks as i32);
    if total > cap as f64 {
        return Err(Error::Budget(format!("{total} tails exceed the cap {cap}")));
    }
    let mut out = vec![Vec::new()];
    for _ in 0..blocks {
        out = out
            .into_iter()
            .flat_map(|h: Vec<usize>| (0..s).map(move |i| {
                let mut v = h.clone();
                v.push(i);
                v
            }))
            .collect();
    }
    Ok(out)
}

struct TailEval {
    gamma_g: i64,
    gamma_r: i64,
    lw_g: f64,
    lw_r: f64,
    ln_k: f64,
    gap: Complex64,
}

/// Compares `lambda_G` with `lambda_rep` on the tails reaching the next exceptional level.
pub fn approx_error_diagnostics(
    tree: &MeasureTree,
    partition: &ClassPartition,
    box_index: usize,
    member: usize,
    xi: f64,
    threshold: T2Threshold,
    tail_cap: usize,
) -> Result<ApproxErrorReport> {
    let sched = &tree.schedule;
    let bx = partition
        .boxes
        .get(box_index)
        .ok_or_else(|| Error::InvalidInput(format!("no box {box_index}")))?;
    let g = &bx.members.get(member).ok_or_else(|| Error::InvalidInput(format!("no member {member}")))?.seq;
    let rep = &bx.rep().seq;
    let stage = partition.scale.stage;
    if stage + 1 > sched.levels() {
        return Err(Error::Precondition(format!("stage {} is past the schedule", stage + 1)));
    }
    let jz = g.a_count;
    let jn = sched.j(stage + 1);
    if jn <= jz {
        return Err(Error::Precondition("prefix already reaches the next exceptional level".into()));
    }
    let h_blocks = jn - jz;
    let hs = tails(tree, h_blocks, tail_cap)?;
    let (p, pp, q, qp) = g.cf.mobius();
    let (p, pp, q, qp) = (
        crate::cf::ratio_f64(p, &1u32.into()),
        crate::cf::ratio_f64(pp, &1u32.into()),
        crate::cf::ratio_f64(q, &1u32.into()),
        crate::cf::ratio_f64(qp, &1u32.into()),
    );
    let mg = move |y: f64| (p * y + pp) / (q * y + qp);

    let evals: Vec<Result<TailEval>> = hs
        .par_iter()
        .map(|h| {
            let elems: Vec<Element> = h.iter().map(|&i| Element::A(tree.nubar.blocks[i].clone())).collect();
            let mut gh = g.clone();
            let mut rh = rep.clone();
            let mut hcf = FiniteCF::new();
            for i in h {
                let b = &tree.nubar.blocks[*i];
                gh.push_a(b)?;
                rh.push_a(b)?;
                for &c in b {
                    hcf.push_u64(c as u64)?;
                }
            }
            let lw_g = tree.relative_ln_weight(g, &elems)?;
            let lw_r = tree.relative_ln_weight(rep, &elems)?;
            let tg = tree.exceptional(&gh, stage + 1)?;
            let tr = tree.exceptional(&rh, stage + 1)?;
            let mut gap = Complex64::new(0.0, 0.0);
            if tg.gamma == tr.gamma {
                for b in tg.members(1 << 16)? {
                    let mut tail = hcf.clone();
                    tail.push(b)?;
                    let (a, c) = tail.cylinder_f64();
                    let wg = (lw_g - tg.ln_count()).exp();
                    let wr = (lw_r - tr.ln_count()).exp();
                    gap += e(-xi * mg(0.5 * (a + c))) * (wg - wr);
                }
            }
            Ok(TailEval {
                gamma_g: tg.gamma,
                gamma_r: tr.gamma,
                lw_g,
                lw_r,
                ln_k: ln_big(&interior_continuant(&hcf)),
                gap,
            })
        })
        .collect();
    let evals: Vec<TailEval> = evals.into_iter().collect::<Result<_>>()?;

    let eps = sched.epsilon;
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut identical = true;
    let mut t2g = Vec::new();
    let mut t2r = Vec::new();
    let mut gap = Complex64::new(0.0, 0.0);
    for t in &evals {
        lo = lo.max(t.ln_k / (1.0 + eps));
        hi = hi.min(t.ln_k / (1.0 - eps));
        identical &= t.lw_g == t.lw_r;
        if t.gamma_g != t.gamma_r {
            t2g.push(t.lw_g);
            t2r.push(t.lw_r);
        } else {
            gap += t.gap;
        }
    }
    let t2_mass_g = if t2g.is_empty() { 0.0 } else { ln_sum_exp(&t2g).exp() };
    let t2_mass_rep = if t2r.is_empty() { 0.0 } else { ln_sum_exp(&t2r).exp() };
    let ln_xi = xi.abs().ln();
    let thr = threshold.k * (-threshold.c_eps * eps * ln_xi).exp();
    Ok(ApproxErrorReport {
        box_index,
        member,
        stage: stage + 1,
        h_blocks,
        t_count: evals.len(),
        t2_count: t2g.len(),
        ln_theta_lo: lo,
        ln_theta_hi: hi,
        theta_exists: lo < hi,
        theta_large: hi > 5.0 * ln_xi,
        weights_identical: identical,
        t2_mass_g,
        t2_mass_rep,
        claim2_gap: gap.norm(),
        threshold: thr,
        pass: identical && t2_mass_g <= thr && t2_mass_rep <= thr,
    })
}

/// Sequence and weight of member `member` of box `box_index`.
pub fn member_seq(partition: &ClassPartition, box_index: usize, member: usize) -> Option<&AdmissibleSeq> {
    partition.boxes.get(box_index)?.members.get(member).map(|m| &m.seq)
}
