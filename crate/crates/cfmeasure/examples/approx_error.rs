// Replacing `lambda_G` by the box representative's relative measure: tails reaching the
// next exceptional level, the exceptional part of them, and the Fourier-side gap.

use std::error::Error;

use cfmeasure::fourier::diag::{approx_error_diagnostics, T2Threshold};
use cfmeasure::geometry::{alpha0, partition_classes, partition_classes_with_side};
use cfmeasure::ledger::{desk_tree, frozen, COARSE_LN_SIDE, DESK_XI};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tree = desk_tree()?;
    let c = frozen();
    let th = T2Threshold { k: c.t2_k, c_eps: c.t2_c_eps };
    let p = partition_classes(&tree, DESK_XI.ln(), alpha0())?;
    let d = approx_error_diagnostics(&tree, &p, 0, 0, DESK_XI, th, 1 << 20)?;
    println!(
        "natural boxes: {} tails of {} blocks, {} exceptional, weights identical {}, gap {:.2e}, pass {}",
        d.t_count, d.h_blocks, d.t2_count, d.weights_identical, d.claim2_gap, d.pass
    );

    // coarse boxes mix continuants, and at this frequency every tail is exceptional
    let a1 = cfmeasure::geometry::alpha1(tree.schedule.tau, tree.schedule.epsilon);
    let pc = partition_classes_with_side(&tree, DESK_XI.ln(), a1, COARSE_LN_SIDE)?;
    let bi = pc.boxes.iter().position(|b| b.members.len() > 1).ok_or("no shared box")?;
    let last = pc.boxes[bi].members.len() - 1;
    let dc = approx_error_diagnostics(&tree, &pc, bi, last, DESK_XI, th, 1 << 20)?;
    println!(
        "coarse box {bi}: exceptional mass {:.3} vs threshold {:.3e}, theta window [{:.2}, {:.2}]",
        dc.t2_mass_g, dc.threshold, dc.ln_theta_lo, dc.ln_theta_hi
    );
    if !d.weights_identical {
        return Err("relative weights differ".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
