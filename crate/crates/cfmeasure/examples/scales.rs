// Scales: typical versus exceptional continuant scales, the adaptive exponent, and the
// partition of the typical-scale prefixes into boxes by `(K, K')`.

use std::error::Error;

use cfmeasure::geometry::{alpha0, alpha1, choose_alpha, classify_scale, partition_classes, AlphaPolicy};
use cfmeasure::ledger::{desk_tree, DESK_XI};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tree = desk_tree()?;
    let sched = &tree.schedule;
    for lz in [2.0, 10.0, 30.0, 80.0, 5000.0] {
        let c = classify_scale(lz, sched)?;
        println!("ln zeta = {lz:>6}: {:?}, stage {}, j(zeta) = {:?}", c.kind, c.stage, c.j_zeta);
    }
    println!("alpha0 = {:.6}, alpha1 = {:.6}", alpha0(), alpha1(sched.tau, sched.epsilon));
    for ln_xi in [DESK_XI.ln(), 100.0] {
        let ch = choose_alpha(ln_xi, sched, AlphaPolicy::Adaptive)?;
        println!("ln xi = {ln_xi:.2}: first {:?}, using alpha = {:.4} ({:?})", ch.first.kind, ch.alpha, ch.chosen.kind);
    }

    let p = partition_classes(&tree, DESK_XI.ln(), alpha1(sched.tau, sched.epsilon))?;
    println!(
        "partition at xi = 1e6: {} members in {} boxes, window margins K {:.3} cyl {:.3}, ratio failures {}",
        p.member_count,
        p.boxes.len(),
        p.k_window_margin,
        p.cyl_window_margin,
        p.ratio_failures
    );
    let b = &p.boxes[0];
    println!("first box (M1, M2) = ({:.3}, {:.3}) holds {}", b.ln_m1.exp(), b.ln_m2.exp(), b.members.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
