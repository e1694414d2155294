// Ball conditions: cylinder exponents by prefix kind, window exponents, the exact
// mass split at exceptional quotients, and the relative condition under a box representative.

use std::error::Error;

use cfmeasure::geometry::{alpha0, ball_condition_scan, lower_bound_scan, partition_classes, relative_ball_check, RelMode};
use cfmeasure::ledger::{desk_ball_options, desk_tree, frozen, DESK_XI};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tree = desk_tree()?;
    let scan = ball_condition_scan(&tree, &desk_ball_options(&tree))?;
    println!("window exponent beta_hat = {:.6} (deepest stage {})", scan.beta_hat, scan.deepest_stage);
    for k in &scan.kinds {
        println!("  {:?}: min exponent {:.6} over {} prefixes", k.kind, k.min_exponent, k.count);
    }
    println!("mass split identity error {}", scan.split_identity_err);
    if scan.split_identity_err != 0.0 {
        return Err("mass split is not exact".into());
    }

    let lb = lower_bound_scan(&tree, 8, 3)?;
    println!("worst ln lambda / ln |cyl| at depth 8: {:.4} ({})", lb.worst_ratio, lb.worst_key);

    let c = frozen();
    let p = partition_classes(&tree, DESK_XI.ln(), alpha0())?;
    let g = &p.boxes[0].rep().seq;
    let r = relative_ball_check(&tree, g, DESK_XI.ln(), alpha0(), RelMode::Bad, c.rel_ball_c_eps, c.rel_ball_ln_c, 14, 30)?;
    println!("relative condition under {}: beta_F = {:.4}, worst excess {:.4}, pass {}", g.key(), r.beta_f, r.worst_excess, r.pass);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
