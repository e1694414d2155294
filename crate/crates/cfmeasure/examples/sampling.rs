// Reproducible sampling: every draw uses its own stream of one seed. Also shows the
// growth-bound report for a sample and sampling inside a cylinder.

use std::error::Error;

use cfmeasure::admissible::verify_growth;
use cfmeasure::ledger::desk_tree;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tree = desk_tree()?;
    let depth = tree.schedule.j(1) + 3;
    let a = tree.sample(depth, 5, 42)?;
    let b = tree.sample(depth, 5, 42)?;
    if a != b {
        return Err("same seed produced different samples".into());
    }
    for s in &a {
        println!("{}  x = {:.15}", s.key(), s.cf.value_f64());
    }

    let r = verify_growth(&a[0], &tree.schedule);
    println!("growth bounds: heart {}, spade {}", r.heart, r.spade);
    if let Some(f) = &r.first_failure {
        println!("  first miss: {f}");
    }

    let g = &a[0].prefixes()[4];
    let inside = tree.sample_from(g, 8, 3, 7)?;
    for s in &inside {
        println!("under {}: {}", g.key(), s.key());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
