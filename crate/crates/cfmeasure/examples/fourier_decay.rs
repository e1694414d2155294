// The Fourier transform of the measure: a certified cylinder sum, an independent Monte
// Carlo estimate, and the decay scan over a geometric grid with its fitted slope.

use std::error::Error;

use cfmeasure::fourier::eval::{decay_scan, fourier_cylinder_sum, fourier_monte_carlo, geometric_grid};
use cfmeasure::geometry::AlphaPolicy;
use cfmeasure::ledger::desk_tree;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tree = desk_tree()?;
    let xi = 1e3;
    let cs = fourier_cylinder_sum(&tree, xi, 12, 1e-3, 1_000_000)?;
    let mc = fourier_monte_carlo(&tree, xi, 100_000, 15, 7)?;
    let gap = (cs.value() - mc.value()).norm();
    println!("xi = {xi}: cylinder sum {:.6} (+- {:.1e})", cs.value(), cs.error_bound);
    println!("           Monte Carlo  {:.6} (+- {:.1e}), gap {gap:.2e}", mc.value(), mc.error_bound);
    if gap > cs.error_bound + 4.0 * mc.error_bound {
        return Err("estimates disagree".into());
    }

    let scan = decay_scan(&tree, &geometric_grid(1e2, 1e5, 16), AlphaPolicy::Adaptive, 1e-4, 15, 4_000_000)?;
    for r in scan.rows.iter().step_by(3) {
        println!("  xi {:>10.1}  |hat lambda| {:.4e}  ({}, alpha {:.3})", r.xi, r.modulus, r.scale_kind, r.alpha);
    }
    println!("depth {}, slope of ln|hat lambda| against ln xi: {:?}", scan.depth, scan.slope);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
