// Digit statistics of sampled points in several bases, a rational control with its
// period detected, and partial sums of the double exponential sum criterion.

use std::error::Error;

use cfmeasure::fourier::eval::CylinderTable;
use cfmeasure::fourier::normality::{del_partial_sums, normality_diagnostics, NormalityInput};
use cfmeasure::ledger::desk_tree;
use num_bigint::BigUint;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tree = desk_tree()?;
    let depth = tree.schedule.j(1) + 5;
    let inputs: Vec<NormalityInput> = tree.sample(depth, 100, 9)?.into_iter().map(|s| NormalityInput::Cylinder(s.cf)).collect();
    for b in normality_diagnostics(&inputs, &[2, 10], 20)? {
        println!("base {:>2}: digit chi2 {:.2} (p {:.3}), digraph chi2 {:.2} (p {:.3})", b.base, b.digit_chi2.statistic, b.digit_chi2.p_value, b.digraph_chi2.statistic, b.digraph_chi2.p_value);
    }

    let control = [NormalityInput::Rational(BigUint::from(1u32), BigUint::from(7u32))];
    let r = &normality_diagnostics(&control, &[10], 30)?[0];
    println!("1/7 in base 10: periodic inputs {:?}, digit counts {:?}", r.periodic, r.digit_counts);

    let table = CylinderTable::from_tree(&tree, 10, 1_000_000)?;
    let rows = del_partial_sums(&table, 2, 1.0, 8);
    for row in &rows {
        println!("  N = {}: term {:.4e}, partial sum {:.6} (+- {:.1e})", row.n, row.term, row.partial_sum, row.error);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
