// Exact-order check for a deep sample: every denominator up to twice the continuant
// just before the first exceptional quotient is classified against `psi` and `(1 - c) psi`.

use std::error::Error;

use cfmeasure::ledger::desk_tree;
use cfmeasure::profile::{exactness_scan, ConvergentClass};
use num_traits::ToPrimitive;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tree = desk_tree()?;
    let j1 = tree.schedule.j(1);
    let x = tree.sample(j1 + 13, 1, 7)?.remove(0);
    let before_b = &x.prefixes()[j1 - 1];
    let q_max = 2 * before_b.cf.k().to_u64().ok_or("continuant too large")?;
    let report = exactness_scan(&x.cf, &tree.profile, 0.5, q_max, 1 << 20)?;
    println!("q_max = {q_max}, hits = {:?}", report.hits);
    println!("lower violations past Q(c) = {}", report.lower_violations.len());
    for row in &report.per_convergent {
        if row.class == ConvergentClass::ExceptionalHit {
            println!("hit at convergent {} (q = {}): gap {:.3e} <= psi {:.3e}", row.n, row.q, row.gap, row.psi);
        }
    }
    if !report.verdict_upper || !report.verdict_lower {
        return Err("exact-order check failed".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
