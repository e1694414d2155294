// The tree measure on admissible sequences: exceptional sets at the terminal prefixes,
// log weights, child sums and certified pushforward brackets.

use std::error::Error;

use cfmeasure::ledger::desk_tree;
use cfmeasure::measure::{interval_from_f64, ln_sum_exp, Children};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tree = desk_tree()?;
    let j1 = tree.schedule.j(1);
    let g = tree.sample(j1, 1, 2)?.remove(0);
    println!("terminal prefix with {} blocks, K = {}", g.len(), g.cf.k());
    let t = match tree.children(&g)? {
        Children::B(t) => t,
        Children::A => return Err("prefix should be terminal".into()),
    };
    println!("T_1 = [{}, {}) with {} members", t.lo, t.hi, t.count);

    let lw = tree.ln_weight(&g)?;
    let kids: Vec<f64> = t.members(10)?.into_iter().map(|b| tree.ln_weight(&g.with_b(b)?)).collect::<Result<_, _>>()?;
    println!("ln lambda(G) = {lw:.12}; first child ln weight {:.12}", kids[0]);

    let a_prefix = tree.sample(3, 1, 4)?.remove(0);
    let lw_a = tree.ln_weight(&a_prefix)?;
    let child_sum = ln_sum_exp(
        &tree
            .nubar
            .blocks
            .iter()
            .map(|b| tree.ln_weight(&a_prefix.with_a(b)?))
            .collect::<Result<Vec<f64>, _>>()?,
    );
    println!("child sum at {}: |diff| = {:.2e}", a_prefix.key(), (child_sum - lw_a).abs());
    if (child_sum - lw_a).abs() > 1e-12 {
        return Err("child sum does not match the parent".into());
    }

    let (lo, hi) = interval_from_f64(1.3, 1.4)?;
    let br = tree.pushforward_interval(&lo, &hi, 6)?;
    println!("lambda([1.3, 1.4]) in [{:.6}, {:.6}]", br.lower_mass(), br.upper_mass());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
