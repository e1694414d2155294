// Bounding `int |F| d mu` by `2r + (r/M)^beta (1 + m2 M r^-3)` when `mu` satisfies a
// ball condition: random certified instances, a measure where the lemma does not apply,
// and the desk instance.

use std::error::Error;

use cfmeasure::fourier::qr::{constant_f_r_range, qr_combine, random_instance, PieceMeasure};
use cfmeasure::harness::checks::qr_end_to_end;
use cfmeasure::ledger::desk_tree;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut passed = 0;
    let mut total = 0;
    for i in 0..10 {
        let Some(inst) = random_instance(11, i) else { continue };
        let m2 = inst.f.m2()?;
        let r = qr_combine(&|x| inst.f.eval(x).norm(), inst.f.deriv_bound(), m2, &inst.mu, inst.ln_r, Some(inst.beta))?;
        total += 1;
        passed += usize::from(r.pass);
        println!("instance {i}: lhs {:.4e}, ln rhs {:.3}", r.lhs, r.ln_rhs);
    }
    println!("{passed}/{total} pass");

    // a single atom violates every ball condition with beta > 0
    let atom = PieceMeasure::atoms(&[1.5], &[1.0]);
    match qr_combine(&|_| 1.0, 1.0, 1.0, &atom, -3.0, Some(0.5)) {
        Ok(_) => return Err("atom accepted".into()),
        Err(e) => println!("atom: {e}"),
    }
    let grid: Vec<f64> = (0..=60).map(|i| -6.0 + 0.1 * i as f64).collect();
    println!("F = 1, M = m2 = 1, beta = 1/2: bound informative for ln r in {:?}", constant_f_r_range(1.0, 1.0, 0.5, &grid));

    let tree = desk_tree()?;
    let e2e = qr_end_to_end(&tree)?;
    println!("desk instance: beta {:.5}, lhs {:.4e}, ln rhs {:.3}, pass {}", e2e.beta, e2e.lhs, e2e.ln_rhs, e2e.pass);
    if passed != total || !e2e.pass {
        return Err("combination bound failed".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
