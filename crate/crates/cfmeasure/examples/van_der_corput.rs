// Oscillatory integrals `int e(f)` against the two van der Corput bounds: the
// nonstationary one from `min |f'|` and `max |f''|`, and the stationary one with a
// frozen constant for `f' = (c1 x + c2) g`.

use std::error::Error;

use cfmeasure::fourier::vdc::{
    stationary_k_ceiling, vdc_nonstationary, vdc_stationary, FactoredPoly, PolyPhase,
};
use cfmeasure::ledger::frozen;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // f(x) = 40 x + 3 x^2 on [0, 2]: |f'| >= 40
    let f = PolyPhase::new(vec![0.0, 40.0, 3.0]);
    let r = vdc_nonstationary(&f, 0.0, 2.0)?;
    println!("nonstationary: |int| = {:.3e} <= {:.3e} ({})", r.modulus, r.bound, r.pass);

    // f'(x) = (50 x - 25)(1 + 0.1 x): stationary point at 1/2
    let k = frozen().vdc_stationary_k;
    let g = FactoredPoly::new(50.0, -25.0, vec![1.0, 0.1]);
    let s = vdc_stationary(&g, 0.0, 1.5, k)?;
    println!("stationary: |int| = {:.4e} <= {:.4e} with K = {k} ({})", s.modulus, s.bound, s.pass);
    println!("constant from the proof: {:.4}", stationary_k_ceiling());

    // a phase whose derivative changes sign is refused by the nonstationary bound
    match vdc_nonstationary(&PolyPhase::new(vec![0.0, -1.0, 1.0]), 0.0, 1.0) {
        Ok(_) => return Err("sign change was not detected".into()),
        Err(e) => println!("refused: {e}"),
    }
    if !(r.pass && s.pass) {
        return Err("bound violated".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
