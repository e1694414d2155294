// Continued-fraction kernel: continuants, the Mobius map, cylinders and the gluing bounds.

use std::error::Error;

use cfmeasure::cf::{cf_of_rational, concat_continuant_bounds, continuant, continuant_matrix, FiniteCF};
use num_bigint::BigUint;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // 415/93 = [4; 2, 6, 7]
    let x = FiniteCF::from_slice(&[4, 2, 6, 7])?;
    println!("[{}] = {}", x.quotients_string(), x.value()?);
    println!("K = {}, K' = {}, det = {}", x.k(), x.k_prime(), x.determinant());
    let (p, pp, q, qp) = x.mobius();
    println!("M_G(y) = ({p} y + {pp}) / ({q} y + {qp})");

    let c = x.cylinder()?;
    println!("cylinder [{}, {}], width {}", c.lo, c.hi, c.width());

    let back = cf_of_rational(&BigUint::from(415u32), &BigUint::from(93u32))?;
    if back != x {
        return Err("round trip through the rational failed".into());
    }
    let entries = [3, 1, 4, 1, 5, 9, 2, 6];
    if continuant(&entries) != continuant_matrix(&entries) {
        return Err("recurrence and matrix continuants disagree".into());
    }
    println!("K(3,1,4,1,5,9,2,6) = {}", continuant(&entries));

    let g = FiniteCF::from_slice(&[2, 5, 1])?;
    let h = FiniteCF::from_slice(&[3, 3])?;
    let glue = concat_continuant_bounds(&g, &h, 6)?;
    println!("{} <= K(G.H) = {} <= {}", glue.lower, glue.actual, glue.upper);
    if !glue.holds {
        return Err("gluing bounds fail".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
