// Hausdorff dimension of numbers with partial quotients at most `N`, bracketed from
// continuant statistics of words of growing length.

use std::error::Error;

use cfmeasure::geometry::dim_bad_estimate;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for n in [2u32, 3, 6] {
        let (lo, hi) = dim_bad_estimate(n, 6, 50_000_000)?;
        println!("N = {n}: dim in [{lo:.5}, {hi:.5}]");
    }
    // the dimension for N = 2 is 0.5312805...
    let (lo, hi) = dim_bad_estimate(2, 10, 50_000_000)?;
    println!("N = 2, longer words: [{lo:.6}, {hi:.6}]");
    if !(lo <= 0.531_280_5 && 0.531_280_5 <= hi) {
        return Err("bracket misses the known value".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
