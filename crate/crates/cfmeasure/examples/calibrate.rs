// Refits the constants ledger on the desk configuration and regenerates the reference
// decay table. Prints the comparison; pass `--write` to overwrite the committed files.

use std::error::Error;
use std::fs::File;

use cfmeasure::fourier::eval::{decay_scan, write_decay_csv};
use cfmeasure::geometry::AlphaPolicy;
use cfmeasure::ledger::{self, DECAY_MAX_DEPTH, DECAY_TARGET};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    run(false)
}

fn run(write: bool) -> Result<(), Box<dyn Error>> {
    let tree = ledger::desk_tree()?;
    let fresh = ledger::calibrate(&tree)?;
    let frozen = ledger::frozen();
    println!("fitted:\n{}", serde_json::to_string_pretty(&fresh)?);
    println!("matches committed ledger: {}", fresh == frozen);
    if write {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
        std::fs::write(format!("{dir}/constants.json"), serde_json::to_string_pretty(&fresh)? + "\n")?;
        let scan = decay_scan(&tree, &ledger::desk_decay_grid(), AlphaPolicy::Adaptive, DECAY_TARGET, DECAY_MAX_DEPTH, 4_000_000)?;
        write_decay_csv(File::create(format!("{dir}/golden_decay.csv"))?, "reference decay table, desk configuration", &scan.rows)?;
        println!("wrote {dir}/constants.json and {dir}/golden_decay.csv");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run(std::env::args().any(|a| a == "--write"))
}
