// A complete run from a TOML config into a temporary directory, followed by the report.

use std::error::Error;

use cfmeasure::harness::{report, run, RunConfig};

const CONFIG: &str = r#"
seed = 5
output_dir = "PLACEHOLDER"
pipelines = ["build", "decay-scan", "sample", "exactness"]

[psi]
form = "power"
tau = 2.5

[build]
depth = 6

[decay]
points = 8

[sample]
count = 50
"#;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = std::env::temp_dir().join(format!("cfmeasure-example-{}", std::process::id()));
    let cfg = RunConfig::from_toml(&CONFIG.replace("PLACEHOLDER", &dir.display().to_string()))?;
    println!("config hash {}", cfg.hash());
    let out = run(&cfg)?;
    for (name, hash) in &out.manifest.artifacts {
        println!("  {name}  {}", &hash[..16]);
    }
    let r = report(&out.dir, None)?;
    print!("{}", r.text);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
