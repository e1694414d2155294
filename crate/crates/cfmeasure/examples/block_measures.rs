// Block measures: `nu_m` on words of length `m`, and the thinned measure concentrated
// where `ln K` sits near `J sigma`, with its two structural properties.

use std::error::Error;

use cfmeasure::measure::{build_nu_bar, build_nu_m, estimate_thinned_mass_sampled, NuBarOptions};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let nu = build_nu_m(6, 2, 0.2, 1_000_000)?;
    println!("nu_2 on {{1..6}}^2: {} words, total {:.15}", nu.len(), nu.total_mass());
    let top = nu
        .ln_weights
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or("empty")?;
    println!("heaviest word {:?} with mass {:.4}", nu.blocks[top], nu.ln_weights[top].exp());

    let opts = NuBarOptions { min_mass: 0.2, ..Default::default() };
    let bar = build_nu_bar(&nu, 1, &opts)?;
    println!(
        "thinned: support {:?}, sigma = {:.6}, mass {:.4}",
        bar.blocks,
        bar.sigma.unwrap_or(f64::NAN),
        bar.thinned_mass.unwrap_or(f64::NAN)
    );
    println!("property (a) factor {:?}, property (b) {:?}", bar.property_a_factor(), bar.property_b_holds());

    let (mean, se) = estimate_thinned_mass_sampled(&nu, 3, bar.sigma.ok_or("sigma")?, 20_000, 5);
    println!("sampled thinned mass at J = 3: {mean:.4} +- {se:.4}");
    if (nu.total_mass() - 1.0).abs() > 1e-12 {
        return Err("nu_m is not a probability measure".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
