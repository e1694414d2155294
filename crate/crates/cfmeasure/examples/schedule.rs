// Schedules: the exceptional levels `j_k`, the shrinking `eta_k`, and the growth
// constraints with their verdicts. Aggressive parameters are rejected with a reason.

use std::error::Error;

use cfmeasure::admissible::{default_schedule, ScheduleParams};
use cfmeasure::profile::ApproxProfile;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let psi = ApproxProfile::power(2.5);
    let s = default_schedule(&psi, &ScheduleParams::desk())?;
    println!("N = {}, eps = {}, sigma = {:.6}, thinned mass {:.4}", s.n, s.epsilon, s.sigma, s.thinned_mass);
    for k in 1..=s.levels() {
        println!("level {k}: j = {}, eta = {}", s.j(k), s.eta(k));
    }
    println!("next level beyond the budget: j = {}", s.j(s.levels() + 1));
    for c in &s.growth_checks {
        let tag = if c.passed { "ok" } else if c.hard { "FAIL" } else { "flag" };
        println!("  [{tag}] {}: {}", c.name, c.detail);
    }

    // two blocks per level cannot reach the default minimum mass of 1/2 at N = 6
    let strict = ScheduleParams { j_blocks: 2, ..ScheduleParams::new(6, 2, 2, 0.2, 2) };
    match default_schedule(&psi, &strict) {
        Ok(s) => println!("J = 2 accepted with mass {:.4}", s.thinned_mass),
        Err(e) => println!("J = 2 rejected: {e} (exit code {})", e.exit_code()),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
