// Approximation profiles: `rho(q) = 1/(q^2 psi(q))` with certified enclosures, the
// exceptional and typical follow-up witnesses, and the default `Q_1`.

use std::error::Error;

use cfmeasure::cf::{rational_f64, FiniteCF};
use cfmeasure::profile::{check_claim1, check_claim2, default_q1, ApproxProfile, ProfileForm};
use num_bigint::BigUint;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let psi = ApproxProfile::power(2.5);
    let r = psi.report(60.0);
    println!("tau = {}, q^2 psi <= 1: {}, q^2 psi -> 0: {}", r.tau_limit, r.q2psi_le_one, r.q2psi_trend_to_zero);
    for q in [10u64, 1000, 1_000_000] {
        let lr = psi.ln_rho(&BigUint::from(q))?;
        println!("ln rho({q}) in [{:.12}, {:.12}]", lr.lo, lr.hi);
    }

    let with_log = ApproxProfile { form: ProfileForm::PowerLog { tau: 2.5, log_exp: 1.0 } };
    println!("power-log tau limit {}", with_log.tau_limit());
    println!("default Q_1 at eta = 1/2: {:?}", default_q1(&psi, 0.5));

    // a prefix with a large continuant and the exceptional quotient it calls for
    let quotients: Vec<u64> = (0..40).map(|i| 1 + i % 2).collect();
    let prefix = FiniteCF::from_slice(&quotients)?;
    let (rho_lo, _) = psi.rho_bracket(&prefix.k())?;
    let b = (rho_lo * num_rational::BigRational::from_float(1.0 + 0.5 / 75.0).ok_or("float")?).floor().to_integer();
    let b = b.to_biguint().ok_or("negative")?;
    let w = check_claim1(&prefix, &b, 0.5, &psi)?;
    println!(
        "b = {b}: gap in [{:.3e}, {:.3e}], targets [{:.3e}, {:.3e}], holds {}",
        rational_f64(&w.min_gap),
        rational_f64(&w.max_gap),
        rational_f64(&w.lower_target),
        rational_f64(&w.upper_target),
        w.holds
    );
    if !w.holds {
        return Err("exceptional follow-up failed".into());
    }
    let t = check_claim2(&prefix, 3, 6)?;
    println!("typical follow-up a = 3: holds {}", t.holds);
    if !t.holds {
        return Err("typical follow-up failed".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
