// The box function `F(x) = sum lambda(G) e(-xi M_G(x))`: its derivative bound, and
// `int |F|^2` computed directly and as a sum over pairs sorted into three phase cases.

use std::error::Error;

use cfmeasure::fourier::fxi::{build_f_xi, c3_recovery, m2_decompose, m_bound_check, M2Constants};
use cfmeasure::geometry::{alpha1, partition_classes_with_side, scale_members};
use cfmeasure::ledger::{desk_tree, frozen, COARSE_LN_SIDE, DESK_XI};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tree = desk_tree()?;
    let sched = &tree.schedule;
    let a1 = alpha1(sched.tau, sched.epsilon);
    let p = partition_classes_with_side(&tree, DESK_XI.ln(), a1, COARSE_LN_SIDE)?;
    let bi = p.boxes.iter().position(|b| b.members.len() >= 4 && b.members.len() <= 10).ok_or("no mid-sized box")?;
    let f = build_f_xi(&p, bi, DESK_XI, sched.n)?;
    println!("box {bi}: {} terms, mass {:.4e}", f.terms.len(), f.mass());

    let mb = m_bound_check(&f, a1, sched.epsilon, 50_000_000)?;
    println!("max |F'| = {:.4e}, bound {:.4e}", mb.m_numeric, mb.m_bound);

    let c = frozen();
    let consts = M2Constants { k_stationary: c.vdc_stationary_k, k_m2: c.m2_k, c_eps: c.m2_c_eps };
    let r = m2_decompose(&f, a1, sched.tau, sched.epsilon, &consts, 10_000)?;
    println!("m2: quadrature {:.10e}, pairwise {:.10e}, rel diff {:.2e}", r.m2_quadrature, r.m2_pairwise, r.rel_diff);
    println!("   C1 {:.3e}  C2 {:.3e}  C3 {:.3e} (diagonal {:.3e})", r.c1, r.c2, r.c3, r.diagonal);
    println!("   pair bounds hold: {}, m2 <= {:.3e}: {}", r.pair_bounds_pass, r.bound_rhs, r.pass);

    let members: Vec<_> = scale_members(&tree, &p.scale, 1_000_000)?.into_iter().map(|m| m.seq).collect();
    let rec = c3_recovery(&members, sched.n)?;
    println!("prefix recovery: {} groups, largest {}, mismatches {}", rec.groups, rec.max_group, rec.mismatches);
    if r.rel_diff > 1e-6 || !rec.pass {
        return Err("m2 decomposition check failed".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
