//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero when a
//! criterion outside `KNOWN_RED` fails, or when a known red one unexpectedly passes.

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cfmeasure::admissible::AdmissibleSeq;
use cfmeasure::cf::{concat_continuant_bounds, continuant, continuant_matrix, continuant_u128, FiniteCF};
use cfmeasure::fourier::eval::{decay_scan, max_table_diff, read_decay_csv};
use cfmeasure::geometry::{alpha0, alpha1, ball_condition_scan, classify_scale, AlphaPolicy, PrefixKind, ScaleKind};
use cfmeasure::harness::{self, checks, Pipeline, RunConfig};
use cfmeasure::ledger::{self, desk_tree, frozen, DECAY_MAX_DEPTH, DECAY_TARGET, DESK_XI};
use cfmeasure::measure::{ln_sum_exp, Children, MeasureTree};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Criteria that cannot be met at the desk configuration; see the decisions ledger.
const KNOWN_RED: [u32; 2] = [4, 6];

const LOG_TOL: f64 = 1e-12;
const EXPONENT_TOL: f64 = 0.02;
const M2_REL_TOL: f64 = 1e-6;
const GOLDEN_TOL: f64 = 1e-9;
const PROPERTY_A_FACTOR: f64 = 2.0;
const MIN_THINNED_MASS: f64 = 0.5;

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn(&MeasureTree) -> Outcome;

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn fail(e: impl std::fmt::Display) -> Outcome {
    outcome(false, format!("error: {e}"))
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let tree = match desk_tree() {
        Ok(t) => t,
        Err(e) => {
            println!("acceptance: desk tree failed to build: {e}");
            return ExitCode::FAILURE;
        }
    };
    println!("acceptance: desk tree built in {:.2?}", t0.elapsed());
    let criteria: [(u32, &str, u64, Check); 14] = [
        (1, "cf kernel exactness", 10, c1_kernel),
        (2, "gluing bounds", 30, c2_gluing),
        (3, "encoding claims", 120, c3_encoding),
        (4, "thinned block measure properties", 60, c4_blocks),
        (5, "measure conservation", 60, c5_conservation),
        (6, "continuant growth induction", 60, c6_growth),
        (7, "ball conditions", 300, c7_balls),
        (8, "scale machinery", 120, c8_scales),
        (9, "van der Corput bounds", 300, c9_vdc),
        (10, "m2 dual computation", 300, c10_m2),
        (11, "quantitative combination", 120, c11_qr),
        (12, "approximation-error diagnostics", 180, c12_diag),
        (13, "Fourier decay and reference table", 900, c13_decay),
        (14, "reproducibility", 120, c14_repro),
    ];
    let mut bad = Vec::new();
    for (id, name, budget, f) in criteria {
        let t = Instant::now();
        let mut o = f(&tree);
        let el = t.elapsed();
        if el > Duration::from_secs(budget) {
            o.pass = false;
            let _ = write!(o.detail, "; runtime {el:.1?} over {budget} s");
        }
        let red = KNOWN_RED.contains(&id);
        let tag = match (o.pass, red) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known red)",
            (false, false) => "FAIL",
        };
        println!("[{id:>2}] {tag:<16} {name} ({el:.2?}): {}", o.detail);
        if o.pass == red {
            bad.push(id);
        }
    }
    if bad.is_empty() {
        println!("acceptance: all criteria as expected ({:.1?})", t0.elapsed());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {bad:?}");
        ExitCode::FAILURE
    }
}

/// Backward evaluation `c_t, c_{t-1} + 1/., ...`, independent of the cached matrix.
fn eval_backward(qs: &[u64]) -> BigRational {
    let mut v = BigRational::from_integer(BigInt::from(*qs.last().unwrap()));
    for &c in qs[..qs.len() - 1].iter().rev() {
        v = BigRational::from_integer(BigInt::from(c)) + v.recip();
    }
    v
}

fn kernel_case(qs: &[u64]) -> Result<(), String> {
    let cf = FiniteCF::from_slice(qs).map_err(|e| e.to_string())?;
    let sign = if qs.len().is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    if cf.determinant() != sign {
        return Err(format!("determinant {:?}", qs));
    }
    if continuant(qs) != continuant_matrix(qs) || cf.p() != &continuant(qs) || cf.k() != continuant(&qs[1..]) {
        return Err(format!("continuant {:?}", qs));
    }
    let k = continuant(&qs[1..]);
    let kp = if qs.len() == 1 { BigUint::from(0u32) } else { continuant(&qs[1..qs.len() - 1]) };
    let mut bumped = qs.to_vec();
    *bumped.last_mut().unwrap() += 1;
    let width = (eval_backward(qs) - eval_backward(&bumped)).abs();
    let want = BigRational::new(BigInt::one(), BigInt::from(&k * (&k + &kp)));
    let cyl = cf.cylinder().map_err(|e| e.to_string())?;
    if width != want || cyl.width() != want || cf.value().ok() != Some(eval_backward(qs)) {
        return Err(format!("cylinder width {:?}", qs));
    }
    Ok(())
}

fn all_words(max_entry: u64, len: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| (1..=max_entry).map(move |c| {
                let mut v = w.clone();
                v.push(c);
                v
            }))
            .collect();
    }
    out
}

fn c1_kernel(_: &MeasureTree) -> Outcome {
    let mut inputs: Vec<Vec<u64>> = (1..=6).flat_map(|l| all_words(4, l)).collect();
    let exhaustive = inputs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..10_000 {
        let len = rng.gen_range(1..=30);
        inputs.push((0..len).map(|_| if rng.gen_bool(0.1) { rng.gen_range(1..1_000_000_000) } else { rng.gen_range(1..20) }).collect());
    }
    let errs: Vec<String> = inputs.par_iter().filter_map(|q| kernel_case(q).err()).collect();
    outcome(
        errs.is_empty(),
        format!("{exhaustive} exhaustive + 10000 random inputs, {} failures{}", errs.len(), errs.first().map(|e| format!(", first {e}")).unwrap_or_default()),
    )
}

fn c2_gluing(_: &MeasureTree) -> Outcome {
    let mut pairs = 0usize;
    let mut failures = 0usize;
    for n in 1..=4u64 {
        let words: Vec<Vec<u64>> = (1..=5).flat_map(|l| all_words(n, l)).collect();
        let cfs: Vec<FiniteCF> = words.iter().map(|w| FiniteCF::from_slice(w).unwrap()).collect();
        let f: usize = words
            .par_iter()
            .zip(&cfs)
            .map(|(gw, g)| {
                let mut bad = 0;
                for (hw, h) in words.iter().zip(&cfs) {
                    let c = concat_continuant_bounds(g, h, n).unwrap();
                    let joined: Vec<u32> = gw[1..].iter().chain(hw).map(|&x| x as u32).collect();
                    let oracle = BigUint::from(continuant_u128(&joined).unwrap());
                    if !c.holds || c.actual != oracle {
                        bad += 1;
                    }
                }
                bad
            })
            .sum();
        pairs += words.len() * words.len();
        failures += f;
    }
    outcome(failures == 0, format!("{pairs} pairs over N = 1..4, {failures} failures"))
}

fn c3_encoding(tree: &MeasureTree) -> Outcome {
    let depth = tree.schedule.j(2) + 2;
    match checks::encoding_check(tree, 1000, depth, 7) {
        Ok(r) => outcome(
            r.exceptional_failures == 0 && r.side_failures == 0 && r.typical_failures == 0 && r.exceptional_checked >= 2000,
            format!(
                "{} samples of {} elements: exceptional {}/{} ok, side failures {}, typical {}/{} ok",
                r.samples,
                r.depth,
                r.exceptional_checked - r.exceptional_failures,
                r.exceptional_checked,
                r.side_failures,
                r.typical_checked - r.typical_failures,
                r.typical_checked
            ),
        ),
        Err(e) => fail(e),
    }
}

fn c4_blocks(tree: &MeasureTree) -> Outcome {
    let b = checks::block_summary(tree);
    let a_ok = b.property_a_factor.is_some_and(|f| f <= PROPERTY_A_FACTOR);
    let b_ok = b.property_b == Some(true);
    let m_ok = b.thinned_mass >= MIN_THINNED_MASS;
    outcome(
        a_ok && b_ok && m_ok,
        format!(
            "support {}, (a) factor {:?} (need <= {PROPERTY_A_FACTOR}), (b) {:?}, thinned mass {:.4} (need >= {MIN_THINNED_MASS})",
            b.support, b.property_a_factor, b.property_b, b.thinned_mass
        ),
    )
}

fn conservation_case(tree: &MeasureTree, node: &AdmissibleSeq, split: usize) -> Result<[f64; 3], String> {
    let e = |e: cfmeasure::error::Error| e.to_string();
    let lw = tree.ln_weight(node).map_err(e)?;
    // child sum
    let child_err = match tree.children(node).map_err(e)? {
        Children::A => {
            let ws: Vec<f64> = tree.nubar.blocks.iter().map(|b| tree.ln_weight(&node.with_a(b).unwrap()).unwrap()).collect();
            (ln_sum_exp(&ws) - lw).abs()
        }
        Children::B(t) => {
            let mut worst: f64 = 0.0;
            for b in [t.lo.clone(), &t.hi - 1u32] {
                let w = tree.ln_weight(&node.with_b(b).map_err(e)?).map_err(e)?;
                worst = worst.max((w + t.ln_count() - lw).abs());
            }
            worst
        }
    };
    // product rule across a split point
    let mut g = AdmissibleSeq::new();
    for el in &node.elems[..split] {
        match el {
            cfmeasure::admissible::Element::A(b) => g.push_a(b).map_err(e)?,
            cfmeasure::admissible::Element::B(b) => g.push_b(b.clone()).map_err(e)?,
        }
    }
    let rel = tree.relative_ln_weight(&g, &node.elems[split..]).map_err(e)?;
    let prod_err = (tree.ln_weight(&g).map_err(e)? + rel - lw).abs();
    // pushforward of the cylinder
    let cyl = node.cf.cylinder().map_err(e)?;
    let br = tree.pushforward_interval(&cyl.lo, &cyl.hi, node.len()).map_err(e)?;
    let push_err = (br.lower - lw).abs().max((br.upper - lw).abs());
    let scale = lw.abs().max(1.0);
    Ok([child_err / scale, prod_err / scale, push_err / scale])
}

fn c5_conservation(tree: &MeasureTree) -> Outcome {
    let sched = &tree.schedule;
    let nodes: Vec<(AdmissibleSeq, usize)> = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(500 + i);
            // half the nodes sit just past an exceptional entry
            let depth = if i % 2 == 0 { rng.gen_range(1..=30) } else { sched.j(1) + rng.gen_range(1..=4) };
            let s = tree.sample_one(depth, &mut rng).unwrap();
            let split = rng.gen_range(0..=s.len());
            (s, split)
        })
        .collect();
    let with_b = nodes.iter().filter(|(s, _)| s.b_count > 0).count();
    let res: Vec<Result<[f64; 3], String>> = nodes.par_iter().map(|(s, k)| conservation_case(tree, s, *k)).collect();
    let mut worst = [0.0f64; 3];
    for r in res {
        match r {
            Ok(v) => {
                for i in 0..3 {
                    worst[i] = worst[i].max(v[i]);
                }
            }
            Err(e) => return fail(e),
        }
    }
    let ok = worst.iter().all(|&w| w <= LOG_TOL);
    outcome(
        ok,
        format!(
            "1000 nodes ({with_b} past an exceptional entry): child-sum {:.1e}, product {:.1e}, pushforward {:.1e} (tol {LOG_TOL:e}, relative in log space)",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn c6_growth(tree: &MeasureTree) -> Outcome {
    match checks::growth_summary(tree, 100, tree.schedule.j(1) + 4, 9) {
        Ok(g) => outcome(
            g.passed == g.samples,
            format!(
                "{}/{} pass, heart failures {}, spade failures {}{}",
                g.passed,
                g.samples,
                g.heart_failures,
                g.spade_failures,
                g.first_failure.map(|f| format!(", first: {f}")).unwrap_or_default()
            ),
        ),
        Err(e) => fail(e),
    }
}

fn c7_balls(tree: &MeasureTree) -> Outcome {
    let c = frozen();
    let scan = match ball_condition_scan(tree, &ledger::desk_ball_options(tree)) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let kind = |k: PrefixKind| scan.kinds.iter().find(|e| e.kind == k).map(|e| e.min_exponent).unwrap_or(f64::NAN);
    let cmp = [
        ("beta_hat", scan.beta_hat, c.beta_hat),
        ("terminal-a", kind(PrefixKind::TerminalA), c.exp_terminal_a),
        ("b-seq", kind(PrefixKind::BSeq), c.exp_b_seq),
        ("general-a", kind(PrefixKind::GeneralA), c.exp_general_a),
    ];
    let within = cmp.iter().all(|(_, got, want)| (got - want).abs() <= EXPONENT_TOL);
    let ok = within && scan.split_identity_err == 0.0 && scan.deepest_stage >= 2;
    let parts: Vec<String> = cmp.iter().map(|(n, g, w)| format!("{n} {g:.6} vs {w:.6}")).collect();
    outcome(
        ok,
        format!("{} (tol {EXPONENT_TOL}); split error {:e}; deepest stage {}", parts.join(", "), scan.split_identity_err, scan.deepest_stage),
    )
}

fn c8_scales(tree: &MeasureTree) -> Outcome {
    let sched = &tree.schedule;
    let (s, e, t) = (sched.sigma, sched.epsilon, sched.tau);
    let windows: Vec<(f64, f64)> = (1..=3).map(|k| {
        let j = sched.j(k) as f64;
        ((1.0 - 2.0 * e) * j * s, (t - 1.0 + 2.0 * e) * j * s)
    }).collect();
    let oracle = |lz: f64| windows.iter().position(|&(lo, hi)| lo <= lz && lz <= hi).map(|i| i + 1);
    let top = windows[1].1 * 1.5;
    let mut mismatches = 0;
    for i in 0..1000 {
        let lz = (1e-2f64.ln() + (top.ln() - 1e-2f64.ln()) * i as f64 / 999.0).exp();
        let got = match classify_scale(lz, sched) {
            Ok(c) => c.kind,
            Err(err) => return fail(err),
        };
        let want = oracle(lz);
        let agree = match (got, want) {
            (ScaleKind::Typical, None) => true,
            (ScaleKind::Exceptional { k }, Some(w)) => k == w,
            _ => false,
        };
        mismatches += usize::from(!agree);
    }
    // escape: alpha0 ln xi exceptional => alpha1 ln xi typical
    let (a0, a1) = (alpha0(), alpha1(t, e));
    let xi_top = windows[1].1 / a0 * 1.05;
    let (mut escapes, mut escape_fail) = (0, 0);
    for i in 0..1000 {
        let lx = 1.0 + (xi_top - 1.0) * i as f64 / 999.0;
        if oracle(a0 * lx).is_some() {
            escapes += 1;
            escape_fail += usize::from(oracle(a1 * lx).is_some());
        }
    }
    // partition windows
    let mut members = 0;
    let mut win_fail = 0;
    for xi in [1e4, 1e5, DESK_XI] {
        match checks::partition_summaries(tree, xi) {
            Ok(ps) => {
                for p in ps {
                    members += p.members;
                    win_fail += p.ratio_failures;
                    win_fail += usize::from(p.k_window_margin < 0.0 || p.cyl_window_margin < 0.0);
                }
            }
            Err(err) => return fail(err),
        }
    }
    outcome(
        mismatches == 0 && escapes > 0 && escape_fail == 0 && win_fail == 0 && members > 0,
        format!(
            "sweep 1000 scales, {mismatches} mismatches; escape {}/{escapes} ok; windows over {members} members, {win_fail} failures",
            escapes - escape_fail
        ),
    )
}

fn c9_vdc(tree: &MeasureTree) -> Outcome {
    let c = frozen();
    let v = match checks::vdc_suite(2, 1000, c.vdc_stationary_k) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let m = match checks::m2_suite(tree, &c, 10) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let (c1, c2): (usize, usize) = m.boxes.iter().fold((0, 0), |a, b| (a.0 + b.c1_pairs, a.1 + b.c2_pairs));
    outcome(
        v.nonstationary_failures == 0 && v.stationary_failures == 0 && m.pair_failures == 0 && c1 + c2 > 0,
        format!(
            "synthetic 1000+1000: {} + {} violations (K {}); desk pairs C1 {c1}, C2 {c2}: {} violations",
            v.nonstationary_failures, v.stationary_failures, v.stationary_k, m.pair_failures
        ),
    )
}

fn c10_m2(tree: &MeasureTree) -> Outcome {
    match checks::m2_suite(tree, &frozen(), 10) {
        Ok(m) => outcome(
            !m.boxes.is_empty() && m.max_rel_diff <= M2_REL_TOL && m.recovery.pass && m.recovery.max_group as u32 <= m.recovery.n,
            format!(
                "{} boxes, max rel diff {:.2e} (tol {M2_REL_TOL:e}); recovery {} groups, largest {} (N = {}), {} mismatches",
                m.boxes.len(),
                m.max_rel_diff,
                m.recovery.groups,
                m.recovery.max_group,
                m.recovery.n,
                m.recovery.mismatches
            ),
        ),
        Err(e) => fail(e),
    }
}

fn c11_qr(tree: &MeasureTree) -> Outcome {
    let s = match checks::qr_suite(11, 100) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let q = match checks::qr_end_to_end(tree) {
        Ok(q) => q,
        Err(e) => return fail(e),
    };
    let want_ln_r = -1000.0 * tree.schedule.epsilon * DESK_XI.ln();
    outcome(
        s.instances == 100 && s.passed == 100 && q.pass && (q.ln_r - want_ln_r).abs() < 1e-9,
        format!("randomized {}/{} of {} requested; desk instance beta {:.5}, pass {}", s.passed, s.instances, s.requested, q.beta, q.pass),
    )
}

fn c12_diag(tree: &MeasureTree) -> Outcome {
    match checks::diag_suite(tree, &frozen(), usize::MAX) {
        Ok(rs) => {
            let ident = rs.iter().all(|r| r.weights_identical);
            let pass = rs.iter().filter(|r| r.pass).count();
            let worst = rs.iter().map(|r| r.t2_mass_g / r.threshold).fold(0.0, f64::max);
            outcome(
                !rs.is_empty() && ident && pass == rs.len(),
                format!("{} boxes, weights identical {ident}, T2 below threshold {pass}/{}, worst mass/threshold {worst:.3}", rs.len(), rs.len()),
            )
        }
        Err(e) => fail(e),
    }
}

fn c13_decay(tree: &MeasureTree) -> Outcome {
    let scan = match decay_scan(tree, &ledger::desk_decay_grid(), AlphaPolicy::Adaptive, DECAY_TARGET, DECAY_MAX_DEPTH, 4_000_000) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let golden = read_decay_csv(include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/golden_decay.csv")));
    let diff = match golden.and_then(|g| max_table_diff(&scan.rows, &g)) {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    let slope = scan.slope.unwrap_or(f64::NAN);
    outcome(slope < 0.0 && diff <= GOLDEN_TOL, format!("slope {slope:.6} over {} points, reference max |diff| {diff:.1e} (tol {GOLDEN_TOL:e})", scan.rows.len()))
}

fn c14_repro(_: &MeasureTree) -> Outcome {
    let base = std::env::temp_dir().join(format!("cfmeasure-acceptance-{}", std::process::id()));
    let text = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/desk.toml"));
    let mut runs = Vec::new();
    for tag in ["a", "b"] {
        let mut cfg = match RunConfig::from_toml(text) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        cfg.output_dir = base.join(tag);
        let _ = fs::remove_dir_all(&cfg.output_dir);
        match harness::run(&cfg) {
            Ok(o) => runs.push(o),
            Err(e) => return fail(e),
        }
    }
    let mut differ = Vec::new();
    for p in Pipeline::ALL {
        let a = fs::read(runs[0].dir.join(p.artifact()));
        let b = fs::read(runs[1].dir.join(p.artifact()));
        match (a, b) {
            (Ok(a), Ok(b)) if a == b && !a.is_empty() => {}
            _ => differ.push(p.artifact()),
        }
    }
    let ma = serde_json::to_string(&runs[0].manifest.without_timing()).unwrap_or_default();
    let mb = serde_json::to_string(&runs[1].manifest.without_timing()).unwrap_or_default();
    if ma != mb {
        differ.push(harness::MANIFEST);
    }
    let _ = fs::remove_dir_all(&base);
    outcome(differ.is_empty(), format!("{} artifacts + manifest compared, differing: {differ:?}", Pipeline::ALL.len()))
}
