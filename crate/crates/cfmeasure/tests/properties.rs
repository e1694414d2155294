use std::sync::OnceLock;

use cfmeasure::admissible::AdmissibleSeq;
use cfmeasure::cf::{cf_of_rational, concat_continuant_bounds, continuant, continuant_matrix, FiniteCF};
use cfmeasure::fourier::quad::{e, Iv};
use cfmeasure::geometry::{classify_scale, ScaleKind};
use cfmeasure::ledger::desk_tree;
use cfmeasure::measure::{ln_sum_exp, Children, MeasureTree};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

fn tree() -> &'static MeasureTree {
    static T: OnceLock<MeasureTree> = OnceLock::new();
    T.get_or_init(|| desk_tree().expect("desk tree"))
}

fn quotients() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..50, 1..12)
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn determinant_alternates(qs in quotients()) {
        let cf = FiniteCF::from_slice(&qs).unwrap();
        let want = if qs.len().is_multiple_of(2) { BigInt::from(1) } else { BigInt::from(-1) };
        prop_assert_eq!(cf.determinant(), want);
    }

    #[test]
    fn recurrence_matches_matrix_product(qs in quotients()) {
        prop_assert_eq!(continuant(&qs), continuant_matrix(&qs));
        let cf = FiniteCF::from_slice(&qs).unwrap();
        prop_assert_eq!(cf.p(), &continuant(&qs));
        prop_assert_eq!(cf.k(), continuant(&qs[1..]));
    }

    #[test]
    fn cylinder_width_is_reciprocal_continuant_product(qs in quotients()) {
        let cf = FiniteCF::from_slice(&qs).unwrap();
        let c = cf.cylinder().unwrap();
        let k = cf.k();
        let kk = &k + cf.k_prime();
        let want = BigRational::new(BigInt::one(), BigInt::from(k * kk));
        prop_assert_eq!(c.width(), want);
        let w = c.width();
        let ln_w = (w.numer().to_string().parse::<f64>().unwrap() / w.denom().to_string().parse::<f64>().unwrap()).ln();
        prop_assert!((cf.ln_cylinder_width() - ln_w).abs() < 1e-9);
    }

    #[test]
    fn value_lies_in_own_cylinder(qs in quotients()) {
        let cf = FiniteCF::from_slice(&qs).unwrap();
        let c = cf.cylinder().unwrap();
        prop_assert!(c.contains(&cf.value().unwrap()));
        prop_assert!(c.contains(&c.midpoint()));
    }

    #[test]
    fn child_cylinders_nest(qs in quotients(), d in 1u64..1000) {
        let cf = FiniteCF::from_slice(&qs).unwrap();
        let child = cf.extend(&big(d)).unwrap();
        prop_assert!(cf.cylinder().unwrap().contains_interval(&child.cylinder().unwrap()));
    }

    #[test]
    fn gluing_bounds_hold(g in quotients(), h0 in 1u64..=6, h in prop::collection::vec(1u64..50, 0..6)) {
        let g = FiniteCF::from_slice(&g).unwrap();
        let mut hq = vec![h0];
        hq.extend(h);
        let h = FiniteCF::from_slice(&hq).unwrap();
        prop_assert!(concat_continuant_bounds(&g, &h, 6).unwrap().holds);
    }

    #[test]
    fn rational_expansion_round_trips(num in 1u64..1_000_000_000, den in 1u64..1_000_000_000) {
        let (n, d) = if num >= den { (num, den) } else { (den, num) };
        let cf = cf_of_rational(&big(n), &big(d)).unwrap();
        let want = BigRational::new(BigInt::from(n), BigInt::from(d));
        prop_assert_eq!(cf.value().unwrap(), want);
    }

    #[test]
    fn ln_sum_exp_ignores_order(mut xs in prop::collection::vec(-700.0f64..700.0, 1..40), seed in any::<u64>()) {
        let a = ln_sum_exp(&xs);
        let mut s = seed;
        for i in (1..xs.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            xs.swap(i, (s >> 33) as usize % (i + 1));
        }
        let b = ln_sum_exp(&xs);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(a >= m && a <= m + (xs.len() as f64).ln() + 1e-12);
    }

    #[test]
    fn exponential_symmetry(x in -1e6f64..1e6) {
        let a = e(x);
        let b = e(-x);
        prop_assert!((a - b.conj()).norm() < 1e-9);
        prop_assert!((a.norm() - 1.0).abs() < 1e-12);
        prop_assert!((e(x + 1.0) - a).norm() < 1e-6);
    }

    #[test]
    fn interval_ops_contain_point_results(a in -1e3f64..1e3, b in -1e3f64..1e3, ra in 0.0f64..1.0, rb in 0.0f64..1.0, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let x = Iv::new(a, a + ra);
        let y = Iv::new(b, b + rb);
        let (px, py) = (a + s * ra, b + t * rb);
        let inside = |iv: Iv, v: f64| iv.lo <= v && v <= iv.hi;
        prop_assert!(inside(x.add(y), px + py));
        prop_assert!(inside(x.sub(y), px - py));
        prop_assert!(inside(x.mul(y), px * py));
        prop_assert!(inside(x.hull(y), px) && inside(x.hull(y), py));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scale_classification_partitions(ln_zeta in 0.01f64..2.0e5) {
        let sched = &tree().schedule;
        let c = classify_scale(ln_zeta, sched).unwrap();
        let (s, eps, tau) = (sched.sigma, sched.epsilon, sched.tau);
        let in_window = |k: usize| {
            let j = sched.j(k) as f64;
            (1.0 - 2.0 * eps) * j * s <= ln_zeta && ln_zeta <= (tau - 1.0 + 2.0 * eps) * j * s
        };
        let hits: Vec<usize> = (1..=sched.jk.len() + 1).filter(|&k| in_window(k)).collect();
        match c.kind {
            ScaleKind::Exceptional { k } => prop_assert_eq!(hits, vec![k]),
            ScaleKind::Typical => prop_assert!(hits.is_empty()),
        }
    }

    #[test]
    fn sampling_is_reproducible(seed in any::<u64>()) {
        let t = tree();
        let a = t.sample(5, 4, seed).unwrap();
        let b = t.sample(5, 4, seed).unwrap();
        prop_assert_eq!(a.iter().map(|s| s.key()).collect::<Vec<_>>(), b.iter().map(|s| s.key()).collect::<Vec<_>>());
        for s in &a {
            prop_assert!(t.ln_weight(s).unwrap().is_finite());
        }
    }

    #[test]
    fn children_weights_sum_to_parent(seed in any::<u64>(), depth in 0usize..6) {
        let t = tree();
        let parent = if depth == 0 { AdmissibleSeq::new() } else { t.sample(depth, 1, seed).unwrap().remove(0) };
        let lw = t.ln_weight(&parent).unwrap();
        let total = match t.children(&parent).unwrap() {
            Children::A => {
                let ws: Vec<f64> = t.nubar.blocks.iter().map(|b| t.ln_weight(&parent.with_a(b).unwrap()).unwrap()).collect();
                ln_sum_exp(&ws)
            }
            Children::B(set) => {
                // every exceptional child carries the same weight, so one child fixes the sum
                let child = parent.with_b(set.lo.clone()).unwrap();
                t.ln_weight(&child).unwrap() + set.ln_count()
            }
        };
        prop_assert!((total - lw).abs() < 1e-12 * lw.abs().max(1.0), "{} vs {}", total, lw);
    }
}
