use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use walk_decay::asymptotics::{periodicity, tau_both, DomainDescription, Periodicity};
use walk_decay::geometry::{branch, GeometrySummary, Root};
use walk_decay::model::{drift_vectors, JumpKernel, ModelSpec, Region};
use walk_decay::report::round_sig;
use walk_decay::sample::{random_stable_model, random_valid_model};
use walk_decay::stability::{assess, drift_stability};

fn stable(seed: u64) -> ModelSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_stable_model(&mut rng, 1 + (seed % 2) as i64, (0.1, 4.0))
}

fn valid(seed: u64) -> ModelSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_valid_model(&mut rng, 1 + (seed % 2) as i64)
}

fn domain(m: &ModelSpec) -> DomainDescription {
    DomainDescription::new(GeometrySummary::compute(&m.surfaces()).unwrap()).unwrap()
}

const REGIONS: [Region; 4] = [Region::Interior, Region::Face1, Region::Face2, Region::Origin];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mgf_is_one_at_origin_and_convex(seed in any::<u64>(), a in prop::array::uniform2(-1.5f64..1.5), b in prop::array::uniform2(-1.5f64..1.5)) {
        let m = valid(seed);
        for r in REGIONS {
            let g = m.kernel(r).mgf();
            prop_assert!((g.value([0.0, 0.0]) - 1.0).abs() < 1e-12);
            let mid = g.value([(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]);
            prop_assert!(mid <= 0.5 * (g.value(a) + g.value(b)) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn drifts_are_kernel_means(seed in any::<u64>()) {
        let m = valid(seed);
        let d = drift_vectors(&m);
        for (v, k) in [(d.m, m.interior()), (d.m1, m.face1()), (d.m2, m.face2())] {
            let mean = k.atoms().iter().fold([0.0, 0.0], |acc, a| [acc[0] + a.p * a.dx as f64, acc[1] + a.p * a.dy as f64]);
            prop_assert!((v[0] - mean[0]).abs() < 1e-12 && (v[1] - mean[1]).abs() < 1e-12);
        }
        prop_assert_eq!(d.m1_perp, [d.m1[1], -d.m1[0]]);
        prop_assert_eq!(d.m2_perp, [-d.m2[1], d.m2[0]]);
    }

    #[test]
    fn spread_dominates_pointwise(seed in any::<u64>(), theta in prop::array::uniform2(-1.0f64..1.0), frac in 0.05f64..0.95) {
        let m = valid(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let k = m.kernel(REGIONS[rng.gen_range(0..4)]);
        let atom = k.atoms()[rng.gen_range(0..k.atoms().len())];
        let dir = [(1, 0), (0, 1), (1, 1), (1, -1)][rng.gen_range(0..4)];
        if let Ok(wider) = k.mean_preserving_spread((atom.dx, atom.dy), dir, frac * atom.p) {
            prop_assert!(wider.mgf().value(theta) >= k.mgf().value(theta) * (1.0 - 1e-12));
            let (a, b) = (k.mean(), wider.mean());
            prop_assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn stability_ignores_idle_mass(seed in any::<u64>(), w in 0.1f64..0.9) {
        let m = valid(seed);
        let lazy = |k: &JumpKernel| k.mix(&JumpKernel::new(k.region(), [(0, 0, 1.0)]).unwrap(), w).unwrap();
        let slow = ModelSpec::new(lazy(m.interior()), lazy(m.face1()), lazy(m.face2()), lazy(m.origin())).unwrap();
        let a = drift_stability(&drift_vectors(&m)).unwrap();
        let b = drift_stability(&drift_vectors(&slow)).unwrap();
        prop_assert_eq!(a.stable, b.stable);
        prop_assert_eq!(a.case, b.case);
    }

    #[test]
    fn stable_models_pass_the_geometric_test(seed in any::<u64>()) {
        let (v, g) = assess(&stable(seed)).unwrap();
        prop_assert!(v.stable && g.stable);
        prop_assert_eq!(v.geometric_agreement, Some(true));
    }

    #[test]
    fn disagreements_need_outward_drift(seed in any::<u64>()) {
        let m = valid(seed);
        let (v, g) = assess(&m).unwrap();
        if v.stable != g.stable {
            let d = drift_vectors(&m);
            prop_assert!(!v.stable && d.m[0] > 0.0 && d.m[1] > 0.0, "{:?}", d);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn branches_lie_on_the_level_curve(seed in any::<u64>(), u in 0.01f64..0.99) {
        let m = stable(seed);
        let g = GeometrySummary::compute(&m.surfaces()).unwrap();
        for k in 1..=2 {
            let (lo, hi) = g.branch_interval(k);
            let t = lo + u * (hi - lo);
            for which in [Root::Max, Root::Min] {
                let x = branch(g.gamma(), k, t, which).unwrap();
                let p = if k == 1 { [x, t] } else { [t, x] };
                prop_assert!((g.gamma().value(p) - 1.0).abs() < 1e-9);
            }
            prop_assert!(g.xi_under(k, t).unwrap() <= g.xi_bar(k, t).unwrap());
        }
    }

    #[test]
    fn tau_agrees_and_swaps(seed in any::<u64>()) {
        let m = stable(seed);
        let (d, it) = tau_both(&GeometrySummary::compute(&m.surfaces()).unwrap()).unwrap();
        prop_assert!((d.tau[0] - it.tau[0]).abs() < 1e-8 && (d.tau[1] - it.tau[1]).abs() < 1e-8);
        let t = domain(&m.swapped()).tau();
        prop_assert!((t[0] - d.tau[1]).abs() < 1e-8 && (t[1] - d.tau[0]).abs() < 1e-8);
    }

    #[test]
    fn domain_is_a_lower_set(seed in any::<u64>(), p in prop::array::uniform2(-2.0f64..2.0), shift in prop::array::uniform2(0.0f64..1.0)) {
        let dom = domain(&stable(seed));
        if dom.contains(p) {
            prop_assert!(dom.contains([p[0] - shift[0], p[1] - shift[1]]));
        }
    }

    #[test]
    fn boundary_samples_are_tight(seed in any::<u64>()) {
        let dom = domain(&stable(seed));
        let t = dom.tau();
        for p in dom.sample_boundary(24) {
            prop_assert!(p[0] <= t[0] + 1e-9 && p[1] <= t[1] + 1e-9);
            let inside = [p[0] - 1e-6, p[1] - 1e-6];
            let outside = [p[0] + 1e-6, p[1] + 1e-6];
            prop_assert!(dom.contains(inside), "{:?}", p);
            prop_assert!(!dom.contains(outside), "{:?}", p);
        }
    }

    #[test]
    fn rates_sit_on_the_boundary(seed in any::<u64>(), a in 0i64..5, b in 0i64..5) {
        prop_assume!(a + b > 0);
        let dom = domain(&stable(seed));
        let r = dom.alpha_rational([Ratio::from_integer(a), Ratio::from_integer(b)]).unwrap();
        prop_assert!((r.c[0].hypot(r.c[1]) - 1.0).abs() < 1e-12);
        let s = r.alpha - 1e-7;
        prop_assert!(dom.contains([s * r.c[0], s * r.c[1]]));
        let s = r.alpha + 1e-7;
        prop_assert!(!dom.contains([s * r.c[0], s * r.c[1]]));
    }
}

proptest! {
    #[test]
    fn spacing_divides_the_direction(a in 0i64..50, b in 0i64..50, p in 1i64..20, q in 1i64..20) {
        prop_assume!(a + b > 0);
        let c = [Ratio::new(a, p), Ratio::new(b, q)];
        let Some(Periodicity::Arithmetic { numer, denom }) = periodicity(c) else {
            return Err(TestCaseError::fail("rational direction without spacing"));
        };
        let d = Ratio::new(numer, denom);
        for x in c {
            prop_assert!((x / d).is_integer());
        }
    }

    #[test]
    fn rounding_is_idempotent(x in any::<f64>()) {
        prop_assume!(x.is_finite());
        let r = round_sig(x);
        prop_assert_eq!(round_sig(r), r);
        prop_assert!((r - x).abs() <= 1e-11 * x.abs());
    }
}
