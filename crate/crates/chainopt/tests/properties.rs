//! Cross-module property tests: exact-propagation algebra against
//! independent references, scaling laws, and text round trips.

use proptest::prelude::*;

use chainopt::asl::{AslItem, AugmentedSwitchingLaw, Sign};
use chainopt::chattering;
use chainopt::dynamics::{integral_of_state, propagate};
use chainopt::oracle::rk4_reference;
use chainopt::planner::{map_scaled_to_physical, Problem7Spec};
use chainopt::surfaces::SwitchingSurfaces;
use chainopt::{PiecewiseControl, StateVector};

fn sign_strategy() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

fn item_strategy() -> impl Strategy<Value = AslItem> {
    prop_oneof![
        (0u32..6, sign_strategy()).prop_map(|(k, sign)| AslItem::Behavior { k, sign }),
        (1u32..6, sign_strategy(), 0u32..3).prop_flat_map(|(k, sign, pick)| {
            // valid degrees: even < k, or exactly k
            let mut degrees: Vec<u32> = (0..k).filter(|d| d % 2 == 0).collect();
            degrees.push(k);
            let degree = degrees[(pick as usize) % degrees.len()];
            Just(AslItem::Tangent { k, sign, degree })
        }),
    ]
}

proptest! {
    #[test]
    fn asl_text_round_trip(items in prop::collection::vec(item_strategy(), 0..12)) {
        let law = AugmentedSwitchingLaw::new(items).unwrap();
        let text = law.to_string();
        let back: AugmentedSwitchingLaw = text.parse().unwrap();
        prop_assert_eq!(back, law);
    }
}

fn schedule_strategy(max_segments: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.05f64..1.5, -1.0f64..1.0), 1..=max_segments)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagation_semigroup(
        x0 in prop::collection::vec(-2.0f64..2.0, 4),
        a in schedule_strategy(4),
        b in schedule_strategy(4),
    ) {
        let x0 = StateVector::new(x0);
        let mut joined = a.clone();
        joined.extend(b.iter().cloned());
        let direct = propagate(&x0, &PiecewiseControl::new(0.0, joined));
        let mid = propagate(&x0, &PiecewiseControl::new(0.0, a));
        let composed = propagate(&mid, &PiecewiseControl::new(0.0, b));
        for (u, v) in direct.as_slice().iter().zip(composed.as_slice()) {
            prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
        }
    }

    #[test]
    fn integral_matches_order_embedding(
        x0 in prop::collection::vec(-2.0f64..2.0, 3),
        segs in schedule_strategy(5),
        k in 1usize..=3,
    ) {
        let pc = PiecewiseControl::new(0.0, segs);
        let direct = integral_of_state(&StateVector::new(x0.clone()), &pc, k).unwrap();
        // embed: x_k feeds an extra top state whose increment is the integral
        let mut ext = x0.clone();
        ext.truncate(k);
        ext.push(0.0);
        let embedded = propagate(&StateVector::new(ext), &pc).get(k + 1);
        prop_assert!((direct - embedded).abs() <= 1e-12 * embedded.abs().max(1.0));
    }
}

#[test]
fn rk4_agreement_on_random_schedules() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    for _ in 0..12 {
        let n = rng.gen_range(2..=5);
        let x0 = StateVector::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let segs: Vec<(f64, f64)> = (0..rng.gen_range(1..=4))
            .map(|_| (rng.gen_range(0.1..1.2), rng.gen_range(-1.0..1.0)))
            .collect();
        let pc = PiecewiseControl::new(0.0, segs);
        let exact = propagate(&x0, &pc);
        let rk = rk4_reference(&x0, &pc, 1e-4);
        for (a, b) in exact.as_slice().iter().zip(rk.as_slice()) {
            assert!((a - b).abs() <= 1e-8, "exact {a} vs rk4 {b}");
        }
    }
}

#[test]
fn cost_family_convex_around_optimum() {
    let c = chattering::solve_constants(1e-12).unwrap();
    let j_star = c.j_star;
    let mut prev = f64::INFINITY;
    let mut increasing = true;
    for i in 0..=100 {
        let alpha = 0.005 * i as f64;
        let j = chattering::family_point(alpha, 1e-9).unwrap().j;
        assert!(
            j >= j_star - 1e-9,
            "family dips below the optimum at {alpha}"
        );
        if (alpha - c.alpha).abs() >= 0.01 {
            assert!(j > j_star, "strict inequality away from the optimum");
        }
        if alpha <= c.alpha {
            assert!(j <= prev + 1e-12, "decreasing left of the optimum");
        } else if alpha - 0.005 >= c.alpha {
            increasing &= j >= prev - 1e-12;
        }
        prev = j;
    }
    assert!(increasing, "increasing right of the optimum");
}

#[test]
fn cost_scaling_quartic() {
    let c = chattering::solve_constants(1e-12).unwrap();
    let schedule = chattering::chattering_schedule(&c, 40);
    for a in [0.1, 0.5, 2.0, 10.0] {
        let scaled = PiecewiseControl::new(
            0.0,
            schedule
                .segments()
                .iter()
                .map(|s| (s.duration * a, s.level))
                .collect(),
        );
        let j = integral_of_state(&StateVector::new(vec![a, 0.0, 0.0]), &scaled, 3).unwrap();
        let expect = a.powi(4) * c.j_star;
        assert!(
            (j - expect).abs() <= 1e-9 * expect,
            "a = {a}: {j} vs {expect}"
        );
    }
}

#[test]
fn homogeneity_deviation_small_across_scales() {
    let c = chattering::solve_constants(1e-12).unwrap();
    let grid: Vec<f64> = (0..500).map(|i| i as f64 * 0.01).collect();
    for a in [0.1, 0.5, 2.0, 10.0] {
        let dev = chattering::homogeneity_deviation(&c, a, &grid);
        assert!(dev <= 1e-8, "a = {a}: deviation {dev}");
    }
}

#[test]
fn physical_scaled_round_trip() {
    // map the scaled trajectory into physical coordinates and invert the
    // substitutions sample-by-sample
    let c = chattering::solve_constants(1e-12).unwrap();
    let spec = Problem7Spec {
        m0: 2.0,
        m3: 3.0,
        x01: -0.7,
        x04: 1.5,
        xf4: 100.0,
    };
    let y_traj = chainopt::sample(
        &StateVector::new(vec![1.0, 0.0, 0.0]),
        &chattering::chattering_schedule(&c, 20),
        0.1,
    );
    let x_traj = map_scaled_to_physical(&spec, &y_traj);
    let tscale = -spec.x01 / spec.m0;
    for (ys, xs) in y_traj.samples.iter().zip(&x_traj.samples) {
        let tau = xs.t / tscale;
        assert!((tau - ys.t).abs() <= 1e-12 * ys.t.max(1.0));
        let y1 = xs.x.get(1) / spec.x01;
        let y2 = xs.x.get(2) / (-spec.x01 * spec.x01 / spec.m0);
        let y3 = (xs.x.get(3) - spec.m3) / (spec.x01.powi(3) / (spec.m0 * spec.m0));
        assert!((y1 - ys.x.get(1)).abs() <= 1e-12 * ys.x.get(1).abs().max(1.0));
        assert!((y2 - ys.x.get(2)).abs() <= 1e-12 * ys.x.get(2).abs().max(1.0));
        assert!((y3 - ys.x.get(3)).abs() <= 1e-11 * ys.x.get(3).abs().max(1.0));
        assert!((xs.u / -spec.m0 - ys.u).abs() <= 1e-15);
    }
}

#[test]
fn approach_from_gamma_plus_switches_on_gamma_minus() {
    use chainopt::surfaces::{RegionLabel, SurfaceKind};
    use rand::{Rng, SeedableRng};
    let c = chattering::solve_constants(1e-12).unwrap();
    let s = SwitchingSurfaces::new(&c, 1e-10).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let t1 = rng.gen_range(s.r_star + 1e-3..s.t1_star - 1e-2);
        let t2 = s.gamma_plus_partner(t1);
        let a = rng.gen_range(0.2..3.0);
        let p = s.eval(SurfaceKind::GammaPlus, a, (t1, t2)).unwrap().y;
        assert_eq!(s.classify(p, 1e-6).unwrap(), RegionLabel::OnGammaPlus);
        let app = s.synthesize_approach(p, 1e-9).unwrap();
        assert_eq!(app.switch_points.len(), 1);
        let sw = app.switch_points[0];
        // the single switch lands on Gamma_- at the coupled parameter
        assert_eq!(s.classify(sw, 1e-6).unwrap(), RegionLabel::OnGammaMinus);
        let expect = s.eval(SurfaceKind::GammaMinus, a, (t2, t2)).unwrap().y;
        for (u, v) in sw.iter().zip(expect) {
            assert!(
                (u - v).abs() <= 1e-6 * v.abs().max(1.0),
                "{sw:?} vs {expect:?}"
            );
        }
    }
}

#[test]
fn closure_from_random_feasible_states() {
    use rand::{Rng, SeedableRng};
    let c = chattering::solve_constants(1e-12).unwrap();
    let s = SwitchingSurfaces::new(&c, 1e-10).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let mut tested = 0;
    let mut attempts = 0;
    while tested < 25 {
        attempts += 1;
        assert!(attempts < 5000, "only {tested} feasible states found");
        let y = [
            rng.gen_range(-1.5..2.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.02..1.5),
        ];
        let app = match s.synthesize_approach(y, 1e-9) {
            Ok(a) => a,
            Err(_) => continue,
        };
        tested += 1;
        // approach keeps y3 >= -1e-9 ...
        let (lo, _) =
            chainopt::state_range(&StateVector::new(y.to_vec()), &app.control, 3).unwrap();
        assert!(lo >= -1e-9, "y3 dips to {lo}");
        // ... and subsequent cycles contract geometrically with ratio alpha
        let mut a = app.junction_scale;
        let mut state = StateVector::new(vec![a, 0.0, 0.0]);
        for _ in 0..10 {
            let cycle = PiecewiseControl::new(
                0.0,
                vec![
                    (c.beta1 * c.tau1 * a, -1.0),
                    ((c.beta2 - c.beta1) * c.tau1 * a, 1.0),
                    ((1.0 - c.beta2) * c.tau1 * a, -1.0),
                ],
            );
            let (lo, _) = chainopt::state_range(&state, &cycle, 3).unwrap();
            assert!(lo >= -1e-9);
            state = propagate(&state, &cycle);
            let next = state.get(1);
            assert!(
                (next / a - c.alpha).abs() <= 1e-6,
                "contraction ratio {}",
                next / a
            );
            a = next;
            state = StateVector::new(vec![a, 0.0, 0.0]);
        }
    }
}
