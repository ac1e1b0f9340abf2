use std::sync::Arc;

use proptest::prelude::*;

use imcmc::diagnostics::ess_batch_means;
use imcmc::maps::{
    CouplingMap, DirectionAugment, HamiltonianInvolution, Involution, Leapfrog, LeapfrogConfig, Swap,
};
use imcmc::targets::{ar1_generate, Mog2};
use imcmc::{log_accept, AcceptanceRule, JointPoint, LogDensity};

fn self_inverse(f: &dyn Involution, z: &JointPoint) -> (f64, f64) {
    let (a, l1) = f.apply(z).unwrap();
    let (b, l2) = f.apply(&a).unwrap();
    (z.distance(&b).unwrap(), (l1 + l2).abs())
}

fn mog() -> Arc<dyn LogDensity> {
    Arc::new(Mog2::default())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn swap_is_self_inverse(x in prop::collection::vec(-10.0..10.0f64, 3), v in prop::collection::vec(-10.0..10.0f64, 3)) {
        let z = JointPoint::new(x).with_v(v);
        let (d, l) = self_inverse(&Swap::x_v(3, 0), &z);
        prop_assert_eq!(d, 0.0);
        prop_assert_eq!(l, 0.0);
    }

    #[test]
    fn hamiltonian_map_is_self_inverse(
        x in prop::collection::vec(-4.0..4.0f64, 2),
        v in prop::collection::vec(-3.0..3.0f64, 2),
        eps in 0.01..0.3f64,
        k in 1usize..20,
    ) {
        let f = HamiltonianInvolution::new(Arc::new(Leapfrog::new(mog(), LeapfrogConfig::new(eps, k).unwrap())));
        let (d, l) = self_inverse(&f, &JointPoint::new(x).with_v(v));
        prop_assert!(d <= 1e-10, "{d:e}");
        prop_assert!(l <= 1e-8);
    }

    #[test]
    fn directional_affine_coupling_is_self_inverse(
        x in prop::collection::vec(-4.0..4.0f64, 2),
        v in prop::collection::vec(-3.0..3.0f64, 2),
        up in any::<bool>(),
        c in 0.0..0.3f64,
    ) {
        let flow = CouplingMap::jump_leapfrog_affine(mog(), 4.0, 1.0, 0.25, 4, c);
        let f = DirectionAugment::new(Arc::new(flow), 0);
        let z = JointPoint::new(x).with_v(v).with_tags(vec![if up { 1 } else { -1 }]);
        let (d, l) = self_inverse(&f, &z);
        prop_assert!(d <= 1e-10, "{d:e}");
        prop_assert!(l <= 1e-8, "{l:e}");
    }

    #[test]
    fn acceptance_is_a_probability(a in -50.0..50.0f64, b in -50.0..50.0f64, ld in -5.0..5.0f64) {
        for rule in [AcceptanceRule::MetropolisMin, AcceptanceRule::Barker] {
            let p = log_accept(rule, a, b, ld).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
        }
        let mh = log_accept(AcceptanceRule::MetropolisMin, a, b, ld).unwrap();
        let bk = log_accept(AcceptanceRule::Barker, a, b, ld).unwrap();
        prop_assert!(bk <= mh + 1e-12);
    }

    #[test]
    fn ess_is_invariant_to_affine_rescaling(scale in 0.1..10.0f64, shift in -5.0..5.0f64, seed in 0u64..50) {
        let s = ar1_generate(0.5, 3000, seed);
        let t: Vec<f64> = s.iter().map(|a| shift + scale * a).collect();
        let (e1, e2) = (ess_batch_means(&s).unwrap().ess, ess_batch_means(&t).unwrap().ess);
        prop_assert!((e1 - e2).abs() <= 1e-6 * e1);
    }
}

#[test]
fn proposal_at_zero_density_is_rejected() {
    let p = log_accept(AcceptanceRule::MetropolisMin, 0.0, f64::NEG_INFINITY, 0.0).unwrap();
    assert_eq!(p, 0.0);
    assert!(log_accept(AcceptanceRule::MetropolisMin, 0.0, f64::NAN, 0.0).is_err());
    assert!(log_accept(AcceptanceRule::Barker, f64::NEG_INFINITY, 0.0, 0.0).is_err());
}
