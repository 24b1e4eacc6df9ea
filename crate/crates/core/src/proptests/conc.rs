use proptest::prelude::*;

use crate::conc::{
    default_test_functions, det_concentration_sequence, gamma_integral, integrate_box, weak_continuity_experiment,
    AnalyticSequence, QuadOptions, WeakOptions,
};
use crate::poly::PolyMatrixFn;

use super::common::config;

fn sq_norm(g: &[f64]) -> f64 {
    g.iter().map(|x| x * x).sum()
}

fn det2(g: &[f64]) -> f64 {
    g[0] * g[3] - g[1] * g[2]
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn concentration_conserves_det_and_energy(k in 1u64..=256, n in 2usize..=3, interior in any::<bool>()) {
        let q = QuadOptions::default();
        let seq = det_concentration_sequence(k).unwrap();
        let d = integrate_box(&mut |x| det2(&seq.grad(x)), &seq.active_box(), &q).unwrap().value;
        prop_assert!((d + 4.0 / 3.0).abs() <= 1e-6 * 4.0 / 3.0);

        let base = if interior {
            AnalyticSequence::interior_concentration(n, 1).unwrap()
        } else {
            AnalyticSequence::boundary_concentration(n, 1).unwrap()
        };
        let e = |s: &AnalyticSequence| integrate_box(&mut |x| sq_norm(&s.grad(x)), &s.active_box(), &q).unwrap().value;
        let e1 = e(&base);
        let ek = e(&base.with_k(k).unwrap());
        prop_assert!((ek - e1).abs() <= 1e-6 * e1);
    }

    #[test]
    fn quadrature_is_stable_under_tighter_tolerance(k in 1u64..=128, phi in 0usize..4) {
        let seq = det_concentration_sequence(k).unwrap();
        let test = &default_test_functions(2)[phi];
        let run = |q: QuadOptions| {
            integrate_box(&mut |x| test.value(x) * det2(&seq.grad(x)), &seq.active_box(), &q).unwrap().value
        };
        let coarse = run(QuadOptions::with_tol(1e-10, 1e-9));
        let fine = run(QuadOptions::with_tol(0.5e-10, 0.5e-9));
        let reporting = 1e-3f64.max(1e-2 * coarse.abs());
        prop_assert!((coarse - fine).abs() <= reporting);
    }

    #[test]
    fn divergence_is_monotone(n in 2usize..=3, k in 3u64..=4096, start in 2i32..=3, decades in 4i32..=8) {
        let q = QuadOptions::with_tol(1e-12, 1e-10);
        let values: Vec<f64> = (start..=start + decades)
            .map(|e| gamma_integral(n, k, 0.1, 10f64.powi(-e), &q).unwrap())
            .collect();
        prop_assert!(values.windows(2).all(|w| w[1] > w[0]), "{:?}", values);
    }
}

proptest! {
    #![proptest_config(config(4))]

    #[test]
    fn nonnegativity_flag_tracks_the_integrand(interior in any::<bool>(), top in 3u32..=5) {
        let seq = if interior {
            AnalyticSequence::interior_concentration(2, 1).unwrap()
        } else {
            AnalyticSequence::boundary_concentration(2, 1).unwrap()
        };
        let ks: Vec<u64> = (2..=top).map(|e| 1u64 << e).collect();
        let phis = default_test_functions(2);
        let opts = WeakOptions::default();
        let det = weak_continuity_experiment(&PolyMatrixFn::det(2), &seq, &phis, &ks, &opts).unwrap();
        prop_assert_eq!(det.nonnegative_on_nodes, Some(false));
        prop_assert!(det.min_integrand.unwrap() < 0.0);
        let fro = weak_continuity_experiment(&PolyMatrixFn::frobenius2(2, 2), &seq, &phis, &ks, &opts).unwrap();
        prop_assert_eq!(fro.nonnegative_on_nodes, Some(true));
    }
}
