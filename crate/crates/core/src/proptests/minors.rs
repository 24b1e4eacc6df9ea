use num::{BigRational, One};
use proptest::prelude::*;

use crate::minors::{ad_s, binomial, complete_rotation, det_laplace, frame_defect, index_sets, Matrix};
use crate::poly::PolyMatrixFn;
use crate::random::{random_f64_matrix, random_normal, random_rational_matrix, random_unit_vector};

use super::common::{config, hadamard, rng};

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn full_minor_is_the_determinant(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let h = random_f64_matrix(&mut r, n, n, 2.0);
        let top = ad_s(&h, n).unwrap().values[0];
        let lu = h.det().unwrap();
        let tol = 1e-10 * hadamard(&h).max(f64::MIN_POSITIVE);
        prop_assert!((top - lu).abs() <= tol);
        prop_assert!((top - det_laplace(&h)).abs() <= tol);

        let hq = random_rational_matrix(&mut r, n, n, 7);
        let exact = ad_s(&hq, n).unwrap().values[0].clone();
        prop_assert_eq!(&exact, &det_laplace(&hq));
        prop_assert_eq!(&exact, &PolyMatrixFn::det(n).evaluate(&hq).unwrap());
    }

    #[test]
    fn rotation_preserves_the_full_minor(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let h = random_f64_matrix(&mut r, n, n, 2.0);
        let rot = complete_rotation(&random_unit_vector(&mut r, n)).unwrap().rotation;
        let hr = h.matmul(&rot).unwrap();
        let lhs = ad_s(&hr, n).unwrap().values[0];
        let rhs = ad_s(&h, n).unwrap().values[0];
        prop_assert!((lhs - rhs).abs() <= 1e-10 * hadamard(&h).max(f64::MIN_POSITIVE));

        let hq = random_rational_matrix(&mut r, n, n, 7);
        let rq = random_normal(&mut r, n).exact_frame().unwrap().rotation;
        prop_assert_eq!(
            ad_s(&hq.matmul(&rq).unwrap(), n).unwrap().values,
            ad_s(&hq, n).unwrap().values
        );
    }

    #[test]
    fn index_sets_are_increasing_and_complete(r in 1usize..=9, s in 1usize..=9) {
        prop_assume!(s <= r);
        let sets = index_sets(r, s).unwrap();
        prop_assert_eq!(sets.len(), binomial(r, s));
        for p in &sets {
            prop_assert_eq!(p.len(), s);
            prop_assert!(p.entries().windows(2).all(|w| w[0] < w[1]));
            prop_assert!(p.entries().iter().all(|&i| i < r));
        }
        prop_assert!(sets.windows(2).all(|w| w[0].entries() < w[1].entries()));
    }
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn completed_frames_are_rotations(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let rho = random_unit_vector(&mut r, n);
        let frame = complete_rotation(&rho).unwrap();
        prop_assert!(frame_defect(&frame) <= 1e-12);
        for (a, b) in frame.normal.iter().zip(&rho) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn exact_frames_are_rotations(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let nrm = random_normal(&mut r, n);
        let frame = nrm.exact_frame().unwrap();
        let rot = &frame.rotation;
        prop_assert_eq!(rot.transpose().matmul(rot).unwrap(), Matrix::<BigRational>::identity(n));
        prop_assert!(rot.det().unwrap().is_one());
        prop_assert_eq!(rot.col(n - 1), nrm.exact.clone());
    }
}
