use num::{BigRational, One, Zero};
use proptest::prelude::*;

use crate::minors::Matrix;
use crate::poly::PolyMatrixFn;
use crate::random::{random_f64_matrix, random_poly, random_rational, random_rational_matrix};

use super::common::{config, rng};

fn triple(seed: u64, m: usize, n: usize) -> (PolyMatrixFn, PolyMatrixFn, PolyMatrixFn) {
    let mut r = rng(seed);
    (
        random_poly(&mut r, m, n, 3, 4),
        random_poly(&mut r, m, n, 2, 5),
        random_poly(&mut r, m, n, 3, 3),
    )
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn ring_axioms_hold_exactly(seed in any::<u64>(), m in 1usize..=3, n in 1usize..=3) {
        let (f, g, h) = triple(seed, m, n);
        let zero = PolyMatrixFn::zero(m, n);
        let one = PolyMatrixFn::constant(m, n, BigRational::one());
        prop_assert_eq!(&f + &g, &g + &f);
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&(&f + &g) + &h, &f + &(&g + &h));
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert_eq!(&f + &zero, f.clone());
        prop_assert_eq!(&f * &one, f.clone());
        prop_assert!((&f - &f).is_zero());
        prop_assert_eq!(&f + &(-&f), zero);

        let x = random_rational_matrix(&mut rng(seed ^ 1), m, n, 5);
        let (fx, gx) = (f.evaluate(&x).unwrap(), g.evaluate(&x).unwrap());
        prop_assert_eq!((&f * &g).evaluate(&x).unwrap(), &fx * &gx);
        prop_assert_eq!((&f - &g).evaluate(&x).unwrap(), fx - gx);
    }

    #[test]
    fn linear_substitution_composes(seed in any::<u64>(), m in 1usize..=2, k in 1usize..=3, n in 1usize..=3, p in 1usize..=3) {
        let mut r = rng(seed);
        let f = random_poly(&mut r, m, k, 3, 4);
        let a = random_rational_matrix(&mut r, n, k, 4);
        let b = random_rational_matrix(&mut r, p, n, 4);
        let twice = f.substitute_linear(&a).unwrap().substitute_linear(&b).unwrap();
        let once = f.substitute_linear(&b.matmul(&a).unwrap()).unwrap();
        prop_assert_eq!(twice, once);
        prop_assert_eq!(f.substitute_linear(&Matrix::identity(k)).unwrap(), f.clone());

        let h = random_rational_matrix(&mut r, m, n, 5);
        prop_assert_eq!(
            f.substitute_linear(&a).unwrap().evaluate(&h).unwrap(),
            f.evaluate(&h.matmul(&a).unwrap()).unwrap()
        );
    }

    #[test]
    fn homogeneous_parts_sum_and_scale(seed in any::<u64>(), m in 1usize..=2, n in 1usize..=3, deg in 0u32..=5) {
        let mut r = rng(seed);
        let f = random_poly(&mut r, m, n, deg, 6);
        let parts = f.homogeneous_parts();
        prop_assert_eq!(parts.parts.len(), f.degree() as usize + 1);
        prop_assert_eq!(parts.sum().unwrap(), f.clone());
        let h = random_rational_matrix(&mut r, m, n, 5);
        let mut t = random_rational(&mut r, 7);
        if t.is_zero() {
            t = BigRational::one();
        }
        let th = h.scale(&t);
        for (i, a) in parts.parts.iter().enumerate() {
            if !a.is_zero() {
                prop_assert_eq!(a.homogeneous_degree(), Some(i as u32));
            }
            let lhs = a.evaluate(&th).unwrap();
            let rhs = a.evaluate(&h).unwrap() * num::pow(t.clone(), i);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn gradient_matches_central_differences(seed in any::<u64>(), m in 1usize..=3, n in 1usize..=3, deg in 1u32..=5) {
        let mut r = rng(seed);
        let f = random_poly(&mut r, m, n, deg, 6);
        let h = random_f64_matrix(&mut r, m, n, 1.0);
        let grad = f.gradient_at(&h).unwrap();
        let step = 1e-5;
        for i in 0..m {
            for j in 0..n {
                let mut hp = h.clone();
                let mut hm = h.clone();
                hp.set(i, j, h.get(i, j) + step);
                hm.set(i, j, h.get(i, j) - step);
                let fd = (f.evaluate(&hp).unwrap() - f.evaluate(&hm).unwrap()) / (2.0 * step);
                let ex = *grad.get(i, j);
                prop_assert!((fd - ex).abs() <= 1e-6 * ex.abs().max(1.0), "d/dF{}{}: {} vs {}", i, j, fd, ex);
            }
        }
    }
}
