use proptest::prelude::*;
use rand::Rng;

use crate::boundary::{boundary_nl_basis, boundary_trace_q_f64};
use crate::minors::Matrix;
use crate::poly::PolyMatrixFn;
use crate::qcb::{
    energy, gamma_term, minimize_functional, random_field, BoundaryCondition, Functional, Objective, OptimOptions,
    QcbOptions, StandardDomainMesh,
};
use crate::random::{random_f64_matrix, random_normal, random_poly};

use super::common::{combination, config, exact_to_f64, rng};

fn small_opts(seed: u64) -> QcbOptions {
    QcbOptions {
        h: 2,
        trials: 2,
        seed,
        optim: OptimOptions {
            max_iter: 100,
            ..Default::default()
        },
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn boundary_deficit_vanishes_for_boundary_nl(seed in any::<u64>(), m in 1usize..=2, n in 2usize..=3) {
        let mut r = rng(seed);
        let nrm = random_normal(&mut r, n);
        let v = combination(&mut r, &boundary_nl_basis(m, n, &nrm).unwrap());
        let h = if n == 2 { 4 } else { 2 };
        let mesh = StandardDomainMesh::new(n, &exact_to_f64(&nrm.exact), h).unwrap();
        let f = random_f64_matrix(&mut r, m, n, 1.0);
        let obj = Objective::new(&mesh, &v, &f, Functional::BoundaryDeficit).unwrap();
        for _ in 0..5 {
            let u = random_field(&mut r, &mesh, BoundaryCondition::FreeOnGamma, m, 1.0);
            let scale = 1.0 + energy(&mesh, &v, &f, &u).unwrap().abs();
            prop_assert!(obj.value(&u).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn energy_scales_with_the_degree(seed in any::<u64>(), which in 0u8..3, t in -3.0f64..3.0) {
        let mut r = rng(seed);
        let (v, n) = match which {
            0 => (PolyMatrixFn::det(2), 2),
            1 => (PolyMatrixFn::detprime(3).unwrap(), 3),
            _ => {
                let d = r.gen_range(1..=4);
                let top = random_poly(&mut r, 2, 2, d, 5).homogeneous_parts().parts[d as usize].clone();
                (top, 2)
            }
        };
        let p = v.homogeneous_degree().unwrap() as i32;
        let mesh = StandardDomainMesh::new(n, &random_normal(&mut r, n).float, 2).unwrap();
        let zero = Matrix::zeros(v.rows(), n);
        let u = random_field(&mut r, &mesh, BoundaryCondition::FreeOnGamma, v.rows(), 1.0);
        let lhs = energy(&mesh, &v, &zero, &u.scale(t)).unwrap();
        let rhs = t.powi(p) * energy(&mesh, &v, &zero, &u).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()) + 1e-14 * t.abs().powi(p));
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn refinement_with_warm_start_does_not_increase(seed in any::<u64>(), which in 0u8..2) {
        let mut r = rng(seed);
        let v = if which == 0 { PolyMatrixFn::det(2) } else { random_poly(&mut r, 2, 2, 2, 4) };
        let normal = random_normal(&mut r, 2).float;
        let f = random_f64_matrix(&mut r, 2, 2, 1.0);
        let coarse = StandardDomainMesh::new(2, &normal, 2).unwrap();
        let fine = StandardDomainMesh::new(2, &normal, 4).unwrap();
        let opts = small_opts(seed);
        let a = minimize_functional(&coarse, &v, &f, Functional::BoundaryDeficit, &opts, None).unwrap();
        let warm = a.certificate.prolong(&coarse, &fine).unwrap();
        let b = minimize_functional(&fine, &v, &f, Functional::BoundaryDeficit, &opts, Some(&warm)).unwrap();
        prop_assert!(b.best_value <= a.best_value + 1e-6, "{} > {}", b.best_value, a.best_value);
    }

    #[test]
    fn certificates_reproduce_the_estimate(seed in any::<u64>(), which in 0u8..2) {
        let mut r = rng(seed);
        let v = if which == 0 { PolyMatrixFn::det(2) } else { random_poly(&mut r, 2, 2, 2, 4) };
        let normal = random_normal(&mut r, 2).float;
        let f = random_f64_matrix(&mut r, 2, 2, 1.0);
        let mesh = StandardDomainMesh::new(2, &normal, 4).unwrap();
        let rep = minimize_functional(&mesh, &v, &f, Functional::BoundaryDeficit, &small_opts(seed), None).unwrap();
        let q = boundary_trace_q_f64(&v, &f, &normal).unwrap();
        let again = energy(&mesh, &v, &f, &rep.certificate).unwrap()
            - gamma_term(&mesh, &q, &rep.certificate).unwrap()
            - v.evaluate(&f).unwrap() * mesh.volume();
        prop_assert!((again - rep.estimate).abs() <= 1e-9 * (1.0 + rep.estimate.abs()));
        prop_assert!(rep.certificate.boundary_violation(&mesh, BoundaryCondition::FreeOnGamma) == 0.0);
    }
}
