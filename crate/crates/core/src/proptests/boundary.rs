use num::Zero;
use proptest::prelude::*;

use crate::boundary::{boundary_nl_basis, decompose_boundary, decompose_minors, is_boundary_nl, rank_one_gap};
use crate::minors::index_sets;
use crate::poly::PolyMatrixFn;
use crate::qcb::{energy, null_identity_defect, random_field, BoundaryCondition, StandardDomainMesh};
use crate::random::{random_f64_matrix, random_normal, random_poly, random_quasiaffine};
use crate::rational::Normal;

use super::common::{combination, config, exact_to_f64, rng};

/// A polynomial that is boundary-NL for `nrm` (kind 0) or generally not (kinds 1, 2).
fn candidate(seed: u64, kind: u8, m: usize, n: usize, nrm: &Normal) -> PolyMatrixFn {
    let mut r = rng(seed);
    match kind {
        0 => combination(&mut r, &boundary_nl_basis(m, n, nrm).unwrap()),
        1 => random_quasiaffine(&mut r, m, n, 0.5).poly,
        _ => random_poly(&mut r, m, n, 2, 4),
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn decomposition_recovers_coefficients(seed in any::<u64>(), m in 1usize..=3, n in 1usize..=3) {
        let sample = random_quasiaffine(&mut rng(seed), m, n, 0.5);
        let e = decompose_minors(&sample.poly).unwrap();
        prop_assert_eq!(&e.constant, &sample.constant);
        let mut betas = sample.betas.iter();
        for s in 1..=m.min(n) {
            for p in index_sets(m, s).unwrap() {
                for q in index_sets(n, s).unwrap() {
                    prop_assert_eq!(&e.coefficient(p.entries(), q.entries()), betas.next().unwrap());
                }
            }
        }
        prop_assert!(betas.next().is_none());
        prop_assert_eq!(e.to_poly().unwrap(), sample.poly);
    }

    #[test]
    fn boundary_nl_class_matches_the_basis(seed in any::<u64>(), m in 1usize..=3, n in 2usize..=4, kind in 0u8..3) {
        let nrm = random_normal(&mut rng(seed ^ 0x55), n);
        for b in boundary_nl_basis(m, n, &nrm).unwrap() {
            prop_assert!(is_boundary_nl(&b, &nrm).unwrap().is_boundary_nl);
        }
        let f = candidate(seed, kind, m, n, &nrm);
        let verdict = is_boundary_nl(&f, &nrm).unwrap();
        if kind == 0 {
            prop_assert!(verdict.is_boundary_nl);
        }
        if verdict.is_boundary_nl {
            let e = decompose_boundary(&f, &nrm).unwrap();
            prop_assert_eq!(e.to_poly().unwrap(), f.clone());
            prop_assert_eq!(verdict.expansion.unwrap().to_poly().unwrap(), f);
        }
    }

    #[test]
    fn witnesses_are_sound(seed in any::<u64>(), m in 1usize..=3, n in 2usize..=4, kind in 1u8..3) {
        let nrm = random_normal(&mut rng(seed ^ 0x55), n);
        let f = candidate(seed, kind, m, n, &nrm);
        let verdict = is_boundary_nl(&f, &nrm).unwrap();
        prop_assert_eq!(verdict.witness.is_some(), !verdict.is_boundary_nl);
        if let Some(w) = verdict.witness {
            prop_assert!(!w.gap.is_zero());
            prop_assert_eq!(rank_one_gap(&f, &w.f, &w.a, &nrm.exact).unwrap(), w.gap);
        }
    }

    #[test]
    fn verdict_is_frame_covariant(seed in any::<u64>(), m in 1usize..=3, n in 2usize..=4, kind in 0u8..3) {
        let nrm = random_normal(&mut rng(seed ^ 0x55), n);
        let f = candidate(seed, kind, m, n, &nrm);
        let rot = nrm.exact_frame().unwrap().rotation;
        let rotated = f.substitute_linear(&rot.transpose()).unwrap();
        prop_assert_eq!(
            is_boundary_nl(&f, &nrm).unwrap().is_boundary_nl,
            is_boundary_nl(&rotated, &Normal::e_n(n)).unwrap().is_boundary_nl
        );
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn null_identity_holds_on_random_fields(seed in any::<u64>(), m in 1usize..=2, n in 2usize..=3) {
        let mut r = rng(seed);
        let nrm = random_normal(&mut r, n);
        let v = combination(&mut r, &boundary_nl_basis(m, n, &nrm).unwrap());
        let h = if n == 2 { 4 } else { 2 };
        let mesh = StandardDomainMesh::new(n, &exact_to_f64(&nrm.exact), h).unwrap();
        for _ in 0..20 {
            let f = random_f64_matrix(&mut r, m, n, 1.0);
            let u = random_field(&mut r, &mesh, BoundaryCondition::FreeOnGamma, m, 1.0);
            let total = energy(&mesh, &v, &f, &u).unwrap();
            let defect = null_identity_defect(&mesh, &v, &f, &u).unwrap();
            prop_assert!(defect.abs() <= 1e-8 * (1.0 + total.abs()), "defect {}", defect);
        }
    }
}
