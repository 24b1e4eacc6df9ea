//! Reduced-size invariant suite behind `nullag selftest`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use nullag::boundary::{boundary_nl_basis, decompose_minors, is_boundary_nl};
use nullag::conc::{det_concentration_sequence, gamma_integral, integrate_box, QuadOptions};
use nullag::minors::{binomial, cofactor, complete_rotation, frame_defect, index_sets, Matrix};
use nullag::poly::PolyMatrixFn;
use nullag::qcb::{det_certificate, energy, null_identity_defect, random_field, BoundaryCondition, P1Field, StandardDomainMesh};
use nullag::random::{random_f64_matrix, random_normal, random_poly, random_quasiaffine, random_rational_matrix, random_unit_vector};
use nullag::rational::Normal;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn index_set_counts() -> Outcome {
    for r in 1..=6 {
        for s in 1..=r {
            let sets = index_sets(r, s).map_err(err)?;
            if sets.len() != binomial(r, s) || sets.windows(2).any(|w| w[0].entries() >= w[1].entries()) {
                return Err(format!("I({r},{s}) malformed"));
            }
        }
    }
    Ok("C(r,s) increasing sets for r <= 6".into())
}

fn adjugate(rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..20 {
        let f = random_rational_matrix(rng, 3, 3, 6);
        let lhs = f.transpose().matmul(&cofactor(&f).map_err(err)?).map_err(err)?;
        let rhs = Matrix::identity(3).scale(&f.det().map_err(err)?);
        if lhs != rhs {
            return Err("F^T Cof F != det F I".into());
        }
    }
    Ok("20 exact 3x3 checks".into())
}

fn frames(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=5 {
        for _ in 0..100 {
            let rho = random_unit_vector(rng, n);
            worst = worst.max(frame_defect(&complete_rotation(&rho).map_err(err)?));
        }
    }
    ensure(worst <= 1e-12, format!("worst frame defect {worst:e}"))
}

fn gradients(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let f = random_poly(rng, 2, 2, 3, 6);
        let h = random_f64_matrix(rng, 2, 2, 1.0);
        let g = f.gradient_at(&h).map_err(err)?;
        for k in 0..4 {
            let step = 1e-6;
            let (i, j) = (k / 2, k % 2);
            let mut hp = h.clone();
            let mut hm = h.clone();
            hp.set(i, j, h.get(i, j) + step);
            hm.set(i, j, h.get(i, j) - step);
            let fd = (f.evaluate(&hp).map_err(err)? - f.evaluate(&hm).map_err(err)?) / (2.0 * step);
            let ex = g.as_slice()[k];
            worst = worst.max((fd - ex).abs() / (1.0 + ex.abs()));
        }
    }
    ensure(worst <= 1e-6, format!("worst relative deviation {worst:e}"))
}

fn roundtrip(rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..20 {
        let s = random_quasiaffine(rng, 2, 3, 0.5);
        let back = decompose_minors(&s.poly).map_err(err)?.to_poly().map_err(err)?;
        if back != s.poly {
            return Err("decomposition does not reproduce the polynomial".into());
        }
    }
    Ok("20 random 2x3 quasiaffine polynomials".into())
}

fn recognition() -> Outcome {
    let dp = PolyMatrixFn::detprime(3).map_err(err)?;
    let det = PolyMatrixFn::det(2);
    let a = is_boundary_nl(&dp, &Normal::e_n(3)).map_err(err)?.is_boundary_nl;
    let b = is_boundary_nl(&dp, &Normal::axis(3, 0, 1)).map_err(err)?.is_boundary_nl;
    let c = is_boundary_nl(&det, &Normal::e_n(2)).map_err(err)?.is_boundary_nl;
    ensure(a && !b && !c, format!("detprime(e3)={a}, detprime(e1)={b}, det(e2)={c}"))
}

fn null_identity(rng: &mut ChaCha8Rng) -> Outcome {
    let nrm = random_normal(rng, 2);
    let mesh = StandardDomainMesh::new(2, &nrm.float, 4).map_err(err)?;
    let mut worst = 0.0f64;
    for v in boundary_nl_basis(2, 2, &nrm).map_err(err)? {
        for _ in 0..5 {
            let f = random_f64_matrix(rng, 2, 2, 1.0);
            let u = random_field(rng, &mesh, BoundaryCondition::FreeOnGamma, 2, 1.0);
            worst = worst.max(null_identity_defect(&mesh, &v, &f, &u).map_err(err)?.abs());
        }
    }
    ensure(worst <= 1e-9, format!("worst defect {worst:e} on h=4"))
}

fn det_certificate_energy() -> Outcome {
    let mesh = StandardDomainMesh::new(2, &[0.0, 1.0], 16).map_err(err)?;
    let w = P1Field::interpolate(&mesh, BoundaryCondition::FreeOnGamma, 2, det_certificate);
    let e = energy(&mesh, &PolyMatrixFn::det(2), &Matrix::zeros(2, 2), &w).map_err(err)?;
    ensure(e <= -1.1, format!("certificate energy {e} at h=16"))
}

fn concentration() -> Outcome {
    let mut worst = 0.0f64;
    for k in [1, 4] {
        let s = det_concentration_sequence(k).map_err(err)?;
        let v = integrate_box(
            &mut |x| {
                let g = s.grad(x);
                g[0] * g[3] - g[1] * g[2]
            },
            &s.active_box(),
            &QuadOptions::default(),
        )
        .map_err(err)?
        .value;
        worst = worst.max((v + 4.0 / 3.0).abs());
    }
    ensure(worst <= 1e-9, format!("|int det - (-4/3)| <= {worst:e}"))
}

fn divergence() -> Outcome {
    let q = QuadOptions::default();
    let v: Vec<f64> = [1e-2, 1e-4, 1e-6]
        .iter()
        .map(|&d| gamma_integral(2, 8, 0.1, d, &q))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    ensure(v[0] < v[1] && v[1] < v[2], format!("I(8, delta) = {v:?}"))
}

fn exact_det(rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..10 {
        let h = random_rational_matrix(rng, 3, 3, 5);
        let a = PolyMatrixFn::det(3).evaluate(&h).map_err(err)?;
        if a != h.det().map_err(err)? {
            return Err("det polynomial disagrees with elimination".into());
        }
    }
    Ok("10 exact 3x3 determinants".into())
}

pub fn run(seed: u64) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let results: Vec<(&'static str, Outcome)> = vec![
        ("index_sets", index_set_counts()),
        ("adjugate_identity", adjugate(&mut rng)),
        ("rotation_frames", frames(&mut rng)),
        ("exact_determinant", exact_det(&mut rng)),
        ("gradient_finite_differences", gradients(&mut rng)),
        ("decomposition_roundtrip", roundtrip(&mut rng)),
        ("example_recognition", recognition()),
        ("discrete_null_identity", null_identity(&mut rng)),
        ("det_certificate", det_certificate_energy()),
        ("det_concentration_integral", concentration()),
        ("counterexample_divergence", divergence()),
    ];
    let checks: Vec<Check> = results
        .into_iter()
        .map(|(name, r)| match r {
            Ok(detail) => Check { name, passed: true, detail },
            Err(detail) => Check { name, passed: false, detail },
        })
        .collect();
    SelftestReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
