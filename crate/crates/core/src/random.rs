//! Seeded generators for test data: rational matrices, polynomials, normals.

use num::{BigInt, BigRational, Zero};
use rand::Rng;

use crate::minors::{index_sets, Matrix};
use crate::poly::{Poly, PolyMatrixFn};
use crate::rational::Normal;

/// Small rational `a/b` with `|a| ≤ bound`, `1 ≤ b ≤ bound`.
pub fn random_rational<R: Rng>(rng: &mut R, bound: i64) -> BigRational {
    let bound = bound.max(1);
    let a = rng.gen_range(-bound..=bound);
    let b = rng.gen_range(1..=bound);
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

pub fn random_rational_matrix<R: Rng>(rng: &mut R, m: usize, n: usize, bound: i64) -> Matrix<BigRational> {
    let data = (0..m * n).map(|_| random_rational(rng, bound)).collect();
    Matrix::from_vec(m, n, data).expect("positive shape")
}

pub fn random_f64_matrix<R: Rng>(rng: &mut R, m: usize, n: usize, scale: f64) -> Matrix<f64> {
    let data = (0..m * n).map(|_| rng.gen_range(-scale..=scale)).collect();
    Matrix::from_vec(m, n, data).expect("positive shape")
}

/// Polynomial on `m×n` with `terms` random monomials of total degree ≤ `degree`.
/// One monomial always has degree exactly `degree`.
pub fn random_poly<R: Rng>(rng: &mut R, m: usize, n: usize, degree: u32, terms: usize) -> PolyMatrixFn {
    let k = m * n;
    let mut poly = Poly::zero();
    for t in 0..terms.max(1) {
        let d = if t == 0 { degree } else { rng.gen_range(0..=degree) };
        let mut exps = vec![0u16; k];
        for _ in 0..d {
            exps[rng.gen_range(0..k)] += 1;
        }
        let mut c = random_rational(rng, 9);
        if c.is_zero() {
            c = BigRational::from_integer(1.into());
        }
        poly.add_term(exps, c);
    }
    PolyMatrixFn::new(m, n, poly).expect("variables in range")
}

/// Uniform unit vector via normalized Gaussians (Box–Muller).
pub fn random_unit_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| {
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

pub fn random_normal<R: Rng>(rng: &mut R, n: usize) -> Normal {
    Normal::from_f64(&random_unit_vector(rng, n)).expect("unit by construction")
}

/// Coefficients of `c + Σ_s Σ_{(p),(q)} β ad_s^{(p)(q)}`, lexicographic in `(s,(p),(q))`.
#[derive(Clone, Debug)]
pub struct QuasiaffineSample {
    pub constant: BigRational,
    pub betas: Vec<BigRational>,
    pub poly: PolyMatrixFn,
}

/// Random combination of all minors of `m×n` matrices; each β is zero with
/// probability `sparsity`.
pub fn random_quasiaffine<R: Rng>(rng: &mut R, m: usize, n: usize, sparsity: f64) -> QuasiaffineSample {
    let constant = random_rational(rng, 9);
    let mut poly = PolyMatrixFn::constant(m, n, constant.clone());
    let mut betas = Vec::new();
    for s in 1..=m.min(n) {
        for p in index_sets(m, s).expect("valid order") {
            for q in index_sets(n, s).expect("valid order") {
                let b = if rng.gen_bool(sparsity) { BigRational::zero() } else { random_rational(rng, 9) };
                if !b.is_zero() {
                    let minor = PolyMatrixFn::minor(m, n, &p, &q).expect("fits");
                    poly = &poly + &minor.scale(&b);
                }
                betas.push(b);
            }
        }
    }
    QuasiaffineSample { constant, betas, poly }
}
