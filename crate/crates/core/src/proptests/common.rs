
use num::BigRational;
use proptest::test_runner::{Config, RngSeed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::minors::Matrix;
use crate::poly::PolyMatrixFn;
use crate::random::random_rational;

/// Fixed-seed configuration so every run explores the same cases.
pub fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x6e75_6c6c),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random rational combination of the given polynomials.
pub fn combination(rng: &mut ChaCha8Rng, polys: &[PolyMatrixFn]) -> PolyMatrixFn {
    let (m, n) = polys[0].shape();
    polys.iter().fold(PolyMatrixFn::zero(m, n), |acc, p| &acc + &p.scale(&random_rational(rng, 7)))
}

/// Hadamard bound `Π |row_i|`, the natural scale of `det h`.
pub fn hadamard(h: &Matrix<f64>) -> f64 {
    (0..h.rows())
        .map(|i| h.row(i).iter().map(|x| x * x).sum::<f64>().sqrt())
        .product()
}

pub fn exact_to_f64(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(|x| num::ToPrimitive::to_f64(x).unwrap()).collect()
}
