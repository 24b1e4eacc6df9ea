use num::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nullag::poly::PolyMatrixFn;
use nullag::random::random_rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random rational combination of the given polynomials.
pub fn combination(rng: &mut ChaCha8Rng, polys: &[PolyMatrixFn]) -> PolyMatrixFn {
    let (m, n) = polys[0].shape();
    polys.iter().fold(PolyMatrixFn::zero(m, n), |acc, p| &acc + &p.scale(&random_rational(rng, 7)))
}

pub fn exact_to_f64(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(|x| num::ToPrimitive::to_f64(x).unwrap()).collect()
}
