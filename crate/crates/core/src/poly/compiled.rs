//! Binary64 evaluation of a polynomial and its gradient, for meshes and quadrature.

use num::ToPrimitive;

use super::{Poly, PolyMatrixFn};

#[derive(Clone, Debug)]
struct Term {
    coeff: f64,
    factors: Vec<(usize, i32)>,
}

#[derive(Clone, Debug)]
struct Compiled {
    terms: Vec<Term>,
}

impl Compiled {
    fn new(p: &Poly) -> Self {
        let terms = p
            .terms()
            .map(|(e, c)| Term {
                coeff: c.to_f64().unwrap_or(f64::NAN),
                factors: e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| (i, i32::from(k)))
                    .collect(),
            })
            .collect();
        Compiled { terms }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.factors
                    .iter()
                    .fold(t.coeff, |acc, &(i, k)| if k == 1 { acc * x[i] } else { acc * x[i].powi(k) })
            })
            .sum()
    }
}

/// Precompiled value and gradient of an `m×n` polynomial, row-major inputs.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    m: usize,
    n: usize,
    value: Compiled,
    grad: Vec<Compiled>,
}

impl CompiledPoly {
    pub fn new(f: &PolyMatrixFn) -> Self {
        CompiledPoly {
            m: f.rows(),
            n: f.cols(),
            value: Compiled::new(f.poly()),
            grad: f.gradient().iter().map(|g| Compiled::new(g.poly())).collect(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    /// `f(F)` for `F` given as a row-major slice of length `m·n`.
    pub fn value(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.m * self.n);
        self.value.eval(f)
    }

    /// Writes `∂f/∂F_ij` into `out` (row-major) and returns `f(F)`.
    pub fn value_and_gradient(&self, f: &[f64], out: &mut [f64]) -> f64 {
        for (o, g) in out.iter_mut().zip(&self.grad) {
            *o = g.eval(f);
        }
        self.value.eval(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minors::Matrix;
    use crate::random::{random_poly, random_rational_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_exact_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let f = random_poly(&mut rng, 2, 3, 4, 8);
            let c = f.compile();
            let h = random_rational_matrix(&mut rng, 2, 3, 5);
            let exact = f.evaluate(&h).unwrap().to_f64().unwrap();
            let hf = h.to_f64();
            let mut g = vec![0.0; 6];
            let v = c.value_and_gradient(hf.as_slice(), &mut g);
            assert!((v - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
            let ge: Matrix<f64> = f.gradient_at(&hf).unwrap();
            for (a, b) in g.iter().zip(ge.as_slice()) {
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }
    }
}
