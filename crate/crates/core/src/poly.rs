//! Exact multivariate polynomials with rational coefficients.
//!
//! [`Poly`] is a sparse map from exponent vectors to nonzero [`BigRational`]
//! coefficients. Exponent vectors are dense (one slot per variable) with
//! trailing zeros trimmed, so the map order is the lexicographic order of the
//! padded vectors and no variable count has to be carried around.
//!
//! [`PolyMatrixFn`] attaches a matrix shape `m×n`: variable `i*n + j` is the
//! entry `F_{ij}` (row-major).

mod builtin;
mod compiled;
mod json;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigRational, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::minors::{det_laplace, index_sets, Matrix, MultiIndex, Scalar};
use crate::rational::{format_rational, int};

pub use builtin::parse_builtin;
pub use compiled::CompiledPoly;
pub use json::{parse_poly, PolyJson, TermJson};

type Exps = Vec<u16>;

fn trim(mut e: Exps) -> Exps {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

fn add_exps(a: &[u16], b: &[u16]) -> Exps {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, s) in out.iter_mut().zip(short) {
        *o += s;
    }
    out
}

fn total_degree(e: &[u16]) -> u32 {
    e.iter().map(|&x| u32::from(x)).sum()
}

/// Sparse polynomial over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Exps, BigRational>,
}

impl Poly {
    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::default();
        p.add_term(Vec::new(), c);
        p
    }

    /// The variable `x_i`.
    pub fn var(i: usize) -> Self {
        let mut e = vec![0u16; i + 1];
        e[i] = 1;
        let mut p = Poly::default();
        p.terms.insert(e, BigRational::one());
        p
    }

    /// Linear form `Σ c_i x_i`.
    pub fn linear(coeffs: &[BigRational]) -> Self {
        let mut p = Poly::default();
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0u16; i + 1];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    /// Monomial `c · Π x_i^{e_i}`.
    pub fn monomial(exps: &[u16], c: BigRational) -> Self {
        let mut p = Poly::default();
        p.add_term(exps.to_vec(), c);
        p
    }

    /// Adds `c · x^e`, dropping the term if it cancels.
    pub fn add_term(&mut self, exps: Vec<u16>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = trim(exps);
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u16], &BigRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u16]) -> BigRational {
        self.terms
            .get(&trim(exps.to_vec()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Number of variable slots actually used (highest index + 1).
    pub fn var_span(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| total_degree(e)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Poly::default();
        }
        Poly {
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// `∂/∂x_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Poly::default();
        for (e, c) in &self.terms {
            let Some(&k) = e.get(i) else { continue };
            if k == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, c * int(i64::from(k)));
        }
        out
    }

    /// Part of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| total_degree(e) == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Evaluates at `point`; variables beyond `point.len()` must not occur.
    pub fn eval<T: Scalar>(&self, point: &[T]) -> Result<T> {
        if self.var_span() > point.len() {
            return Err(Error::invalid(format!(
                "polynomial uses {} variables, point has {}",
                self.var_span(),
                point.len()
            )));
        }
        // powers[i][k] = point[i]^k, built once per variable
        let mut max_exp = vec![0u16; point.len()];
        for e in self.terms.keys() {
            for (m, &k) in max_exp.iter_mut().zip(e) {
                *m = (*m).max(k);
            }
        }
        let powers: Vec<Vec<T>> = point
            .iter()
            .zip(&max_exp)
            .map(|(x, &m)| {
                let mut row = Vec::with_capacity(usize::from(m) + 1);
                row.push(T::one());
                for k in 1..=usize::from(m) {
                    row.push(row[k - 1].clone() * x.clone());
                }
                row
            })
            .collect();
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut t = T::from_rational(c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t * powers[i][usize::from(k)].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Substitutes `x_i ↦ images[i]` for every variable.
    pub fn compose(&self, images: &[Poly]) -> Result<Self> {
        if self.var_span() > images.len() {
            return Err(Error::invalid(format!(
                "composition needs {} images, got {}",
                self.var_span(),
                images.len()
            )));
        }
        let mut cache: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(), p.clone()]).collect();
        let mut out = Poly::default();
        for (e, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let k = usize::from(k);
                while cache[i].len() <= k {
                    let next = &cache[i][cache[i].len() - 1] * &images[i];
                    cache[i].push(next);
                }
                t = &t * &cache[i][k];
                if t.is_zero() {
                    break;
                }
            }
            for (e, c) in t.terms {
                out.add_term(e, c);
            }
        }
        Ok(out)
    }

    /// Renames variables: `x_i ↦ x_{map[i]}`.
    pub fn relabel(&self, map: &[usize]) -> Result<Self> {
        let images: Vec<Poly> = map.iter().map(|&j| Poly::var(j)).collect();
        self.compose(&images)
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::constant(BigRational::one())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(add_exps(ea, eb), ca * cb);
            }
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

/// Human-readable monomial name with a naming function for variables.
pub fn monomial_name(exps: &[u16], name: impl Fn(usize) -> String) -> String {
    let parts: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| if k == 1 { name(i) } else { format!("{}^{k}", name(i)) })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// Exact polynomial in the entries of an `m×n` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrixFn {
    m: usize,
    n: usize,
    poly: Poly,
}

/// Decomposition into positively homogeneous parts `a_0, …, a_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousParts {
    pub parts: Vec<PolyMatrixFn>,
}

impl HomogeneousParts {
    pub fn sum(&self) -> Option<PolyMatrixFn> {
        let first = self.parts.first()?;
        let mut acc = PolyMatrixFn::zero(first.m, first.n);
        for p in &self.parts {
            acc = &acc + p;
        }
        Some(acc)
    }

    /// Indices of the nonzero parts.
    pub fn nonzero_degrees(&self) -> Vec<u32> {
        self.parts
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, _)| i as u32)
            .collect()
    }
}

impl PolyMatrixFn {
    pub fn new(m: usize, n: usize, poly: Poly) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid("matrix shape must be at least 1x1"));
        }
        if poly.var_span() > m * n {
            return Err(Error::invalid(format!(
                "polynomial uses variable {} outside a {m}x{n} matrix",
                poly.var_span() - 1
            )));
        }
        Ok(PolyMatrixFn { m, n, poly })
    }

    pub fn zero(m: usize, n: usize) -> Self {
        PolyMatrixFn { m, n, poly: Poly::zero() }
    }

    pub fn constant(m: usize, n: usize, c: BigRational) -> Self {
        PolyMatrixFn {
            m,
            n,
            poly: Poly::constant(c),
        }
    }

    /// The coordinate function `F ↦ F_{ij}` (0-based).
    pub fn entry(m: usize, n: usize, i: usize, j: usize) -> Self {
        PolyMatrixFn {
            m,
            n,
            poly: Poly::var(i * n + j),
        }
    }

    /// `F ↦ β·F = Σ β_ij F_ij`.
    pub fn linear(beta: &Matrix<BigRational>) -> Self {
        PolyMatrixFn {
            m: beta.rows(),
            n: beta.cols(),
            poly: Poly::linear(beta.as_slice()),
        }
    }

    /// The symbolic matrix whose entries are the coordinate functions.
    pub fn variable_matrix(m: usize, n: usize) -> Matrix<Poly> {
        let data = (0..m * n).map(Poly::var).collect();
        Matrix::from_vec(m, n, data).expect("nonempty shape")
    }

    /// Unsigned minor `det F_{(p),(q)}` on `m×n` matrices.
    pub fn minor(m: usize, n: usize, rows: &MultiIndex, cols: &MultiIndex) -> Result<Self> {
        if rows.len() != cols.len() || rows.ambient() != m || cols.ambient() != n {
            return Err(Error::invalid(format!(
                "minor {rows}x{cols} does not fit a {m}x{n} matrix"
            )));
        }
        let vars = Self::variable_matrix(m, n);
        let sub = vars.submatrix(rows.entries(), cols.entries());
        Self::new(m, n, det_laplace(&sub))
    }

    pub fn det(n: usize) -> Self {
        Self::new(n, n, det_laplace(&Self::variable_matrix(n, n))).expect("shape")
    }

    /// Determinant of the leading `(n-1)×(n-1)` block on `(n-1)×n` matrices.
    pub fn detprime(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("detprime needs n >= 2"));
        }
        let rows = MultiIndex::new((0..n - 1).collect(), n - 1)?;
        let cols = MultiIndex::new((0..n - 1).collect(), n)?;
        Self::minor(n - 1, n, &rows, &cols)
    }

    /// `Σ_i F_ii` over `i < min(m,n)`.
    pub fn trace(m: usize, n: usize) -> Self {
        let mut poly = Poly::zero();
        for i in 0..m.min(n) {
            poly = &poly + &Poly::var(i * n + i);
        }
        PolyMatrixFn { m, n, poly }
    }

    /// `|F|^2 = Σ F_ij^2`.
    pub fn frobenius2(m: usize, n: usize) -> Self {
        let mut poly = Poly::zero();
        for k in 0..m * n {
            let v = Poly::var(k);
            poly = &poly + &(&v * &v);
        }
        PolyMatrixFn { m, n, poly }
    }

    /// `a · [Cof F] rho` on square `n×n` matrices.
    pub fn cof_dot(a: &[BigRational], rho: &[BigRational]) -> Result<Self> {
        let n = a.len();
        if rho.len() != n || n < 2 {
            return Err(Error::invalid("cof_dot needs a and rho of equal length n >= 2"));
        }
        let mut poly = Poly::zero();
        let all: Vec<usize> = (0..n).collect();
        let vars = Self::variable_matrix(n, n);
        for i in 0..n {
            let rows: Vec<usize> = all.iter().copied().filter(|&r| r != i).collect();
            for j in 0..n {
                let w = &a[i] * &rho[j];
                if w.is_zero() {
                    continue;
                }
                let cols: Vec<usize> = all.iter().copied().filter(|&c| c != j).collect();
                let minor = det_laplace(&vars.submatrix(&rows, &cols));
                let sign = if (i + j) % 2 == 0 { w } else { -w };
                poly = &poly + &minor.scale(&sign);
            }
        }
        Self::new(n, n, poly)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn into_poly(self) -> Poly {
        self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree()
    }

    /// `F_{ij}` with 1-based indices, as used in messages and reports.
    pub fn var_name(&self, k: usize) -> String {
        format!("F{}{}", k / self.n + 1, k % self.n + 1)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        PolyMatrixFn {
            m: self.m,
            n: self.n,
            poly: self.poly.scale(c),
        }
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::invalid(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.m, self.n, other.m, other.n
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self + other)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self - other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self * other)
    }

    /// Evaluates at `h`, exactly in the rational backend.
    pub fn evaluate<T: Scalar>(&self, h: &Matrix<T>) -> Result<T> {
        if h.shape() != self.shape() {
            return Err(Error::invalid(format!(
                "cannot evaluate a {}x{} polynomial at a {}x{} matrix",
                self.m,
                self.n,
                h.rows(),
                h.cols()
            )));
        }
        self.poly.eval(h.as_slice())
    }

    /// `H ↦ f(H A)` where `f` lives on `m×k` and `A` is `n×k`; the result
    /// lives on `m×n`.
    pub fn substitute_linear(&self, a: &Matrix<BigRational>) -> Result<Self> {
        if a.cols() != self.n {
            return Err(Error::invalid(format!(
                "substitution matrix is {}x{}, needs {} columns",
                a.rows(),
                a.cols(),
                self.n
            )));
        }
        let new_n = a.rows();
        let h = Self::variable_matrix(self.m, new_n);
        let a_poly = a.map(|x| Poly::constant(x.clone()));
        let ha = h.matmul(&a_poly)?;
        let poly = self.poly.compose(ha.as_slice())?;
        Self::new(self.m, new_n, poly)
    }

    pub fn partial(&self, i: usize, j: usize) -> Self {
        PolyMatrixFn {
            m: self.m,
            n: self.n,
            poly: self.poly.derivative(i * self.n + j),
        }
    }

    /// `∂f/∂F_ij` for every entry, row-major.
    pub fn gradient(&self) -> Vec<PolyMatrixFn> {
        (0..self.m)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .map(|(i, j)| self.partial(i, j))
            .collect()
    }

    /// Gradient evaluated at `h`, as an `m×n` matrix.
    pub fn gradient_at<T: Scalar>(&self, h: &Matrix<T>) -> Result<Matrix<T>> {
        let vals = self
            .gradient()
            .iter()
            .map(|g| g.evaluate(h))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_vec(self.m, self.n, vals)
    }

    pub fn homogeneous_parts(&self) -> HomogeneousParts {
        let d = self.degree();
        HomogeneousParts {
            parts: (0..=d)
                .map(|k| PolyMatrixFn {
                    m: self.m,
                    n: self.n,
                    poly: self.poly.homogeneous_part(k),
                })
                .collect(),
        }
    }

    /// Positively homogeneous degree, or `None` if several parts are nonzero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        match self.homogeneous_parts().nonzero_degrees().as_slice() {
            [] => Some(0),
            [d] => Some(*d),
            _ => None,
        }
    }

    /// Recession function for growth order `p`: the degree-`p` part.
    pub fn recession(&self, p: u32) -> Result<Self> {
        let d = self.degree();
        if d > p {
            return Err(Error::GrowthViolation { degree: d, p });
        }
        Ok(PolyMatrixFn {
            m: self.m,
            n: self.n,
            poly: self.poly.homogeneous_part(p),
        })
    }

    /// Exact identity test `f ≡ g`, preceded by a randomized evaluation check
    /// at a few rational points that can only short-circuit to `false`.
    pub fn identical(&self, other: &Self) -> Result<bool> {
        self.check_shape(other)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5a17);
        for _ in 0..5 {
            let point: Vec<BigRational> = (0..self.m * self.n)
                .map(|_| {
                    BigRational::new(rng.gen_range(-100i64..=100).into(), rng.gen_range(1i64..=97).into())
                })
                .collect();
            if self.poly.eval(&point)? != other.poly.eval(&point)? {
                return Ok(false);
            }
        }
        Ok(self.poly == other.poly)
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly::new(self)
    }
}

impl<'a> Add<&'a PolyMatrixFn> for &'a PolyMatrixFn {
    type Output = PolyMatrixFn;
    fn add(self, rhs: &PolyMatrixFn) -> PolyMatrixFn {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        PolyMatrixFn {
            m: self.m,
            n: self.n,
            poly: &self.poly + &rhs.poly,
        }
    }
}

impl<'a> Sub<&'a PolyMatrixFn> for &'a PolyMatrixFn {
    type Output = PolyMatrixFn;
    fn sub(self, rhs: &PolyMatrixFn) -> PolyMatrixFn {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        PolyMatrixFn {
            m: self.m,
            n: self.n,
            poly: &self.poly - &rhs.poly,
        }
    }
}

impl<'a> Mul<&'a PolyMatrixFn> for &'a PolyMatrixFn {
    type Output = PolyMatrixFn;
    fn mul(self, rhs: &PolyMatrixFn) -> PolyMatrixFn {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        PolyMatrixFn {
            m: self.m,
            n: self.n,
            poly: &self.poly * &rhs.poly,
        }
    }
}

impl Neg for &PolyMatrixFn {
    type Output = PolyMatrixFn;
    fn neg(self) -> PolyMatrixFn {
        PolyMatrixFn {
            m: self.m,
            n: self.n,
            poly: -self.poly.clone(),
        }
    }
}

impl fmt::Display for PolyMatrixFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.poly.terms() {
            let name = monomial_name(e, |k| self.var_name(k));
            let (neg, abs) = if *c < BigRational::zero() { (true, -c.clone()) } else { (false, c.clone()) };
            let body = match (abs.is_one(), name.as_str()) {
                (true, "1") => "1".to_string(),
                (true, _) => name,
                (false, "1") => format_rational(&abs),
                (false, _) => format!("{}*{}", format_rational(&abs), name),
            };
            match (first, neg) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// All `s×s` minors of `m×n` matrices as polynomials, lexicographic in `((p),(q))`.
pub fn minor_basis(m: usize, n: usize, s: usize) -> Result<Vec<(MultiIndex, MultiIndex, PolyMatrixFn)>> {
    let mut out = Vec::new();
    for p in index_sets(m, s)? {
        for q in index_sets(n, s)? {
            let f = PolyMatrixFn::minor(m, n, &p, &q)?;
            out.push((p.clone(), q, f));
        }
    }
    Ok(out)
}
