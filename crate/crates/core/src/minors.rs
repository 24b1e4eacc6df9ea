//! Dense small-matrix algebra: multi-index sets, unsigned minors, cofactors,
//! rotation completion of a unit normal and rank-one products.
//!
//! Two numeric backends share one generic [`Matrix`]: exact rationals
//! ([`BigRational`]) and binary64 reals. Determinants use Laplace expansion
//! in the exact backend and LU with full pivoting in the real one.
//!
//! Minors follow the unsigned convention: the `((p),(q))` entry of `ad_s(H)`
//! is the plain determinant of the `s×s` submatrix with rows `(p)` and
//! columns `(q)`, with no `(-1)^{p+q}` factor.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Commutative ring elements usable as matrix entries (numbers or polynomials).
pub trait Ring:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
{
}

impl<T> Ring for T where
    T: Clone
        + fmt::Debug
        + PartialEq
        + Zero
        + One
        + Neg<Output = Self>
        + Add<Output = Self>
        + Sub<Output = Self>
        + Mul<Output = Self>
        + Send
        + Sync
{
}

/// Numeric backend: a field with a backend-specific determinant.
pub trait Scalar: Ring + Div<Output = Self> {
    fn from_rational(q: &BigRational) -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_real(&self) -> f64;
    fn determinant(m: &Matrix<Self>) -> Self;
}

impl Scalar for f64 {
    fn from_rational(q: &BigRational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_real(&self) -> f64 {
        *self
    }

    fn determinant(m: &Matrix<Self>) -> Self {
        det_lu(m)
    }
}

impl Scalar for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_real(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn determinant(m: &Matrix<Self>) -> Self {
        det_laplace(m)
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be at least 1"));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid("ragged rows"));
        }
        Self::from_vec(r, c, rows.iter().flatten().cloned().collect())
    }

    pub fn diag(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entries in row-major order.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j).clone() + a.clone() * other.get(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::invalid("vector length does not match column count"));
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols).fold(T::zero(), |acc, j| {
                    acc + self.get(i, j).clone() * v[j].clone()
                })
            })
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::invalid("shape mismatch in matrix addition"));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }


    /// Frobenius inner product `A·B = Σ A_ij B_ij`.
    pub fn dot(&self, other: &Self) -> Result<T> {
        if self.shape() != other.shape() {
            return Err(Error::invalid("shape mismatch in Frobenius product"));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    /// Submatrix with the given (0-based) rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

}

impl<T: Scalar> Matrix<T> {
    pub fn det(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::invalid(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(T::determinant(self))
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Scalar::to_real)
    }
}

impl Matrix<f64> {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl Matrix<BigRational> {
    /// Exact dyadic image of a binary64 matrix.
    pub fn from_f64_exact(m: &Matrix<f64>) -> Result<Self> {
        let data = m
            .as_slice()
            .iter()
            .map(|&x| {
                BigRational::from_float(x)
                    .ok_or_else(|| Error::invalid(format!("non-finite entry {x}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_vec(m.rows(), m.cols(), data)
    }
}

/// Determinant by cofactor expansion along the first row; valid over any
/// commutative ring (used for symbolic minors as well).
pub fn det_laplace<T: Ring>(m: &Matrix<T>) -> T {
    let n = m.rows;
    match n {
        0 => T::one(),
        1 => m.data[0].clone(),
        2 => m.data[0].clone() * m.data[3].clone() - m.data[1].clone() * m.data[2].clone(),
        _ => {
            let rest: Vec<usize> = (1..n).collect();
            let mut acc = T::zero();
            for j in 0..n {
                let a = m.get(0, j);
                if a.is_zero() {
                    continue;
                }
                let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                let minor = det_laplace(&m.submatrix(&rest, &cols));
                let term = a.clone() * minor;
                acc = if j % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

fn det_lu(m: &Matrix<f64>) -> f64 {
    let n = m.rows;
    let mut a = m.data.clone();
    let mut det = 1.0;
    for k in 0..n {
        let (mut pi, mut pj, mut best) = (k, k, 0.0);
        for i in k..n {
            for j in k..n {
                let v = a[i * n + j].abs();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pi != k {
            for j in 0..n {
                a.swap(k * n + j, pi * n + j);
            }
            det = -det;
        }
        if pj != k {
            for i in 0..n {
                a.swap(i * n + k, i * n + pj);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        for i in k + 1..n {
            let factor = a[i * n + k] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in k + 1..n {
                a[i * n + j] -= factor * a[k * n + j];
            }
        }
    }
    det
}

/// Strictly increasing subset of `{0, …, r-1}` (stored 0-based, displayed 1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex {
    entries: Vec<usize>,
    r: usize,
}

impl MultiIndex {
    /// Build from 0-based entries; they must be strictly increasing and below `r`.
    pub fn new(entries: Vec<usize>, r: usize) -> Result<Self> {
        if entries.is_empty() || entries.len() > r {
            return Err(Error::invalid(format!(
                "multi-index of cardinality {} in ambient dimension {r}",
                entries.len()
            )));
        }
        if entries.windows(2).any(|w| w[0] >= w[1]) || entries.last().is_some_and(|&e| e >= r) {
            return Err(Error::invalid(format!(
                "multi-index {entries:?} is not strictly increasing within 0..{r}"
            )));
        }
        Ok(MultiIndex { entries, r })
    }

    /// Build from 1-based entries as written in the literature.
    pub fn from_one_based(entries: &[usize], r: usize) -> Result<Self> {
        if entries.contains(&0) {
            return Err(Error::invalid("1-based multi-index contains 0"));
        }
        Self::new(entries.iter().map(|e| e - 1).collect(), r)
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ambient(&self) -> usize {
        self.r
    }

    pub fn contains(&self, i: usize) -> bool {
        self.entries.binary_search(&i).is_ok()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// All `C(r,s)` strictly increasing `s`-subsets of `{1..r}` in lexicographic order.
pub fn index_sets(r: usize, s: usize) -> Result<Vec<MultiIndex>> {
    if s < 1 || s > r {
        return Err(Error::invalid(format!("index_sets needs 1 <= s <= r, got r={r}, s={s}")));
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..s).collect();
    loop {
        out.push(MultiIndex {
            entries: cur.clone(),
            r,
        });
        // advance to the next combination
        let mut i = s;
        while i > 0 && cur[i - 1] == r - s + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        cur[i - 1] += 1;
        for j in i..s {
            cur[j] = cur[j - 1] + 1;
        }
    }
    Ok(out)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All `s×s` minors of a matrix, flattened lexicographically over `((p),(q))`.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorVector<T> {
    pub s: usize,
    pub row_sets: Vec<MultiIndex>,
    pub col_sets: Vec<MultiIndex>,
    pub values: Vec<T>,
}

impl<T: Scalar> MinorVector<T> {
    pub fn get(&self, p: usize, q: usize) -> &T {
        &self.values[p * self.col_sets.len() + q]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, &T)> {
        let nq = self.col_sets.len();
        self.values
            .iter()
            .enumerate()
            .map(move |(k, v)| (&self.row_sets[k / nq], &self.col_sets[k % nq], v))
    }
}

/// `ad_s(H)`: every `s×s` minor of `h` (unsigned convention).
pub fn ad_s<T: Scalar>(h: &Matrix<T>, s: usize) -> Result<MinorVector<T>> {
    let (m, n) = h.shape();
    if s < 1 || s > m.min(n) {
        return Err(Error::invalid(format!(
            "minor order {s} out of range for a {m}x{n} matrix"
        )));
    }
    let row_sets = index_sets(m, s)?;
    let col_sets = index_sets(n, s)?;
    let mut values = Vec::with_capacity(row_sets.len() * col_sets.len());
    for p in &row_sets {
        for q in &col_sets {
            values.push(T::determinant(&h.submatrix(p.entries(), q.entries())));
        }
    }
    Ok(MinorVector {
        s,
        row_sets,
        col_sets,
        values,
    })
}

/// Signed cofactor matrix, `[Cof F]_ij = (-1)^{i+j} det F'_ij`.
pub fn cofactor<T: Scalar>(f: &Matrix<T>) -> Result<Matrix<T>> {
    if !f.is_square() {
        return Err(Error::invalid(format!(
            "cofactor of non-square {}x{} matrix",
            f.rows(),
            f.cols()
        )));
    }
    let n = f.rows();
    if n == 1 {
        return Ok(Matrix::identity(1));
    }
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
        for j in 0..n {
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let d = T::determinant(&f.submatrix(&rows, &cols));
            out.set(i, j, if (i + j) % 2 == 0 { d } else { -d });
        }
    }
    Ok(out)
}

/// Inverse through the adjugate; `None` when singular.
pub fn inverse<T: Scalar>(f: &Matrix<T>) -> Result<Option<Matrix<T>>> {
    let d = f.det()?;
    if d.is_zero() {
        return Ok(None);
    }
    let adj = cofactor(f)?.transpose();
    Ok(Some(adj.map(|x| x.clone() / d.clone())))
}

/// Dyad `a ⊗ b` with entries `a_i b_j`.
pub fn rank_one<T: Ring>(a: &[T], b: &[T]) -> Matrix<T> {
    let mut out = Matrix {
        rows: a.len(),
        cols: b.len(),
        data: Vec::with_capacity(a.len() * b.len()),
    };
    for ai in a {
        for bj in b {
            out.data.push(ai.clone() * bj.clone());
        }
    }
    out
}

/// Unit normal together with a completion `R̃` so that `R = (R̃|ρ) ∈ SO(n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame<T> {
    pub normal: Vec<T>,
    pub completion: Matrix<T>,
    pub rotation: Matrix<T>,
}

pub type BoundaryFrame = Frame<f64>;

/// Householder reflection taking `e_n` to `rho`, first column negated when
/// needed so the result is a proper rotation. Works in either backend; in the
/// exact backend `rho` must be an exact unit vector.
fn householder_rotation<T: Scalar>(rho: &[T]) -> Matrix<T> {
    let n = rho.len();
    let last = rho[n - 1].clone();
    // v = e_n - rho, with 1 - rho_n rewritten to avoid cancellation near e_n
    let tail_sq = rho[..n - 1]
        .iter()
        .fold(T::zero(), |acc, x| acc + x.clone() * x.clone());
    let vn = if last.to_real() > 0.0 {
        tail_sq.clone() / (T::one() + last.clone())
    } else {
        T::one() - last.clone()
    };
    let mut v: Vec<T> = rho[..n - 1].iter().map(|x| -x.clone()).collect();
    v.push(vn.clone());
    let vtv = tail_sq + vn.clone() * vn;
    let mut r = Matrix::identity(n);
    if vtv.is_zero() {
        return r;
    }
    let two = T::one() + T::one();
    for i in 0..n {
        for j in 0..n {
            let upd = r.get(i, j).clone() - two.clone() * v[i].clone() * v[j].clone() / vtv.clone();
            r.set(i, j, upd);
        }
    }
    if T::determinant(&r).to_real() < 0.0 {
        for i in 0..n {
            let x = -r.get(i, 0).clone();
            r.set(i, 0, x);
        }
    }
    r
}

impl<T: Scalar> Frame<T> {
    fn from_rotation(normal: Vec<T>, rotation: Matrix<T>) -> Self {
        let n = normal.len();
        let cols: Vec<usize> = (0..n - 1).collect();
        let rows: Vec<usize> = (0..n).collect();
        let completion = rotation.submatrix(&rows, &cols);
        Frame {
            normal,
            completion,
            rotation,
        }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }
}

/// Deterministic rotation completion of a real unit normal.
pub fn complete_rotation(rho: &[f64]) -> Result<BoundaryFrame> {
    let n = rho.len();
    if n < 2 {
        return Err(Error::invalid("a boundary normal needs n >= 2"));
    }
    let norm = rho.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!("normal has length {norm}, expected 1")));
    }
    let unit: Vec<f64> = rho.iter().map(|x| x / norm).collect();
    let rotation = householder_rotation(&unit);
    let normal = rotation.col(n - 1);
    Ok(Frame::from_rotation(normal, rotation))
}

/// Exact rotation completion of a rational unit normal (`|rho|^2 = 1` exactly).
pub fn complete_rotation_exact(rho: &[BigRational]) -> Result<Frame<BigRational>> {
    let n = rho.len();
    if n < 2 {
        return Err(Error::invalid("a boundary normal needs n >= 2"));
    }
    let norm_sq = rho
        .iter()
        .fold(BigRational::zero(), |acc, x| acc + x * x);
    if !norm_sq.is_one() {
        return Err(Error::invalid("exact normal is not a unit vector"));
    }
    let rotation = householder_rotation(rho);
    Ok(Frame::from_rotation(rho.to_vec(), rotation))
}

/// Largest deviation of a real frame from its defining invariants.
pub fn frame_defect(frame: &BoundaryFrame) -> f64 {
    let n = frame.dim();
    let r = &frame.rotation;
    let rtr = r.transpose().matmul(r).expect("square");
    let orth = rtr.max_abs_diff(&Matrix::identity(n));
    let det = (r.det().expect("square") - 1.0).abs();
    let unit = (frame.normal.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs();
    let last = (0..n)
        .map(|i| (r.get(i, n - 1) - frame.normal[i]).abs())
        .fold(0.0, f64::max);
    let perp = frame
        .completion
        .transpose()
        .mul_vec(&frame.normal)
        .expect("shape")
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    orth.max(det).max(unit).max(last).max(perp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> BigRational {
        BigRational::from_i64(n)
    }

    fn int_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Matrix<BigRational> {
        let data = (0..m * n).map(|_| q(rng.gen_range(-5..=5))).collect();
        Matrix::from_vec(m, n, data).unwrap()
    }

    #[test]
    fn index_sets_small_cases() {
        let sets = index_sets(3, 2).unwrap();
        let got: Vec<Vec<usize>> = sets.iter().map(MultiIndex::one_based).collect();
        assert_eq!(got, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);

        let sets = index_sets(2, 2).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].one_based(), vec![1, 2]);

        let sets = index_sets(4, 2).unwrap();
        assert_eq!(sets.len(), 6);
        assert_eq!(sets[0].one_based(), vec![1, 2]);
        assert_eq!(sets[5].one_based(), vec![3, 4]);
    }

    #[test]
    fn index_sets_match_brute_force() {
        for r in 1..=7 {
            for s in 1..=r {
                let sets = index_sets(r, s).unwrap();
                // brute force over bitmasks, sorted lexicographically
                let mut brute: Vec<Vec<usize>> = (0u32..(1 << r))
                    .filter(|mask| mask.count_ones() as usize == s)
                    .map(|mask| (0..r).filter(|i| mask & (1 << i) != 0).collect())
                    .collect();
                brute.sort();
                let got: Vec<Vec<usize>> = sets.iter().map(|m| m.entries().to_vec()).collect();
                assert_eq!(got, brute);
                assert_eq!(sets.len(), binomial(r, s));
            }
        }
    }

    #[test]
    fn index_sets_rejects_bad_orders() {
        assert!(index_sets(3, 4).is_err());
        assert!(index_sets(3, 0).is_err());
    }

    #[test]
    fn minors_of_identity_and_scaled_identity() {
        let id = Matrix::<BigRational>::identity(3);
        let ad = ad_s(&id, 2).unwrap();
        for (p, qq, v) in ad.iter() {
            let expected = if p == qq { q(1) } else { q(0) };
            assert_eq!(*v, expected);
        }
        let two = Matrix::<BigRational>::identity(2).scale(&q(2));
        let ad = ad_s(&two, 2).unwrap();
        assert_eq!(ad.values, vec![q(4)]);
        assert!(ad_s(&two, 3).is_err());
    }

    #[test]
    fn second_minors_match_cofactor_of_transpose() {
        // For 3x3 H, the 2x2 minor with rows {all but i} and cols {all but j}
        // equals (-1)^{i+j} Cof(H)_{ij}; the cofactor of the transpose is the
        // transpose of the cofactor.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let h = int_matrix(&mut rng, 3, 3);
            let ad = ad_s(&h, 2).unwrap();
            let cof_t = cofactor(&h.transpose()).unwrap().transpose();
            for (pi, p) in ad.row_sets.iter().enumerate() {
                for (qi, qq) in ad.col_sets.iter().enumerate() {
                    let i = (0..3).find(|r| !p.contains(*r)).unwrap();
                    let j = (0..3).find(|c| !qq.contains(*c)).unwrap();
                    let signed = if (i + j) % 2 == 0 {
                        cof_t.get(i, j).clone()
                    } else {
                        -cof_t.get(i, j).clone()
                    };
                    assert_eq!(*ad.get(pi, qi), signed);
                }
            }
        }
    }

    #[test]
    fn cofactor_examples() {
        let id = Matrix::<BigRational>::identity(3);
        assert_eq!(cofactor(&id).unwrap(), id);
        let d = Matrix::diag(&[q(2), q(3)]);
        assert_eq!(cofactor(&d).unwrap(), Matrix::diag(&[q(3), q(2)]));
        let rect = Matrix::<BigRational>::zeros(2, 3);
        assert!(cofactor(&rect).is_err());
    }

    #[test]
    fn adjugate_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let f = int_matrix(&mut rng, 3, 3);
            let det = f.det().unwrap();
            let lhs = f.transpose().matmul(&cofactor(&f).unwrap()).unwrap();
            assert_eq!(lhs, Matrix::identity(3).scale(&det));
        }
    }

    #[test]
    fn lu_matches_laplace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=6 {
            for _ in 0..10 {
                let exact = int_matrix(&mut rng, n, n);
                let d_exact = exact.det().unwrap().to_real();
                let d_lu = exact.to_f64().det().unwrap();
                assert!((d_exact - d_lu).abs() <= 1e-10 * (1.0 + d_exact.abs()));
            }
        }
    }

    #[test]
    fn rotation_of_e_n_is_identity() {
        for n in 2..=5 {
            let mut e = vec![0.0; n];
            e[n - 1] = 1.0;
            let fr = complete_rotation(&e).unwrap();
            assert_eq!(fr.rotation, Matrix::identity(n));
        }
    }

    #[test]
    fn rotation_of_minus_e2() {
        let fr = complete_rotation(&[0.0, -1.0]).unwrap();
        assert!(frame_defect(&fr) < 1e-12);
        let image = fr.rotation.mul_vec(&[0.0, 1.0]).unwrap();
        assert!((image[0]).abs() < 1e-15 && (image[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_of_diagonal_normal() {
        let s = 1.0 / 3f64.sqrt();
        let fr = complete_rotation(&[s, s, s]).unwrap();
        assert!(frame_defect(&fr) < 1e-12);
    }

    #[test]
    fn rotation_rejects_non_unit() {
        assert!(complete_rotation(&[1.0, 1.0]).is_err());
        assert!(complete_rotation(&[1.0]).is_err());
    }

    #[test]
    fn rotation_invariants_on_random_normals() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in 2..=5 {
            for _ in 0..1000 {
                let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm < 1e-3 {
                    continue;
                }
                let rho: Vec<f64> = v.iter().map(|x| x / norm).collect();
                let fr = complete_rotation(&rho).unwrap();
                assert!(frame_defect(&fr) < 1e-12, "defect {}", frame_defect(&fr));
            }
        }
    }

    #[test]
    fn exact_rotation_is_rational_rotation() {
        let rho = vec![
            BigRational::new(3.into(), 5.into()),
            BigRational::new(4.into(), 5.into()),
        ];
        let fr = complete_rotation_exact(&rho).unwrap();
        let rtr = fr.rotation.transpose().matmul(&fr.rotation).unwrap();
        assert_eq!(rtr, Matrix::identity(2));
        assert_eq!(fr.rotation.det().unwrap(), q(1));
        assert_eq!(fr.rotation.col(1), rho);
    }

    #[test]
    fn rank_one_examples() {
        let a = [1.0, 0.0];
        let e = rank_one(&a, &a);
        assert_eq!(e.to_rows(), vec![vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(rank_one(&[0.0, 0.0], &[1.0, 2.0, 3.0]), Matrix::zeros(2, 3));
        let d = rank_one(&[1.0, 2.0], &[3.0, 4.0]);
        assert_eq!(d.to_rows(), vec![vec![3.0, 4.0], vec![6.0, 8.0]]);
    }

    #[test]
    fn full_order_minor_is_determinant_and_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=4 {
            let rho: Vec<f64> = {
                let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter().map(|x| x / norm).collect()
            };
            let r = complete_rotation(&rho).unwrap().rotation;
            for _ in 0..10 {
                let h = int_matrix(&mut rng, n, n).to_f64();
                let full = ad_s(&h, n).unwrap().values[0];
                let det = h.det().unwrap();
                assert!((full - det).abs() <= 1e-10 * (1.0 + det.abs()));
                let rotated = ad_s(&h.matmul(&r).unwrap(), n).unwrap().values[0];
                assert!((rotated - det).abs() <= 1e-10 * (1.0 + det.abs()));
            }
        }
    }
}
