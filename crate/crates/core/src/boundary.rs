//! Decision procedures for null Lagrangians and null Lagrangians at the boundary.
//!
//! A polynomial `N` on `m×n` matrices is a null Lagrangian iff it is an affine
//! combination of minors. It is a null Lagrangian at the boundary with normal
//! `ρ` iff `N(F + a⊗ρ) = N(F)` for all `F` and `a`, iff in rotated coordinates
//! it only involves minors of `H R̃`, where `R = (R̃|ρ) ∈ SO(n)`.
//!
//! Minors are unsigned: the coefficient of `ad_s^{(p)(q)}` is the coefficient
//! of the diagonal monomial `Π F_{p_i q_i}`, and distinct minors share no
//! monomials, so decompositions are read off directly.

use num::{BigRational, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::minors::{binomial, index_sets, Frame, Matrix, MultiIndex};
use crate::poly::{monomial_name, Poly, PolyMatrixFn};
use crate::rational::{format_rational, int, Normal};

/// One coefficient `β_s^{(p)(q)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorTerm {
    pub rows: MultiIndex,
    pub cols: MultiIndex,
    pub coeff: BigRational,
}

impl MinorTerm {
    pub fn order(&self) -> usize {
        self.rows.len()
    }

    fn label(&self) -> String {
        format!("beta_{}{}{} = {}", self.order(), self.rows, self.cols, format_rational(&self.coeff))
    }
}

/// `c + Σ β_s^{(p)(q)} ad_s^{(p)(q)}(H)`, or of `H R̃` when `frame` is set.
/// Only nonzero coefficients are stored, in lexicographic `(s,(p),(q))` order.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorExpansion {
    pub m: usize,
    pub n: usize,
    pub constant: BigRational,
    pub terms: Vec<MinorTerm>,
    pub frame: Option<ExpansionFrame>,
}

/// Frame used by a rotated expansion: the exact rotation that the algebra
/// uses, and the normal it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionFrame {
    pub normal: Normal,
    pub exact: Frame<BigRational>,
}

impl MinorExpansion {
    /// Coefficient for the given 0-based index sets (zero when absent).
    pub fn coefficient(&self, rows: &[usize], cols: &[usize]) -> BigRational {
        self.terms
            .iter()
            .find(|t| t.rows.entries() == rows && t.cols.entries() == cols)
            .map(|t| t.coeff.clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// Rebuilds the polynomial in `H`.
    pub fn to_poly(&self) -> Result<PolyMatrixFn> {
        let inner_n = if self.frame.is_some() { self.n - 1 } else { self.n };
        let mut acc = PolyMatrixFn::constant(self.m, inner_n, self.constant.clone());
        for t in &self.terms {
            let minor = PolyMatrixFn::minor(self.m, inner_n, &t.rows, &t.cols)?;
            acc = &acc + &minor.scale(&t.coeff);
        }
        match &self.frame {
            None => Ok(acc),
            Some(fr) => acc.substitute_linear(&fr.exact.completion),
        }
    }

    pub fn to_report(&self) -> ExpansionReport {
        ExpansionReport {
            shape: [self.m, self.n],
            constant: format_rational(&self.constant),
            rotated: self.frame.is_some(),
            terms: self
                .terms
                .iter()
                .map(|t| TermReport {
                    s: t.order(),
                    p: t.rows.one_based(),
                    q: t.cols.one_based(),
                    coeff: format_rational(&t.coeff),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermReport {
    pub s: usize,
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub shape: [usize; 2],
    pub constant: String,
    pub rotated: bool,
    pub terms: Vec<TermReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameReport {
    pub normal: Vec<f64>,
    pub normal_exact: Vec<String>,
    pub rotation: Vec<Vec<f64>>,
    pub rotation_exact: Vec<Vec<String>>,
}

impl FrameReport {
    pub fn new(normal: &Normal) -> Result<Self> {
        let exact = normal.exact_frame()?;
        Ok(FrameReport {
            normal: normal.float.clone(),
            normal_exact: normal.exact.iter().map(format_rational).collect(),
            rotation: normal.frame()?.rotation.to_rows(),
            rotation_exact: exact
                .rotation
                .to_rows()
                .iter()
                .map(|r| r.iter().map(format_rational).collect())
                .collect(),
        })
    }
}

/// `(F, a)` with `N(F + a⊗ρ) ≠ N(F)`, exact.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub f: Matrix<BigRational>,
    pub a: Vec<BigRational>,
    /// `N(F + a⊗ρ) − N(F)`.
    pub gap: BigRational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    #[serde(rename = "F")]
    pub f: Vec<Vec<String>>,
    pub a: Vec<String>,
    pub gap: String,
}

impl Witness {
    pub fn to_report(&self) -> WitnessReport {
        WitnessReport {
            f: self.f.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect(),
            a: self.a.iter().map(format_rational).collect(),
            gap: format_rational(&self.gap),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundaryNlVerdict {
    pub is_boundary_nl: bool,
    pub expansion: Option<MinorExpansion>,
    pub witness: Option<Witness>,
    /// Components of `q(F) = ∇N(F)ρ` as polynomials in `F` (exact normal).
    pub q: Vec<PolyMatrixFn>,
    pub normal: Normal,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictReport {
    pub is_boundary_nl: bool,
    pub frame: FrameReport,
    pub expansion: Option<ExpansionReport>,
    pub witness: Option<WitnessReport>,
    pub rationalized_normal: bool,
    pub q: Vec<String>,
}

impl BoundaryNlVerdict {
    pub fn to_report(&self) -> Result<VerdictReport> {
        Ok(VerdictReport {
            is_boundary_nl: self.is_boundary_nl,
            frame: FrameReport::new(&self.normal)?,
            expansion: self.expansion.as_ref().map(MinorExpansion::to_report),
            witness: self.witness.as_ref().map(Witness::to_report),
            rationalized_normal: self.normal.rationalized,
            q: self.q.iter().map(ToString::to_string).collect(),
        })
    }
}

fn diagonal_monomial(n: usize, rows: &MultiIndex, cols: &MultiIndex) -> Vec<u16> {
    let mut e = vec![0u16; rows.ambient() * n];
    for (&p, &q) in rows.entries().iter().zip(cols.entries()) {
        e[p * n + q] = 1;
    }
    e
}

/// Exact minor-basis decomposition of a null Lagrangian.
pub fn decompose_minors(f: &PolyMatrixFn) -> Result<MinorExpansion> {
    let (m, n) = f.shape();
    let constant = f.poly().coeff(&[]);
    let mut residual = f.poly() - &Poly::constant(constant.clone());
    let mut terms = Vec::new();
    for s in 1..=m.min(n) {
        for rows in index_sets(m, s)? {
            for cols in index_sets(n, s)? {
                let coeff = f.poly().coeff(&diagonal_monomial(n, &rows, &cols));
                if coeff.is_zero() {
                    continue;
                }
                let minor = PolyMatrixFn::minor(m, n, &rows, &cols)?;
                residual = &residual - &minor.poly().scale(&coeff);
                terms.push(MinorTerm {
                    rows: rows.clone(),
                    cols,
                    coeff,
                });
            }
        }
    }
    if !residual.is_zero() {
        let names = residual
            .terms()
            .map(|(e, c)| format!("{}*{}", format_rational(c), monomial_name(e, |k| f.var_name(k))))
            .collect();
        return Err(Error::NotQuasiaffine { residual: names });
    }
    Ok(MinorExpansion {
        m,
        n,
        constant,
        terms,
        frame: None,
    })
}

fn check_normal(f: &PolyMatrixFn, normal: &Normal) -> Result<()> {
    if normal.dim() != f.cols() {
        return Err(Error::invalid(format!(
            "normal has dimension {}, polynomial has {} columns",
            normal.dim(),
            f.cols()
        )));
    }
    if f.cols() < 2 {
        return Err(Error::invalid("boundary analysis needs n >= 2"));
    }
    Ok(())
}

/// Expansion `c + Σ β̃_s ad_s(H R̃)` for a null Lagrangian at the boundary.
pub fn decompose_boundary(f: &PolyMatrixFn, normal: &Normal) -> Result<MinorExpansion> {
    check_normal(f, normal)?;
    decompose_minors(f)?;
    let (m, n) = f.shape();
    let exact = normal.exact_frame()?;
    let rotated = f.substitute_linear(&exact.rotation.transpose())?;
    let full = decompose_minors(&rotated)?;
    let offending: Vec<String> = full
        .terms
        .iter()
        .filter(|t| t.cols.contains(n - 1))
        .map(MinorTerm::label)
        .collect();
    if !offending.is_empty() {
        return Err(Error::NotBoundaryNl { offending });
    }
    let terms = full
        .terms
        .into_iter()
        .map(|t| {
            Ok(MinorTerm {
                cols: MultiIndex::new(t.cols.entries().to_vec(), n - 1)?,
                ..t
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MinorExpansion {
        m,
        n,
        constant: full.constant,
        terms,
        frame: Some(ExpansionFrame {
            normal: normal.clone(),
            exact,
        }),
    })
}

/// `g(F, a) = N(F + a⊗ρ) − N(F)` in the `mn + m` variables `(F, a)`.
fn rank_one_difference(f: &PolyMatrixFn, rho: &[BigRational]) -> Result<Poly> {
    let (m, n) = f.shape();
    let images: Vec<Poly> = (0..m * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            &Poly::var(k) + &Poly::var(m * n + i).scale(&rho[j])
        })
        .collect();
    Ok(&f.poly().compose(&images)? - f.poly())
}

fn split_point(point: &[BigRational], m: usize, n: usize) -> Result<(Matrix<BigRational>, Vec<BigRational>)> {
    Ok((Matrix::from_vec(m, n, point[..m * n].to_vec())?, point[m * n..].to_vec()))
}

/// Deterministic search for a point where `g` does not vanish.
fn find_witness(g: &Poly, nvars: usize) -> Result<Vec<BigRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x00b0_0d1e);
    for _ in 0..256 {
        let point: Vec<BigRational> = (0..nvars).map(|_| int(rng.gen_range(-2..=2))).collect();
        if !g.eval(&point)?.is_zero() {
            return Ok(point);
        }
    }
    // Restrict to the variables of a monomial with smallest support; the
    // restriction is a nonzero polynomial, so a grid wider than its degree
    // in each variable contains a nonzero point.
    let (exps, _) = g
        .terms()
        .min_by_key(|(e, _)| e.iter().filter(|&&k| k > 0).count())
        .ok_or_else(|| Error::invalid("zero polynomial has no witness"))?;
    let support: Vec<usize> = (0..exps.len()).filter(|&i| exps[i] > 0).collect();
    let radius = (g.degree() as i64 / 2 + 1).max(2);
    let width = (2 * radius + 1) as usize;
    let total = width.checked_pow(support.len() as u32).unwrap_or(usize::MAX);
    let mut point = vec![BigRational::zero(); nvars];
    for idx in 0..total {
        let mut r = idx;
        for &v in &support {
            point[v] = int((r % width) as i64 - radius);
            r /= width;
        }
        if !g.eval(&point)?.is_zero() {
            return Ok(point);
        }
    }
    Err(Error::invalid("witness search exhausted its grid"))
}

/// Decides rank-one invariance along `ρ`, exactly for the rational normal.
pub fn is_boundary_nl(f: &PolyMatrixFn, normal: &Normal) -> Result<BoundaryNlVerdict> {
    check_normal(f, normal)?;
    let (m, n) = f.shape();
    let g = rank_one_difference(f, &normal.exact)?;
    let q = boundary_trace_poly(f, &normal.exact);
    if g.is_zero() {
        let expansion = decompose_boundary(f, normal)?;
        return Ok(BoundaryNlVerdict {
            is_boundary_nl: true,
            expansion: Some(expansion),
            witness: None,
            q,
            normal: normal.clone(),
        });
    }
    let point = find_witness(&g, m * n + m)?;
    let gap = g.eval(&point)?;
    let (fm, a) = split_point(&point, m, n)?;
    Ok(BoundaryNlVerdict {
        is_boundary_nl: false,
        expansion: None,
        witness: Some(Witness { f: fm, a, gap }),
        q,
        normal: normal.clone(),
    })
}

/// Rank-one difference evaluated directly, `N(F + a⊗ρ) − N(F)`.
pub fn rank_one_gap(f: &PolyMatrixFn, fm: &Matrix<BigRational>, a: &[BigRational], rho: &[BigRational]) -> Result<BigRational> {
    let shifted = fm.add(&crate::minors::rank_one(a, rho))?;
    Ok(f.evaluate(&shifted)? - f.evaluate(fm)?)
}

/// `N − ∇N(F₀)·F`.
pub fn special_form(f: &PolyMatrixFn, f0: &Matrix<BigRational>) -> Result<PolyMatrixFn> {
    let grad = f.gradient_at(f0)?;
    Ok(f - &PolyMatrixFn::linear(&grad))
}

fn boundary_trace_poly(f: &PolyMatrixFn, rho: &[BigRational]) -> Vec<PolyMatrixFn> {
    let (m, n) = f.shape();
    (0..m)
        .map(|i| {
            (0..n).fold(PolyMatrixFn::zero(m, n), |acc, j| &acc + &f.partial(i, j).scale(&rho[j]))
        })
        .collect()
}

/// `q = ∇N(F)ρ`.
pub fn boundary_trace_q(f: &PolyMatrixFn, fm: &Matrix<BigRational>, rho: &[BigRational]) -> Result<Vec<BigRational>> {
    if rho.len() != f.cols() {
        return Err(Error::invalid("normal dimension does not match the polynomial"));
    }
    f.gradient_at(fm)?.mul_vec(rho)
}

/// Real-valued variant of [`boundary_trace_q`].
pub fn boundary_trace_q_f64(f: &PolyMatrixFn, fm: &Matrix<f64>, rho: &[f64]) -> Result<Vec<f64>> {
    if rho.len() != f.cols() {
        return Err(Error::invalid("normal dimension does not match the polynomial"));
    }
    f.gradient_at(fm)?.mul_vec(rho)
}

/// Number of elements of [`boundary_nl_basis`].
pub fn boundary_nl_basis_len(m: usize, n: usize) -> usize {
    1 + (1..=m.min(n - 1)).map(|s| binomial(m, s) * binomial(n - 1, s)).sum::<usize>()
}

/// `1` and every `ad_s^{(p)(q)}(H R̃)`, expanded in `H`.
pub fn boundary_nl_basis(m: usize, n: usize, normal: &Normal) -> Result<Vec<PolyMatrixFn>> {
    if n < 2 || normal.dim() != n {
        return Err(Error::invalid(format!("basis needs n >= 2 and a normal in R^{n}")));
    }
    let completion = normal.exact_frame()?.completion;
    let mut out = vec![PolyMatrixFn::constant(m, n, int(1))];
    for s in 1..=m.min(n - 1) {
        for rows in index_sets(m, s)? {
            for cols in index_sets(n - 1, s)? {
                let minor = PolyMatrixFn::minor(m, n - 1, &rows, &cols)?;
                out.push(minor.substitute_linear(&completion)?);
            }
        }
    }
    Ok(out)
}
