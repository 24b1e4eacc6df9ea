//! Weak continuity of `u ↦ f(∇u)` along concentrating sequences.

use num::{BigRational, One};
use rayon::prelude::*;

use super::quad::{integrate_box, QuadOptions};
use super::report::{linear_fit, ExperimentKind, ExperimentReport, FitReport, ReportRow, Verdict};
use super::sequence::AnalyticSequence;
use crate::error::{Error, Result};
use crate::poly::{CompiledPoly, Poly, PolyMatrixFn};

/// Polynomial test function `φ(x)` on the closed unit cube.
#[derive(Clone, Debug)]
pub struct TestFunction {
    pub id: String,
    poly: Poly,
    compiled: CompiledPoly,
}

impl TestFunction {
    pub fn new(id: impl Into<String>, n: usize, poly: Poly) -> Result<Self> {
        let compiled = PolyMatrixFn::new(1, n, poly.clone())?.compile();
        Ok(TestFunction {
            id: id.into(),
            poly,
            compiled,
        })
    }

    /// Parses `1` or a product of coordinates such as `x1*x2*x2`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let text = text.trim();
        let mut p = Poly::one();
        if text != "1" {
            for factor in text.split('*') {
                let idx = factor
                    .trim()
                    .strip_prefix('x')
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|&i| (1..=n).contains(&i))
                    .ok_or_else(|| Error::invalid(format!("bad test function factor `{factor}` (expected x1..x{n})")))?;
                p = &p * &Poly::var(idx - 1);
            }
        }
        Self::new(text, n, p)
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn is_constant_one(&self) -> bool {
        self.poly == Poly::one()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.compiled.value(x)
    }
}

/// `1, x1, xn, x1·xn`.
pub fn default_test_functions(n: usize) -> Vec<TestFunction> {
    ["1".to_string(), "x1".into(), format!("x{n}"), format!("x1*x{n}")]
        .iter()
        .map(|s| TestFunction::parse(s, n).expect("valid default"))
        .collect()
}

/// Tail extrapolation `I_k ≈ L + C k^{−α}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrapolation {
    pub limit: f64,
    pub alpha: Option<f64>,
    pub r2: f64,
    pub monotone: bool,
}

/// `α` from the last three points, then `L`, `C` by least squares on all points.
/// Constant tails give `L` = last value and `R² = 1`; tails whose increments
/// change sign give the last value with `R² = 0`.
pub fn richardson(ks: &[u64], values: &[f64]) -> Extrapolation {
    let len = values.len();
    let last = values[len - 1];
    let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if len < 3 {
        return Extrapolation { limit: last, alpha: None, r2: 0.0, monotone: false };
    }
    let (k1, k2, k3) = (ks[len - 3] as f64, ks[len - 2] as f64, ks[len - 1] as f64);
    let (i1, i2, i3) = (values[len - 3], values[len - 2], values[len - 1]);
    let (d1, d2) = (i1 - i2, i2 - i3);
    if d1.abs().max(d2.abs()) <= 1e-9 * scale {
        return Extrapolation { limit: last, alpha: None, r2: 1.0, monotone: true };
    }
    if d1 * d2 <= 0.0 {
        return Extrapolation { limit: last, alpha: None, r2: 0.0, monotone: false };
    }
    let ratio = d1 / d2;
    let model = |a: f64| (k1.powf(-a) - k2.powf(-a)) / (k2.powf(-a) - k3.powf(-a));
    let (mut lo, mut hi) = (1e-3, 20.0);
    let alpha = if ratio <= model(lo) {
        lo
    } else if ratio >= model(hi) {
        hi
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if model(mid) < ratio {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let x: Vec<f64> = ks.iter().map(|&k| (k as f64).powf(-alpha)).collect();
    let (limit, _, r2) = linear_fit(&x, values);
    Extrapolation { limit, alpha: Some(alpha), r2, monotone: true }
}

#[derive(Clone, Debug)]
pub struct WeakOptions {
    pub quad: QuadOptions,
    /// Pointwise slack of the nonnegativity check.
    pub nonneg_slack: f64,
}

impl Default for WeakOptions {
    fn default() -> Self {
        WeakOptions {
            quad: QuadOptions::with_tol(1e-10, 1e-9),
            nonneg_slack: 1e-12,
        }
    }
}

struct Cell {
    value: f64,
    error: f64,
    min_f: f64,
}

fn unit_box(n: usize) -> Vec<(f64, f64)> {
    vec![(0.0, 1.0); n]
}

/// `∫_Ω φ f(∇u_k)`, split as the limit part over `Ω` plus the
/// (compactly supported) difference over the active box.
fn sequence_integral(
    f: &CompiledPoly,
    seq: &AnalyticSequence,
    phi: &TestFunction,
    target: f64,
    quad: &QuadOptions,
) -> Result<Cell> {
    let mut min_f = f64::INFINITY;
    let q = integrate_box(
        &mut |x| {
            let fk = f.value(&seq.grad(x));
            min_f = min_f.min(fk);
            phi.value(x) * (fk - f.value(&seq.limit_grad(x)))
        },
        &seq.active_box(),
        quad,
    )?;
    Ok(Cell {
        value: target + q.value,
        error: q.error,
        min_f,
    })
}

/// Computes `∫_Ω φ f(∇u_k)` for every `k` and `φ`, extrapolates in `k` and
/// compares with `∫_Ω φ f(∇u)` for the weak limit `u`.
///
/// With `tol = max(1e−3, 1e−2·|target|)`: weakly continuous when every
/// extrapolated limit is within `tol`; not weakly continuous when some limit
/// misses by more than `5·tol` with `R² ≥ 0.99`; inconclusive otherwise.
pub fn weak_continuity_experiment(
    f: &PolyMatrixFn,
    seq: &AnalyticSequence,
    phis: &[TestFunction],
    ks: &[u64],
    opts: &WeakOptions,
) -> Result<ExperimentReport> {
    if f.shape() != (seq.m, seq.n) {
        return Err(Error::invalid(format!(
            "f is {}x{} but the sequence has gradients of shape {}x{}",
            f.rows(),
            f.cols(),
            seq.m,
            seq.n
        )));
    }
    if !phis.iter().any(TestFunction::is_constant_one) || phis.iter().filter(|p| p.poly().degree() > 0).count() < 3 {
        return Err(Error::invalid("test functions must include 1 and at least 3 nonconstant functions"));
    }
    if ks.is_empty() || ks.windows(2).any(|w| w[0] >= w[1]) || ks[0] < 1 {
        return Err(Error::invalid("k list must be nonempty, positive and strictly increasing"));
    }
    let compiled = f.compile();
    let seqs: Vec<AnalyticSequence> = ks.iter().map(|&k| seq.with_k(k)).collect::<Result<_>>()?;

    let targets: Vec<Result<f64>> = phis
        .par_iter()
        .map(|phi| {
            let q = integrate_box(
                &mut |x| phi.value(x) * compiled.value(&seq.limit_grad(x)),
                &unit_box(seq.n),
                &opts.quad,
            )?;
            Ok(q.value)
        })
        .collect();

    let jobs: Vec<(usize, usize)> = (0..ks.len()).flat_map(|i| (0..phis.len()).map(move |j| (i, j))).collect();
    let cells: Vec<Result<Cell>> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let target = targets[j].as_ref().map_err(Clone::clone)?;
            sequence_integral(&compiled, &seqs[i], &phis[j], *target, &opts.quad)
        })
        .collect();

    let mut failures = Vec::new();
    for (phi, t) in phis.iter().zip(&targets) {
        if let Err(e) = t {
            failures.push(format!("target for phi={}: {e}", phi.id));
        }
    }
    for (&(i, j), c) in jobs.iter().zip(&cells) {
        if let Err(e) = c {
            failures.push(format!("k={} phi={}: {e}", ks[i], phis[j].id));
        }
    }
    let min_integrand = cells.iter().filter_map(|c| c.as_ref().ok()).map(|c| c.min_f).fold(f64::INFINITY, f64::min);
    let min_integrand = min_integrand.is_finite().then_some(min_integrand);

    let mut fits = Vec::new();
    let mut rows = Vec::new();
    let (mut all_close, mut some_far) = (true, false);
    for (j, phi) in phis.iter().enumerate() {
        let values: Option<Vec<f64>> = (0..ks.len()).map(|i| cells[i * phis.len() + j].as_ref().ok().map(|c| c.value)).collect();
        let target = targets[j].as_ref().ok().copied();
        let (ext, tol) = match (&values, target) {
            (Some(v), Some(t)) => (Some(richardson(ks, v)), Some(1e-3f64.max(1e-2 * t.abs()))),
            _ => (None, None),
        };
        match (ext, target, tol) {
            (Some(e), Some(t), Some(tol)) => {
                let dev = (e.limit - t).abs();
                all_close &= dev <= tol;
                some_far |= dev > 5.0 * tol && e.r2 >= 0.99;
            }
            _ => all_close = false,
        }
        for (i, &k) in ks.iter().enumerate() {
            if let Ok(c) = &cells[i * phis.len() + j] {
                rows.push(ReportRow {
                    k,
                    label: phi.id.clone(),
                    integral: c.value,
                    error: c.error,
                    est_limit: ext.map(|e| e.limit),
                    fit_slope: ext.and_then(|e| e.alpha),
                    r2: ext.map(|e| e.r2),
                });
            }
        }
        fits.push(FitReport {
            label: phi.id.clone(),
            target,
            est_limit: ext.map(|e| e.limit),
            slope: ext.and_then(|e| e.alpha),
            expected_slope: None,
            r2: ext.map(|e| e.r2),
            tolerance: tol,
            monotone: ext.is_some_and(|e| e.monotone),
        });
    }
    let verdict = if !failures.is_empty() {
        Verdict::Inconclusive
    } else if all_close {
        Verdict::WeaklyContinuous
    } else if some_far {
        Verdict::NotWeaklyContinuous
    } else {
        Verdict::Inconclusive
    };
    let mut notes = Vec::new();
    let nonnegative = min_integrand.map(|m| m >= -opts.nonneg_slack);
    if nonnegative == Some(false) {
        notes.push("f(grad u_k) takes negative values on quadrature nodes; the nonnegativity hypothesis does not hold".into());
    }
    Ok(ExperimentReport {
        experiment: ExperimentKind::WeakContinuity,
        sequence: seq.kind,
        n: seq.n,
        m: seq.m,
        ks: ks.to_vec(),
        rows,
        fits,
        anisotropic: Vec::new(),
        verdict,
        nonnegative_on_nodes: nonnegative,
        min_integrand,
        failures,
        notes,
    })
}

/// `φ ≡ 1` as a rational-coefficient polynomial.
pub fn constant_test_function(n: usize) -> TestFunction {
    TestFunction::new("1", n, Poly::constant(BigRational::one())).expect("constant")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conc::sequence::det_concentration_sequence;

    #[test]
    fn richardson_recovers_algebraic_tail() {
        let ks = [8, 16, 32, 64];
        let v: Vec<f64> = ks.iter().map(|&k| 2.0 + 3.0 / (k as f64).powf(1.5)).collect();
        let e = richardson(&ks, &v);
        assert!((e.limit - 2.0).abs() < 1e-10);
        assert!((e.alpha.unwrap() - 1.5).abs() < 1e-8);
        assert!(e.r2 > 0.999_999);
    }

    #[test]
    fn richardson_flags_oscillation() {
        let e = richardson(&[1, 2, 3, 4], &[1.0, 2.0, 1.0, 2.0]);
        assert!(!e.monotone);
        assert_eq!(e.r2, 0.0);
        let c = richardson(&[1, 2, 3], &[5.0, 5.0, 5.0]);
        assert_eq!((c.limit, c.r2), (5.0, 1.0));
    }

    #[test]
    fn test_function_parsing() {
        let p = TestFunction::parse("x1*x2", 2).unwrap();
        assert!((p.value(&[0.5, 3.0]) - 1.5).abs() < 1e-15);
        assert!(TestFunction::parse("x3", 2).is_err());
        assert!(TestFunction::parse("1", 2).unwrap().is_constant_one());
        assert!(constant_test_function(3).is_constant_one());
    }

    #[test]
    fn det_concentration_is_detected() {
        let seq = det_concentration_sequence(1).unwrap();
        let r = weak_continuity_experiment(
            &PolyMatrixFn::det(2),
            &seq,
            &default_test_functions(2),
            &[4, 8, 16],
            &WeakOptions::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::NotWeaklyContinuous);
        let one = r.fit("1").unwrap();
        assert!((one.est_limit.unwrap() + 4.0 / 3.0).abs() < 1e-8);
        // φ = x1 concentrates to φ(1/2, 1)·(−4/3)
        assert!((r.fit("x1").unwrap().est_limit.unwrap() + 2.0 / 3.0).abs() < 1e-3);
        assert_eq!(r.nonnegative_on_nodes, Some(false));
    }

    #[test]
    fn constant_sequence_is_weakly_continuous() {
        let seq = AnalyticSequence::constant(3).unwrap();
        let f = PolyMatrixFn::detprime(3).unwrap();
        let r = weak_continuity_experiment(&f, &seq, &default_test_functions(3), &[1, 2, 3], &WeakOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::WeaklyContinuous);
        for fit in &r.fits {
            for row in r.rows.iter().filter(|row| row.label == fit.label) {
                assert_eq!(row.integral, fit.target.unwrap());
            }
        }
    }

    #[test]
    fn shape_and_precondition_errors() {
        let seq = det_concentration_sequence(1).unwrap();
        let phis = default_test_functions(2);
        let o = WeakOptions::default();
        assert!(weak_continuity_experiment(&PolyMatrixFn::det(3), &seq, &phis, &[1, 2], &o).is_err());
        assert!(weak_continuity_experiment(&PolyMatrixFn::det(2), &seq, &phis[..2], &[1, 2], &o).is_err());
        assert!(weak_continuity_experiment(&PolyMatrixFn::det(2), &seq, &phis, &[2, 1], &o).is_err());
    }
}
