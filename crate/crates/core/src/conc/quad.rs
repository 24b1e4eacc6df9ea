//! Globally adaptive Gauss–Kronrod (7/15) quadrature, and nested box quadrature.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Returns `(kronrod, |kronrod − gauss|, ∫|f|)` on `[a, b]`.
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = h * XGK[j];
        let (lo, hi) = (f(c - dx), f(c + dx));
        kron += WGK[j] * (lo + hi);
        abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    (kron * h, ((kron - gauss) * h).abs(), abs * h.abs())
}

// error estimates below this multiple of eps·∫|f| are roundoff
const ROUNDOFF: f64 = 50.0 * f64::EPSILON;

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// `∫_a^b f`, bisecting the interval with the largest error estimate until
/// the total error meets `max(abs_tol, rel_tol·|I|)` or sinks to roundoff level.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, opts: &QuadOptions) -> Result<Quad> {
    if a == b {
        return Ok(Quad { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let (value, error, abs) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value, error, abs });
    let (mut total, mut err, mut total_abs) = (value, error, abs);
    loop {
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
        }
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()).max(ROUNDOFF * total_abs) {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}] after {} intervals: estimate {total}, error {err}",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature(format!("interval [{}, {}] cannot be split further", worst.a, worst.b)));
        }
        let (v1, e1, a1) = gk15(&mut f, worst.a, mid);
        let (v2, e2, a2) = gk15(&mut f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        total_abs += a1 + a2 - worst.abs;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1, abs: a1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2, abs: a2 });
    }
    // re-sum to shed the drift of the running updates
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Quad { value, error, evaluations })
}

/// Iterated integral over the box `Π [lo_i, hi_i]`, innermost variable last.
pub fn integrate_box(f: &mut dyn FnMut(&[f64]) -> f64, bounds: &[(f64, f64)], opts: &QuadOptions) -> Result<Quad> {
    let mut point = vec![0.0; bounds.len()];
    nested(f, bounds, 0, &mut point, opts)
}

fn nested(
    f: &mut dyn FnMut(&[f64]) -> f64,
    bounds: &[(f64, f64)],
    level: usize,
    point: &mut Vec<f64>,
    opts: &QuadOptions,
) -> Result<Quad> {
    let (lo, hi) = bounds[level];
    if level + 1 == bounds.len() {
        return integrate(
            |x| {
                point[level] = x;
                f(point)
            },
            lo,
            hi,
            opts,
        );
    }
    // inner integrals are computed a little tighter than the outer one
    let inner = QuadOptions {
        abs_tol: opts.abs_tol * 0.1,
        rel_tol: opts.rel_tol * 0.1,
        ..*opts
    };
    let mut failure = None;
    let mut evaluations = 0;
    let mut inner_error = 0.0f64;
    let outer = integrate(
        |x| {
            if failure.is_some() {
                return 0.0;
            }
            point[level] = x;
            match nested(f, bounds, level + 1, point, &inner) {
                Ok(q) => {
                    evaluations += q.evaluations;
                    inner_error = inner_error.max(q.error);
                    q.value
                }
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        lo,
        hi,
        opts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let outer = outer?;
    Ok(Quad {
        value: outer.value,
        error: outer.error + inner_error * (hi - lo),
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_and_trig() {
        let o = QuadOptions::default();
        assert!((integrate(|x| x.powi(5), 0.0, 2.0, &o).unwrap().value - 64.0 / 6.0).abs() < 1e-12);
        assert!((integrate(|x| (PI * x).sin(), 0.0, 1.0, &o).unwrap().value - 2.0 / PI).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        let o = QuadOptions::default();
        let q = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &o).unwrap();
        assert!((q.value - 2.0).abs() < 1e-9, "{}", q.value);
    }

    #[test]
    fn non_integrable_fails() {
        let o = QuadOptions { max_intervals: 200, ..Default::default() };
        assert!(integrate(|x| 1.0 / x, 0.0, 1.0, &o).is_err());
    }

    #[test]
    fn box_integral() {
        let o = QuadOptions::default();
        let q = integrate_box(&mut |p| p[0] * p[1].powi(2) * (PI * p[2]).sin(), &[(0.0, 1.0), (0.0, 2.0), (0.0, 1.0)], &o).unwrap();
        assert!((q.value - 0.5 * 8.0 / 3.0 * 2.0 / PI).abs() < 1e-11);
    }

    #[test]
    fn det_of_the_trigonometric_field() {
        // independent check of ∫_{(0,1)^2} det∇w = -4/3 for w = (sin(πx)y, -sin(2πx)y)
        let o = QuadOptions::default();
        let q = integrate_box(
            &mut |p| {
                let (x, y) = (p[0], p[1]);
                let (a11, a12) = (PI * (PI * x).cos() * y, (PI * x).sin());
                let (a21, a22) = (-2.0 * PI * (2.0 * PI * x).cos() * y, -(2.0 * PI * x).sin());
                a11 * a22 - a12 * a21
            },
            &[(0.0, 1.0), (0.0, 1.0)],
            &o,
        )
        .unwrap();
        assert!((q.value + 4.0 / 3.0).abs() < 1e-12, "{}", q.value);
    }
}
