//! The higher-integrability counterexample: `det′∇u_k ≥ 0`, bounded
//! anisotropic norm, yet `∫ γ(det′∇u_k)` diverges near the flat face.
//!
//! `u_k(x′, x_n) = g(x_n) h_k(|x′|) x′/|x′|` on `Q = (0,1)^{n−1} × (−½, ½)`,
//! with `g(t) = (|t| ln²|t|)^{−1/(n−1)}`, `h_k(r) = c k r` for `r < 1/k` and
//! `c` otherwise, `c = (ln k)^{−1/(n−1)}`.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::quad::{integrate, QuadOptions};
use super::report::{linear_fit, AnisotropicRow, ExperimentKind, ExperimentReport, FitReport, ReportRow, Verdict};
use super::sequence::SequenceKind;
use crate::error::{Error, Result};

pub const SUPPORTED_DIMS: [usize; 2] = [2, 3];

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleSequence {
    pub n: usize,
    pub m: usize,
    pub k: u64,
}

pub fn counterexample_sequence(n: usize, k: u64) -> Result<CounterexampleSequence> {
    if !SUPPORTED_DIMS.contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    if k <= 2 {
        return Err(Error::invalid(format!("k = {k}: need k ≥ 3 so that ln k > 1")));
    }
    Ok(CounterexampleSequence { n, m: n - 1, k })
}

/// `g(t) = (|t| ln²|t|)^{−1/(n−1)}`.
pub fn g(n: usize, t: f64) -> f64 {
    let s = t.abs();
    (s * s.ln().powi(2)).powf(-1.0 / (n as f64 - 1.0))
}

/// `g′(t) = −g(t)/((n−1) t) · (1 + 2/ln|t|)`.
pub fn g_prime(n: usize, t: f64) -> f64 {
    -g(n, t) / ((n as f64 - 1.0) * t) * (1.0 + 2.0 / t.abs().ln())
}

/// `|B_{1/k} ∩ (0,1)^{n−1}| · k^{n−1}`: 1 for `n = 2`, `π/4` for `n = 3`.
pub fn tube_constant(n: usize) -> f64 {
    if n == 2 {
        1.0
    } else {
        PI / 4.0
    }
}

impl CounterexampleSequence {
    pub fn kind(&self) -> SequenceKind {
        SequenceKind::Counterexample
    }

    fn kf(&self) -> f64 {
        self.k as f64
    }

    /// `c = (ln k)^{−1/(n−1)}`.
    pub fn c0(&self) -> f64 {
        self.kf().ln().powf(-1.0 / (self.n as f64 - 1.0))
    }

    pub fn h(&self, r: f64) -> f64 {
        if r < 1.0 / self.kf() {
            self.kf() * self.c0() * r
        } else {
            self.c0()
        }
    }

    fn split(&self, x: &[f64]) -> (Vec<f64>, f64, f64) {
        let xp = &x[..self.n - 1];
        let r = xp.iter().map(|v| v * v).sum::<f64>().sqrt();
        (xp.iter().map(|v| v / r).collect(), r, x[self.n - 1])
    }

    pub fn u(&self, x: &[f64]) -> Vec<f64> {
        let (dir, r, t) = self.split(x);
        let a = g(self.n, t) * self.h(r);
        dir.iter().map(|d| a * d).collect()
    }

    /// Row-major `(n−1)×n` gradient.
    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let (n, m) = (self.n, self.m);
        let (dir, r, t) = self.split(x);
        let gt = g(n, t);
        let inside = r < 1.0 / self.kf();
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..m {
                let delta = if i == j { 1.0 } else { 0.0 };
                out[i * n + j] = if inside {
                    gt * self.kf() * self.c0() * delta
                } else {
                    gt * self.c0() * (delta - dir[i] * dir[j]) / r
                };
            }
            out[i * n + n - 1] = g_prime(n, t) * self.h(r) * dir[i];
        }
        out
    }

    /// `det′∇u_k = g(x_n)^{n−1} k^{n−1}/ln k` in the tube, `0` outside.
    pub fn detprime(&self, x: &[f64]) -> f64 {
        let (_, r, t) = self.split(x);
        if r < 1.0 / self.kf() {
            g(self.n, t).powi(self.n as i32 - 1) * self.kf().powi(self.n as i32 - 1) / self.kf().ln()
        } else {
            0.0
        }
    }
}

/// `γ(s) = s ln⁺ s`.
pub fn gamma(s: f64) -> f64 {
    if s > 1.0 {
        s * s.ln()
    } else {
        0.0
    }
}

/// `∫_{(0,1)^{n−1}×(δ,ε)} γ(det′∇u_k)`. The integrand is constant on each
/// tube slice, and `L = ln(1/x_n)` turns the `x_n` integral into
/// `τ/ln k ∫ L^{−2} ln⁺(k^{n−1} e^L / (ln k L²)) dL` over `[ln(1/ε), ln(1/δ)]`.
pub fn gamma_integral(n: usize, k: u64, eps: f64, delta: f64, quad: &QuadOptions) -> Result<f64> {
    let s = counterexample_sequence(n, k)?;
    if !(delta > 0.0 && delta <= eps && eps < 0.5) {
        return Err(Error::invalid(format!("need 0 < δ ≤ ε < 1/2, got δ = {delta}, ε = {eps}")));
    }
    let lnk = s.kf().ln();
    let kpow = s.kf().powi(n as i32 - 1);
    let q = integrate(
        |l| {
            let arg = (kpow / lnk).ln() + l - 2.0 * l.ln();
            arg.max(0.0) / (l * l)
        },
        (1.0 / eps).ln(),
        (1.0 / delta).ln(),
        quad,
    )?;
    Ok(tube_constant(n) / lnk * q.value)
}

/// `∫_{−½}^{½} g^{n−1} = 2/ln 2` in every dimension.
pub fn g_power_integral() -> f64 {
    2.0 / 2f64.ln()
}

/// `A(k) = ∫_Q |∇′u_k|^{n−1}`, Frobenius norm, reduced to the `x′` slice
/// integral times `∫ g^{n−1}`.
pub fn anisotropic_norm(n: usize, k: u64, quad: &QuadOptions) -> Result<f64> {
    let s = counterexample_sequence(n, k)?;
    let lnk = s.kf().ln();
    let slice = match n {
        // only the tube contributes: |h′| = k c on (0, 1/k)
        2 => 1.0 / lnk,
        _ => {
            // tube: |k c I|² over a quarter disc; outside: c²/r² over the rest of the square
            let inside = PI / 2.0 / lnk;
            let far = integrate(|th: f64| -(th.cos().ln()), 0.0, PI / 4.0, quad)?.value;
            inside + (PI / 2.0 * lnk + 2.0 * far) / lnk
        }
    };
    Ok(g_power_integral() * slice)
}

#[derive(Clone, Debug)]
pub struct HigherIntegrabilityOptions {
    pub quad: QuadOptions,
    pub min_r2: f64,
}

impl Default for HigherIntegrabilityOptions {
    fn default() -> Self {
        HigherIntegrabilityOptions {
            quad: QuadOptions::with_tol(1e-12, 1e-10),
            min_r2: 0.98,
        }
    }
}

/// `I(k, δ)` for every `k`, `δ`, the slope of `I` against `ln ln(1/δ)`, and
/// `A(k)`. Divergence is confirmed when, for every `k`, `I` grows strictly as
/// `δ` decreases with a positive slope and `R² ≥ min_r2`, and `A` stays
/// bounded when `k` doubles past the largest listed value.
pub fn higher_integrability_experiment(
    n: usize,
    ks: &[u64],
    eps: f64,
    deltas: &[f64],
    opts: &HigherIntegrabilityOptions,
) -> Result<ExperimentReport> {
    if ks.is_empty() || deltas.len() < 2 {
        return Err(Error::invalid("need at least one k and two values of delta"));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::invalid(format!("eps = {eps} outside (0, 1/2)")));
    }
    if deltas.iter().any(|&d| !(d > 0.0 && d < eps)) || deltas.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::invalid("deltas must be strictly decreasing and lie in (0, eps)"));
    }
    for &k in ks {
        counterexample_sequence(n, k)?;
    }
    let jobs: Vec<(u64, f64)> = ks.iter().flat_map(|&k| deltas.iter().map(move |&d| (k, d))).collect();
    let values: Vec<Result<f64>> = jobs.par_iter().map(|&(k, d)| gamma_integral(n, k, eps, d, &opts.quad)).collect();
    let mut failures = Vec::new();
    for (&(k, d), v) in jobs.iter().zip(&values) {
        if let Err(e) = v {
            failures.push(format!("k={k} delta={d:e}: {e}"));
        }
    }
    let x: Vec<f64> = deltas.iter().map(|d| (1.0 / d).ln().ln()).collect();
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    let mut divergent = failures.is_empty();
    for (i, &k) in ks.iter().enumerate() {
        let series: Option<Vec<f64>> = values[i * deltas.len()..(i + 1) * deltas.len()].iter().map(|v| v.as_ref().ok().copied()).collect();
        let fit = series.as_ref().map(|y| linear_fit(&x, y));
        let increasing = series.as_ref().is_some_and(|y| y.windows(2).all(|w| w[1] > w[0]));
        if let Some((_, slope, r2)) = fit {
            divergent &= increasing && slope > 0.0 && r2 >= opts.min_r2;
        }
        for (j, &d) in deltas.iter().enumerate() {
            if let Ok(v) = &values[i * deltas.len() + j] {
                rows.push(ReportRow {
                    k,
                    label: format!("delta={d:e}"),
                    integral: *v,
                    error: 0.0,
                    est_limit: None,
                    fit_slope: fit.map(|f| f.1),
                    r2: fit.map(|f| f.2),
                });
            }
        }
        fits.push(FitReport {
            label: format!("k={k}"),
            target: None,
            est_limit: None,
            slope: fit.map(|f| f.1),
            expected_slope: Some(tube_constant(n) / (k as f64).ln()),
            r2: fit.map(|f| f.2),
            tolerance: None,
            monotone: increasing,
        });
    }
    let mut anisotropic = Vec::new();
    for &k in ks {
        let a = anisotropic_norm(n, k, &opts.quad)?;
        anisotropic.push(AnisotropicRow { k, value: a, scaled: a * (k as f64).ln() });
    }
    let sup = anisotropic.iter().map(|r| r.value).fold(0.0, f64::max);
    let doubled = anisotropic_norm(n, 2 * ks.iter().max().copied().unwrap_or(3), &opts.quad)?;
    let bounded = doubled <= 1.05 * sup;
    divergent &= bounded;
    let notes = vec![
        "domain Q = (0,1)^{n-1} x (-1/2, 1/2)".to_string(),
        "I(k, delta) integrates over the full slice (0,1)^{n-1} x (delta, eps)".to_string(),
        format!("A at 2*max(k) = {doubled:e}, sup over listed k = {sup:e}"),
    ];
    Ok(ExperimentReport {
        experiment: ExperimentKind::HigherIntegrability,
        sequence: SequenceKind::Counterexample,
        n,
        m: n - 1,
        ks: ks.to_vec(),
        rows,
        fits,
        anisotropic,
        verdict: if divergent { Verdict::DivergenceConfirmed } else { Verdict::Inconclusive },
        nonnegative_on_nodes: None,
        min_integrand: None,
        failures,
        notes,
    })
}
