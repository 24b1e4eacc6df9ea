//! Explicit sequences with concentrating gradients.
//!
//! Concentration sequences squeeze a fixed profile `W` on the unit cube into a
//! cube of side `1/k` at a point `x₀`: `u_k(x) = k^{(n-2)/2} W(s_k(x))` inside,
//! `0` outside, so `‖∇u_k‖_{L²}` does not depend on `k` and `u_k ⇀ 0`.
//! At the boundary the small cube sits against the face `x_n = 1`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    BoundaryConcentration,
    InteriorConcentration,
    /// `u_k = W` for every `k`.
    Constant,
    Counterexample,
}

/// Profile on `(0,1)^n` with two components:
/// `W₁ = sin(πy₁) Π sin(πy_i) ψ(y_n)`, `W₂ = −sin(2πy₁) Π sin(πy_i) ψ(y_n)`,
/// the product over `1 < i < n`, with `ψ(t) = t` (free on the top face) or
/// `ψ(t) = sin(πt)` (vanishing on every face).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Profile {
    n: usize,
    free_top: bool,
}

impl Profile {
    fn psi(&self, t: f64) -> (f64, f64) {
        if self.free_top {
            (t, 1.0)
        } else {
            ((PI * t).sin(), PI * (PI * t).cos())
        }
    }

    fn value(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mid: f64 = y[1..n - 1].iter().map(|&t| (PI * t).sin()).product();
        let tail = mid * self.psi(y[n - 1]).0;
        vec![(PI * y[0]).sin() * tail, -(2.0 * PI * y[0]).sin() * tail]
    }

    /// Row-major `2×n` Jacobian.
    fn jacobian(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n;
        // factors[i] = (value, derivative) of the i-th factor shared by both components
        let mut factors: Vec<(f64, f64)> = (1..n - 1).map(|i| ((PI * y[i]).sin(), PI * (PI * y[i]).cos())).collect();
        factors.push(self.psi(y[n - 1]));
        let first = [
            ((PI * y[0]).sin(), PI * (PI * y[0]).cos()),
            (-(2.0 * PI * y[0]).sin(), -2.0 * PI * (2.0 * PI * y[0]).cos()),
        ];
        let mut out = vec![0.0; 2 * n];
        for (c, &(f0, d0)) in first.iter().enumerate() {
            let all: f64 = factors.iter().map(|p| p.0).product();
            out[c * n] = d0 * all;
            for j in 1..n {
                let others: f64 = factors
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i + 1 != j)
                    .map(|(_, p)| p.0)
                    .product();
                out[c * n + j] = f0 * factors[j - 1].1 * others;
            }
        }
        out
    }
}

/// Closed-form sequence `u_k` with gradient evaluator.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticSequence {
    pub kind: SequenceKind,
    pub n: usize,
    pub m: usize,
    pub k: u64,
    /// Concentration point (concentration kinds).
    pub x0: Vec<f64>,
    profile: Option<Profile>,
}

impl AnalyticSequence {
    /// Concentration at the midpoint of the face `x_n = 1` of `(0,1)^n`.
    pub fn boundary_concentration(n: usize, k: u64) -> Result<Self> {
        Self::concentration(n, k, true)
    }

    /// Concentration at the centre of `(0,1)^n`.
    pub fn interior_concentration(n: usize, k: u64) -> Result<Self> {
        Self::concentration(n, k, false)
    }

    fn concentration(n: usize, k: u64, boundary: bool) -> Result<Self> {
        if !(2..=3).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if k < 1 {
            return Err(Error::invalid("k must be at least 1"));
        }
        let mut x0 = vec![0.5; n];
        if boundary {
            x0[n - 1] = 1.0;
        }
        Ok(AnalyticSequence {
            kind: if boundary { SequenceKind::BoundaryConcentration } else { SequenceKind::InteriorConcentration },
            n,
            m: 2,
            k,
            x0,
            profile: Some(Profile { n, free_top: boundary }),
        })
    }

    /// `u_k = W` for every `k`, with `W` the boundary profile.
    pub fn constant(n: usize) -> Result<Self> {
        let mut s = Self::concentration(n, 1, true)?;
        s.kind = SequenceKind::Constant;
        Ok(s)
    }

    pub fn with_k(&self, k: u64) -> Result<Self> {
        match self.kind {
            SequenceKind::BoundaryConcentration => Self::boundary_concentration(self.n, k),
            SequenceKind::InteriorConcentration => Self::interior_concentration(self.n, k),
            SequenceKind::Constant => Self::constant(self.n),
            SequenceKind::Counterexample => Err(Error::invalid("use CounterexampleSequence for the higher-integrability example")),
        }
    }

    fn kf(&self) -> f64 {
        self.k as f64
    }

    /// Box outside which `u_k` equals its weak limit.
    pub fn active_box(&self) -> Vec<(f64, f64)> {
        let k = self.kf();
        match self.kind {
            SequenceKind::Constant => vec![(0.0, 1.0); self.n],
            SequenceKind::BoundaryConcentration => (0..self.n)
                .map(|i| if i + 1 == self.n { (1.0 - 1.0 / k, 1.0) } else { (self.x0[i] - 0.5 / k, self.x0[i] + 0.5 / k) })
                .collect(),
            _ => self.x0.iter().map(|&c| (c - 0.5 / k, c + 0.5 / k)).collect(),
        }
    }

    /// Preimage coordinates `s_k(x)` in the unit cube.
    fn stretch(&self, x: &[f64]) -> Option<Vec<f64>> {
        if self.kind == SequenceKind::Constant {
            return Some(x.to_vec());
        }
        let k = self.kf();
        let y: Vec<f64> = self
            .active_box()
            .iter()
            .zip(x)
            .map(|(&(lo, _), &xi)| k * (xi - lo))
            .collect();
        y.iter().all(|&t| (0.0..=1.0).contains(&t)).then_some(y)
    }

    fn amplitude(&self) -> f64 {
        match self.kind {
            SequenceKind::Constant => 1.0,
            _ => self.kf().powf((self.n as f64 - 2.0) / 2.0),
        }
    }

    pub fn u(&self, x: &[f64]) -> Vec<f64> {
        let p = self.profile.expect("concentration profile");
        match self.stretch(x) {
            Some(y) => p.value(&y).iter().map(|v| v * self.amplitude()).collect(),
            None => vec![0.0; self.m],
        }
    }

    /// Row-major `m×n` gradient.
    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let p = self.profile.expect("concentration profile");
        match self.stretch(x) {
            Some(y) => {
                let chain = if self.kind == SequenceKind::Constant { 1.0 } else { self.kf() };
                p.jacobian(&y).iter().map(|v| v * self.amplitude() * chain).collect()
            }
            None => vec![0.0; self.m * self.n],
        }
    }

    /// Gradient of the weak limit.
    pub fn limit_grad(&self, x: &[f64]) -> Vec<f64> {
        match self.kind {
            SequenceKind::Constant => self.grad(x),
            _ => vec![0.0; self.m * self.n],
        }
    }
}

/// `det_concentration_sequence(k)`: the two-dimensional boundary concentration
/// at `(1/2, 1)` built from `w = (sin(πx)y, −sin(2πx)y)`.
pub fn det_concentration_sequence(k: u64) -> Result<AnalyticSequence> {
    AnalyticSequence::boundary_concentration(2, k)
}
