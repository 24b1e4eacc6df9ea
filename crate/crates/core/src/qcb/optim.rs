//! Projected gradient descent with Barzilai–Borwein steps and Armijo backtracking.

#[derive(Clone, Debug)]
pub struct OptimOptions {
    pub max_iter: usize,
    /// Stop when the projected gradient's sup-norm falls to this value.
    pub tol: f64,
    /// Box `|x_i| ≤ bound`.
    pub bound: f64,
}

impl Default for OptimOptions {
    fn default() -> Self {
        OptimOptions {
            max_iter: 200,
            tol: 1e-8,
            bound: 1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptimOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub diverged: bool,
}

const ARMIJO: f64 = 1e-4;
const STEP_MIN: f64 = 1e-10;
const STEP_MAX: f64 = 1e6;

fn project(x: &mut [f64], bound: f64) {
    for v in x {
        *v = v.clamp(-bound, bound);
    }
}

fn projected_gradient_norm(x: &[f64], g: &[f64], bound: f64) -> f64 {
    x.iter()
        .zip(g)
        .map(|(&xi, &gi)| ((xi - gi).clamp(-bound, bound) - xi).abs())
        .fold(0.0, f64::max)
}

/// Minimizes `obj` over the box starting from `x0`. `obj(x, grad)` returns the
/// value and writes the gradient.
pub fn minimize<F>(mut obj: F, x0: &[f64], opts: &OptimOptions) -> OptimOutcome
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let len = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, opts.bound);
    let mut g = vec![0.0; len];
    let mut f = obj(&x, &mut g);
    let diverged = |v: f64, g: &[f64]| !v.is_finite() || g.iter().any(|x| !x.is_finite());
    if diverged(f, &g) {
        return OptimOutcome {
            x,
            value: f,
            iterations: 0,
            converged: false,
            diverged: true,
        };
    }
    let gmax = g.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut alpha = (1.0 / gmax.max(1.0)).clamp(STEP_MIN, STEP_MAX);
    let mut xn = vec![0.0; len];
    let mut gn = vec![0.0; len];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if projected_gradient_norm(&x, &g, opts.bound) <= opts.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut accepted = None;
        while alpha >= STEP_MIN {
            for i in 0..len {
                xn[i] = (x[i] - alpha * g[i]).clamp(-opts.bound, opts.bound);
            }
            let decrease: f64 = (0..len).map(|i| g[i] * (xn[i] - x[i])).sum();
            let fnew = obj(&xn, &mut gn);
            if !diverged(fnew, &gn) && fnew <= f + ARMIJO * decrease {
                accepted = Some(fnew);
                break;
            }
            alpha *= 0.5;
        }
        let Some(fnew) = accepted else { break };
        let (mut sy, mut ss) = (0.0, 0.0);
        for i in 0..len {
            let s = xn[i] - x[i];
            sy += s * (gn[i] - g[i]);
            ss += s * s;
        }
        alpha = if sy > 0.0 { ss / sy } else { alpha * 4.0 }.clamp(STEP_MIN, STEP_MAX);
        std::mem::swap(&mut x, &mut xn);
        std::mem::swap(&mut g, &mut gn);
        f = fnew;
    }
    if !converged {
        converged = projected_gradient_norm(&x, &g, opts.bound) <= opts.tol;
    }
    OptimOutcome {
        x,
        value: f,
        iterations,
        converged,
        diverged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convex_quadratic() {
        let target = [0.3, -0.2, 0.5];
        let out = minimize(
            |x, g| {
                let mut v = 0.0;
                for i in 0..3 {
                    let d = x[i] - target[i];
                    g[i] = 2.0 * (i + 1) as f64 * d;
                    v += (i + 1) as f64 * d * d;
                }
                v
            },
            &[0.0; 3],
            &OptimOptions::default(),
        );
        assert!(out.converged);
        for i in 0..3 {
            assert!((out.x[i] - target[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn concave_direction_hits_the_box() {
        let out = minimize(
            |x, g| {
                g[0] = -2.0 * x[0];
                g[1] = 2.0 * x[1];
                -x[0] * x[0] + x[1] * x[1]
            },
            &[0.01, 0.3],
            &OptimOptions::default(),
        );
        assert_eq!(out.x[0], 1.0);
        assert!(out.x[1].abs() < 1e-8);
        assert!(out.converged);
    }

    #[test]
    fn non_finite_start_is_divergence() {
        let out = minimize(|_, _| f64::NAN, &[0.0], &OptimOptions::default());
        assert!(out.diverged);
    }
}
