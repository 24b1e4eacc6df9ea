use serde::Serialize;

use super::sequence::SequenceKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    WeaklyContinuous,
    NotWeaklyContinuous,
    Inconclusive,
    DivergenceConfirmed,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::WeaklyContinuous => "weakly_continuous",
            Verdict::NotWeaklyContinuous => "not_weakly_continuous",
            Verdict::Inconclusive => "inconclusive",
            Verdict::DivergenceConfirmed => "divergence_confirmed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    WeakContinuity,
    HigherIntegrability,
}

/// One computed integral, with the fit of the series it belongs to.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub k: u64,
    /// Test function id, or `delta=<value>`.
    pub label: String,
    pub integral: f64,
    pub error: f64,
    pub est_limit: Option<f64>,
    pub fit_slope: Option<f64>,
    pub r2: Option<f64>,
}

/// Fit over one series: over `k` for a test function, or over `δ` for one `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub label: String,
    pub target: Option<f64>,
    pub est_limit: Option<f64>,
    /// Decay exponent of the Richardson model, or slope against `ln ln(1/δ)`.
    pub slope: Option<f64>,
    pub expected_slope: Option<f64>,
    pub r2: Option<f64>,
    pub tolerance: Option<f64>,
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnisotropicRow {
    pub k: u64,
    pub value: f64,
    /// `value · ln k`
    pub scaled: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentKind,
    pub sequence: SequenceKind,
    pub n: usize,
    pub m: usize,
    pub ks: Vec<u64>,
    pub rows: Vec<ReportRow>,
    pub fits: Vec<FitReport>,
    pub anisotropic: Vec<AnisotropicRow>,
    pub verdict: Verdict,
    /// `f(∇u_k) ≥ −1e−12` at every quadrature node.
    pub nonnegative_on_nodes: Option<bool>,
    pub min_integrand: Option<f64>,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn fit(&self, label: &str) -> Option<&FitReport> {
        self.fits.iter().find(|f| f.label == label)
    }

    /// CSV body with header `k,label,integral,est_limit,fit_slope,r2,verdict`.
    pub fn to_csv_rows(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        let mut out = String::from("k,label,integral,est_limit,fit_slope,r2,verdict\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:e},{},{},{},{}\n",
                r.k,
                r.label,
                r.integral,
                opt(r.est_limit),
                opt(r.fit_slope),
                opt(r.r2),
                self.verdict.as_str()
            ));
        }
        out
    }
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b, R²)`.
/// A series with no spread in `y` has `R² = 1` when the fit is exact.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else if ss_res == 0.0 { 1.0 } else { 0.0 };
    (a, b, r2)
}
