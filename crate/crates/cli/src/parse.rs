//! Flag value parsers.

use std::path::Path;

use num::BigRational;
use nullag::minors::Matrix;
use nullag::poly::{parse_poly, PolyMatrixFn};
use nullag::rational::{parse_rational, parse_rational_list, Normal};

use crate::{CliError, PolyArgs};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Reads `--poly` from a file when the value names one, else parses it inline.
pub fn poly(args: &PolyArgs) -> Result<PolyMatrixFn, CliError> {
    let path = Path::new(&args.poly);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        parse_poly(&text, args.m, args.n).map_err(|e| usage(format!("{}: {e}", path.display())))
    } else {
        parse_poly(&args.poly, args.m, args.n).map_err(|e| usage(format!("--poly: {e}")))
    }
}

/// Exact when every component parses as a rational and the vector is a unit
/// vector; otherwise reals, rationalized.
pub fn normal(text: &str) -> Result<Normal, CliError> {
    if let Ok(q) = parse_rational_list(text) {
        if let Ok(n) = Normal::from_rationals(&q) {
            return Ok(n);
        }
    }
    let v = reals(text, "--normal")?;
    Normal::from_f64(&v).map_err(|e| usage(format!("--normal: {e}")))
}

pub fn reals(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .or_else(|| parse_rational(s).ok().and_then(|q| num::ToPrimitive::to_f64(&q)))
                .ok_or_else(|| usage(format!("{flag}: `{s}` is not a number")))
        })
        .collect()
}

pub fn integers(text: &str, flag: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| usage(format!("{flag}: `{}` is not a nonnegative integer", s.trim()))))
        .collect()
}

/// Rows separated by `;`, entries by `,`, exact rationals.
pub fn rational_matrix(text: &str, m: usize, n: usize) -> Result<Matrix<BigRational>, CliError> {
    let rows: Vec<Vec<BigRational>> = text
        .split(';')
        .enumerate()
        .map(|(i, r)| parse_rational_list(r).map_err(|e| usage(format!("--F row {}: {e}", i + 1))))
        .collect::<Result<_, _>>()?;
    if rows.len() != m || rows.iter().any(|r| r.len() != n) {
        return Err(usage(format!("--F must be {m}x{n} (rows separated by ';')")));
    }
    Matrix::from_rows(&rows).map_err(|e| usage(format!("--F: {e}")))
}

pub fn real_matrix(text: Option<&str>, m: usize, n: usize) -> Result<Matrix<f64>, CliError> {
    match text {
        None => Ok(Matrix::zeros(m, n)),
        Some(t) => Ok(rational_matrix(t, m, n)?.to_f64()),
    }
}
