//! Named polynomials: `det`, `detprime`, `trace`, `frobenius2`,
//! `cof_dot([a],[rho])`, `minor([p],[q])` (1-based index lists).

use num::BigRational;

use super::PolyMatrixFn;
use crate::error::{Error, Result};
use crate::minors::MultiIndex;
use crate::rational::parse_rational;

const NAMES: &str = "det, detprime, trace, frobenius2, cof_dot([a],[rho]), minor([p],[q])";

fn split_call(spec: &str) -> Result<(&str, Vec<&str>)> {
    let spec = spec.trim();
    let Some(open) = spec.find('(') else {
        return Ok((spec, Vec::new()));
    };
    if !spec.ends_with(')') {
        return Err(Error::parse(spec, "missing closing parenthesis"));
    }
    let name = spec[..open].trim();
    let inner = &spec[open + 1..spec.len() - 1];
    let mut args = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in inner.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                args.push(inner[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::parse(spec, "unbalanced brackets"));
        }
    }
    if depth != 0 {
        return Err(Error::parse(spec, "unbalanced brackets"));
    }
    if !inner.trim().is_empty() {
        args.push(inner[start..].trim());
    }
    Ok((name, args))
}

fn list(arg: &str, ctx: &str) -> Result<Vec<BigRational>> {
    let body = arg
        .strip_prefix('[')
        .and_then(|a| a.strip_suffix(']'))
        .ok_or_else(|| Error::parse(ctx, format!("expected a bracketed list, got '{arg}'")))?;
    body.split(',')
        .map(|t| parse_rational(t.trim()).map_err(|e| Error::parse(ctx, e.to_string())))
        .collect()
}

fn index_list(arg: &str, ctx: &str) -> Result<Vec<usize>> {
    list(arg, ctx)?
        .into_iter()
        .map(|q| {
            if q.is_integer() && q >= BigRational::from_integer(1.into()) {
                q.to_integer()
                    .try_into()
                    .map_err(|_| Error::parse(ctx, "index too large"))
            } else {
                Err(Error::parse(ctx, format!("index {q} is not a positive integer")))
            }
        })
        .collect()
}

fn need(dim: Option<usize>, what: &str, name: &str) -> Result<usize> {
    dim.ok_or_else(|| Error::parse(name, format!("built-in '{name}' needs {what}")))
}

/// Resolves a built-in name against an optional requested shape.
pub fn parse_builtin(spec: &str, m: Option<usize>, n: Option<usize>) -> Result<PolyMatrixFn> {
    let (name, args) = split_call(spec)?;
    let f = match (name, args.as_slice()) {
        ("det", []) => {
            let k = match (m, n) {
                (Some(a), Some(b)) if a != b => {
                    return Err(Error::parse(spec, format!("det needs a square shape, got {a}x{b}")))
                }
                (Some(a), _) | (None, Some(a)) => a,
                (None, None) => return Err(Error::parse(spec, "det needs --m or --n")),
            };
            PolyMatrixFn::det(k)
        }
        ("detprime", []) => {
            let k = match (m, n) {
                (Some(a), Some(b)) if a + 1 != b => {
                    return Err(Error::parse(spec, format!("detprime lives on (n-1)xn, got {a}x{b}")))
                }
                (_, Some(b)) => b,
                (Some(a), None) => a + 1,
                (None, None) => return Err(Error::parse(spec, "detprime needs --m or --n")),
            };
            PolyMatrixFn::detprime(k)?
        }
        ("trace", []) => PolyMatrixFn::trace(need(m, "--m", name)?, need(n, "--n", name)?),
        ("frobenius2", []) => PolyMatrixFn::frobenius2(need(m, "--m", name)?, need(n, "--n", name)?),
        ("cof_dot", [a, rho]) => {
            let a = list(a, spec)?;
            let rho = list(rho, spec)?;
            PolyMatrixFn::cof_dot(&a, &rho)?
        }
        ("minor", [p, q]) => {
            let (m, n) = (need(m, "--m", name)?, need(n, "--n", name)?);
            let p = MultiIndex::from_one_based(&index_list(p, spec)?, m)?;
            let q = MultiIndex::from_one_based(&index_list(q, spec)?, n)?;
            PolyMatrixFn::minor(m, n, &p, &q)?
        }
        _ => return Err(Error::parse(spec, format!("unknown built-in; expected one of {NAMES}"))),
    };
    if let Some(a) = m {
        if a != f.rows() {
            return Err(Error::parse(spec, format!("built-in has {} rows, requested {a}", f.rows())));
        }
    }
    if let Some(b) = n {
        if b != f.cols() {
            return Err(Error::parse(spec, format!("built-in has {} columns, requested {b}", f.cols())));
        }
    }
    Ok(f)
}
