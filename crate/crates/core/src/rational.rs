//! Rational parsing/formatting and exact rationalization of unit normals.

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minors::{complete_rotation, complete_rotation_exact, BoundaryFrame, Frame, Scalar};

/// Tolerance for continued-fraction rationalization of irrational normals.
pub const RATIONALIZE_TOL: f64 = 1e-12;

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

/// `p/q`, `p`, or a decimal such as `-0.125` / `1e-3`, read exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = |msg: &str| Error::parse(format!("'{t}'"), msg.to_string());
    if t.is_empty() {
        return Err(bad("empty number"));
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad("bad numerator"))?;
        let q: BigInt = q.trim().parse().map_err(|_| bad("bad denominator"))?;
        if q.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = t[i + 1..].parse().map_err(|_| bad("bad exponent"))?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad("no digits"));
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad("not a number"));
    }
    let all: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad("not a number"))?;
    let scale = exponent - frac.len() as i64;
    if scale.abs() > 4096 {
        return Err(bad("exponent out of range"));
    }
    let ten = BigInt::from(10);
    let pow = num::pow(ten, scale.unsigned_abs() as usize);
    let mut v = if scale >= 0 {
        BigRational::from_integer(all * pow)
    } else {
        BigRational::new(all, pow)
    };
    if neg {
        v = -v;
    }
    Ok(v)
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Comma-separated list of exact numbers.
pub fn parse_rational_list(s: &str) -> Result<Vec<BigRational>> {
    s.split(',').map(parse_rational).collect()
}

/// Smallest-denominator continued-fraction convergent within `tol` of `x`.
pub fn continued_fraction(x: f64, tol: f64) -> BigRational {
    if !x.is_finite() {
        return BigRational::zero();
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let approx = BigRational::new(h1.clone(), k1.clone());
        let err = (ToPrimitive::to_f64(&approx).unwrap_or(f64::INFINITY) - x).abs();
        let frac = r - a;
        if err <= tol || frac.abs() < 1e-300 {
            return approx;
        }
        r = 1.0 / frac;
    }
    BigRational::new(h1, k1)
}

/// A unit normal carried both as reals and as an exact rational unit vector.
///
/// Irrational inputs are mapped to a nearby rational point of the unit sphere
/// through stereographic projection and continued fractions; `rationalized`
/// records whether the exact vector differs from the input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normal {
    pub float: Vec<f64>,
    #[serde(with = "rational_vec_serde")]
    pub exact: Vec<BigRational>,
    pub rationalized: bool,
}

impl Normal {
    pub fn from_f64(v: &[f64]) -> Result<Self> {
        check_unit_f64(v)?;
        let dyadic = v
            .iter()
            .map(|&x| BigRational::from_float(x).ok_or_else(|| Error::invalid("non-finite normal")))
            .collect::<Result<Vec<_>>>()?;
        if is_exact_unit(&dyadic) {
            return Ok(Normal {
                float: v.to_vec(),
                exact: dyadic,
                rationalized: false,
            });
        }
        let exact = rationalize_unit(v);
        Ok(Normal {
            float: normalize(v),
            exact,
            rationalized: true,
        })
    }

    pub fn from_rationals(v: &[BigRational]) -> Result<Self> {
        if v.len() < 2 {
            return Err(Error::invalid("a boundary normal needs n >= 2"));
        }
        if is_exact_unit(v) {
            return Ok(Normal {
                float: v.iter().map(Scalar::to_real).collect(),
                exact: v.to_vec(),
                rationalized: false,
            });
        }
        let f: Vec<f64> = v.iter().map(Scalar::to_real).collect();
        check_unit_f64(&f)?;
        Ok(Normal {
            exact: rationalize_unit(&f),
            float: normalize(&f),
            rationalized: true,
        })
    }

    /// Standard basis vector `sign · e_{axis}` (0-based axis).
    pub fn axis(n: usize, axis: usize, sign: i64) -> Self {
        let mut exact = vec![BigRational::zero(); n];
        exact[axis] = int(sign.signum());
        Normal {
            float: exact.iter().map(Scalar::to_real).collect(),
            exact,
            rationalized: false,
        }
    }

    /// `e_n`.
    pub fn e_n(n: usize) -> Self {
        Self::axis(n, n - 1, 1)
    }

    pub fn dim(&self) -> usize {
        self.exact.len()
    }

    pub fn negated(&self) -> Self {
        Normal {
            float: self.float.iter().map(|x| -x).collect(),
            exact: self.exact.iter().map(|x| -x).collect(),
            rationalized: self.rationalized,
        }
    }

    pub fn frame(&self) -> Result<BoundaryFrame> {
        complete_rotation(&self.float)
    }

    pub fn exact_frame(&self) -> Result<Frame<BigRational>> {
        complete_rotation_exact(&self.exact)
    }
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / norm).collect()
}

fn check_unit_f64(v: &[f64]) -> Result<()> {
    if v.len() < 2 {
        return Err(Error::invalid("a boundary normal needs n >= 2"));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!("normal has length {norm}, expected 1")));
    }
    Ok(())
}

fn is_exact_unit(v: &[BigRational]) -> bool {
    v.iter().fold(BigRational::zero(), |acc, x| acc + x * x).is_one()
}

/// Rational point on the unit sphere near the real unit vector `v`.
pub fn rationalize_unit(v: &[f64]) -> Vec<BigRational> {
    let v = normalize(v);
    let n = v.len();
    let flip = v[n - 1] < 0.0;
    let w: Vec<f64> = if flip { v.iter().map(|x| -x).collect() } else { v };
    // stereographic projection from -e_n
    let y: Vec<BigRational> = w[..n - 1]
        .iter()
        .map(|wi| continued_fraction(wi / (1.0 + w[n - 1]), RATIONALIZE_TOL))
        .collect();
    let y2 = y.iter().fold(BigRational::zero(), |acc, x| acc + x * x);
    let denom = BigRational::one() + &y2;
    let two = int(2);
    let mut out: Vec<BigRational> = y.iter().map(|yi| &two * yi / &denom).collect();
    out.push((BigRational::one() - &y2) / &denom);
    if flip {
        out.iter_mut().for_each(|x| *x = -x.clone());
    }
    out
}

/// Serde helpers writing rationals as `"p/q"` strings.
pub mod rational_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod rational_vec_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(format_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("0.6").unwrap(), rat(3, 5));
        assert_eq!(parse_rational("-1.25e-1").unwrap(), rat(-1, 8));
        assert_eq!(parse_rational("2e2").unwrap(), int(200));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for q in [rat(3, 4), int(-2), rat(-5, 7), int(0)] {
            assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
        }
    }

    #[test]
    fn continued_fraction_finds_simple_fractions() {
        assert_eq!(continued_fraction(1.0 / 3.0, 1e-12), rat(1, 3));
        assert_eq!(continued_fraction(-0.75, 1e-12), rat(-3, 4));
        let pi = continued_fraction(std::f64::consts::PI, 1e-6);
        assert_eq!(pi, rat(355, 113));
    }

    #[test]
    fn exact_normals_are_not_rationalized() {
        let n = Normal::from_f64(&[0.0, 0.0, 1.0]).unwrap();
        assert!(!n.rationalized);
        let n = Normal::from_rationals(&[rat(3, 5), rat(4, 5)]).unwrap();
        assert!(!n.rationalized);
        assert_eq!(n.exact, vec![rat(3, 5), rat(4, 5)]);
    }

    #[test]
    fn irrational_normals_are_rationalized_to_unit_vectors() {
        let s = 1.0 / 3f64.sqrt();
        for sign in [1.0, -1.0] {
            let v = [s * sign, -s, s * sign];
            let n = Normal::from_f64(&v).unwrap();
            assert!(n.rationalized);
            assert!(is_exact_unit(&n.exact));
            for (a, b) in n.exact.iter().zip(&v) {
                assert!((a.to_real() - b).abs() < 1e-11);
            }
        }
        // 0.6 as binary64 is not 3/5, but its projection rationalizes to it
        let n = Normal::from_f64(&[0.6, 0.8]).unwrap();
        assert!(n.rationalized);
        assert_eq!(n.exact, vec![rat(3, 5), rat(4, 5)]);
    }

    #[test]
    fn non_unit_normals_are_rejected() {
        assert!(Normal::from_f64(&[1.0, 1.0]).is_err());
        assert!(Normal::from_rationals(&[int(1), int(1)]).is_err());
        assert!(Normal::from_f64(&[1.0]).is_err());
    }
}
