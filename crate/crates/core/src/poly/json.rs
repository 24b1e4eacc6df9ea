//! `{"shape":[m,n],"terms":[{"coeff":"p/q","exps":[e11,...,emn]}]}`

use serde::{Deserialize, Serialize};

use super::{parse_builtin, Poly, PolyMatrixFn};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: String,
    pub exps: Vec<u16>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub shape: [usize; 2],
    pub terms: Vec<TermJson>,
}

impl PolyMatrixFn {
    pub fn to_json(&self) -> PolyJson {
        let k = self.m * self.n;
        let terms = self
            .poly
            .terms()
            .map(|(e, c)| {
                let mut exps = e.to_vec();
                exps.resize(k, 0);
                TermJson {
                    coeff: format_rational(c),
                    exps,
                }
            })
            .collect();
        PolyJson {
            shape: [self.m, self.n],
            terms,
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<Self> {
        let [m, n] = j.shape;
        if m == 0 || n == 0 {
            return Err(Error::parse("shape", "dimensions must be positive"));
        }
        let mut poly = Poly::default();
        for (i, t) in j.terms.iter().enumerate() {
            if t.exps.len() != m * n {
                return Err(Error::parse(
                    format!("terms[{i}].exps"),
                    format!("expected {} exponents, got {}", m * n, t.exps.len()),
                ));
            }
            let c = parse_rational(&t.coeff)
                .map_err(|e| Error::parse(format!("terms[{i}].coeff"), e.to_string()))?;
            poly.add_term(t.exps.clone(), c);
        }
        PolyMatrixFn::new(m, n, poly)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("plain data serializes")
    }
}

/// Parses polynomial text: a JSON object, or else a built-in name.
pub fn parse_poly(text: &str, m: Option<usize>, n: Option<usize>) -> Result<PolyMatrixFn> {
    let t = text.trim();
    if t.starts_with('{') {
        let j: PolyJson = serde_json::from_str(t).map_err(|e| {
            Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string())
        })?;
        let f = PolyMatrixFn::from_json(&j)?;
        if m.is_some_and(|a| a != f.rows()) || n.is_some_and(|b| b != f.cols()) {
            return Err(Error::parse(
                "shape",
                format!("file declares {}x{}, flags request {:?}x{:?}", f.rows(), f.cols(), m, n),
            ));
        }
        Ok(f)
    } else {
        parse_builtin(t, m, n)
    }
}
