//! Line-oriented arrangement files:
//!
//! ```text
//! # comment
//! field p=3 m=2 poly=1,0,1
//! lambda ell=2 k=1
//! dim 2
//! line 0 1 0
//! ```
//!
//! `poly` is the monic modulus low to high and is omitted exactly when
//! `m = 1`. Field elements are base-p digit codes.

use std::collections::HashMap;
use std::sync::Arc;

use crate::algebra::{Fe, Field, Lambda};
use crate::arrangement::{Arrangement, Hyperplane};
use crate::cohomology::Complement;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ArrangementFile {
    pub arrangement: Arc<Arrangement>,
    pub lambda: Lambda,
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn keyvals(line: usize, words: &[&str]) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for w in words {
        let (k, v) = w.split_once('=').ok_or_else(|| perr(line, format!("expected key=value, found {w:?}")))?;
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(perr(line, format!("repeated key {k:?}")));
        }
    }
    Ok(out)
}

fn take_num<T: std::str::FromStr>(line: usize, kv: &mut HashMap<String, String>, key: &str) -> Result<T> {
    let v = kv.remove(key).ok_or_else(|| perr(line, format!("missing {key}=")))?;
    v.parse().map_err(|_| perr(line, format!("{key}={v:?} is not a number")))
}

fn no_extra(line: usize, kv: &HashMap<String, String>) -> Result<()> {
    match kv.keys().next() {
        Some(k) => Err(perr(line, format!("unknown key {k:?}"))),
        None => Ok(()),
    }
}

impl ArrangementFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut field: Option<Arc<Field>> = None;
        let mut lambda: Option<Lambda> = None;
        let mut dim: Option<usize> = None;
        let mut hs: Vec<Hyperplane> = Vec::new();
        let mut seen: HashMap<Hyperplane, usize> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let words: Vec<&str> = content.split_whitespace().collect();
            match words[0] {
                "field" => {
                    if field.is_some() {
                        return Err(perr(ln, "field given twice"));
                    }
                    let mut kv = keyvals(ln, &words[1..])?;
                    let p: u32 = take_num(ln, &mut kv, "p")?;
                    let m: u32 = take_num(ln, &mut kv, "m")?;
                    let poly = kv.remove("poly");
                    no_extra(ln, &kv)?;
                    let modulus = match (m, poly) {
                        (1, None) => None,
                        (1, Some(_)) => return Err(perr(ln, "poly must be omitted when m = 1")),
                        (_, None) => return Err(perr(ln, "poly is required when m > 1")),
                        (_, Some(s)) => Some(
                            s.split(',')
                                .map(|c| c.trim().parse::<u32>().map_err(|_| perr(ln, format!("bad coefficient {c:?}"))))
                                .collect::<Result<Vec<u32>>>()?,
                        ),
                    };
                    let f = Field::new(p, m, modulus).map_err(|e| perr(ln, e.to_string()))?;
                    if let Some(l) = lambda {
                        l.check_characteristic(p as u64).map_err(|e| perr(ln, e.to_string()))?;
                    }
                    field = Some(Arc::new(f));
                }
                "lambda" => {
                    if lambda.is_some() {
                        return Err(perr(ln, "lambda given twice"));
                    }
                    let mut kv = keyvals(ln, &words[1..])?;
                    let ell: u64 = take_num(ln, &mut kv, "ell")?;
                    let k: u32 = take_num(ln, &mut kv, "k")?;
                    no_extra(ln, &kv)?;
                    let l = Lambda::new(ell, k).map_err(|e| perr(ln, e.to_string()))?;
                    if let Some(f) = &field {
                        l.check_characteristic(f.p() as u64).map_err(|e| perr(ln, e.to_string()))?;
                    }
                    lambda = Some(l);
                }
                "dim" => {
                    if dim.is_some() {
                        return Err(perr(ln, "dim given twice"));
                    }
                    if words.len() != 2 {
                        return Err(perr(ln, "expected `dim <n>`"));
                    }
                    let n: usize = words[1].parse().map_err(|_| perr(ln, format!("bad dimension {:?}", words[1])))?;
                    if n == 0 {
                        return Err(perr(ln, "dimension must be positive"));
                    }
                    dim = Some(n);
                }
                "line" => {
                    let (Some(f), Some(n)) = (&field, dim) else {
                        return Err(perr(ln, "`line` before `field` and `dim`"));
                    };
                    let coeffs = words[1..]
                        .iter()
                        .map(|w| w.parse::<Fe>().map_err(|_| perr(ln, format!("bad element {w:?}"))))
                        .collect::<Result<Vec<Fe>>>()?;
                    if coeffs.len() != n + 1 {
                        return Err(perr(ln, format!("expected {} coefficients, found {}", n + 1, coeffs.len())));
                    }
                    let h = Hyperplane::normalize(f, &coeffs).map_err(|e| perr(ln, e.to_string()))?;
                    if let Some(prev) = seen.insert(h.clone(), ln) {
                        return Err(perr(ln, format!("duplicate of the hyperplane on line {prev}")));
                    }
                    hs.push(h);
                }
                other => return Err(perr(ln, format!("unknown directive {other:?}"))),
            }
        }
        let last = text.lines().count().max(1);
        let field = field.ok_or_else(|| perr(last, "missing `field`"))?;
        let lambda = lambda.ok_or_else(|| perr(last, "missing `lambda`"))?;
        let dim = dim.ok_or_else(|| perr(last, "missing `dim`"))?;
        let arrangement = Arc::new(Arrangement::new(field, dim, hs).map_err(|e| perr(last, e.to_string()))?);
        Ok(ArrangementFile { arrangement, lambda })
    }

    pub fn print(&self) -> String {
        let f = self.arrangement.field();
        let mut out = String::new();
        if f.m() == 1 {
            out.push_str(&format!("field p={} m=1\n", f.p()));
        } else {
            let poly: Vec<String> = f.modulus().iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("field p={} m={} poly={}\n", f.p(), f.m(), poly.join(",")));
        }
        out.push_str(&format!("lambda ell={} k={}\n", self.lambda.ell(), self.lambda.k()));
        out.push_str(&format!("dim {}\n", self.arrangement.dim()));
        for h in self.arrangement.hyperplanes() {
            let cs: Vec<String> = h.coeffs().iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("line {}\n", cs.join(" ")));
        }
        out
    }

    pub fn complement(&self) -> Result<Complement> {
        Complement::new(self.arrangement.clone(), self.lambda)
    }
}
