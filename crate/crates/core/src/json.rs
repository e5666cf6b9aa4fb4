//! JSON encodings: complex numbers as `[re, im]`, matrices as row-major
//! nested arrays, polynomials as term lists. Floats are written in shortest
//! round-trip form, so decode(encode(x)) reproduces x bit for bit.

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::gauss::{Branch, GaussElement, Gaussian};
use crate::linalg::{CMat, CVec};
use crate::path::PathSpec;
use crate::poly::WeylPolynomial;
use crate::star::LinearExp;

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| perr(e.to_string()))
}

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        // JSON has no non-finite numbers
        Value::String(x.to_string())
    }
}

fn float_from(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| perr("number out of range")),
        Value::String(s) => s.parse::<f64>().map_err(|_| perr(format!("not a number: {s}"))),
        _ => Err(perr(format!("expected a number, got {v}"))),
    }
}

pub fn complex_to_json(z: Complex64) -> Value {
    Value::Array(vec![finite(z.re), finite(z.im)])
}

/// Accepts `[re, im]` or a bare real number.
pub fn complex_from_json(v: &Value) -> Result<Complex64> {
    match v {
        Value::Array(a) if a.len() == 2 => Ok(Complex64::new(float_from(&a[0])?, float_from(&a[1])?)),
        Value::Number(_) => Ok(Complex64::new(float_from(v)?, 0.0)),
        _ => Err(perr(format!("expected [re, im], got {v}"))),
    }
}

pub fn vector_to_json(v: &CVec) -> Value {
    Value::Array(v.iter().map(|z| complex_to_json(*z)).collect())
}

pub fn vector_from_json(v: &Value) -> Result<CVec> {
    let a = v.as_array().ok_or_else(|| perr("expected an array of complex numbers"))?;
    let xs = a.iter().map(complex_from_json).collect::<Result<Vec<_>>>()?;
    Ok(CVec::from_vec(xs))
}

pub fn matrix_to_json(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_to_json(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(v: &Value) -> Result<CMat> {
    let rows = v.as_array().ok_or_else(|| perr("expected a matrix as nested arrays"))?;
    let parsed: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| perr("matrix row is not an array"))?
                .iter()
                .map(complex_from_json)
                .collect()
        })
        .collect::<Result<_>>()?;
    crate::linalg::from_rows(&parsed)
}

pub fn poly_to_json(p: &WeylPolynomial) -> Value {
    Value::Array(p.terms().map(|(e, c)| json!({"exp": e, "coef": complex_to_json(*c)})).collect())
}

/// Decodes a term list; `nvars` is inferred from the first exponent when not
/// given. An empty list needs `nvars`.
pub fn poly_from_json(v: &Value, nvars: Option<usize>) -> Result<WeylPolynomial> {
    let terms = v.as_array().ok_or_else(|| perr("polynomial must be a list of terms"))?;
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let e = t.get("exp").ok_or_else(|| perr("term without \"exp\""))?;
        let e: Vec<u32> = serde_json::from_value(e.clone()).map_err(|_| perr("\"exp\" must be a list of non-negative integers"))?;
        let c = complex_from_json(t.get("coef").ok_or_else(|| perr("term without \"coef\""))?)?;
        out.push((e, c));
    }
    let n = match nvars {
        Some(n) => n,
        None => out.first().map(|(e, _)| e.len()).ok_or_else(|| perr("empty polynomial needs a known dimension"))?,
    };
    WeylPolynomial::from_terms(n, out)
}

pub fn branch_to_json(b: &Branch) -> Value {
    json!({"sheet": b.sheet, "path_hash": b.path_hash.map(|h| format!("{h:016x}"))})
}

pub fn branch_from_json(v: &Value) -> Result<Branch> {
    let sheet = v.get("sheet").and_then(Value::as_i64).ok_or_else(|| perr("branch without integer \"sheet\""))?;
    if sheet != 1 && sheet != -1 {
        return Err(perr("branch sheet must be 1 or -1"));
    }
    let path_hash = match v.get("path_hash") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(u64::from_str_radix(s, 16).map_err(|_| perr("bad path_hash"))?),
        Some(other) => return Err(perr(format!("bad path_hash {other}"))),
    };
    Ok(Branch { sheet: sheet as i8, path_hash })
}

pub fn gauss_to_json(g: &GaussElement) -> Value {
    match g {
        GaussElement::Zero { m } => json!({"zero": true, "m": m}),
        GaussElement::Gauss(g) => json!({
            "amplitude": complex_to_json(g.amplitude),
            "phase": matrix_to_json(g.phase()),
            "linear": vector_to_json(&g.linear),
            "prefactor": poly_to_json(&g.prefactor),
            "branch": branch_to_json(&g.branch),
        }),
    }
}

/// `linear`, `prefactor` and `branch` are optional on input.
pub fn gauss_from_json(v: &Value) -> Result<GaussElement> {
    let obj = v.as_object().ok_or_else(|| perr("Gaussian element must be an object"))?;
    if obj.get("zero").and_then(Value::as_bool) == Some(true) {
        let m = obj.get("m").and_then(Value::as_u64).ok_or_else(|| perr("zero element without \"m\""))?;
        return Ok(GaussElement::Zero { m: m as usize });
    }
    let amp = complex_from_json(obj.get("amplitude").ok_or_else(|| perr("Gaussian without \"amplitude\""))?)?;
    let phase = matrix_from_json(obj.get("phase").ok_or_else(|| perr("Gaussian without \"phase\""))?)?;
    let n = phase.nrows();
    if phase.ncols() != n || n % 2 != 0 {
        return Err(Error::Dimension(format!("phase must be 2m x 2m, got {}x{}", n, phase.ncols())));
    }
    let asym = crate::linalg::asymmetry(&phase);
    if asym > 0.0 {
        return Err(Error::NonSymmetric(asym));
    }
    let linear = match obj.get("linear") {
        Some(l) => vector_from_json(l)?,
        None => CVec::zeros(n),
    };
    if linear.len() != n {
        return Err(Error::Dimension(format!("linear part of length {} for 2m = {n}", linear.len())));
    }
    let prefactor = match obj.get("prefactor") {
        Some(p) => poly_from_json(p, Some(n))?,
        None => WeylPolynomial::one(n),
    };
    let mut g = Gaussian::new(amp, phase, linear, prefactor);
    if let Some(b) = obj.get("branch") {
        g = g.with_branch(branch_from_json(b)?);
    }
    Ok(GaussElement::Gauss(g))
}

pub fn linear_to_json(e: &LinearExp) -> Value {
    json!({"a": vector_to_json(&e.a), "s": complex_to_json(e.s), "c": complex_to_json(e.c)})
}

pub fn linear_from_json(v: &Value) -> Result<LinearExp> {
    let a = vector_from_json(v.get("a").ok_or_else(|| perr("linear exponential without \"a\""))?)?;
    let s = match v.get("s") {
        Some(s) => complex_from_json(s)?,
        None => Complex64::new(1.0, 0.0),
    };
    let c = match v.get("c") {
        Some(c) => complex_from_json(c)?,
        None => Complex64::new(0.0, 0.0),
    };
    Ok(LinearExp::new(a, s, c))
}

pub fn path_to_json(p: &PathSpec) -> Value {
    serde_json::to_value(p).expect("path serializes")
}

pub fn path_from_json(v: &Value) -> Result<PathSpec> {
    let p: PathSpec = serde_json::from_value(v.clone()).map_err(|e| perr(format!("path: {e}")))?;
    p.validate()?;
    Ok(p)
}

/// A product operand.
#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Poly(WeylPolynomial),
    Gauss(GaussElement),
    Linear(LinearExp),
}

/// Term lists are polynomials, objects with `a` are linear exponentials,
/// other objects are Gaussian elements.
pub fn operand_from_json(v: &Value, nvars: usize) -> Result<Operand> {
    match v {
        Value::Array(_) => Ok(Operand::Poly(poly_from_json(v, Some(nvars))?)),
        Value::Object(o) if o.contains_key("a") => Ok(Operand::Linear(linear_from_json(v)?)),
        Value::Object(_) => Ok(Operand::Gauss(gauss_from_json(v)?)),
        _ => Err(perr("operand must be a term list or an object")),
    }
}

pub fn operand_to_json(o: &Operand) -> Value {
    match o {
        Operand::Poly(p) => poly_to_json(p),
        Operand::Gauss(g) => gauss_to_json(g),
        Operand::Linear(e) => linear_to_json(e),
    }
}

/// Wraps a result with the ordering and ℏ used.
pub fn with_meta(result: Value, k: &CMat, hbar: f64, extra: Map<String, Value>) -> Value {
    let mut meta = Map::new();
    meta.insert("K".into(), matrix_to_json(k));
    meta.insert("hbar".into(), finite(hbar));
    meta.extend(extra);
    json!({"result": result, "meta": Value::Object(meta)})
}
