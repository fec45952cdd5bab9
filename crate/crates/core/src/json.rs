//! Strict JSON schemas for models, polynomials, forms, maps and sample plans.
//!
//! Exact rationals are an integer or an `[num, den]` pair; integers outside
//! the `i64` range are decimal strings. Parsing rejects unknown keys and
//! non-finite numbers and reports every problem with its `$.path`.
//! [`to_canonical_string`] is the inverse of parsing for canonical files.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{Map, Value};

use crate::dynamics::ContractionSpec;
use crate::exterior::{Form, RationalMap, VectorField};
use crate::heisenberg::{make_model, ExactPoint, ModelSpec};
use crate::point::GroupPoint;
use crate::sample::{SampleMode, SamplePlan};
use crate::scalar::matrix::QMatrix;
use crate::scalar::{GaussRat, Poly, RatFunc, Ring};

/// One schema violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

/// All violations found in one document.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct SchemaError {
    pub issues: Vec<Issue>,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.issues.iter().map(|i| format!("{}: {}", i.path, i.message)).collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl SchemaError {
    pub fn at(path: &str, message: impl Into<String>) -> Self {
        SchemaError { issues: vec![Issue { path: path.to_string(), message: message.into() }] }
    }

    /// True if some issue is reported at exactly `path`.
    pub fn mentions(&self, path: &str) -> bool {
        self.issues.iter().any(|i| i.path == path)
    }
}

impl From<SchemaError> for crate::Error {
    fn from(e: SchemaError) -> Self {
        crate::Error::Invalid(format!("schema: {e}"))
    }
}

pub type SchemaResult<T> = Result<T, SchemaError>;

/// Collects issues while walking a document.
#[derive(Default)]
struct Ctx {
    issues: Vec<Issue>,
}

impl Ctx {
    fn err(&mut self, path: &str, message: impl Into<String>) {
        self.issues.push(Issue { path: path.to_string(), message: message.into() });
    }

    fn finish<T>(self, v: Option<T>) -> SchemaResult<T> {
        match v {
            Some(v) if self.issues.is_empty() => Ok(v),
            _ if self.issues.is_empty() => Err(SchemaError::at("$", "invalid document")),
            _ => Err(SchemaError { issues: self.issues }),
        }
    }

    fn object<'a>(&mut self, v: &'a Value, path: &str, required: &[&str], optional: &[&str]) -> Option<&'a Map<String, Value>> {
        let Some(m) = v.as_object() else {
            self.err(path, "expected an object");
            return None;
        };
        let mut ok = true;
        for k in m.keys() {
            if !required.contains(&k.as_str()) && !optional.contains(&k.as_str()) {
                self.err(&format!("{path}.{k}"), "unknown key");
                ok = false;
            }
        }
        for k in required {
            if !m.contains_key(*k) {
                self.err(&format!("{path}.{k}"), "missing key");
                ok = false;
            }
        }
        ok.then_some(m)
    }

    fn array<'a>(&mut self, v: &'a Value, path: &str, len: Option<usize>) -> Option<&'a Vec<Value>> {
        let Some(a) = v.as_array() else {
            self.err(path, "expected an array");
            return None;
        };
        if let Some(n) = len {
            if a.len() != n {
                self.err(path, format!("expected {n} entries, found {}", a.len()));
                return None;
            }
        }
        Some(a)
    }

    fn integer(&mut self, v: &Value, path: &str) -> Option<BigInt> {
        match v {
            Value::Number(x) => {
                if let Some(i) = x.as_i64() {
                    Some(BigInt::from(i))
                } else if let Some(u) = x.as_u64() {
                    Some(BigInt::from(u))
                } else {
                    self.err(path, "expected an integer");
                    None
                }
            }
            Value::String(s) => match s.parse::<BigInt>() {
                Ok(i) => Some(i),
                Err(_) => {
                    self.err(path, "expected a decimal integer string");
                    None
                }
            },
            _ => {
                self.err(path, "expected an integer");
                None
            }
        }
    }

    fn small_int(&mut self, v: &Value, path: &str) -> Option<i64> {
        match v.as_i64() {
            Some(i) => Some(i),
            None => {
                self.err(path, "expected an integer");
                None
            }
        }
    }

    fn exponent(&mut self, v: &Value, path: &str, allow_negative: bool) -> Option<i32> {
        let i = self.small_int(v, path)?;
        match i32::try_from(i) {
            Ok(e) if allow_negative || e >= 0 => Some(e),
            _ => {
                self.err(path, "exponent out of range");
                None
            }
        }
    }

    fn count(&mut self, v: &Value, path: &str) -> Option<usize> {
        match v.as_u64().and_then(|u| usize::try_from(u).ok()) {
            Some(u) => Some(u),
            None => {
                self.err(path, "expected a non-negative integer");
                None
            }
        }
    }

    fn rational(&mut self, v: &Value, path: &str) -> Option<BigRational> {
        match v {
            Value::Array(a) => {
                if a.len() != 2 {
                    self.err(path, "expected [num, den]");
                    return None;
                }
                let n = self.integer(&a[0], &format!("{path}[0]"));
                let d = self.integer(&a[1], &format!("{path}[1]"));
                let (n, d) = (n?, d?);
                if d.is_zero() {
                    self.err(&format!("{path}[1]"), "zero denominator");
                    return None;
                }
                Some(BigRational::new(n, d))
            }
            Value::Number(x) if x.is_f64() => {
                self.err(path, "expected an integer or [num, den], not a float");
                None
            }
            _ => self.integer(v, path).map(BigRational::from_integer),
        }
    }

    fn float(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            Some(_) => {
                self.err(path, "number is not finite");
                None
            }
            None => {
                self.err(path, "expected a number");
                None
            }
        }
    }

    fn gauss(&mut self, v: &Value, path: &str) -> Option<GaussRat> {
        let a = self.array(v, path, Some(2))?;
        let re = self.rational(&a[0], &format!("{path}[0]"));
        let im = self.rational(&a[1], &format!("{path}[1]"));
        Some(GaussRat::new(re?, im?))
    }

    fn complex(&mut self, v: &Value, path: &str) -> Option<Complex64> {
        let a = self.array(v, path, Some(2))?;
        let re = self.float(&a[0], &format!("{path}[0]"));
        let im = self.float(&a[1], &format!("{path}[1]"));
        Some(Complex64::new(re?, im?))
    }

    fn gauss_matrix(&mut self, v: &Value, path: &str, n: usize) -> Option<QMatrix> {
        let rows = self.array(v, path, Some(n))?;
        let mut out = Vec::with_capacity(n);
        let mut ok = true;
        for (i, r) in rows.iter().enumerate() {
            let rp = format!("{path}[{i}]");
            let Some(cells) = self.array(r, &rp, Some(n)) else {
                ok = false;
                continue;
            };
            let row: Vec<Option<GaussRat>> =
                cells.iter().enumerate().map(|(j, c)| self.gauss(c, &format!("{rp}[{j}]"))).collect();
            match row.into_iter().collect::<Option<Vec<_>>>() {
                Some(r) => out.push(r),
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn poly(&mut self, v: &Value, path: &str, n: usize) -> Option<Poly> {
        let m = self.object(v, path, &["terms"], &["expgens"])?;
        let mut gens = Vec::new();
        if let Some(g) = m.get("expgens") {
            let gp = format!("{path}.expgens");
            let list = self.array(g, &gp, None)?;
            for (j, f) in list.iter().enumerate() {
                let fp = format!("{gp}[{j}]");
                if f.get("expgens").is_some_and(|e| e.as_array().is_none_or(|a| !a.is_empty())) {
                    self.err(&format!("{fp}.expgens"), "generator exponents cannot carry generators");
                    return None;
                }
                gens.push(self.poly(f, &fp, n)?);
            }
        }
        let ring = if gens.is_empty() {
            Ring::base(n)
        } else {
            match Ring::with_generators(n, gens) {
                Ok(r) => r,
                Err(e) => {
                    self.err(&format!("{path}.expgens"), e.to_string());
                    return None;
                }
            }
        };
        let m_gens = ring.n_gens();
        let tp = format!("{path}.terms");
        let terms = self.array(&m["terms"], &tp, None)?;
        let mut out = Vec::with_capacity(terms.len());
        let mut ok = true;
        for (k, t) in terms.iter().enumerate() {
            let p = format!("{tp}[{k}]");
            let opt: &[&str] = if m_gens > 0 { &["z", "zbar", "t", "exp"] } else { &["z", "zbar", "t"] };
            let Some(tm) = self.object(t, &p, &["coeff"], opt) else {
                ok = false;
                continue;
            };
            let coeff = self.quad(&tm["coeff"], &format!("{p}.coeff"));
            let mut mono = vec![0i32; 2 * n + 1 + m_gens];
            let mut exps = |ctx: &mut Ctx, key: &str, offset: usize, len: usize, neg: bool| -> bool {
                let Some(v) = tm.get(key) else { return true };
                let kp = format!("{p}.{key}");
                let Some(a) = ctx.array(v, &kp, Some(len)) else { return false };
                let mut good = true;
                for (i, e) in a.iter().enumerate() {
                    match ctx.exponent(e, &format!("{kp}[{i}]"), neg) {
                        Some(e) => mono[offset + i] = e,
                        None => good = false,
                    }
                }
                good
            };
            let good =
                exps(self, "z", 0, n, false) & exps(self, "zbar", n, n, false) & exps(self, "exp", 2 * n + 1, m_gens, true);
            let te = tm.get("t").map(|v| self.exponent(v, &format!("{p}.t"), false));
            match (coeff, good, te) {
                (Some(c), true, None) => out.push((c, mono)),
                (Some(c), true, Some(Some(e))) => {
                    mono[2 * n] = e;
                    out.push((c, mono));
                }
                _ => ok = false,
            }
        }
        ok.then(|| Poly::from_terms(&ring, out))
    }

    fn quad(&mut self, v: &Value, path: &str) -> Option<GaussRat> {
        let a = self.array(v, path, Some(4))?;
        let q: Vec<Option<BigInt>> = a.iter().enumerate().map(|(i, x)| self.integer(x, &format!("{path}[{i}]"))).collect();
        let q: Vec<BigInt> = q.into_iter().collect::<Option<_>>()?;
        let [a, b, c, d]: [BigInt; 4] = q.try_into().ok()?;
        match GaussRat::from_quad([a, b, c, d]) {
            Some(g) => Some(g),
            None => {
                self.err(path, "zero denominator");
                None
            }
        }
    }

    fn ratfunc(&mut self, v: &Value, path: &str, n: usize) -> Option<RatFunc> {
        if v.get("num").is_some() || v.get("den").is_some() {
            let m = self.object(v, path, &["num", "den"], &[])?;
            let num = self.poly(&m["num"], &format!("{path}.num"), n);
            let den = self.poly(&m["den"], &format!("{path}.den"), n);
            let (num, den) = (num?, den?);
            match RatFunc::new(num, den) {
                Ok(f) => Some(f),
                Err(e) => {
                    self.err(&format!("{path}.den"), e.to_string());
                    None
                }
            }
        } else {
            self.poly(v, path, n).map(RatFunc::from_poly)
        }
    }

    fn form(&mut self, v: &Value, path: &str, n: usize) -> Option<Form> {
        let m = self.object(v, path, &["degree", "terms"], &[])?;
        let degree = self.count(&m["degree"], &format!("{path}.degree"))?;
        let tp = format!("{path}.terms");
        let terms = self.array(&m["terms"], &tp, None)?;
        let mut out = Vec::new();
        let mut ok = true;
        for (k, t) in terms.iter().enumerate() {
            let p = format!("{tp}[{k}]");
            let Some(tm) = self.object(t, &p, &["basis", "coeff"], &[]) else {
                ok = false;
                continue;
            };
            let bp = format!("{p}.basis");
            let basis = self.array(&tm["basis"], &bp, Some(degree)).map(|a| {
                a.iter()
                    .enumerate()
                    .map(|(i, x)| match self.count(x, &format!("{bp}[{i}]")) {
                        Some(k) if k <= 2 * n => Some(k),
                        Some(_) => {
                            self.err(&format!("{bp}[{i}]"), format!("basis index must be below {}", 2 * n + 1));
                            None
                        }
                        None => None,
                    })
                    .collect::<Option<Vec<usize>>>()
            });
            let coeff = self.ratfunc(&tm["coeff"], &format!("{p}.coeff"), n);
            match (basis, coeff) {
                (Some(Some(b)), Some(c)) => out.push((b, c)),
                _ => ok = false,
            }
        }
        if !ok {
            return None;
        }
        let ring = out.iter().fold(Ring::base(n), |r, (_, c)| Ring::join(&r, c.ring()).unwrap_or(r));
        Some(Form::from_terms(&ring, degree, out))
    }

    fn exact_point(&mut self, v: &Value, path: &str, n: usize) -> Option<ExactPoint> {
        let m = self.object(v, path, &["z", "t"], &[])?;
        let zp = format!("{path}.z");
        let z = self
            .array(&m["z"], &zp, Some(n))
            .and_then(|a| a.iter().enumerate().map(|(i, x)| self.gauss(x, &format!("{zp}[{i}]"))).collect::<Option<Vec<_>>>());
        let t = self.rational(&m["t"], &format!("{path}.t"));
        Some(ExactPoint { z: z?, t: t? })
    }

    fn point(&mut self, v: &Value, path: &str, n: usize) -> Option<GroupPoint> {
        let m = self.object(v, path, &["z", "t"], &[])?;
        let zp = format!("{path}.z");
        let z = self
            .array(&m["z"], &zp, Some(n))
            .and_then(|a| a.iter().enumerate().map(|(i, x)| self.complex(x, &format!("{zp}[{i}]"))).collect::<Option<Vec<_>>>());
        let t = self.float(&m["t"], &format!("{path}.t"));
        Some(GroupPoint::new(z?, t?))
    }
}

fn parse_text(text: &str) -> SchemaResult<Value> {
    serde_json::from_str(text).map_err(|e| SchemaError::at("$", format!("malformed JSON: {e}")))
}

// ---------- serialization ----------

fn int_value(i: &BigInt) -> Value {
    match i.to_i64() {
        Some(x) => Value::from(x),
        None => Value::String(i.to_string()),
    }
}

pub fn rational_value(r: &BigRational) -> Value {
    if r.denom().is_one() {
        int_value(r.numer())
    } else {
        Value::Array(vec![int_value(r.numer()), int_value(r.denom())])
    }
}

fn gauss_value(c: &GaussRat) -> Value {
    Value::Array(vec![rational_value(&c.re), rational_value(&c.im)])
}

pub fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn complex_value(c: Complex64) -> Value {
    Value::Array(vec![float_value(c.re), float_value(c.im)])
}

pub fn matrix_value(m: &QMatrix) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(gauss_value).collect())).collect())
}

fn obj(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

pub fn poly_value(p: &Poly) -> Value {
    let n = p.dim();
    let ring = p.ring();
    let m_gens = ring.n_gens();
    let terms: Vec<Value> = p
        .terms()
        .map(|(m, c)| {
            let mut pairs = vec![
                ("coeff", Value::Array(c.to_quad().iter().map(int_value).collect())),
                ("z", Value::from(m[..n].to_vec())),
                ("zbar", Value::from(m[n..2 * n].to_vec())),
                ("t", Value::from(m[2 * n])),
            ];
            if m_gens > 0 {
                pairs.push(("exp", Value::from(m[2 * n + 1..].to_vec())));
            }
            obj(pairs)
        })
        .collect();
    let mut pairs = vec![("terms", Value::Array(terms))];
    if m_gens > 0 {
        pairs.push(("expgens", Value::Array(ring.generators().iter().map(poly_value).collect())));
    }
    obj(pairs)
}

pub fn ratfunc_value(f: &RatFunc) -> Value {
    if f.denom_factors().is_empty() {
        poly_value(f.numer())
    } else {
        obj(vec![("num", poly_value(f.numer())), ("den", poly_value(f.denom()))])
    }
}

pub fn form_value(a: &Form) -> Value {
    let terms: Vec<Value> =
        a.terms().map(|(k, c)| obj(vec![("basis", Value::from(k.clone())), ("coeff", ratfunc_value(c))])).collect();
    obj(vec![("degree", Value::from(a.degree())), ("terms", Value::Array(terms))])
}

pub fn field_value(x: &VectorField) -> Value {
    obj(vec![("coeffs", Value::Array(x.coeffs().iter().map(ratfunc_value).collect()))])
}

pub fn model_value(m: &ModelSpec) -> Value {
    obj(vec![("n", Value::from(m.dim())), ("P", matrix_value(m.p()))])
}

pub fn map_value(f: &RationalMap) -> Value {
    obj(vec![("w", Value::Array(f.w().iter().map(ratfunc_value).collect())), ("s", ratfunc_value(f.s()))])
}

pub fn exact_point_value(p: &ExactPoint) -> Value {
    obj(vec![("z", Value::Array(p.z.iter().map(gauss_value).collect())), ("t", rational_value(&p.t))])
}

pub fn point_value(p: &GroupPoint) -> Value {
    obj(vec![("z", Value::Array(p.z.iter().map(|c| complex_value(*c)).collect())), ("t", float_value(p.t))])
}

pub fn plan_value(p: &SamplePlan) -> Value {
    let mut pairs = match &p.mode {
        SampleMode::Explicit(points) => {
            vec![("mode", Value::from("explicit")), ("points", Value::Array(points.iter().map(point_value).collect()))]
        }
        SampleMode::Box { z_radius, t_radius, count, seed } => vec![
            ("mode", Value::from("box")),
            ("z_radius", float_value(*z_radius)),
            ("t_radius", float_value(*t_radius)),
            ("count", Value::from(*count)),
            ("seed", Value::from(*seed)),
        ],
    };
    pairs.push(("tolerance", float_value(p.tolerance)));
    pairs.push(("kmax", Value::from(p.kmax)));
    obj(pairs)
}

/// Pretty-printed with sorted keys and a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

// ---------- documents ----------

/// `{"n": 2, "P": [[[re, im], …], …]}` with `P` skew.
pub fn parse_model(text: &str) -> SchemaResult<ModelSpec> {
    model_from_value(&parse_text(text)?)
}

pub fn model_from_value(v: &Value) -> SchemaResult<ModelSpec> {
    let mut ctx = Ctx::default();
    let out = (|| {
        let m = ctx.object(v, "$", &["n", "P"], &[])?;
        let n = ctx.count(&m["n"], "$.n")?;
        if n == 0 {
            ctx.err("$.n", "n must be at least 1");
            return None;
        }
        let p = ctx.gauss_matrix(&m["P"], "$.P", n)?;
        match make_model(n, p) {
            Ok(model) => Some(model),
            Err(e) => {
                ctx.err("$.P", e.to_string());
                None
            }
        }
    })();
    ctx.finish(out)
}

/// A polynomial on the `n`-dimensional patch.
pub fn parse_poly(text: &str, n: usize) -> SchemaResult<Poly> {
    let v = parse_text(text)?;
    let mut ctx = Ctx::default();
    let out = ctx.poly(&v, "$", n);
    ctx.finish(out)
}

pub fn parse_ratfunc(text: &str, n: usize) -> SchemaResult<RatFunc> {
    let v = parse_text(text)?;
    let mut ctx = Ctx::default();
    let out = ctx.ratfunc(&v, "$", n);
    ctx.finish(out)
}

pub fn parse_form(text: &str, n: usize) -> SchemaResult<Form> {
    let v = parse_text(text)?;
    let mut ctx = Ctx::default();
    let out = ctx.form(&v, "$", n);
    ctx.finish(out)
}

pub fn parse_field(text: &str, n: usize) -> SchemaResult<VectorField> {
    let v = parse_text(text)?;
    let mut ctx = Ctx::default();
    let out = (|| {
        let m = ctx.object(&v, "$", &["coeffs"], &[])?;
        let a = ctx.array(&m["coeffs"], "$.coeffs", Some(2 * n + 1))?;
        let cs: Vec<Option<RatFunc>> = a.iter().enumerate().map(|(i, c)| ctx.ratfunc(c, &format!("$.coeffs[{i}]"), n)).collect();
        cs.into_iter().collect::<Option<Vec<_>>>().map(VectorField::from_coeffs)
    })();
    ctx.finish(out)
}

/// `{"w": [...], "s": ...}` from the `n_src`-dimensional patch.
pub fn parse_map(text: &str, n_src: usize) -> SchemaResult<RationalMap> {
    let v = parse_text(text)?;
    let mut ctx = Ctx::default();
    let out = map_from(&mut ctx, &v, "$", n_src);
    ctx.finish(out)
}

fn map_from(ctx: &mut Ctx, v: &Value, path: &str, n: usize) -> Option<RationalMap> {
    map_fields(ctx, v, path, n, &[])
}

fn map_fields(ctx: &mut Ctx, v: &Value, path: &str, n: usize, extra: &[&str]) -> Option<RationalMap> {
    let m = ctx.object(v, path, &["w", "s"], extra)?;
    let wp = format!("{path}.w");
    let w = ctx
        .array(&m["w"], &wp, None)
        .and_then(|a| a.iter().enumerate().map(|(i, c)| ctx.ratfunc(c, &format!("{wp}[{i}]"), n)).collect::<Option<Vec<_>>>());
    let s = ctx.ratfunc(&m["s"], &format!("{path}.s"), n);
    let (w, s) = (w?, s?);
    if w.is_empty() {
        ctx.err(&wp, "need at least one component");
        return None;
    }
    match RationalMap::new(n, w, s) {
        Ok(f) => Some(f),
        Err(e) => {
            ctx.err(path, e.to_string());
            None
        }
    }
}

/// A contraction: `{"composed": {"q", "U"?, "mu"}}` builds `L_q∘Λ∘U∘L_q⁻¹`;
/// `{"raw": {"w", "s", "fixed", "mu"}}` takes explicit components.
pub fn parse_phi(text: &str, model: &ModelSpec) -> SchemaResult<ContractionSpec> {
    let v = parse_text(text)?;
    let n = model.dim();
    let mut ctx = Ctx::default();
    let out = (|| {
        let m = ctx.object(&v, "$", &[], &["composed", "raw"])?;
        match (m.get("composed"), m.get("raw")) {
            (Some(c), None) => {
                let cm = ctx.object(c, "$.composed", &["q", "mu"], &["U"])?;
                let q = ctx.exact_point(&cm["q"], "$.composed.q", n);
                let mu = ctx.rational(&cm["mu"], "$.composed.mu");
                let u = match cm.get("U") {
                    None | Some(Value::Null) => Some(None),
                    Some(u) => ctx.gauss_matrix(u, "$.composed.U", n).map(Some),
                };
                let (q, mu, u) = (q?, mu?, u?);
                match ContractionSpec::composed(model, &q, u.as_ref(), &mu) {
                    Ok(spec) => Some(spec),
                    Err(e) => {
                        ctx.err("$.composed", e.to_string());
                        None
                    }
                }
            }
            (None, Some(r)) => {
                let map = map_fields(&mut ctx, r, "$.raw", n, &["fixed", "mu"]);
                let rm = r.as_object()?;
                let fixed = match rm.get("fixed") {
                    Some(f) => ctx.point(f, "$.raw.fixed", n),
                    None => {
                        ctx.err("$.raw.fixed", "missing key");
                        None
                    }
                };
                let mu = match rm.get("mu") {
                    Some(x) => ctx.float(x, "$.raw.mu"),
                    None => {
                        ctx.err("$.raw.mu", "missing key");
                        None
                    }
                };
                let (map, fixed, mu) = (map?, fixed?, mu?);
                match ContractionSpec::raw(model, map, fixed, mu) {
                    Ok(spec) => Some(spec),
                    Err(e) => {
                        ctx.err("$.raw", e.to_string());
                        None
                    }
                }
            }
            _ => {
                ctx.err("$", "expected exactly one of \"composed\" or \"raw\"");
                None
            }
        }
    })();
    ctx.finish(out)
}

/// How a contact form is given on the model patch.
#[derive(Clone, Debug)]
pub enum ThetaSpec {
    /// `h·θ_P`.
    Density(Poly),
    /// `e^{2f}θ_P` with its induced coframe.
    Conformal(Poly),
    Form(Form),
}

/// `{"density": poly}`, `{"conformal": poly}` or `{"form": form}`.
pub fn parse_theta(text: &str, n: usize) -> SchemaResult<ThetaSpec> {
    let v = parse_text(text)?;
    let mut ctx = Ctx::default();
    let out = (|| {
        let m = ctx.object(&v, "$", &[], &["density", "conformal", "form"])?;
        if m.len() != 1 {
            ctx.err("$", "expected exactly one of \"density\", \"conformal\" or \"form\"");
            return None;
        }
        let (k, x) = m.iter().next()?;
        let path = format!("$.{k}");
        match k.as_str() {
            "density" => ctx.poly(x, &path, n).map(ThetaSpec::Density),
            "conformal" => ctx.poly(x, &path, n).map(ThetaSpec::Conformal),
            _ => ctx.form(x, &path, n).map(ThetaSpec::Form),
        }
    })();
    ctx.finish(out)
}

pub fn theta_value(t: &ThetaSpec) -> Value {
    match t {
        ThetaSpec::Density(p) => obj(vec![("density", poly_value(p))]),
        ThetaSpec::Conformal(p) => obj(vec![("conformal", poly_value(p))]),
        ThetaSpec::Form(f) => obj(vec![("form", form_value(f))]),
    }
}

/// `{"mode": "box", "z_radius", "t_radius", "count", "seed", "tolerance"?, "kmax"?}`
/// or `{"mode": "explicit", "points": [...], "tolerance"?, "kmax"?}`.
pub fn parse_plan(text: &str, n: usize) -> SchemaResult<SamplePlan> {
    let v = parse_text(text)?;
    plan_from_value(&v, n)
}

pub fn plan_from_value(v: &Value, n: usize) -> SchemaResult<SamplePlan> {
    let mut ctx = Ctx::default();
    let out = (|| {
        let mode = v.get("mode").and_then(Value::as_str);
        let mode = match mode {
            Some("box") => SampleMode::Box { z_radius: 0.0, t_radius: 0.0, count: 0, seed: 0 },
            Some("explicit") => SampleMode::Explicit(Vec::new()),
            Some(_) => {
                ctx.err("$.mode", "expected \"box\" or \"explicit\"");
                return None;
            }
            None => {
                ctx.err("$.mode", "missing key");
                return None;
            }
        };
        let mode = match mode {
            SampleMode::Box { .. } => {
                let m = ctx.object(v, "$", &["mode", "z_radius", "t_radius", "count", "seed"], &["tolerance", "kmax"])?;
                let z_radius = ctx.float(&m["z_radius"], "$.z_radius");
                let t_radius = ctx.float(&m["t_radius"], "$.t_radius");
                let count = ctx.count(&m["count"], "$.count");
                let seed = ctx.count(&m["seed"], "$.seed").map(|s| s as u64);
                SampleMode::Box { z_radius: z_radius?, t_radius: t_radius?, count: count?, seed: seed? }
            }
            SampleMode::Explicit(_) => {
                let m = ctx.object(v, "$", &["mode", "points"], &["tolerance", "kmax"])?;
                let a = ctx.array(&m["points"], "$.points", None)?;
                let pts: Vec<Option<GroupPoint>> =
                    a.iter().enumerate().map(|(i, p)| ctx.point(p, &format!("$.points[{i}]"), n)).collect();
                SampleMode::Explicit(pts.into_iter().collect::<Option<Vec<_>>>()?)
            }
        };
        let m = v.as_object()?;
        let tolerance = match m.get("tolerance") {
            Some(x) => ctx.float(x, "$.tolerance")?,
            None => 1e-8,
        };
        let kmax = match m.get("kmax") {
            Some(x) => ctx.count(x, "$.kmax")?,
            None => 200,
        };
        let plan = SamplePlan { mode, tolerance, kmax };
        if let Err(e) = plan.validate() {
            ctx.err("$", e.to_string());
            return None;
        }
        Some(plan)
    })();
    ctx.finish(out)
}

/// Skew matrix with float or exact entries, for classification inputs:
/// either a model document or `{"P": [[[re, im], …], …]}`.
pub fn parse_matrix(text: &str) -> SchemaResult<QMatrix> {
    let v = parse_text(text)?;
    if v.get("n").is_some() {
        return model_from_value(&v).map(|m| m.p().clone());
    }
    let mut ctx = Ctx::default();
    let out = (|| {
        let m = ctx.object(&v, "$", &["P"], &[])?;
        let n = ctx.array(&m["P"], "$.P", None)?.len();
        ctx.gauss_matrix(&m["P"], "$.P", n)
    })();
    ctx.finish(out)
}

/// Ring of a list of fractions, for callers assembling structures.
pub fn ring_of(items: &[RatFunc], n: usize) -> Arc<Ring> {
    items.iter().fold(Ring::base(n), |r, c| Ring::join(&r, c.ring()).unwrap_or(r))
}
