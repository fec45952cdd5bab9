use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use super::report::{Check, Input, Report, Status};
use super::{Cli, Command, InputError};
use crate::conformal::{cross_validate, transform_coframe, ConformalChange, Reading};
use crate::crmaps::{cr_map_check, map_structure_extract};
use crate::dynamics::{canonical_contact_form, theorem_main_pipeline, ContractionSpec, DecayStatus, IterationReport};
use crate::exterior::Form;
use crate::heisenberg::{classify_congruence, ModelSpec};
use crate::json::{self, complex_value, float_value, matrix_value, ThetaSpec};
use crate::point::GroupPoint;
use crate::pseudoherm::{flatness_of, solve_connection, sup_norms, PHStructure, TensorSet};
use crate::sample::SamplePlan;
use crate::scalar::RatFunc;

const FLAT_TOL: f64 = 1e-9;
const CROSS_TOL: f64 = 1e-9;
const CANONICAL_TOL: f64 = 1e-8;
const PULLBACK_TOL: f64 = 1e-10;
const NATURALITY_TOL: f64 = 1e-9;
const CR_TOL: f64 = 1e-10;

type Out = Result<Report, InputError>;

pub(super) fn dispatch(cli: &Cli) -> Out {
    match &cli.command {
        Command::Model { spec, verify, trials } => model(cli, spec, *verify, *trials),
        Command::Tensors { model, conformal, samples } => tensors(cli, model, conformal.as_deref(), samples.as_deref()),
        Command::Conformal { model, f, samples } => conformal(cli, model, f, samples.as_deref()),
        Command::Canonical { model, phi, theta, samples } => {
            dynamics(cli, "canonical", model, phi, theta, samples.as_deref(), false)
        }
        Command::Pipeline { model, phi, theta, samples } => {
            dynamics(cli, "pipeline", model, phi, theta, samples.as_deref(), true)
        }
        Command::Classify { p, pprime } => classify(p, pprime),
        Command::Crcheck { src, dst, map, samples } => crcheck(cli, src, dst, map, samples.as_deref()),
        Command::Flatness { model, conformal, samples } => flatness(cli, model, conformal.as_deref(), samples.as_deref()),
    }
}

fn read(report: &mut Report, role: &str, path: &Path) -> Result<String, InputError> {
    let shown = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|source| InputError::Io { path: shown.clone(), source })?;
    report.inputs.push(Input::new(role, &shown, &bytes));
    report.arg(role, shown.clone());
    String::from_utf8(bytes).map_err(|_| InputError::Invalid(format!("{shown}: not UTF-8")))
}

fn schema<T>(path: &Path, r: json::SchemaResult<T>) -> Result<T, InputError> {
    r.map_err(|source| InputError::Schema { path: path.display().to_string(), source })
}

fn load_model(report: &mut Report, role: &str, path: &Path) -> Result<ModelSpec, InputError> {
    let text = read(report, role, path)?;
    schema(path, json::parse_model(&text))
}

fn load_plan(cli: &Cli, report: &mut Report, path: Option<&Path>, n: usize) -> Result<(SamplePlan, Vec<GroupPoint>), InputError> {
    let plan = match path {
        Some(p) => {
            let text = read(report, "samples", p)?;
            schema(p, json::parse_plan(&text, n))?
        }
        None => {
            report.arg("seed", cli.seed);
            SamplePlan::quasirandom(64, cli.seed)
        }
    };
    let points = plan.points(n)?;
    Ok((plan, points))
}

fn model_structure(m: &ModelSpec) -> Result<PHStructure, InputError> {
    Ok(PHStructure::new(m.contact_form(), m.coframe())?)
}

fn cmatrix(m: &DMatrix<Complex64>) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| complex_value(m[(i, j)])).collect())).collect())
}

fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| float_value(*x)).collect())
}

fn model(cli: &Cli, spec: &Path, verify: bool, trials: usize) -> Out {
    let mut r = Report::new("model");
    let m = load_model(&mut r, "spec", spec)?;
    r.arg("verify", verify);
    r.data.insert("model".into(), json::model_value(&m));
    r.data.insert("integrable".into(), m.is_integrable().into());
    let names = ["group_axioms", "brackets", "contact_form"];
    if verify {
        r.arg("trials", trials);
        r.arg("seed", cli.seed);
        let c = m.verify(trials, cli.seed);
        for (name, ok) in names.iter().zip([c.group_axioms, c.brackets, c.contact_form]) {
            r.push(Check::new(*name, ok).witness(json!({ "trials": c.trials, "exact": true })));
        }
    } else {
        for name in names {
            r.push(Check::skipped(name, "run with --verify"));
        }
    }
    Ok(r)
}

/// The model structure, or its conformal change by the polynomial in `conformal`.
fn structure(report: &mut Report, m: &ModelSpec, conformal: Option<&Path>) -> Result<PHStructure, InputError> {
    let s0 = model_structure(m)?;
    let Some(path) = conformal else { return Ok(s0) };
    let text = read(report, "conformal", path)?;
    let f = schema(path, json::parse_poly(&text, m.dim()))?;
    let change = ConformalChange::new(f, &s0)?;
    Ok(transform_coframe(&change, &s0)?)
}

fn certificate_checks(report: &mut Report, ts: &TensorSet) {
    let c = &ts.certificate;
    for (name, ok) in [
        ("structure_equation_1", c.str1),
        ("structure_equation_2", c.str2),
        ("compatibility_1", c.comp1),
        ("compatibility_2", c.comp2),
        ("conjugate_consistency", c.conjugate_consistent),
    ] {
        report.push(Check::new(name, ok).witness(json!({ "exact": true })).residual(if ok { 0.0 } else { f64::NAN }));
    }
}

fn tensors(cli: &Cli, model_path: &Path, conformal: Option<&Path>, samples: Option<&Path>) -> Out {
    let mut r = Report::new("tensors");
    let m = load_model(&mut r, "model", model_path)?;
    let s = structure(&mut r, &m, conformal)?;
    let (_, points) = load_plan(cli, &mut r, samples, m.dim())?;
    let ts = match solve_connection(&s) {
        Ok(ts) => ts,
        Err(e) => {
            r.push(Check::failed("connection", e));
            return Ok(r);
        }
    };
    r.push(Check::new("connection", true));
    certificate_checks(&mut r, &ts);
    let sups = sup_norms(&s, &ts, &points).map_err(InputError::from)?;
    let mut listing = serde_json::Map::new();
    for (name, t) in ts.named() {
        let entries: Vec<Value> = t.nonzero_entries().into_iter().map(|(idx, v)| json!({ "index": idx, "value": v })).collect();
        let sup = sups.iter().find(|(n, _)| n == name).map(|(_, v)| float_value(*v));
        listing.insert(name.into(), json!({ "nonzero": entries, "sup_norm": sup }));
    }
    let omega: Vec<Value> = (0..s.n)
        .flat_map(|b| (0..s.n).map(move |a| (b, a)))
        .filter_map(|(b, a)| {
            let w = ts.connection.form(&s, b, a);
            (!w.is_zero()).then(|| json!({ "index": [b, a], "form": json::form_value(&w) }))
        })
        .collect();
    r.data.insert("tensors".into(), listing.into());
    r.data.insert("connection".into(), omega.into());
    r.data.insert("samples".into(), points.len().into());
    Ok(r)
}

fn conformal(cli: &Cli, model_path: &Path, f_path: &Path, samples: Option<&Path>) -> Out {
    let mut r = Report::new("conformal");
    let m = load_model(&mut r, "model", model_path)?;
    let text = read(&mut r, "f", f_path)?;
    let f = schema(f_path, json::parse_poly(&text, m.dim()))?;
    let (_, points) = load_plan(cli, &mut r, samples, m.dim())?;
    let s0 = model_structure(&m)?;
    let change = ConformalChange::new(f.clone(), &s0)?;
    let v_ok = change.v_residual(&s0).iter().all(RatFunc::is_zero);
    let v: Vec<Value> = change.v.iter().map(|x| x.to_string().into()).collect();
    r.push(Check::new("v_equation", v_ok).witness(json!({ "v": v, "exact": true })));
    let changed = match transform_coframe(&change, &s0) {
        Ok(c) => c,
        Err(e) => {
            r.push(Check::failed("admissible_coframe", e));
            return Ok(r);
        }
    };
    r.push(Check::new("admissible_coframe", changed.admissibility_defects() == 0));
    r.push(Check::new("levi_form_invariant", changed.g == s0.g));
    r.push(Check::new("p_invariant", changed.p == s0.p));
    let reading = Reading::default();
    match cross_validate(f, &s0, reading, &points, CROSS_TOL) {
        Ok(cv) => {
            for t in &cv.tensors {
                let ok = t.exact_match || t.max_deviation <= CROSS_TOL;
                r.push(
                    Check::new(format!("change_formula.{}", t.name), ok)
                        .witness(json!({ "exact": t.exact_match }))
                        .residual(t.max_deviation),
                );
            }
            r.data.insert("reading".into(), cv.reading.describe().into());
        }
        Err(e) => r.push(Check::failed("change_formula", e)),
    }
    r.data.insert("samples".into(), points.len().into());
    Ok(r)
}

fn theta_form(m: &ModelSpec, t: ThetaSpec) -> Result<Form, InputError> {
    Ok(match t {
        ThetaSpec::Density(h) => m.contact_form().scale(&RatFunc::from_poly(h)),
        ThetaSpec::Conformal(f) => {
            let s0 = model_structure(m)?;
            transform_coframe(&ConformalChange::new(f, &s0)?, &s0)?.theta
        }
        ThetaSpec::Form(f) => f,
    })
}

fn canonical_checks(r: &mut Report, it: &IterationReport, tol: f64) {
    r.push(
        Check::new("pullback_multiple", it.pullback_exact || it.pullback_residual <= PULLBACK_TOL)
            .witness(json!({ "exact": it.pullback_exact }))
            .residual(it.pullback_residual),
    );
    let inc = it.max_increment();
    r.push(Check::new("canonical_convergence", inc < tol).witness(json!({ "iterations": it.iterations })).residual(inc));
    match it.rate {
        Some(rate) => r.push(Check::new("geometric_rate", rate > 0.0 && rate < 1.0).witness(json!({ "rate": rate }))),
        None => r.push(Check::skipped("geometric_rate", "sequence constant after the first step")),
    }
    r.push(Check::new("canonical_equation", it.canonical_residual <= CANONICAL_TOL).residual(it.canonical_residual));
}

fn dynamics(cli: &Cli, name: &str, model_path: &Path, phi: &Path, theta: &Path, samples: Option<&Path>, full: bool) -> Out {
    let mut r = Report::new(name);
    let m = load_model(&mut r, "model", model_path)?;
    let text = read(&mut r, "phi", phi)?;
    let spec: ContractionSpec = schema(phi, json::parse_phi(&text, &m))?;
    let text = read(&mut r, "theta", theta)?;
    let t = schema(theta, json::parse_theta(&text, m.dim()))?;
    let form = theta_form(&m, t)?;
    let (plan, points) = load_plan(cli, &mut r, samples, m.dim())?;
    let check = spec.validate().map_err(InputError::from)?;
    r.push(
        Check::new("contraction", true)
            .witness(json!({ "mu": spec.mu, "eigen_moduli": floats(&check.eigen_moduli) }))
            .residual(check.fixed_residual.max(check.eigen_residual)),
    );
    r.data.insert("fixed_point".into(), json::point_value(&spec.fixed));
    if !full {
        match canonical_contact_form(&spec, &form, &points, plan.tolerance, plan.kmax) {
            Ok(it) => {
                canonical_checks(&mut r, &it, plan.tolerance);
                r.data.insert("limit".into(), floats(&it.limit));
                r.data.insert("eta".into(), it.eta.map(float_value).into());
            }
            Err(e) => r.push(Check::failed("canonical_convergence", e)),
        }
        return Ok(r);
    }
    let rep = match theorem_main_pipeline(&spec, &form, &points, plan.tolerance, plan.kmax) {
        Ok(rep) => rep,
        Err(e) => {
            r.push(Check::failed("pipeline", e));
            return Ok(r);
        }
    };
    canonical_checks(&mut r, &rep.canonical, plan.tolerance);
    for d in &rep.decay {
        let w = json!({
            "expected": d.expected,
            "fitted": d.fitted.map(float_value),
            "vanishes_at_o": d.vanishes_at_o,
        });
        let name = format!("decay.{}", d.name);
        let c = match d.status {
            DecayStatus::Vanishes => Check::skipped(name, "vanishes identically"),
            s => Check::new(name, s == DecayStatus::Pass).witness(w).residual(d.relative_error),
        };
        r.push(c);
    }
    r.push(Check::new("naturality", rep.naturality_residual <= NATURALITY_TOL).residual(rep.naturality_residual));
    r.push(Check::new("flatness", rep.flat).witness(json!({ "flat_at": rep.flat_at })));
    let cg = &rep.congruence;
    r.push(
        Check::new("model_recovered", cg.equivalent)
            .witness(json!({ "recovered_p": cmatrix(&rep.recovered_p), "max_gap": cg.max_gap }))
            .residual(cg.residual),
    );
    Ok(r)
}

fn classify(p: &Path, pprime: &Path) -> Out {
    let mut r = Report::new("classify");
    let a = load_model(&mut r, "p", p)?;
    let b = load_model(&mut r, "pprime", pprime)?;
    if a.dim() != b.dim() {
        r.push(Check::new("congruent", false).witness(json!({ "n": [a.dim(), b.dim()] })));
        return Ok(r);
    }
    match classify_congruence(&a.p_numeric(), &b.p_numeric()) {
        Ok(c) => {
            let w = json!({
                "witness_u": c.witness.as_ref().map(cmatrix),
                "singular_values_p": floats(&c.sv_p),
                "singular_values_pprime": floats(&c.sv_pprime),
                "max_gap": c.max_gap,
            });
            r.push(Check::new("congruent", c.equivalent).witness(w).residual(c.residual));
        }
        Err(e) => r.push(Check::failed("congruent", e)),
    }
    Ok(r)
}

fn crcheck(cli: &Cli, src: &Path, dst: &Path, map: &Path, samples: Option<&Path>) -> Out {
    let mut r = Report::new("crcheck");
    let a = load_model(&mut r, "src", src)?;
    let b = load_model(&mut r, "dst", dst)?;
    let text = read(&mut r, "map", map)?;
    let f = schema(map, json::parse_map(&text, a.dim()))?;
    if f.n_dst() != b.dim() {
        return Err(InputError::Invalid(format!("map has {} components, target model has n = {}", f.n_dst(), b.dim())));
    }
    let (_, points) = load_plan(cli, &mut r, samples, a.dim())?;
    let cr = match cr_map_check(&f, &a, &b, &points) {
        Ok(c) => c,
        Err(e) => {
            r.push(Check::failed("cr_map", e));
            return Ok(r);
        }
    };
    r.push(
        Check::new("cr_map", cr.is_cr)
            .witness(json!({ "exact": cr.exact, "samples_used": cr.samples_used }))
            .residual(cr.max_residual()),
    );
    let names = ["holomorphic_t_independent", "r_identity", "p_compatibility"];
    if !cr.is_cr || a.dim() != b.dim() {
        for n in names {
            r.push(Check::skipped(n, "needs a CR map between models of equal dimension"));
        }
        return Ok(r);
    }
    match map_structure_extract(&f, &a, &b) {
        Ok(st) => {
            r.push(Check::new(names[0], true));
            r.push(
                Check::new(names[1], st.r_identity_holds(CR_TOL))
                    .witness(json!({ "exact": st.r_identity_exact, "r": st.r.to_string(), "c": st.c.to_string() }))
                    .residual(st.r_identity_residual),
            );
            let mut c = Check::new(names[2], st.p_compatible(CR_TOL))
                .witness(json!({ "exact": st.p_compatible_exact, "hypothesis_holds": st.hypothesis_holds }))
                .residual(st.p_compatible_residual);
            if !st.hypothesis_holds {
                c.status = Status::Skipped;
                c.witness = json!({ "reason": "source model is integrable; rigidity not guaranteed" });
            }
            r.push(c);
        }
        Err(crate::Error::StructureViolation(e)) if a.is_integrable() => {
            r.push(
                Check::skipped(names[0], "source model is integrable; rigidity not guaranteed")
                    .witness(json!({ "reason": "source model is integrable; rigidity not guaranteed", "violation": e })),
            );
            r.push(Check::skipped(names[1], "not a model CR map"));
            r.push(Check::skipped(names[2], "not a model CR map"));
        }
        Err(crate::Error::StructureViolation(e)) => {
            r.push(Check::failed(names[0], e));
            r.push(Check::skipped(names[1], "not a model CR map"));
            r.push(Check::skipped(names[2], "not a model CR map"));
        }
        Err(e) => r.push(Check::failed(names[0], e)),
    }
    Ok(r)
}

fn flatness(cli: &Cli, model_path: &Path, conformal: Option<&Path>, samples: Option<&Path>) -> Out {
    let mut r = Report::new("flatness");
    let m = load_model(&mut r, "model", model_path)?;
    let s = structure(&mut r, &m, conformal)?;
    let (_, points) = load_plan(cli, &mut r, samples, m.dim())?;
    let ts = match solve_connection(&s) {
        Ok(ts) => ts,
        Err(e) => {
            r.push(Check::failed("connection", e));
            return Ok(r);
        }
    };
    let fr = flatness_of(&s, &ts);
    let sups = sup_norms(&s, &ts, &points).map_err(InputError::from)?;
    let sup = sups.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    r.push(Check::new("flat_exact", fr.flat).witness(json!({ "nonvanishing": fr.nonvanishing })));
    r.push(
        Check::new("flat_numeric", sup <= FLAT_TOL)
            .witness(Value::Object(sups.iter().map(|(k, v)| (k.clone(), float_value(*v))).collect()))
            .residual(sup),
    );
    match &fr.p {
        Some(p) => {
            r.push(Check::new("recovered_p", p == m.p()).witness(json!({ "p": matrix_value(p) })));
        }
        None => r.push(Check::new("recovered_p", false).witness(json!({ "reason": "p is not constant" }))),
    }
    Ok(r)
}
