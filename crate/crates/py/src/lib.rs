//! Python bindings for j2kit.
//!
//! Formulas and models are wrapped as classes; verdicts come back as plain
//! Python dicts mirroring the CLI's JSON output.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde_json::{json, Value};

use j2kit::bisim;
use j2kit::decide;
use j2kit::formula::{parse_auto, scan_variables};
use j2kit::model::{self as jm, PointedModel as RsPointed, StratifiedModel};
use j2kit::unify::{self, UnifyBounds};
use j2kit::{render, Formula as RsFormula, Substitution, VarContext};

create_exception!(j2kit, J2Error, PyException, "Invalid input to a j2kit operation.");
create_exception!(j2kit, BoundExhausted, J2Error, "A search bound was hit before a verdict was reached.");

fn err(e: j2kit::Error) -> PyErr {
    match e {
        j2kit::Error::BoundExhausted(m) => BoundExhausted::new_err(m),
        other => J2Error::new_err(other.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    PyModule::import(py, "json")?.call_method1("loads", (v.to_string(),))
}

fn context(names: Option<Vec<String>>, texts: &[&str]) -> PyResult<VarContext> {
    match names {
        Some(n) => VarContext::new(n).map_err(err),
        None => VarContext::canonical(texts.iter().flat_map(|t| scan_variables(t))).map_err(err),
    }
}

/// A bimodal formula together with its variable context.
#[pyclass(frozen, module = "j2kit")]
struct Formula {
    inner: RsFormula,
    ctx: VarContext,
}

#[pymethods]
impl Formula {
    /// Parses `text`; the context defaults to the variables occurring in it.
    #[new]
    #[pyo3(signature = (text, variables=None))]
    fn new(text: &str, variables: Option<Vec<String>>) -> PyResult<Self> {
        let (inner, ctx) = match variables {
            Some(v) => {
                let ctx = VarContext::new(v).map_err(err)?;
                (j2kit::parse(text, &ctx).map_err(err)?, ctx)
            }
            None => parse_auto(text).map_err(err)?,
        };
        Ok(Formula { inner, ctx })
    }

    #[getter]
    fn depth(&self) -> u32 {
        self.inner.depth()
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.ctx.names().to_vec()
    }

    fn __str__(&self) -> String {
        render(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Formula({:?})", render(&self.inner))
    }
}

/// A finite stratified model.
#[pyclass(frozen, module = "j2kit")]
struct Model {
    inner: StratifiedModel,
    ctx: VarContext,
}

#[pymethods]
impl Model {
    /// Loads a model from its JSON text.
    #[staticmethod]
    #[pyo3(signature = (text, variables=None))]
    fn from_json(text: &str, variables: Option<Vec<String>>) -> PyResult<Self> {
        let ctx = match variables {
            Some(v) => Some(VarContext::new(v).map_err(err)?),
            None => None,
        };
        let (raw, ctx) = jm::raw_from_json(text, ctx.as_ref()).map_err(err)?;
        let inner = jm::stratify(&raw).map_err(err)?;
        Ok(Model { inner, ctx })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&jm::model_to_json(&self.inner, &self.ctx)).map_err(|e| J2Error::new_err(e.to_string()))
    }

    #[getter]
    fn worlds(&self) -> Vec<i64> {
        self.inner.ids().to_vec()
    }

    #[getter]
    fn root(&self) -> i64 {
        self.inner.id(self.inner.root())
    }

    /// Truth of `formula` at world `world`, the root by default.
    #[pyo3(signature = (formula, world=None))]
    fn forces(&self, formula: &str, world: Option<i64>) -> PyResult<bool> {
        let f = j2kit::parse(formula, &self.ctx).map_err(err)?;
        let id = world.unwrap_or_else(|| self.root());
        jm::force(&self.inner, id, &f).map_err(err)
    }

    fn globally_true(&self, formula: &str) -> PyResult<bool> {
        let f = j2kit::parse(formula, &self.ctx).map_err(err)?;
        Ok(self.inner.globally_true(&f))
    }

    /// The model with each variable replaced by the truth set of its image.
    fn substitute(&self, images: Vec<String>) -> PyResult<Model> {
        let fs = images.iter().map(|t| j2kit::parse(t, &self.ctx)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        let s = Substitution::new(&self.ctx, fs).map_err(err)?;
        Ok(Model { inner: jm::apply_subst_model(&s, &self.inner), ctx: self.ctx.clone() })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

fn pointed(m: &Model, world: Option<i64>) -> PyResult<RsPointed> {
    match world {
        Some(id) => jm::generated_submodel(&m.inner, id).map_err(err),
        None => Ok(RsPointed::rooted(m.inner.clone())),
    }
}

fn model_value(m: &StratifiedModel, ctx: &VarContext) -> Value {
    serde_json::to_value(jm::model_to_json(m, ctx)).unwrap_or(Value::Null)
}

fn subst_value(s: &Substitution) -> Value {
    s.to_json()
}

/// Decides derivability; a refuted formula comes with a countermodel.
#[pyfunction]
#[pyo3(signature = (formula, variables=None))]
fn prove<'py>(py: Python<'py>, formula: &str, variables: Option<Vec<String>>) -> PyResult<Bound<'py, PyAny>> {
    let f = Formula::new(formula, variables)?;
    let v = decide::is_theorem(&f.inner, &UnifyBounds::default().saturation).map_err(err)?;
    let cm = v.countermodel.as_ref().map(|c| {
        json!({ "model": model_value(&c.model, &f.ctx), "point": c.model.id(c.point) })
    });
    to_py(py, &json!({ "theorem": v.theorem, "countermodel": cm }))
}

/// Global consequence: `conclusion` holds wherever `premise` holds throughout.
#[pyfunction]
fn consequence(premise: &str, conclusion: &str) -> PyResult<bool> {
    let ctx = context(None, &[premise, conclusion])?;
    let a = j2kit::parse(premise, &ctx).map_err(err)?;
    let b = j2kit::parse(conclusion, &ctx).map_err(err)?;
    Ok(decide::consequence(&a, &b, &UnifyBounds::default().saturation).map_err(err)?.theorem)
}

/// Whether the two pointed models agree up to depth `n` (unbounded when omitted).
#[pyfunction]
#[pyo3(signature = (a, b, n=None, world_a=None, world_b=None))]
fn bisimilar(a: &Model, b: &Model, n: Option<usize>, world_a: Option<i64>, world_b: Option<i64>) -> PyResult<bool> {
    let (pa, pb) = (pointed(a, world_a)?, pointed(b, world_b)?);
    Ok(match n {
        Some(n) => bisim::nbisimilar(&pa, &pb, n),
        None => bisim::bisimilar(&pa, &pb),
    })
}

/// Depth-`n` formula true exactly at points n-bisimilar to the given one.
#[pyfunction]
#[pyo3(signature = (model, n, world=None))]
fn char_formula(model: &Model, n: usize, world: Option<i64>) -> PyResult<String> {
    Ok(render(&bisim::char_formula(&pointed(model, world)?, n, &model.ctx)))
}

/// Projectivity verdict with a verified unifier or an extension-property witness.
#[pyfunction]
#[pyo3(signature = (formula, variables=None))]
fn projective<'py>(py: Python<'py>, formula: &str, variables: Option<Vec<String>>) -> PyResult<Bound<'py, PyAny>> {
    let f = Formula::new(formula, variables)?;
    let r = unify::projective_unifier(&f.inner, &f.ctx, &UnifyBounds::default()).map_err(err)?;
    let v = json!({
        "projective": r.projective,
        "unifier": r.unifier.as_ref().map(subst_value),
        "rounds_used": r.rounds_used,
        "method": r.method,
        "witness": r.witness.as_ref().map(|w| model_value(&w.model, &f.ctx)),
    });
    to_py(py, &v)
}

/// Maximal projective formulas entailing the input, with their unifiers.
#[pyfunction]
#[pyo3(signature = (formula, variables=None))]
fn unify_basis<'py>(py: Python<'py>, formula: &str, variables: Option<Vec<String>>) -> PyResult<Bound<'py, PyAny>> {
    let f = Formula::new(formula, variables)?;
    let (a, basis) = unify::basis_of_unifiers(&f.inner, &f.ctx, &UnifyBounds::default()).map_err(err)?;
    let v = json!({
        "approximation": a.pi.iter().map(render).collect::<Vec<_>>(),
        "unifiers": basis.iter().map(subst_value).collect::<Vec<_>>(),
        "exhaustive": a.exhaustive,
    });
    to_py(py, &v)
}

/// Admissibility and derivability of the rule `premise / conclusion`.
#[pyfunction]
fn admissible<'py>(py: Python<'py>, premise: &str, conclusion: &str) -> PyResult<Bound<'py, PyAny>> {
    let ctx = context(None, &[premise, conclusion])?;
    let a = j2kit::parse(premise, &ctx).map_err(err)?;
    let b = j2kit::parse(conclusion, &ctx).map_err(err)?;
    let r = unify::is_admissible(&a, &b, &ctx, &UnifyBounds::default()).map_err(err)?;
    let v = json!({
        "admissible": r.admissible,
        "derivable": r.derivable,
        "failing_psi": r.failing_psi.as_ref().map(render),
        "exhaustive": r.exhaustive,
    });
    to_py(py, &v)
}

/// Frame-condition report for a model given as JSON text.
#[pyfunction]
fn validate_frame<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    let (raw, _) = jm::raw_from_json(text, None).map_err(err)?;
    let report = jm::validate_frame(&raw).map_err(err)?;
    to_py(py, &serde_json::to_value(report).map_err(|e| J2Error::new_err(e.to_string()))?)
}

/// Runs the command-line interface in-process; returns the exit code and standard output.
#[pyfunction]
fn cli(args: Vec<String>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut errs = Vec::new();
    let code = j2kit::cli::run(std::iter::once("j2kit".to_string()).chain(args), &mut out, &mut errs);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&errs).into_owned())
}

#[pymodule]
fn j2kit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Formula>()?;
    m.add_class::<Model>()?;
    m.add("J2Error", m.py().get_type::<J2Error>())?;
    m.add("BoundExhausted", m.py().get_type::<BoundExhausted>())?;
    for f in [
        wrap_pyfunction!(prove, m)?,
        wrap_pyfunction!(consequence, m)?,
        wrap_pyfunction!(bisimilar, m)?,
        wrap_pyfunction!(char_formula, m)?,
        wrap_pyfunction!(projective, m)?,
        wrap_pyfunction!(unify_basis, m)?,
        wrap_pyfunction!(admissible, m)?,
        wrap_pyfunction!(validate_frame, m)?,
        wrap_pyfunction!(cli, m)?,
    ] {
        m.add_function(f)?;
    }
    Ok(())
}
