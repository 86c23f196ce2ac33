//! Python bindings: `rudiset.Theory` and `rudiset.Hf`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use pyo3::basic::CompareOp;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rudiset::eval::{render, NatCodec, PairCodec, Style, DEFAULT_BUDGET};
use rudiset::parser::{print_formula, readable_formula};
use rudiset::safety::{explain_failure, safe_sets, Pack};
use rudiset::theory::Value;
use rudiset::{Env, EvalError, Expr, ParseError, SafetyError, TheoryConfig, Var, VarSet};

create_exception!(rudiset, RudisetError, PyException, "Base class of rudiset errors.");
create_exception!(rudiset, SyntaxError, RudisetError, "The input does not parse.");
create_exception!(rudiset, UnsupportedConstruct, RudisetError, "A construct needs a theory or rule pack that is not enabled.");
create_exception!(rudiset, InvalidExpression, RudisetError, "A comprehension is not safe for its binder.");
create_exception!(rudiset, NotEvaluable, RudisetError, "The expression is valid but has no terminating evaluation.");
create_exception!(rudiset, BudgetExceeded, RudisetError, "Evaluation ran out of steps.");
create_exception!(rudiset, UnboundVariable, RudisetError, "A free variable has no value.");

fn parse_err(e: ParseError) -> PyErr {
    SyntaxError::new_err(e.to_string())
}

fn safety_err(e: SafetyError) -> PyErr {
    UnsupportedConstruct::new_err(e.to_string())
}

fn eval_err(e: EvalError) -> PyErr {
    let m = e.to_string();
    match e {
        EvalError::NotEvaluable { .. } => NotEvaluable::new_err(m),
        EvalError::BudgetExceeded { .. } => BudgetExceeded::new_err(m),
        EvalError::UnboundVariable(_) => UnboundVariable::new_err(m),
        EvalError::Unsupported(_) => UnsupportedConstruct::new_err(m),
    }
}

/// A hereditarily finite set.
#[pyclass(name = "Hf", module = "rudiset", frozen, from_py_object)]
#[derive(Clone)]
struct PyHf(rudiset::Hf);

#[pymethods]
impl PyHf {
    /// Parses `{}` / `{a, b}` notation; no argument gives the empty set.
    #[new]
    #[pyo3(signature = (text = None))]
    fn new(text: Option<&str>) -> PyResult<Self> {
        match text {
            None => Ok(PyHf(rudiset::Hf::empty())),
            Some(t) => t.parse().map(PyHf).map_err(|e| PyValueError::new_err(format!("{e}"))),
        }
    }

    #[staticmethod]
    fn set(elems: Vec<PyHf>) -> Self {
        PyHf(rudiset::Hf::set(elems.into_iter().map(|h| h.0)))
    }

    #[staticmethod]
    fn nat(n: u64) -> Self {
        PyHf(NatCodec::encode(n))
    }

    #[staticmethod]
    fn pair(a: &PyHf, b: &PyHf) -> Self {
        PyHf(PairCodec::encode(&a.0, &b.0))
    }

    fn elements(&self) -> Vec<PyHf> {
        self.0.elems().iter().cloned().map(PyHf).collect()
    }

    /// The number it encodes as a von Neumann numeral, if any.
    fn as_nat(&self) -> Option<u64> {
        NatCodec::decode(&self.0)
    }

    /// The components of a Kuratowski pair, if it is one.
    fn as_pair(&self) -> Option<(PyHf, PyHf)> {
        PairCodec::decode(&self.0).map(|(a, b)| (PyHf(a), PyHf(b)))
    }

    fn rank(&self) -> u32 {
        self.0.rank()
    }

    fn issubset(&self, other: &PyHf) -> bool {
        self.0.is_subset(&other.0)
    }

    fn union(&self, other: &PyHf) -> PyHf {
        PyHf(self.0.union(&other.0))
    }

    fn intersection(&self, other: &PyHf) -> PyHf {
        PyHf(self.0.intersection(&other.0))
    }

    fn difference(&self, other: &PyHf) -> PyHf {
        PyHf(self.0.difference(&other.0))
    }

    #[pyo3(signature = (nat = false, pairs = false))]
    fn render(&self, nat: bool, pairs: bool) -> String {
        render(&self.0, Style { nat, pairs })
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __contains__(&self, x: &PyHf) -> bool {
        self.0.contains(&x.0)
    }

    fn __iter__(slf: PyRef<'_, Self>) -> PyResult<Py<PyAny>> {
        let py = slf.py();
        let items = pyo3::types::PyList::new(py, slf.elements())?;
        Ok(items.call_method0("__iter__")?.unbind())
    }

    fn __richcmp__(&self, other: &PyHf, op: CompareOp) -> bool {
        op.matches(self.0.cmp(&other.0))
    }

    fn __hash__(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.0.hash(&mut h);
        h.finish()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Hf('{}')", self.0)
    }
}

fn env_from(env: Option<&Bound<'_, PyDict>>) -> PyResult<Env> {
    let mut out = Env::new();
    if let Some(d) = env {
        for (k, v) in d.iter() {
            let name: String = k.extract()?;
            let val: PyHf = v.extract()?;
            out.push(Var::new(name), val.0);
        }
    }
    Ok(out)
}

fn varset(vars: &[String]) -> VarSet {
    vars.iter().map(Var::new).collect()
}

fn names(x: &VarSet) -> Vec<String> {
    x.iter().map(|v| v.as_str().to_string()).collect()
}

/// A theory: base system, rule packs, definitions and an evaluation budget.
#[pyclass(name = "Theory", module = "rudiset")]
struct PyTheory(rudiset::Theory);

#[pymethods]
impl PyTheory {
    #[new]
    #[pyo3(signature = (theory = "rst", enable = Vec::new(), symmetric_and = None, budget = DEFAULT_BUDGET))]
    fn new(theory: &str, enable: Vec<String>, symmetric_and: Option<bool>, budget: u64) -> PyResult<Self> {
        let mut cfg = TheoryConfig::preset(theory).ok_or_else(|| PyValueError::new_err(format!("unknown theory `{theory}`")))?;
        for p in enable {
            cfg.enable(p.parse::<Pack>().map_err(PyValueError::new_err)?);
        }
        if let Some(s) = symmetric_and {
            cfg.conjunction_symmetric = s;
        }
        let mut th = rudiset::Theory::new(cfg);
        th.budget = budget;
        Ok(PyTheory(th))
    }

    #[getter]
    fn config(&self) -> String {
        self.0.config.to_string()
    }

    #[getter]
    fn budget(&self) -> u64 {
        self.0.budget
    }

    #[setter]
    fn set_budget(&mut self, b: u64) {
        self.0.budget = b;
    }

    /// Adds `def NAME(ARGS) := BODY` (the `def` is optional); returns the name.
    fn define(&mut self, src: &str) -> PyResult<String> {
        self.0.define(src).map_err(parse_err)
    }

    /// Core-syntax expansion of a term or formula.
    #[pyo3(signature = (src, sugar = false))]
    fn expand(&self, src: &str, sugar: bool) -> PyResult<String> {
        self.0.expand(src, sugar).map_err(parse_err)
    }

    /// Validity report: `valid`, `evaluable`, `violations` and failing `obligations`.
    fn check<'py>(&self, py: Python<'py>, src: &str) -> PyResult<Bound<'py, PyDict>> {
        let parsed = self.0.parse(src).map_err(parse_err)?;
        let report = self.0.check(&parsed).map_err(safety_err)?;
        let d = PyDict::new(py);
        d.set_item("valid", report.is_ok())?;
        d.set_item("evaluable", report.is_ok() && report.validation.is_evaluable())?;
        d.set_item("violations", report.validation.violations.iter().map(|v| v.describe()).collect::<Vec<_>>())?;
        let failing: Vec<String> = report
            .obligations
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(o, _)| format!("{}: {} > {}", o.origin, print_formula(&o.formula, false), o.safe))
            .collect();
        d.set_item("obligations", failing)?;
        Ok(d)
    }

    fn is_valid(&self, src: &str) -> PyResult<bool> {
        let parsed = self.0.parse(src).map_err(parse_err)?;
        Ok(self.0.check(&parsed).map_err(safety_err)?.is_ok())
    }

    /// Maximal variable sets the formula is safe for.
    fn safe_sets(&self, formula: &str) -> PyResult<Vec<Vec<String>>> {
        let f = self.0.parse_formula(formula).map_err(parse_err)?;
        let fam = safe_sets(&f, &self.0.config).map_err(safety_err)?;
        Ok(fam.maximal().iter().map(names).collect())
    }

    /// Whether `formula ≻ vars`.
    fn is_safe(&self, formula: &str, vars: Vec<String>) -> PyResult<bool> {
        let f = self.0.parse_formula(formula).map_err(parse_err)?;
        Ok(self.0.derive(&f, &varset(&vars)).map_err(safety_err)?.is_some())
    }

    /// The derivation of `formula ≻ vars` as text, or `None`.
    fn derive(&self, formula: &str, vars: Vec<String>) -> PyResult<Option<String>> {
        let f = readable_formula(&self.0.parse_formula(formula).map_err(parse_err)?);
        Ok(self.0.derive(&f, &varset(&vars)).map_err(safety_err)?.map(|d| d.explain()))
    }

    /// Why `formula ≻ vars` fails, or `None` if it holds.
    fn explain_failure(&self, formula: &str, vars: Vec<String>) -> PyResult<Option<String>> {
        let f = readable_formula(&self.0.parse_formula(formula).map_err(parse_err)?);
        let b = explain_failure(&f, &varset(&vars), &self.0.config).map_err(safety_err)?;
        Ok(b.map(|b| format!("`{}` > {}: {}", print_formula(&b.formula, false), b.safe, b.reason)))
    }

    /// Evaluates a valid term (to `Hf`) or formula (to `bool`).
    #[pyo3(signature = (src, env = None))]
    fn eval(&self, py: Python<'_>, src: &str, env: Option<&Bound<'_, PyDict>>) -> PyResult<Py<PyAny>> {
        let parsed = self.0.parse(src).map_err(parse_err)?;
        let report = self.0.check(&parsed).map_err(safety_err)?;
        if !report.is_ok() {
            let why = report
                .validation
                .violations
                .first()
                .map(|v| v.describe())
                .or_else(|| report.obligations.iter().find(|(_, ok)| !ok).map(|(o, _)| format!("side condition of {} fails", o.origin)))
                .unwrap_or_default();
            return Err(InvalidExpression::new_err(why));
        }
        let env = env_from(env)?;
        let (r, _) = py.detach(|| self.0.eval(&parsed.value, &env));
        match r.map_err(eval_err)? {
            Value::Set(h) => Ok(Py::new(py, PyHf(h))?.into_any()),
            Value::Bool(b) => Ok(pyo3::types::PyBool::new(py, b).to_owned().into_any().unbind()),
        }
    }

    /// `"term"` or `"formula"`.
    fn kind(&self, src: &str) -> PyResult<&'static str> {
        Ok(match self.0.parse(src).map_err(parse_err)?.value {
            Expr::Term(_) => "term",
            Expr::Formula(_) => "formula",
        })
    }

    fn __repr__(&self) -> String {
        format!("Theory('{}')", self.0.config)
    }
}

#[pymodule]
#[pyo3(name = "rudiset")]
fn rudiset_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyHf>()?;
    m.add_class::<PyTheory>()?;
    m.add("RudisetError", py.get_type::<RudisetError>())?;
    m.add("SyntaxError", py.get_type::<SyntaxError>())?;
    m.add("UnsupportedConstruct", py.get_type::<UnsupportedConstruct>())?;
    m.add("InvalidExpression", py.get_type::<InvalidExpression>())?;
    m.add("NotEvaluable", py.get_type::<NotEvaluable>())?;
    m.add("BudgetExceeded", py.get_type::<BudgetExceeded>())?;
    m.add("UnboundVariable", py.get_type::<UnboundVariable>())?;
    m.add("DEFAULT_BUDGET", DEFAULT_BUDGET)?;
    Ok(())
}
