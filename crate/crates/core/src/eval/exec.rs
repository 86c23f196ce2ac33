use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use crate::parser::{print_formula, print_term};
use crate::safety::{check_supported_formula, check_supported_term, validate_formula, validate_term, TheoryConfig};
use crate::safety::check::Checker;
use crate::syntax::{Comprehension, Formula, Term, Var, VarSet};

use super::plan::{compile, Node, Plan, TcMode};
use super::{Budget, Env, EvalError, Hf};

pub type Row = Vec<Hf>;

/// A set of rows over named columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub cols: Vec<Var>,
    pub rows: BTreeSet<Row>,
}

impl Relation {
    /// For a relation without columns: whether it holds.
    pub fn holds(&self) -> bool {
        !self.rows.is_empty()
    }
}

/// The value of a term: a hereditarily finite set, or the class `HF` itself.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Val {
    Fin(Hf),
    Class,
}

fn truth(b: bool) -> BTreeSet<Row> {
    let mut s = BTreeSet::new();
    if b {
        s.insert(Vec::new());
    }
    s
}

fn addr<T>(x: &T) -> usize {
    x as *const T as usize
}

/// Runs plans, caching compiled plans and comprehension values.
///
/// Caches are keyed by node address, so every expression handed to an
/// evaluator must outlive it; the `'a` bound on the entry points enforces this.
pub struct Evaluator<'a> {
    cfg: &'a TheoryConfig,
    checker: Checker<'a>,
    plans: HashMap<(usize, VarSet), Arc<Plan>>,
    values: HashMap<(usize, Vec<Hf>), Hf>,
    budget: &'a mut Budget,
}

impl<'a> Evaluator<'a> {
    pub fn new(cfg: &'a TheoryConfig, budget: &'a mut Budget) -> Self {
        Evaluator { cfg, checker: Checker::new(cfg), plans: HashMap::new(), values: HashMap::new(), budget }
    }

    pub fn config(&self) -> &TheoryConfig {
        self.cfg
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        self.budget.tick(1)
    }

    /// The compiled plan for `f ≻ x`.
    pub fn plan_for(&mut self, f: &'a Formula, x: &VarSet) -> Result<Arc<Plan>, EvalError> {
        self.plan_at(f, x)
    }

    fn plan_at(&mut self, f: &Formula, x: &VarSet) -> Result<Arc<Plan>, EvalError> {
        let key = (addr(f), x.clone());
        if let Some(p) = self.plans.get(&key) {
            return Ok(p.clone());
        }
        let d = self.checker.derive(f, x).ok_or_else(|| {
            EvalError::not_evaluable(format!("`{}` is not safe for {x}", print_formula(f, false)))
        })?;
        let p = Arc::new(compile(&d)?);
        self.plans.insert(key, p.clone());
        Ok(p)
    }

    /// Evaluates a term under `env`.
    pub fn term(&mut self, t: &'a Term, env: &mut Env) -> Result<Hf, EvalError> {
        match self.value(t, env)? {
            Val::Fin(h) => Ok(h),
            Val::Class => Err(EvalError::not_evaluable("the constant HF denotes an infinite set")),
        }
    }

    /// Decides a formula under `env`; it must be safe for `∅`.
    pub fn formula(&mut self, f: &'a Formula, env: &mut Env) -> Result<bool, EvalError> {
        let p = self.plan_at(f, &VarSet::new())?;
        Ok(!self.run(&p, env)?.is_empty())
    }

    /// All `x`-tuples satisfying `f` under `env`; requires `f ≻ x`.
    pub fn relation(&mut self, f: &'a Formula, x: &VarSet, env: &mut Env) -> Result<Relation, EvalError> {
        let p = self.plan_at(f, x)?;
        let rows = self.run(&p, env)?;
        Ok(Relation { cols: p.cols.clone(), rows })
    }

    fn value(&mut self, t: &Term, env: &mut Env) -> Result<Val, EvalError> {
        match t {
            Term::Var(v) => env.get(v).cloned().map(Val::Fin).ok_or_else(|| EvalError::UnboundVariable(v.clone())),
            Term::Const(_) => Ok(Val::Class),
            Term::Compr(c) => self.comprehension(c, env).map(Val::Fin),
        }
    }

    fn comprehension(&mut self, c: &Comprehension, env: &mut Env) -> Result<Hf, EvalError> {
        let fv = self.checker.fv(&c.body).without(&c.binder);
        let mut key_vals = Vec::with_capacity(fv.len());
        for v in fv.iter() {
            key_vals.push(env.get(v).cloned().ok_or_else(|| EvalError::UnboundVariable(v.clone()))?);
        }
        let key = (addr(&*c.body), key_vals);
        if let Some(h) = self.values.get(&key) {
            return Ok(h.clone());
        }
        self.tick()?;
        let x = VarSet::singleton(c.binder.clone());
        if self.checker.derive(&c.body, &x).is_none() {
            return Err(EvalError::not_evaluable(format!(
                "{} is valid only by the static-only clause `{}`",
                print_term(&Term::Compr(c.clone()), true),
                crate::safety::Rule::SeparationTerm.id()
            )));
        }
        let p = self.plan_at(&c.body, &x)?;
        let rows = self.run(&p, env)?;
        let h = Hf::set(rows.into_iter().map(|mut r| r.pop().expect("one column")));
        self.values.insert(key, h.clone());
        Ok(h)
    }

    fn test(&mut self, f: &Formula, env: &mut Env) -> Result<bool, EvalError> {
        if let Formula::Mem(a, Term::Compr(c)) = f {
            if let Val::Fin(h) = self.value(a, env)? {
                return self.member(&h, c, env);
            }
            return Ok(false);
        }
        let (a, b) = match f {
            Formula::Mem(a, b) | Formula::Eq(a, b) | Formula::Sub(a, b) => (a, b),
            _ => unreachable!("test on a non-atomic formula"),
        };
        let va = self.value(a, env)?;
        let vb = self.value(b, env)?;
        use Val::*;
        Ok(match (f, &va, &vb) {
            (Formula::Mem(..), Fin(x), Fin(s)) => s.contains(x),
            (Formula::Mem(..), Fin(_), Class) => true,
            (Formula::Mem(..), Class, _) => false,
            (Formula::Eq(..), Fin(x), Fin(y)) => x == y,
            (Formula::Eq(..), Class, Class) => true,
            (Formula::Eq(..), _, _) => false,
            (Formula::Sub(..), Fin(x), Fin(y)) => x.is_subset(y),
            (Formula::Sub(..), _, Class) => true,
            (Formula::Sub(..), Class, Fin(_)) => false,
            _ => unreachable!(),
        })
    }

    /// `h ∈ {x | φ}` decided by running `φ` with `x := h`.
    fn member(&mut self, h: &Hf, c: &Comprehension, env: &mut Env) -> Result<bool, EvalError> {
        let direct = self.plan_at(&c.body, &VarSet::new());
        match direct {
            Ok(p) => {
                env.push(c.binder.clone(), h.clone());
                let r = self.run(&p, env);
                env.pop(1);
                Ok(!r?.is_empty())
            }
            Err(EvalError::NotEvaluable { .. }) => Ok(self.comprehension(c, env)?.contains(h)),
            Err(e) => Err(e),
        }
    }

    /// Every element of a value; enumerating the class `HF` exhausts the budget.
    fn elements(&mut self, v: Val) -> Result<Vec<Hf>, EvalError> {
        match v {
            Val::Fin(h) => {
                for _ in h.elems() {
                    self.tick()?;
                }
                Ok(h.elems().to_vec())
            }
            Val::Class => {
                let rest = self.budget.remaining();
                self.budget.tick(rest)?;
                unreachable!("ticking the whole budget fails")
            }
        }
    }

    pub(crate) fn run(&mut self, p: &Plan, env: &mut Env) -> Result<BTreeSet<Row>, EvalError> {
        self.tick()?;
        match &p.node {
            Node::Test(f) => Ok(truth(self.test(f, env)?)),
            Node::Singleton { term, .. } => Ok(match self.value(term, env)? {
                Val::Fin(h) => [vec![h]].into_iter().collect(),
                Val::Class => BTreeSet::new(),
            }),
            Node::Elements { term, .. } => {
                let v = self.value(term, env)?;
                Ok(self.elements(v)?.into_iter().map(|e| vec![e]).collect())
            }
            Node::EmptyExt => Ok(BTreeSet::new()),
            Node::SubsetEnum { term, .. } => match self.value(term, env)? {
                Val::Fin(h) => {
                    let n = h.len() as u32;
                    if n >= 63 || (1u64 << n) >= self.budget.remaining() {
                        let rest = self.budget.remaining();
                        self.budget.tick(rest)?;
                    }
                    self.budget.tick(1u64 << n)?;
                    Ok(h.subsets().into_iter().map(|s| vec![s]).collect())
                }
                Val::Class => {
                    self.elements(Val::Class)?;
                    unreachable!()
                }
            },
            Node::Negate(a) => Ok(truth(self.run(a, env)?.is_empty())),
            Node::Implication(a, b) => {
                if self.run(a, env)?.is_empty() {
                    Ok(truth(true))
                } else {
                    Ok(truth(!self.run(b, env)?.is_empty()))
                }
            }
            Node::Union(a, b) => {
                let mut r = self.run(a, env)?;
                r.extend(self.run(b, env)?);
                Ok(r)
            }
            Node::DependentJoin { first, second } => self.join(p, first, second, env),
            Node::Project { inner, var } => {
                let idx = inner.cols.iter().position(|c| c == var).expect("projected column");
                let rows = self.run(inner, env)?;
                Ok(rows
                    .into_iter()
                    .map(|mut r| {
                        r.remove(idx);
                        r
                    })
                    .collect())
            }
            Node::ForallTest { var, range, check } => {
                let _ = var;
                for r in self.run(range, env)? {
                    env.push(range.cols[0].clone(), r[0].clone());
                    let ok = self.run(check, env);
                    env.pop(1);
                    if ok?.is_empty() {
                        return Ok(truth(false));
                    }
                }
                Ok(truth(true))
            }
            Node::TcFixpoint { closure, mode, step } => self.closure(p, closure, *mode, step, env),
        }
    }

    fn join(&mut self, p: &Plan, first: &Plan, second: &Plan, env: &mut Env) -> Result<BTreeSet<Row>, EvalError> {
        let mut out = BTreeSet::new();
        let outer = self.run(first, env)?;
        for r1 in outer {
            let mark = env.len();
            for (v, h) in first.cols.iter().zip(&r1) {
                env.push(v.clone(), h.clone());
            }
            let inner = self.run(second, env);
            env.truncate(mark);
            for r2 in inner? {
                let mut m: BTreeMap<&Var, &Hf> = first.cols.iter().zip(&r1).collect();
                let mut clash = false;
                for (v, h) in second.cols.iter().zip(&r2) {
                    if let Some(old) = m.insert(v, h) {
                        clash |= old != h;
                    }
                }
                if clash {
                    continue;
                }
                self.tick()?;
                out.insert(p.cols.iter().map(|c| m[c].clone()).collect());
            }
        }
        Ok(out)
    }

    fn step_from(&mut self, bind: &Var, z: &Hf, step: &Plan, env: &mut Env) -> Result<Vec<Hf>, EvalError> {
        env.push(bind.clone(), z.clone());
        let r = self.run(step, env);
        env.pop(1);
        Ok(r?.into_iter().map(|mut row| row.pop().expect("one column")).collect())
    }

    /// Nodes reachable in one or more steps from `start`, stopping early at `target`.
    fn reach(
        &mut self,
        start: &Hf,
        bind: &Var,
        step: &Plan,
        target: Option<&Hf>,
        env: &mut Env,
    ) -> Result<(BTreeSet<Hf>, bool), EvalError> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(z) = queue.pop_front() {
            for n in self.step_from(bind, &z, step, env)? {
                if seen.insert(n.clone()) {
                    self.tick()?;
                    if Some(&n) == target {
                        return Ok((seen, true));
                    }
                    queue.push_back(n);
                }
            }
        }
        Ok((seen, false))
    }

    fn endpoint(&mut self, t: &Term, env: &mut Env) -> Result<Option<Hf>, EvalError> {
        match self.value(t, env)? {
            Val::Fin(h) => Ok(Some(h)),
            Val::Class => Ok(None),
        }
    }

    fn closure(
        &mut self,
        p: &Plan,
        c: &crate::syntax::Closure,
        mode: TcMode,
        step: &Plan,
        env: &mut Env,
    ) -> Result<BTreeSet<Row>, EvalError> {
        let class_endpoint = || {
            EvalError::not_evaluable(format!(
                "HF as an endpoint of `{}`",
                print_formula(&Formula::Tc(Arc::new(c.clone())), false)
            ))
        };
        match mode {
            TcMode::TestForward | TcMode::TestBackward => {
                let a = self.endpoint(&c.from, env)?;
                let b = self.endpoint(&c.to, env)?;
                let (Some(a), Some(b)) = (a, b) else {
                    return Err(class_endpoint());
                };
                let found = if mode == TcMode::TestForward {
                    self.reach(&a, &c.x, step, Some(&b), env)?.1
                } else {
                    self.reach(&b, &c.y, step, Some(&a), env)?.1
                };
                Ok(truth(found))
            }
            TcMode::Forward => {
                let a = self.endpoint(&c.from, env)?.ok_or_else(class_endpoint)?;
                let (set, _) = self.reach(&a, &c.x, step, None, env)?;
                Ok(set.into_iter().map(|h| vec![h]).collect())
            }
            TcMode::Backward => {
                let b = self.endpoint(&c.to, env)?.ok_or_else(class_endpoint)?;
                let (set, _) = self.reach(&b, &c.y, step, None, env)?;
                Ok(set.into_iter().map(|h| vec![h]).collect())
            }
            TcMode::Pair => {
                let xi = step.cols.iter().position(|v| *v == c.x).expect("x column");
                let yi = 1 - xi;
                let mut adj: BTreeMap<Hf, Vec<Hf>> = BTreeMap::new();
                for r in self.run(step, env)? {
                    adj.entry(r[xi].clone()).or_default().push(r[yi].clone());
                }
                let u = c.from.as_var().expect("pair mode needs a variable start");
                let starts_first = p.cols[0] == *u;
                let mut out = BTreeSet::new();
                for s in adj.keys() {
                    let mut seen = BTreeSet::new();
                    let mut queue = VecDeque::from([s.clone()]);
                    while let Some(z) = queue.pop_front() {
                        for n in adj.get(&z).into_iter().flatten() {
                            if seen.insert(n.clone()) {
                                self.tick()?;
                                queue.push_back(n.clone());
                            }
                        }
                    }
                    for t in seen {
                        out.insert(if starts_first { vec![s.clone(), t] } else { vec![t, s.clone()] });
                    }
                }
                Ok(out)
            }
        }
    }
}

fn invalid(violations: &[crate::safety::Violation]) -> EvalError {
    let first = &violations[0];
    EvalError::not_evaluable(format!(
        "{} is not a valid term: {}",
        print_term(&first.comprehension, true),
        first.reason
    ))
}

fn require_bound(fv: &VarSet, env: &Env) -> Result<(), EvalError> {
    match fv.iter().find(|v| !env.contains(v)) {
        Some(v) => Err(EvalError::UnboundVariable(v.clone())),
        None => Ok(()),
    }
}

/// Evaluates a term whose free variables are bound by `env`.
pub fn eval_term(t: &Term, env: &Env, cfg: &TheoryConfig, budget: &mut Budget) -> Result<Hf, EvalError> {
    check_supported_term(t, cfg)?;
    require_bound(&t.free_vars(), env)?;
    let v = validate_term(t, cfg)?;
    if !v.is_ok() {
        return Err(invalid(&v.violations));
    }
    let mut env = env.clone();
    Evaluator::new(cfg, budget).term(t, &mut env)
}

/// Decides a formula whose free variables are bound by `env`.
pub fn eval_bool(f: &Formula, env: &Env, cfg: &TheoryConfig, budget: &mut Budget) -> Result<bool, EvalError> {
    check_supported_formula(f, cfg)?;
    require_bound(&f.free_vars(), env)?;
    let v = validate_formula(f, cfg)?;
    if !v.is_ok() {
        return Err(invalid(&v.violations));
    }
    let mut env = env.clone();
    Evaluator::new(cfg, budget).formula(f, &mut env)
}

/// Runs a compiled plan.
pub fn execute_plan(plan: &Plan, env: &Env, cfg: &TheoryConfig, budget: &mut Budget) -> Result<Relation, EvalError> {
    let mut env = env.clone();
    let mut ev = Evaluator::new(cfg, budget);
    let rows = ev.run(plan, &mut env)?;
    Ok(Relation { cols: plan.cols.clone(), rows })
}
