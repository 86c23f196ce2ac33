//! Random generators and a brute-force semantics used as test oracles.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rudiset::safety::{check_safe, safe_sets};
use rudiset::syntax::{Closure, Comprehension};
use rudiset::{Formula, Hf, Term, TheoryConfig, Var, VarSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `V_n`: all sets of rank below `n`.
pub fn vn(n: u32) -> Vec<Hf> {
    let mut v: Vec<Hf> = Vec::new();
    for _ in 0..n {
        v = Hf::set(v).subsets();
    }
    v.sort();
    v
}

/// A random set of rank at most `rank`, with at most `width` elements per level.
pub fn random_hf(r: &mut impl Rng, rank: u32, width: usize) -> Hf {
    if rank == 0 {
        return Hf::empty();
    }
    let n = r.gen_range(0..=width);
    Hf::set((0..n).map(|_| {
        let k = r.gen_range(0..rank);
        random_hf(r, k, width)
    }))
}

pub fn var(s: &str) -> Var {
    Var::new(s)
}

pub fn vars(names: &[&str]) -> VarSet {
    names.iter().map(|n| Var::new(n)).collect()
}

pub fn empty() -> Term {
    rudiset::parser::empty_set()
}

// ---------------------------------------------------------------------------
// Brute-force semantics over a finite transitive universe.

pub type Assignment = Vec<(Var, Hf)>;

fn lookup<'e>(env: &'e Assignment, v: &Var) -> &'e Hf {
    &env.iter().rev().find(|(w, _)| w == v).unwrap_or_else(|| panic!("unbound {v}")).1
}

/// The value of a term, computing comprehensions as subsets of `u`.
pub fn value(t: &Term, env: &mut Assignment, u: &[Hf]) -> Hf {
    match t {
        Term::Var(v) => lookup(env, v).clone(),
        Term::Const(_) => panic!("the oracle has no HF constant"),
        Term::Compr(c) => compr_value(c, env, u),
    }
}

fn compr_value(c: &Comprehension, env: &mut Assignment, u: &[Hf]) -> Hf {
    let mut out = Vec::new();
    for a in u {
        env.push((c.binder.clone(), a.clone()));
        if holds(&c.body, env, u) {
            out.push(a.clone());
        }
        env.pop();
    }
    Hf::set(out)
}

/// Classical truth with quantifiers ranging over `u`.
pub fn holds(f: &Formula, env: &mut Assignment, u: &[Hf]) -> bool {
    match f {
        Formula::Mem(a, b) => value(b, env, u).contains(&value(a, env, u)),
        Formula::Eq(a, b) => value(a, env, u) == value(b, env, u),
        Formula::Sub(a, b) => value(a, env, u).is_subset(&value(b, env, u)),
        Formula::Not(a) => !holds(a, env, u),
        Formula::And(a, b) => holds(a, env, u) && holds(b, env, u),
        Formula::Or(a, b) => holds(a, env, u) || holds(b, env, u),
        Formula::Implies(a, b) => !holds(a, env, u) || holds(b, env, u),
        Formula::Exists(v, a) | Formula::Forall(v, a) => {
            let want = matches!(f, Formula::Exists(..));
            for d in u {
                env.push((v.clone(), d.clone()));
                let r = holds(a, env, u);
                env.pop();
                if r == want {
                    return want;
                }
            }
            !want
        }
        Formula::Tc(c) => {
            let from = value(&c.from, env, u);
            let to = value(&c.to, env, u);
            tc_reach(c, &from, env, u).contains(&to)
        }
    }
}

/// Everything reachable from `start` in one or more steps of the closure body.
pub fn tc_reach(c: &Closure, start: &Hf, env: &mut Assignment, u: &[Hf]) -> BTreeSet<Hf> {
    let mut seen = BTreeSet::new();
    let mut frontier = vec![start.clone()];
    while let Some(z) = frontier.pop() {
        for w in u {
            env.push((c.x.clone(), z.clone()));
            env.push((c.y.clone(), w.clone()));
            let step = holds(&c.body, env, u);
            env.pop();
            env.pop();
            if step && seen.insert(w.clone()) {
                frontier.push(w.clone());
            }
        }
    }
    seen
}

/// All tuples over `u` for the columns `cols` satisfying `f`.
pub fn brute_force(f: &Formula, cols: &[Var], env: &Assignment, u: &[Hf]) -> BTreeSet<Vec<Hf>> {
    let mut out = BTreeSet::new();
    let mut env = env.clone();
    let mut idx = vec![0usize; cols.len()];
    loop {
        let mark = env.len();
        for (c, &i) in cols.iter().zip(&idx) {
            env.push((c.clone(), u[i].clone()));
        }
        if holds(f, &mut env, u) {
            out.insert(idx.iter().map(|&i| u[i].clone()).collect());
        }
        env.truncate(mark);
        let mut k = 0;
        loop {
            if k == idx.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < u.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Random formulas.

/// Random first-order formulas whose atoms relate variables and `0`.
pub struct FormulaGen {
    pub free: Vec<Var>,
    pub max_depth: u32,
    pub max_quantifiers: u32,
    pub tc: bool,
    next: usize,
}

impl FormulaGen {
    pub fn new(free: &[&str], max_depth: u32) -> Self {
        FormulaGen { free: free.iter().map(|s| Var::new(s)).collect(), max_depth, max_quantifiers: 2, tc: false, next: 0 }
    }

    fn fresh(&mut self) -> Var {
        self.next += 1;
        Var::new(format!("q{}", self.next))
    }

    fn term(&self, r: &mut impl Rng, scope: &[Var]) -> Term {
        if r.gen_ratio(1, 6) {
            empty()
        } else {
            Term::Var(scope.choose(r).expect("non-empty scope").clone())
        }
    }

    fn atom(&self, r: &mut impl Rng, scope: &[Var]) -> Formula {
        let a = self.term(r, scope);
        let b = self.term(r, scope);
        if r.gen_bool(0.6) {
            Formula::mem(a, b)
        } else {
            Formula::eq(a, b)
        }
    }

    pub fn formula(&mut self, r: &mut impl Rng) -> Formula {
        let scope = self.free.clone();
        self.gen(r, &scope, self.max_depth, self.max_quantifiers)
    }

    fn gen(&mut self, r: &mut impl Rng, scope: &[Var], depth: u32, quants: u32) -> Formula {
        if depth == 0 {
            return self.atom(r, scope);
        }
        let choice = r.gen_range(0..if self.tc { 11 } else { 10 });
        match choice {
            0 | 1 => self.atom(r, scope),
            2 => Formula::not(self.gen(r, scope, depth - 1, quants)),
            3 | 4 => Formula::and(self.gen(r, scope, depth - 1, quants), self.gen(r, scope, depth - 1, quants)),
            5 => Formula::or(self.gen(r, scope, depth - 1, quants), self.gen(r, scope, depth - 1, quants)),
            6 => Formula::implies(self.gen(r, scope, depth - 1, quants), self.gen(r, scope, depth - 1, quants)),
            7 | 8 | 9 if quants > 0 => {
                let v = self.fresh();
                let bound = self.term(r, scope);
                let mut inner = scope.to_vec();
                inner.push(v.clone());
                let body = self.gen(r, &inner, depth - 1, quants - 1);
                let guard = Formula::mem(Term::Var(v.clone()), bound);
                match choice {
                    7 => Formula::exists(v, Formula::and(guard, body)),
                    8 => Formula::forall(v, Formula::implies(guard, body)),
                    _ => Formula::exists(v, body),
                }
            }
            10 => {
                let (x, y) = (self.fresh(), self.fresh());
                let mut inner = scope.to_vec();
                inner.push(x.clone());
                inner.push(y.clone());
                let step = Formula::and(
                    Formula::mem(Term::Var(y.clone()), Term::Var(x.clone())),
                    self.gen(r, &inner, depth.saturating_sub(2), 0),
                );
                Formula::tc(x, y, step, self.term(r, scope), self.term(r, scope))
            }
            _ => self.atom(r, scope),
        }
    }
}

/// A random formula over `free` together with a safe set chosen among its maximal ones.
pub fn safe_instance(
    r: &mut impl Rng,
    g: &mut FormulaGen,
    cfg: &TheoryConfig,
    want_nonempty: bool,
) -> (Formula, VarSet) {
    loop {
        let f = g.formula(r);
        let fam = safe_sets(&f, cfg).expect("supported");
        let maximal = fam.maximal();
        if maximal.is_empty() {
            continue;
        }
        let x = maximal.choose(r).expect("non-empty").clone();
        if want_nonempty && x.is_empty() {
            continue;
        }
        assert!(check_safe(&f, &x, cfg).unwrap().is_some(), "family and checker disagree");
        return (f, x);
    }
}

// ---------------------------------------------------------------------------
// Renaming.

/// Renames every bound variable to a fresh one.
pub fn rename_binders_term(t: &Term, n: &mut usize) -> Term {
    match t {
        Term::Var(_) | Term::Const(_) => t.clone(),
        Term::Compr(c) => {
            let nv = fresh_alpha(n);
            let body = c.body.substitute(&c.binder, &Term::Var(nv.clone()));
            Term::Compr(Comprehension { binder: nv, body: Arc::new(rename_binders(&body, n)), span: c.span.clone() })
        }
    }
}

fn fresh_alpha(n: &mut usize) -> Var {
    *n += 1;
    Var::new(format!("r{}_", n))
}

pub fn rename_binders(f: &Formula, n: &mut usize) -> Formula {
    match f {
        Formula::Mem(a, b) => Formula::Mem(rename_binders_term(a, n), rename_binders_term(b, n)),
        Formula::Eq(a, b) => Formula::Eq(rename_binders_term(a, n), rename_binders_term(b, n)),
        Formula::Sub(a, b) => Formula::Sub(rename_binders_term(a, n), rename_binders_term(b, n)),
        Formula::Not(a) => Formula::not(rename_binders(a, n)),
        Formula::And(a, b) => Formula::and(rename_binders(a, n), rename_binders(b, n)),
        Formula::Or(a, b) => Formula::or(rename_binders(a, n), rename_binders(b, n)),
        Formula::Implies(a, b) => Formula::implies(rename_binders(a, n), rename_binders(b, n)),
        Formula::Exists(v, a) | Formula::Forall(v, a) => {
            let nv = fresh_alpha(n);
            let body = rename_binders(&a.substitute(v, &Term::Var(nv.clone())), n);
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(nv, body)
            } else {
                Formula::forall(nv, body)
            }
        }
        Formula::Tc(c) => {
            let (nx, ny) = (fresh_alpha(n), fresh_alpha(n));
            let body = c.body.substitute(&c.x, &Term::Var(nx.clone())).substitute(&c.y, &Term::Var(ny.clone()));
            Formula::tc(nx, ny, rename_binders(&body, n), rename_binders_term(&c.from, n), rename_binders_term(&c.to, n))
        }
    }
}
