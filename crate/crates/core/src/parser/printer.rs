//! Pretty printing of core expressions in re-parseable concrete syntax.
//!
//! Reserved binder names introduced by expansion are renamed to readable
//! names that clash with nothing else in the expression. In sugar mode the
//! expansions of `∅`, enumerations and tuples are printed in their short form.

use std::collections::{HashMap, HashSet};

use crate::syntax::{Comprehension, Expr, Formula, Term, Var, VarSet};

pub fn print_term(t: &Term, sugar: bool) -> String {
    let mut p = Printer::new(sugar);
    p.collect_term(t);
    p.name_free(t.free_vars().iter());
    let mut out = String::new();
    p.term(t, &mut out);
    out
}

pub fn print_formula(f: &Formula, sugar: bool) -> String {
    let mut p = Printer::new(sugar);
    p.collect_formula(f);
    p.name_free(f.free_vars().iter());
    let mut out = String::new();
    p.formula(f, 0, &mut out);
    out
}

pub fn print_expr(e: &Expr, sugar: bool) -> String {
    match e {
        Expr::Term(t) => print_term(t, sugar),
        Expr::Formula(f) => print_formula(f, sugar),
    }
}

struct Printer {
    sugar: bool,
    /// Every non-reserved name occurring anywhere.
    taken: HashSet<String>,
    scope: Vec<(Var, String)>,
    /// Readable names for free reserved variables.
    free: HashMap<Var, String>,
}

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

impl Printer {
    fn new(sugar: bool) -> Self {
        Printer { sugar, taken: HashSet::new(), scope: Vec::new(), free: HashMap::new() }
    }

    fn collect_term(&mut self, t: &Term) {
        for v in t.all_vars() {
            if !v.is_reserved() {
                self.taken.insert(v.as_str().to_string());
            }
        }
    }

    fn collect_formula(&mut self, f: &Formula) {
        for v in f.all_vars() {
            if !v.is_reserved() {
                self.taken.insert(v.as_str().to_string());
            }
        }
    }

    fn name_free<'v>(&mut self, vars: impl Iterator<Item = &'v Var>) {
        for v in vars.filter(|v| v.is_reserved()) {
            if self.free.contains_key(v) {
                continue;
            }
            let stem = v.stem();
            let name = std::iter::once(stem.to_string())
                .chain((1u64..).map(|i| format!("{stem}{i}")))
                .find(|n| !self.taken.contains(n))
                .expect("unbounded names");
            self.taken.insert(name.clone());
            self.free.insert(v.clone(), name);
        }
    }

    fn name_of(&self, v: &Var) -> String {
        for (old, new) in self.scope.iter().rev() {
            if old == v {
                return new.clone();
            }
        }
        self.free.get(v).cloned().unwrap_or_else(|| v.as_str().to_string())
    }

    fn bind(&mut self, v: &Var) -> String {
        let name = if v.is_reserved() {
            let stem = v.stem();
            let in_scope: HashSet<&str> = self.scope.iter().map(|(_, n)| n.as_str()).collect();
            let ok = |n: &str| !self.taken.contains(n) && !in_scope.contains(n);
            if ok(stem) {
                stem.to_string()
            } else {
                (1u64..).map(|i| format!("{stem}{i}")).find(|n| ok(n)).expect("unbounded names")
            }
        } else {
            v.as_str().to_string()
        };
        self.scope.push((v.clone(), name.clone()));
        name
    }

    fn unbind(&mut self, n: usize) {
        let len = self.scope.len();
        self.scope.truncate(len - n);
    }

    fn term(&mut self, t: &Term, out: &mut String) {
        match t {
            Term::Var(v) => out.push_str(&self.name_of(v)),
            Term::Const(c) => out.push_str(c.name()),
            Term::Compr(c) => {
                if self.sugar && self.sugared(c, out) {
                    return;
                }
                out.push('{');
                let b = self.bind(&c.binder);
                out.push_str(&b);
                out.push_str(" | ");
                self.formula(&c.body, 0, out);
                self.unbind(1);
                out.push('}');
            }
        }
    }

    fn list(&mut self, items: &[Term], out: &mut String) {
        for (i, t) in items.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            self.term(t, out);
        }
    }

    fn sugared(&mut self, c: &Comprehension, out: &mut String) -> bool {
        if is_empty_body(c) {
            out.push('0');
            return true;
        }
        if let Some(items) = tuple_parts(c) {
            out.push('<');
            self.list(&items, out);
            out.push('>');
            return true;
        }
        if let Some(items) = enum_parts(c) {
            out.push('{');
            self.list(&items, out);
            out.push('}');
            return true;
        }
        false
    }

    fn formula(&mut self, f: &Formula, ctx: u8, out: &mut String) {
        let (level, needs) = match f {
            Formula::Implies(..) => (IMPLIES, ctx > IMPLIES),
            Formula::Or(..) => (OR, ctx > OR),
            Formula::And(..) => (AND, ctx > AND),
            Formula::Exists(..) | Formula::Forall(..) => (0, ctx > 0),
            _ => (UNARY, false),
        };
        if needs {
            out.push('(');
        }
        match f {
            Formula::Mem(a, b) => self.relation(a, " in ", b, out),
            Formula::Eq(a, b) => self.relation(a, " = ", b, out),
            Formula::Sub(a, b) => self.relation(a, " sub ", b, out),
            Formula::Not(a) => {
                out.push('~');
                self.formula(a, UNARY, out);
            }
            Formula::And(a, b) => {
                self.formula(a, level, out);
                out.push_str(" & ");
                self.formula(b, level + 1, out);
            }
            Formula::Or(a, b) => {
                self.formula(a, level, out);
                out.push_str(" | ");
                self.formula(b, level + 1, out);
            }
            Formula::Implies(a, b) => {
                self.formula(a, level + 1, out);
                out.push_str(" -> ");
                self.formula(b, level, out);
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                out.push_str(if matches!(f, Formula::Exists(..)) { "exists " } else { "forall " });
                let n = self.bind(v);
                out.push_str(&n);
                out.push_str(". ");
                self.formula(a, 0, out);
                self.unbind(1);
            }
            Formula::Tc(c) => {
                // The chain endpoints lie outside the scope of x and y.
                let mut from = String::new();
                self.term(&c.from, &mut from);
                let mut to = String::new();
                self.term(&c.to, &mut to);
                let x = self.bind(&c.x);
                let y = self.bind(&c.y);
                out.push_str(&format!("TC[{x}, {y}]("));
                self.formula(&c.body, 0, out);
                self.unbind(2);
                out.push_str(&format!(")({from}, {to})"));
            }
        }
        if needs {
            out.push(')');
        }
    }

    fn relation(&mut self, a: &Term, op: &str, b: &Term, out: &mut String) {
        self.term(a, out);
        out.push_str(op);
        self.term(b, out);
    }
}

/// An α-equivalent formula in which reserved names are replaced by readable ones.
pub fn readable_formula(f: &Formula) -> Formula {
    let mut p = Printer::new(false);
    p.collect_formula(f);
    p.name_free(f.free_vars().iter());
    p.rename_formula(f)
}

/// Renames reserved names in a goal `f ≻ x`, consistently across the formula and the set.
pub fn readable_goal(f: &Formula, x: &VarSet) -> (Formula, VarSet) {
    let mut p = Printer::new(false);
    p.collect_formula(f);
    let fv = f.free_vars();
    p.name_free(fv.iter().chain(x.iter()));
    let g = p.rename_formula(f);
    let safe = x.iter().map(|v| Var::new(p.name_of(v))).collect();
    (g, safe)
}

/// An α-equivalent term in which reserved names are replaced by readable ones.
pub fn readable_term(t: &Term) -> Term {
    let mut p = Printer::new(false);
    p.collect_term(t);
    p.name_free(t.free_vars().iter());
    p.rename_term(t)
}

impl Printer {
    fn rename_term(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(v) => Term::Var(Var::new(self.name_of(v))),
            Term::Const(_) => t.clone(),
            Term::Compr(c) => {
                let b = Var::new(self.bind(&c.binder));
                let body = self.rename_formula(&c.body);
                self.unbind(1);
                Term::Compr(Comprehension { binder: b, body: std::sync::Arc::new(body), span: c.span.clone() })
            }
        }
    }

    fn rename_formula(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::Mem(a, b) => Formula::Mem(self.rename_term(a), self.rename_term(b)),
            Formula::Eq(a, b) => Formula::Eq(self.rename_term(a), self.rename_term(b)),
            Formula::Sub(a, b) => Formula::Sub(self.rename_term(a), self.rename_term(b)),
            Formula::Not(a) => Formula::not(self.rename_formula(a)),
            Formula::And(a, b) => Formula::and(self.rename_formula(a), self.rename_formula(b)),
            Formula::Or(a, b) => Formula::or(self.rename_formula(a), self.rename_formula(b)),
            Formula::Implies(a, b) => Formula::implies(self.rename_formula(a), self.rename_formula(b)),
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                let nv = Var::new(self.bind(v));
                let body = self.rename_formula(a);
                self.unbind(1);
                if matches!(f, Formula::Exists(..)) {
                    Formula::exists(nv, body)
                } else {
                    Formula::forall(nv, body)
                }
            }
            Formula::Tc(c) => {
                let from = self.rename_term(&c.from);
                let to = self.rename_term(&c.to);
                let x = Var::new(self.bind(&c.x));
                let y = Var::new(self.bind(&c.y));
                let body = self.rename_formula(&c.body);
                self.unbind(2);
                Formula::tc(x, y, body, from, to)
            }
        }
    }
}

fn is_empty_body(c: &Comprehension) -> bool {
    matches!(&*c.body, Formula::Mem(Term::Var(a), Term::Var(b)) if *a == c.binder && *b == c.binder)
}

/// Items of `{x | x = t1 ∨ ... ∨ x = tn}` with `x` not free in any `ti`.
fn enum_parts(c: &Comprehension) -> Option<Vec<Term>> {
    fn go(f: &Formula, x: &Var, out: &mut Vec<Term>) -> bool {
        match f {
            Formula::Eq(Term::Var(v), t) if v == x && !t.free_vars().contains(x) => {
                out.push(t.clone());
                true
            }
            Formula::Or(a, b) => {
                if !matches!(&**b, Formula::Eq(..)) {
                    return false;
                }
                go(a, x, out) && go(b, x, out)
            }
            _ => false,
        }
    }
    let mut out = Vec::new();
    go(&c.body, &c.binder, &mut out).then_some(out)
}

fn pair_parts(c: &Comprehension) -> Option<(Term, Term)> {
    let items = enum_parts(c)?;
    let [Term::Compr(s), Term::Compr(d)] = items.as_slice() else {
        return None;
    };
    let single = enum_parts(s)?;
    let double = enum_parts(d)?;
    match (single.as_slice(), double.as_slice()) {
        ([a], [a2, b]) if a.alpha_eq(a2) => Some((a.clone(), b.clone())),
        _ => None,
    }
}

fn tuple_parts(c: &Comprehension) -> Option<Vec<Term>> {
    let (a, b) = pair_parts(c)?;
    let mut items = match &a {
        Term::Compr(inner) => tuple_parts(inner).unwrap_or_else(|| vec![a.clone()]),
        _ => vec![a.clone()],
    };
    items.push(b);
    Some(items)
}
