//! Expansion of surface syntax into the core language.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::syntax::{
    fresh_like, fresh_named, Closure, Comprehension, Expr, Formula, SourceSpan, SpanTag, Subst, Term, Var,
    VarSet,
};

use super::ast::*;
use super::error::{make_span, ErrorSpan, ParseError};

/// Numerals above this are rejected; their expansions grow exponentially.
pub const MAX_NUMERAL: u64 = 16;

/// A named abbreviation `name(params) := body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub params: Vec<Var>,
    /// The expanded body; its binders carry reserved names.
    pub body: Expr,
    /// The defining text, when the definition came from source.
    pub source: Option<String>,
    pub span: Option<SourceSpan>,
}

impl Definition {
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn is_formula(&self) -> bool {
        matches!(self.body, Expr::Formula(_))
    }

    /// The body with `params` simultaneously replaced by `args`.
    pub fn instantiate(&self, args: &[Term]) -> Expr {
        assert_eq!(args.len(), self.params.len(), "arity of `{}`", self.name);
        let map: Subst = self.params.iter().cloned().zip(args.iter().cloned()).collect();
        self.body.substitute_all(&map)
    }
}

/// A table of abbreviations, in definition order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Definitions {
    map: BTreeMap<String, Arc<Definition>>,
    order: Vec<String>,
}

impl Definitions {
    pub fn new() -> Self {
        Definitions::default()
    }

    /// The standard prelude.
    pub fn standard() -> Self {
        crate::catalog::prelude().clone()
    }

    pub fn get(&self, name: &str) -> Option<&Arc<Definition>> {
        self.map.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.map.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<Definition>> + '_ {
        self.order.iter().map(move |n| &self.map[n])
    }

    /// Adds a definition, checking that its free variables are parameters.
    pub fn insert(&mut self, def: Definition) -> Result<(), ParseError> {
        let span = ErrorSpan(def.span.clone().unwrap_or_else(unknown_span));
        if self.map.contains_key(&def.name) {
            return Err(ParseError::DuplicateDefinition { name: def.name, span });
        }
        let params: VarSet = def.params.iter().cloned().collect();
        if params.len() != def.params.len() {
            return Err(ParseError::Syntax {
                span,
                message: format!("repeated parameter in the definition of `{}`", def.name),
            });
        }
        if let Some(v) = def.body.free_vars().difference(&params).iter().next() {
            return Err(ParseError::NotAParameter { name: def.name, var: v.to_string(), span });
        }
        let mut avoid = def.body.all_vars().union(&params);
        let body = freshen_expr(&def.body, &mut avoid);
        self.order.push(def.name.clone());
        self.map.insert(def.name.clone(), Arc::new(Definition { body, ..def }));
        Ok(())
    }

    /// Replaces an existing definition or adds a new one.
    pub fn redefine(&mut self, def: Definition) -> Result<(), ParseError> {
        let name = def.name.clone();
        let old = self.map.remove(&name);
        let pos = self.order.iter().position(|n| *n == name);
        if let Some(p) = pos {
            self.order.remove(p);
        }
        let r = self.insert(def);
        if r.is_err() {
            if let Some(old) = old {
                self.map.insert(name.clone(), old);
                self.order.insert(pos.unwrap_or(self.order.len()), name);
            }
        }
        r
    }
}

fn unknown_span() -> SourceSpan {
    SourceSpan { file: None, start_line: 0, start_col: 0, end_line: 0, end_col: 0 }
}

/// A safety requirement introduced by a sugar form, checked alongside the term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obligation {
    pub formula: Formula,
    pub safe: VarSet,
    pub origin: &'static str,
    pub span: Option<SourceSpan>,
}

pub(crate) struct Expander<'a> {
    defs: &'a Definitions,
    file: Option<Arc<str>>,
    scope: Vec<String>,
    pub obligations: Vec<Obligation>,
}

type R<T> = Result<T, ParseError>;

impl<'a> Expander<'a> {
    pub fn new(defs: &'a Definitions, file: Option<Arc<str>>) -> Self {
        Expander { defs, file, scope: Vec::new(), obligations: Vec::new() }
    }

    pub fn with_scope(mut self, names: impl IntoIterator<Item = String>) -> Self {
        self.scope.extend(names);
        self
    }

    fn espan(&self, s: Span) -> ErrorSpan {
        make_span(self.file.clone(), s.start, s.end)
    }

    fn source_span(&self, s: Span) -> SourceSpan {
        self.espan(s).0
    }

    fn tag(&self, s: Span) -> SpanTag {
        SpanTag(Some(Arc::new(self.source_span(s))))
    }

    fn syntax(&self, s: Span, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { span: self.espan(s), message: message.into() }
    }

    fn in_scope(&self, name: &str) -> bool {
        self.scope.iter().any(|n| n == name)
    }

    fn scoped<T>(&mut self, names: &[&Ident], f: impl FnOnce(&mut Self) -> R<T>) -> R<T> {
        let n = self.scope.len();
        self.scope.extend(names.iter().map(|i| i.name.clone()));
        let r = f(self);
        self.scope.truncate(n);
        r
    }

    fn oblige(&mut self, formula: Formula, safe: VarSet, origin: &'static str, span: Span) {
        let span = Some(self.source_span(span));
        self.obligations.push(Obligation { formula, safe, origin, span });
    }

    pub fn expr(&mut self, e: &SExpr) -> R<Expr> {
        match e {
            SExpr::Term(t) => Ok(Expr::Term(self.term(t)?)),
            SExpr::Formula(f) => Ok(Expr::Formula(self.formula(f)?)),
        }
    }

    pub fn formula(&mut self, f: &SFormula) -> R<Formula> {
        Ok(match f {
            SFormula::Rel { op, left, right, .. } => {
                let a = self.term(left)?;
                let b = self.term(right)?;
                match op {
                    RelOp::In => Formula::mem(a, b),
                    RelOp::NotIn => Formula::not(Formula::mem(a, b)),
                    RelOp::Eq => Formula::eq(a, b),
                    RelOp::NotEq => Formula::not(Formula::eq(a, b)),
                    RelOp::Sub => Formula::Sub(a, b),
                }
            }
            SFormula::Not(a, _) => Formula::not(self.formula(a)?),
            SFormula::And(a, b) => Formula::and(self.formula(a)?, self.formula(b)?),
            SFormula::Or(a, b) => Formula::or(self.formula(a)?, self.formula(b)?),
            SFormula::Implies(a, b) => Formula::implies(self.formula(a)?, self.formula(b)?),
            SFormula::Iff(a, b) => {
                let a = self.formula(a)?;
                let b = self.formula(b)?;
                Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
            }
            SFormula::Quant { q, vars, bound, body, span } => {
                let bound = match bound {
                    Some(s) => {
                        let s = self.term(s)?;
                        let fv = s.free_vars();
                        if let Some(v) = vars.iter().find(|v| fv.contains(&Var::new(&v.name))) {
                            return Err(self.syntax(
                                *span,
                                format!("quantified variable `{}` occurs in its own bound", v.name),
                            ));
                        }
                        Some(s)
                    }
                    None => None,
                };
                let refs: Vec<&Ident> = vars.iter().collect();
                let mut out = self.scoped(&refs, |e| e.formula(body))?;
                for v in vars.iter().rev() {
                    let x = Var::new(&v.name);
                    out = match (q, &bound) {
                        (Quant::Exists, None) => Formula::exists(x, out),
                        (Quant::Forall, None) => Formula::forall(x, out),
                        (Quant::Exists, Some(s)) => {
                            Formula::exists(x.clone(), Formula::and(Formula::mem(Term::Var(x), s.clone()), out))
                        }
                        (Quant::Forall, Some(s)) => Formula::forall(
                            x.clone(),
                            Formula::implies(Formula::mem(Term::Var(x), s.clone()), out),
                        ),
                    };
                }
                out
            }
            SFormula::Tc { x, y, body, from, to, span } => {
                if x.name == y.name {
                    return Err(self.syntax(*span, "the two variables of TC must differ"));
                }
                let body = self.scoped(&[x, y], |e| e.formula(body))?;
                let from = self.term(from)?;
                let to = self.term(to)?;
                Formula::Tc(Arc::new(Closure {
                    x: Var::new(&x.name),
                    y: Var::new(&y.name),
                    body: Arc::new(body),
                    from,
                    to,
                }))
            }
            SFormula::Call { name, args, span } => {
                let Some(def) = self.defs.get(&name.name).cloned() else {
                    return Err(ParseError::UnknownName { name: name.name.clone(), span: self.espan(name.span) });
                };
                match self.call(&def, args, *span)? {
                    Expr::Formula(f) => f,
                    Expr::Term(_) => {
                        return Err(self.syntax(
                            *span,
                            format!("`{}` abbreviates a term and cannot stand as a formula", name.name),
                        ))
                    }
                }
            }
        })
    }

    fn call(&mut self, def: &Definition, args: &[STerm], span: Span) -> R<Expr> {
        if def.arity() != args.len() {
            return Err(ParseError::ArityMismatch {
                name: def.name.clone(),
                expected: def.arity(),
                found: args.len(),
                span: self.espan(span),
            });
        }
        let args = args.iter().map(|a| self.term(a)).collect::<R<Vec<_>>>()?;
        let body = restamp_expr(&def.body, &self.tag(span));
        let map: Subst = def.params.iter().cloned().zip(args).collect();
        Ok(body.substitute_all(&map))
    }

    fn call_named(&mut self, name: &str, args: &[STerm], span: Span) -> R<Term> {
        let Some(def) = self.defs.get(name).cloned() else {
            return Err(ParseError::UnknownName { name: name.to_string(), span: self.espan(span) });
        };
        match self.call(&def, args, span)? {
            Expr::Term(t) => Ok(t),
            Expr::Formula(_) => Err(self.syntax(
                span,
                format!("`{name}` abbreviates a formula and cannot stand as a term"),
            )),
        }
    }

    pub fn term(&mut self, t: &STerm) -> R<Term> {
        Ok(match t {
            STerm::Name(id) => {
                if self.in_scope(&id.name) {
                    return Ok(Term::var(&id.name));
                }
                match self.defs.get(&id.name).cloned() {
                    Some(def) => match self.call(&def, &[], id.span)? {
                        Expr::Term(t) => t,
                        Expr::Formula(_) => {
                            return Err(self.syntax(
                                id.span,
                                format!("`{}` abbreviates a formula and cannot stand as a term", id.name),
                            ))
                        }
                    },
                    None => Term::var(&id.name),
                }
            }
            STerm::Hf(_) => Term::Const(crate::syntax::Constant::Hf),
            STerm::Empty(span) => with_span(empty_set(), self.tag(*span)),
            STerm::Numeral(n, span) => {
                if *n > MAX_NUMERAL {
                    return Err(self.syntax(*span, format!("numeral {n} exceeds the limit of {MAX_NUMERAL}")));
                }
                with_span(numeral(*n), self.tag(*span))
            }
            STerm::Enum(items, span) => {
                let items = items.iter().map(|i| self.term(i)).collect::<R<Vec<_>>>()?;
                with_span(enumeration(&items), self.tag(*span))
            }
            STerm::Tuple(items, span) => {
                let items = items.iter().map(|i| self.term(i)).collect::<R<Vec<_>>>()?;
                with_span(tuple(&items), self.tag(*span))
            }
            STerm::Compr { binder, body, span } => {
                let body = self.scoped(&[binder], |e| e.formula(body))?;
                Term::Compr(Comprehension {
                    binder: Var::new(&binder.name),
                    body: Arc::new(body),
                    span: self.tag(*span),
                })
            }
            STerm::Sep { binder, set, body, span } => {
                let set = self.term(set)?;
                let x = Var::new(&binder.name);
                if set.free_vars().contains(&x) {
                    return Err(self.syntax(*span, format!("`{}` occurs in the set it ranges over", binder.name)));
                }
                let phi = self.scoped(&[binder], |e| e.formula(body))?;
                self.oblige(phi.clone(), VarSet::new(), "separation", *span);
                Term::Compr(Comprehension {
                    binder: x.clone(),
                    body: Arc::new(Formula::and(Formula::mem(Term::Var(x), set), phi)),
                    span: self.tag(*span),
                })
            }
            STerm::Repl { head, var, set, span } => {
                let set = self.term(set)?;
                let head = self.scoped(&[var], |e| e.term(head))?;
                self.replacement(head, var, set, *span)?
            }
            STerm::Lambda { var, set, body, span } => {
                let set = self.term(set)?;
                let body = self.scoped(&[var], |e| e.term(body))?;
                let head = tuple(&[Term::var(&var.name), body]);
                self.replacement(head, var, set, *span)?
            }
            STerm::TupleCompr { vars, body, span } => {
                let xs: Vec<Var> = vars.iter().map(|v| Var::new(&v.name)).collect();
                let set: VarSet = xs.iter().cloned().collect();
                if set.len() != xs.len() {
                    return Err(self.syntax(*span, "tuple comprehension variables must be distinct"));
                }
                let refs: Vec<&Ident> = vars.iter().collect();
                let phi = self.scoped(&refs, |e| e.formula(body))?;
                self.oblige(phi.clone(), set.clone(), "tuple comprehension", *span);
                let avoid = phi.free_vars().union(&set);
                let z = fresh_named("z", &avoid);
                let tup = tuple(&xs.iter().cloned().map(Term::Var).collect::<Vec<_>>());
                let mut inner = Formula::and(phi, Formula::eq(Term::Var(z.clone()), tup));
                for x in xs.iter().rev() {
                    inner = Formula::exists(x.clone(), inner);
                }
                Term::Compr(Comprehension { binder: z, body: Arc::new(inner), span: self.tag(*span) })
            }
            STerm::Iota { var, body, span } => {
                let phi = self.scoped(&[var], |e| e.formula(body))?;
                self.oblige(phi.clone(), VarSet::singleton(Var::new(&var.name)), "description", *span);
                let set = Term::Compr(Comprehension {
                    binder: Var::new(&var.name),
                    body: Arc::new(phi),
                    span: self.tag(*span),
                });
                self.apply_prelude("Inter", vec![set], *span)?
            }
            STerm::Call { name, args, span } => {
                if self.in_scope(&name.name) || !self.defs.contains(&name.name) {
                    if args.len() == 1 && self.defs.contains("app") {
                        let fun = Term::var(&name.name);
                        let arg = self.term(&args[0])?;
                        return self.apply_prelude("app", vec![fun, arg], *span);
                    }
                    if self.in_scope(&name.name) {
                        return Err(self.syntax(*span, format!("variable `{}` applied to {} arguments", name.name, args.len())));
                    }
                    return Err(ParseError::UnknownName { name: name.name.clone(), span: self.espan(name.span) });
                }
                self.call_named(&name.name, args, *span)?
            }
            STerm::Apply { fun, arg, span } => {
                let fun = self.term(fun)?;
                let arg = self.term(arg)?;
                self.apply_prelude("app", vec![fun, arg], *span)?
            }
            STerm::Bin { op, left, right, span } => {
                let l = self.term(left)?;
                let r = self.term(right)?;
                self.apply_prelude(op.macro_name(), vec![l, r], *span)?
            }
            STerm::Big { op, arg, span } => {
                let a = self.term(arg)?;
                self.apply_prelude(op.macro_name(), vec![a], *span)?
            }
        })
    }

    fn replacement(&mut self, head: Term, var: &Ident, set: Term, span: Span) -> R<Term> {
        let x = Var::new(&var.name);
        if set.free_vars().contains(&x) {
            return Err(self.syntax(span, format!("`{}` occurs in the set it ranges over", var.name)));
        }
        let avoid = head.free_vars().union(&set.free_vars()).with(x.clone());
        let y = fresh_named("y", &avoid);
        let body = Formula::exists(
            x.clone(),
            Formula::and(Formula::mem(Term::Var(x), set), Formula::eq(Term::Var(y.clone()), head)),
        );
        Ok(Term::Compr(Comprehension { binder: y, body: Arc::new(body), span: self.tag(span) }))
    }

    /// Applies an already expanded abbreviation from the table.
    fn apply_prelude(&mut self, name: &str, args: Vec<Term>, span: Span) -> R<Term> {
        let Some(def) = self.defs.get(name).cloned() else {
            return Err(ParseError::UnknownName { name: name.to_string(), span: self.espan(span) });
        };
        if def.arity() != args.len() {
            return Err(ParseError::ArityMismatch {
                name: name.to_string(),
                expected: def.arity(),
                found: args.len(),
                span: self.espan(span),
            });
        }
        let body = restamp_expr(&def.body, &self.tag(span));
        let map: Subst = def.params.iter().cloned().zip(args).collect();
        match body.substitute_all(&map) {
            Expr::Term(t) => Ok(t),
            Expr::Formula(_) => Err(self.syntax(span, format!("`{name}` abbreviates a formula"))),
        }
    }
}

fn with_span(t: Term, span: SpanTag) -> Term {
    match t {
        Term::Compr(c) => Term::Compr(Comprehension { span, ..c }),
        t => t,
    }
}

/// `∅`, expanded as `{x | x ∈ x}`.
pub fn empty_set() -> Term {
    let x = Var::new("$x");
    Term::compr(x.clone(), Formula::mem(Term::Var(x.clone()), Term::Var(x)))
}

/// `{t1, ..., tn}`, expanded as `{x | x = t1 ∨ ... ∨ x = tn}`.
pub fn enumeration(items: &[Term]) -> Term {
    if items.is_empty() {
        return empty_set();
    }
    let mut avoid = VarSet::new();
    for t in items {
        avoid.extend(&t.free_vars());
    }
    let x = fresh_named("x", &avoid);
    let body = Formula::or_all(items.iter().map(|t| Formula::eq(Term::Var(x.clone()), t.clone())))
        .expect("non-empty");
    Term::compr(x, body)
}

/// Kuratowski pair `{{a}, {a, b}}`.
pub fn pair(a: &Term, b: &Term) -> Term {
    enumeration(&[enumeration(&[a.clone()]), enumeration(&[a.clone(), b.clone()])])
}

/// `⟨t1, ..., tn⟩ = ⟨⟨t1, ..., t(n-1)⟩, tn⟩`, with `⟨t⟩ = t` and `⟨⟩ = ∅`.
pub fn tuple(items: &[Term]) -> Term {
    match items.len() {
        0 => empty_set(),
        1 => items[0].clone(),
        n => pair(&tuple(&items[..n - 1]), &items[n - 1]),
    }
}

/// The von Neumann numeral `n = {0, ..., n-1}`, sharing subterms.
pub fn numeral(n: u64) -> Term {
    let mut all = vec![empty_set()];
    for _ in 0..n {
        let next = enumeration(&all);
        all.push(next);
    }
    all.pop().expect("non-empty")
}

/// Renames every binder to a fresh reserved name not in `avoid`.
pub(crate) fn freshen_expr(e: &Expr, avoid: &mut VarSet) -> Expr {
    let map = BTreeMap::new();
    match e {
        Expr::Term(t) => Expr::Term(freshen_term(t, &map, avoid)),
        Expr::Formula(f) => Expr::Formula(freshen_formula(f, &map, avoid)),
    }
}

type Renaming = BTreeMap<Var, Var>;

fn bind(b: &Var, map: &Renaming, avoid: &mut VarSet) -> (Var, Renaming) {
    let nb = fresh_like(b, avoid);
    avoid.insert(nb.clone());
    let mut m = map.clone();
    m.insert(b.clone(), nb.clone());
    (nb, m)
}

fn freshen_term(t: &Term, map: &Renaming, avoid: &mut VarSet) -> Term {
    match t {
        Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
        Term::Const(c) => Term::Const(*c),
        Term::Compr(c) => {
            let (nb, m) = bind(&c.binder, map, avoid);
            Term::Compr(Comprehension {
                binder: nb,
                body: Arc::new(freshen_formula(&c.body, &m, avoid)),
                span: c.span.clone(),
            })
        }
    }
}

fn freshen_formula(f: &Formula, map: &Renaming, avoid: &mut VarSet) -> Formula {
    let ft = |t: &Term, avoid: &mut VarSet| freshen_term(t, map, avoid);
    match f {
        Formula::Mem(a, b) => Formula::Mem(ft(a, avoid), ft(b, avoid)),
        Formula::Eq(a, b) => Formula::Eq(ft(a, avoid), ft(b, avoid)),
        Formula::Sub(a, b) => Formula::Sub(ft(a, avoid), ft(b, avoid)),
        Formula::Not(a) => Formula::not(freshen_formula(a, map, avoid)),
        Formula::And(a, b) => Formula::and(freshen_formula(a, map, avoid), freshen_formula(b, map, avoid)),
        Formula::Or(a, b) => Formula::or(freshen_formula(a, map, avoid), freshen_formula(b, map, avoid)),
        Formula::Implies(a, b) => {
            Formula::implies(freshen_formula(a, map, avoid), freshen_formula(b, map, avoid))
        }
        Formula::Exists(v, a) => {
            let (nv, m) = bind(v, map, avoid);
            Formula::Exists(nv, Arc::new(freshen_formula(a, &m, avoid)))
        }
        Formula::Forall(v, a) => {
            let (nv, m) = bind(v, map, avoid);
            Formula::Forall(nv, Arc::new(freshen_formula(a, &m, avoid)))
        }
        Formula::Tc(c) => {
            let from = freshen_term(&c.from, map, avoid);
            let to = freshen_term(&c.to, map, avoid);
            let (nx, m1) = bind(&c.x, map, avoid);
            let (ny, m2) = bind(&c.y, &m1, avoid);
            Formula::Tc(Arc::new(Closure {
                x: nx,
                y: ny,
                body: Arc::new(freshen_formula(&c.body, &m2, avoid)),
                from,
                to,
            }))
        }
    }
}

/// Replaces every comprehension span by `tag`.
fn restamp_expr(e: &Expr, tag: &SpanTag) -> Expr {
    if tag.get().is_none() {
        return e.clone();
    }
    match e {
        Expr::Term(t) => Expr::Term(restamp_term(t, tag)),
        Expr::Formula(f) => Expr::Formula(restamp_formula(f, tag)),
    }
}

fn restamp_term(t: &Term, tag: &SpanTag) -> Term {
    match t {
        Term::Compr(c) => Term::Compr(Comprehension {
            binder: c.binder.clone(),
            body: Arc::new(restamp_formula(&c.body, tag)),
            span: tag.clone(),
        }),
        t => t.clone(),
    }
}

fn restamp_formula(f: &Formula, tag: &SpanTag) -> Formula {
    let t = |x: &Term| restamp_term(x, tag);
    let r = |x: &Formula| Arc::new(restamp_formula(x, tag));
    match f {
        Formula::Mem(a, b) => Formula::Mem(t(a), t(b)),
        Formula::Eq(a, b) => Formula::Eq(t(a), t(b)),
        Formula::Sub(a, b) => Formula::Sub(t(a), t(b)),
        Formula::Not(a) => Formula::Not(r(a)),
        Formula::And(a, b) => Formula::And(r(a), r(b)),
        Formula::Or(a, b) => Formula::Or(r(a), r(b)),
        Formula::Implies(a, b) => Formula::Implies(r(a), r(b)),
        Formula::Exists(v, a) => Formula::Exists(v.clone(), r(a)),
        Formula::Forall(v, a) => Formula::Forall(v.clone(), r(a)),
        Formula::Tc(c) => Formula::Tc(Arc::new(Closure {
            x: c.x.clone(),
            y: c.y.clone(),
            body: r(&c.body),
            from: t(&c.from),
            to: t(&c.to),
        })),
    }
}
