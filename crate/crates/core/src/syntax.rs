//! Abstract syntax for terms and formulas.
//!
//! Terms and formulas are defined by simultaneous recursion: a comprehension
//! term `{x | φ}` contains a formula, and atomic formulas contain terms.
//! Children are reference counted, so cloning a subtree is O(1) and values can
//! be shared freely across threads.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use im::OrdSet;

/// Prefix of machine-generated variable names. The lexer rejects it, so
/// generated names never collide with user-written ones.
pub const RESERVED_PREFIX: char = '$';

/// A variable name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: impl AsRef<str>) -> Self {
        Var(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True for names produced by [`fresh_var`] and friends.
    pub fn is_reserved(&self) -> bool {
        self.0.starts_with(RESERVED_PREFIX)
    }

    /// The readable stem of a name: reserved prefix and trailing digits removed.
    pub fn stem(&self) -> &str {
        let s = self.0.trim_start_matches(RESERVED_PREFIX);
        let s = s.trim_end_matches(|c: char| c.is_ascii_digit());
        if s.is_empty() {
            "v"
        } else {
            s
        }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

/// A finite set of variables.
///
/// Persistent: clones share structure, so goals that differ by a few
/// variables cost `O(log n)` to derive from one another.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarSet(OrdSet<Var>);

impl VarSet {
    pub fn new() -> Self {
        VarSet(OrdSet::new())
    }

    pub fn singleton(v: Var) -> Self {
        VarSet(OrdSet::unit(v))
    }

    pub fn insert(&mut self, v: Var) -> bool {
        self.0.insert(v).is_none()
    }

    pub fn remove(&mut self, v: &Var) -> bool {
        self.0.remove(v).is_some()
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.0.contains(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Var> + '_ {
        self.0.iter()
    }

    /// Same set, possibly the same allocation.
    pub fn ptr_eq(&self, other: &VarSet) -> bool {
        self.0.ptr_eq(&other.0)
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        let (big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        let mut out = big.clone();
        out.extend(small);
        out
    }

    pub fn intersection(&self, other: &VarSet) -> VarSet {
        let (big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        if small.iter().all(|v| big.contains(v)) {
            return small.clone();
        }
        small.iter().filter(|v| big.contains(v)).cloned().collect()
    }

    pub fn difference(&self, other: &VarSet) -> VarSet {
        if other.len() < self.len() {
            let mut out = self.clone();
            for v in other {
                out.remove(v);
            }
            out
        } else {
            self.iter().filter(|v| !other.contains(v)).cloned().collect()
        }
    }

    pub fn without(&self, v: &Var) -> VarSet {
        let mut s = self.clone();
        s.remove(v);
        s
    }

    pub fn with(&self, v: Var) -> VarSet {
        let mut s = self.clone();
        s.insert(v);
        s
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        self.len() <= other.len() && self.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VarSet) -> bool {
        let (big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        !small.iter().any(|v| big.contains(v))
    }

    pub fn extend(&mut self, other: &VarSet) {
        for v in other {
            self.0.insert(v.clone());
        }
    }

    pub fn to_vec(&self) -> Vec<Var> {
        self.0.iter().cloned().collect()
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<Var> for VarSet {
    fn from_iter<I: IntoIterator<Item = Var>>(iter: I) -> Self {
        VarSet(iter.into_iter().collect())
    }
}

impl<'a> FromIterator<&'a str> for VarSet {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        VarSet(iter.into_iter().map(Var::new).collect())
    }
}

impl IntoIterator for VarSet {
    type Item = Var;
    type IntoIter = im::ordset::ConsumingIter<Var>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a VarSet {
    type Item = &'a Var;
    type IntoIter = im::ordset::Iter<'a, Var>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Location of a construct in source text. Lines and columns are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub file: Option<Arc<str>>,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        write!(
            f,
            "{}:{}-{}:{}",
            self.start_line, self.start_col, self.end_line, self.end_col
        )
    }
}

/// An optional source span that never takes part in equality, hashing or
/// ordering of the node carrying it.
#[derive(Clone, Default)]
pub struct SpanTag(pub Option<Arc<SourceSpan>>);

impl SpanTag {
    pub fn none() -> Self {
        SpanTag(None)
    }

    pub fn get(&self) -> Option<&SourceSpan> {
        self.0.as_deref()
    }
}

impl PartialEq for SpanTag {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for SpanTag {}

impl Hash for SpanTag {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Debug for SpanTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get() {
            Some(s) => write!(f, "@{s}"),
            None => f.write_str("@?"),
        }
    }
}

/// Constant symbols of the signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    /// The collection of all hereditarily finite sets.
    Hf,
}

impl Constant {
    pub fn name(self) -> &'static str {
        match self {
            Constant::Hf => "HF",
        }
    }
}

/// A set comprehension `{binder | body}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Comprehension {
    pub binder: Var,
    pub body: Arc<Formula>,
    pub span: SpanTag,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Const(Constant),
    Compr(Comprehension),
}

/// `(TC_{x,y} body)(from, to)`: there is a chain `from = z0, z1, ..., zk = to`
/// with `k ≥ 1` and `body[x := z(i), y := z(i+1)]` for every step.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Closure {
    pub x: Var,
    pub y: Var,
    pub body: Arc<Formula>,
    pub from: Term,
    pub to: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Mem(Term, Term),
    Eq(Term, Term),
    Sub(Term, Term),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Exists(Var, Arc<Formula>),
    Forall(Var, Arc<Formula>),
    Tc(Arc<Closure>),
}

/// Either kind of expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Term(Term),
    Formula(Formula),
}

impl Term {
    pub fn var(name: impl AsRef<str>) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn compr(binder: impl Into<Var>, body: Formula) -> Term {
        Term::Compr(Comprehension {
            binder: binder.into(),
            body: Arc::new(body),
            span: SpanTag::none(),
        })
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> VarSet {
        let mut out = VarSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut VarSet) {
        match self {
            Term::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::Compr(c) => {
                bound.push(c.binder.clone());
                c.body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    fn collect_all(&self, out: &mut VarSet) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::Compr(c) => {
                out.insert(c.binder.clone());
                c.body.collect_all(out);
            }
        }
    }

    /// Every variable name occurring in the term, free or bound.
    pub fn all_vars(&self) -> VarSet {
        let mut out = VarSet::new();
        self.collect_all(&mut out);
        out
    }

    /// Capture-avoiding substitution of `replacement` for the free occurrences of `var`.
    pub fn substitute(&self, var: &Var, replacement: &Term) -> Term {
        let mut map = Subst::new();
        map.insert(var.clone(), replacement.clone());
        self.substitute_all(&map)
    }

    /// Simultaneous capture-avoiding substitution.
    pub fn substitute_all(&self, map: &Subst) -> Term {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::Compr(c) => {
                let (binders, body) = subst_under(std::slice::from_ref(&c.binder), &c.body, map);
                Term::Compr(Comprehension {
                    binder: binders.into_iter().next().expect("one binder"),
                    body,
                    span: c.span.clone(),
                })
            }
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        AlphaCtx::default().term(self, other)
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::Compr(c) => 1 + c.body.size(),
        }
    }
}

impl Formula {
    pub fn mem(a: Term, b: Term) -> Formula {
        Formula::Mem(a, b)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn not(a: Formula) -> Formula {
        Formula::Not(Arc::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn exists(v: impl Into<Var>, body: Formula) -> Formula {
        Formula::Exists(v.into(), Arc::new(body))
    }

    pub fn forall(v: impl Into<Var>, body: Formula) -> Formula {
        Formula::Forall(v.into(), Arc::new(body))
    }

    pub fn tc(x: impl Into<Var>, y: impl Into<Var>, body: Formula, from: Term, to: Term) -> Formula {
        Formula::Tc(Arc::new(Closure {
            x: x.into(),
            y: y.into(),
            body: Arc::new(body),
            from,
            to,
        }))
    }

    /// Conjunction of a non-empty list, nested to the left.
    pub fn and_all(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    /// Disjunction of a non-empty list, nested to the left.
    pub fn or_all(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::or)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Mem(..) | Formula::Eq(..) | Formula::Sub(..))
    }

    pub fn free_vars(&self) -> VarSet {
        let mut out = VarSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut VarSet) {
        match self {
            Formula::Mem(a, b) | Formula::Eq(a, b) | Formula::Sub(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                bound.push(v.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
            Formula::Tc(c) => {
                bound.push(c.x.clone());
                bound.push(c.y.clone());
                c.body.collect_free(bound, out);
                bound.pop();
                bound.pop();
                c.from.collect_free(bound, out);
                c.to.collect_free(bound, out);
            }
        }
    }

    fn collect_all(&self, out: &mut VarSet) {
        match self {
            Formula::Mem(a, b) | Formula::Eq(a, b) | Formula::Sub(a, b) => {
                a.collect_all(out);
                b.collect_all(out);
            }
            Formula::Not(a) => a.collect_all(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_all(out);
                b.collect_all(out);
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                out.insert(v.clone());
                a.collect_all(out);
            }
            Formula::Tc(c) => {
                out.insert(c.x.clone());
                out.insert(c.y.clone());
                c.body.collect_all(out);
                c.from.collect_all(out);
                c.to.collect_all(out);
            }
        }
    }

    pub fn all_vars(&self) -> VarSet {
        let mut out = VarSet::new();
        self.collect_all(&mut out);
        out
    }

    pub fn substitute(&self, var: &Var, replacement: &Term) -> Formula {
        let mut map = Subst::new();
        map.insert(var.clone(), replacement.clone());
        self.substitute_all(&map)
    }

    pub fn substitute_all(&self, map: &Subst) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        let rc = |f: &Arc<Formula>| Arc::new(f.substitute_all(map));
        match self {
            Formula::Mem(a, b) => Formula::Mem(a.substitute_all(map), b.substitute_all(map)),
            Formula::Eq(a, b) => Formula::Eq(a.substitute_all(map), b.substitute_all(map)),
            Formula::Sub(a, b) => Formula::Sub(a.substitute_all(map), b.substitute_all(map)),
            Formula::Not(a) => Formula::Not(rc(a)),
            Formula::And(a, b) => Formula::And(rc(a), rc(b)),
            Formula::Or(a, b) => Formula::Or(rc(a), rc(b)),
            Formula::Implies(a, b) => Formula::Implies(rc(a), rc(b)),
            Formula::Exists(v, a) => {
                let (vs, body) = subst_under(std::slice::from_ref(v), a, map);
                Formula::Exists(vs.into_iter().next().expect("one binder"), body)
            }
            Formula::Forall(v, a) => {
                let (vs, body) = subst_under(std::slice::from_ref(v), a, map);
                Formula::Forall(vs.into_iter().next().expect("one binder"), body)
            }
            Formula::Tc(c) => {
                let (vs, body) = subst_under(&[c.x.clone(), c.y.clone()], &c.body, map);
                let mut vs = vs.into_iter();
                Formula::Tc(Arc::new(Closure {
                    x: vs.next().expect("x binder"),
                    y: vs.next().expect("y binder"),
                    body,
                    from: c.from.substitute_all(map),
                    to: c.to.substitute_all(map),
                }))
            }
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        AlphaCtx::default().formula(self, other)
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Mem(a, b) | Formula::Eq(a, b) | Formula::Sub(a, b) => 1 + a.size() + b.size(),
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
            Formula::Exists(_, a) | Formula::Forall(_, a) => 1 + a.size(),
            Formula::Tc(c) => 1 + c.body.size() + c.from.size() + c.to.size(),
        }
    }
}

impl Expr {
    pub fn free_vars(&self) -> VarSet {
        match self {
            Expr::Term(t) => t.free_vars(),
            Expr::Formula(f) => f.free_vars(),
        }
    }

    pub fn all_vars(&self) -> VarSet {
        match self {
            Expr::Term(t) => t.all_vars(),
            Expr::Formula(f) => f.all_vars(),
        }
    }

    pub fn substitute(&self, var: &Var, replacement: &Term) -> Expr {
        match self {
            Expr::Term(t) => Expr::Term(t.substitute(var, replacement)),
            Expr::Formula(f) => Expr::Formula(f.substitute(var, replacement)),
        }
    }

    pub fn substitute_all(&self, map: &Subst) -> Expr {
        match self {
            Expr::Term(t) => Expr::Term(t.substitute_all(map)),
            Expr::Formula(f) => Expr::Formula(f.substitute_all(map)),
        }
    }

    pub fn alpha_eq(&self, other: &Expr) -> bool {
        match (self, other) {
            (Expr::Term(a), Expr::Term(b)) => a.alpha_eq(b),
            (Expr::Formula(a), Expr::Formula(b)) => a.alpha_eq(b),
            _ => false,
        }
    }
}

/// A simultaneous substitution.
pub type Subst = BTreeMap<Var, Term>;

/// Substitutes under `binders`, renaming any binder that would capture a free
/// variable of the substituted terms.
fn subst_under(binders: &[Var], body: &Arc<Formula>, map: &Subst) -> (Vec<Var>, Arc<Formula>) {
    let body_fv = body.free_vars();
    let mut inner: Subst = map
        .iter()
        .filter(|(k, _)| !binders.contains(k) && body_fv.contains(k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if inner.is_empty() {
        return (binders.to_vec(), body.clone());
    }
    let mut range_fv = VarSet::new();
    for t in inner.values() {
        range_fv.extend(&t.free_vars());
    }
    let mut avoid = range_fv.union(&body_fv);
    avoid.extend(&inner.keys().cloned().collect());
    avoid.extend(&binders.iter().cloned().collect());
    let mut out = Vec::with_capacity(binders.len());
    for b in binders {
        if range_fv.contains(b) {
            let fresh = fresh_like(b, &avoid);
            avoid.insert(fresh.clone());
            inner.insert(b.clone(), Term::Var(fresh.clone()));
            out.push(fresh);
        } else {
            out.push(b.clone());
        }
    }
    (out, Arc::new(body.substitute_all(&inner)))
}

/// A reserved variable name not in `avoid`. Deterministic in `avoid`.
pub fn fresh_var(avoid: &VarSet) -> Var {
    fresh_named("v", avoid)
}

/// A reserved variable name derived from `hint`'s stem and not in `avoid`.
pub fn fresh_like(hint: &Var, avoid: &VarSet) -> Var {
    fresh_named(hint.stem(), avoid)
}

pub fn fresh_named(stem: &str, avoid: &VarSet) -> Var {
    let base = format!("{RESERVED_PREFIX}{stem}");
    let first = Var::new(&base);
    if !avoid.contains(&first) {
        return first;
    }
    (1u64..)
        .map(|i| Var::new(format!("{base}{i}")))
        .find(|v| !avoid.contains(v))
        .expect("unbounded supply of names")
}

/// Binder correspondence for α-equivalence. Each entry pairs a binder on the
/// left with the binder at the same depth on the right.
#[derive(Default)]
struct AlphaCtx {
    scope: Vec<(Var, Var)>,
}

impl AlphaCtx {
    fn var(&self, a: &Var, b: &Var) -> bool {
        for (l, r) in self.scope.iter().rev() {
            if l == a || r == b {
                return l == a && r == b;
            }
        }
        a == b
    }

    fn bind<T>(&mut self, pairs: &[(Var, Var)], f: impl FnOnce(&mut Self) -> T) -> T {
        let n = self.scope.len();
        self.scope.extend(pairs.iter().cloned());
        let out = f(self);
        self.scope.truncate(n);
        out
    }

    fn term(&mut self, a: &Term, b: &Term) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => self.var(x, y),
            (Term::Const(x), Term::Const(y)) => x == y,
            (Term::Compr(x), Term::Compr(y)) => {
                self.bind(&[(x.binder.clone(), y.binder.clone())], |s| s.formula(&x.body, &y.body))
            }
            _ => false,
        }
    }

    fn formula(&mut self, a: &Formula, b: &Formula) -> bool {
        use Formula::*;
        match (a, b) {
            (Mem(a1, a2), Mem(b1, b2)) | (Eq(a1, a2), Eq(b1, b2)) | (Sub(a1, a2), Sub(b1, b2)) => {
                self.term(a1, b1) && self.term(a2, b2)
            }
            (Not(x), Not(y)) => self.formula(x, y),
            (And(a1, a2), And(b1, b2))
            | (Or(a1, a2), Or(b1, b2))
            | (Implies(a1, a2), Implies(b1, b2)) => self.formula(a1, b1) && self.formula(a2, b2),
            (Exists(u, x), Exists(v, y)) | (Forall(u, x), Forall(v, y)) => {
                self.bind(&[(u.clone(), v.clone())], |s| s.formula(x, y))
            }
            (Tc(c), Tc(d)) => {
                self.term(&c.from, &d.from)
                    && self.term(&c.to, &d.to)
                    && self.bind(
                        &[(c.x.clone(), d.x.clone()), (c.y.clone(), d.y.clone())],
                        |s| s.formula(&c.body, &d.body),
                    )
            }
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Term {
        Term::var(s)
    }

    fn vs(names: &[&str]) -> VarSet {
        names.iter().copied().collect()
    }

    #[test]
    fn free_vars_of_comprehension_and_tc() {
        let t = Term::compr("x", Formula::mem(v("x"), v("y")));
        assert_eq!(t.free_vars(), vs(&["y"]));
        let f = Formula::tc("x", "y", Formula::mem(v("x"), v("y")), v("s"), v("t"));
        assert_eq!(f.free_vars(), vs(&["s", "t"]));
        assert_eq!(Formula::mem(v("x"), v("x")).free_vars(), vs(&["x"]));
    }

    #[test]
    fn substitution_renames_to_avoid_capture() {
        let t = Term::compr("x", Formula::mem(v("x"), v("y")));
        let plain = t.substitute(&Var::new("y"), &v("z"));
        assert_eq!(plain, Term::compr("x", Formula::mem(v("x"), v("z"))));

        let captured = t.substitute(&Var::new("y"), &v("x"));
        let Term::Compr(c) = &captured else { panic!("comprehension expected") };
        assert_ne!(c.binder, Var::new("x"));
        assert_eq!(captured.free_vars(), vs(&["x"]));
        let expected = Term::compr("w", Formula::mem(v("w"), v("x")));
        assert!(captured.alpha_eq(&expected));
    }

    #[test]
    fn substitution_of_terms_for_variables() {
        let empty = Term::compr("x", Formula::mem(v("x"), v("x")));
        let f = Formula::mem(v("x"), v("x"));
        assert_eq!(
            f.substitute(&Var::new("x"), &empty),
            Formula::mem(empty.clone(), empty)
        );
    }

    #[test]
    fn simultaneous_substitution_swaps() {
        let f = Formula::mem(v("a"), v("b"));
        let mut m = Subst::new();
        m.insert(Var::new("a"), v("b"));
        m.insert(Var::new("b"), v("a"));
        assert_eq!(f.substitute_all(&m), Formula::mem(v("b"), v("a")));
    }

    #[test]
    fn alpha_equivalence() {
        let a = Term::compr("x", Formula::mem(v("x"), v("y")));
        let b = Term::compr("z", Formula::mem(v("z"), v("y")));
        let c = Term::compr("z", Formula::mem(v("z"), v("w")));
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
        let e1 = Formula::exists("x", Formula::eq(v("x"), v("y")));
        let e2 = Formula::exists("y", Formula::eq(v("y"), v("y")));
        assert!(!e1.alpha_eq(&e2));
        let t1 = Formula::tc("x", "y", Formula::mem(v("y"), v("x")), v("a"), v("b"));
        let t2 = Formula::tc("p", "q", Formula::mem(v("q"), v("p")), v("a"), v("b"));
        let t3 = Formula::tc("p", "q", Formula::mem(v("p"), v("q")), v("a"), v("b"));
        assert!(t1.alpha_eq(&t2));
        assert!(!t1.alpha_eq(&t3));
    }

    #[test]
    fn fresh_names() {
        let first = fresh_var(&VarSet::new());
        assert_eq!(first, fresh_var(&VarSet::new()));
        assert!(first.is_reserved());
        let second = fresh_var(&VarSet::singleton(first.clone()));
        assert_ne!(first, second);
        let x = fresh_var(&vs(&["x"]));
        assert_ne!(x, Var::new("x"));
    }

    #[test]
    fn stems() {
        assert_eq!(Var::new("$x12").stem(), "x");
        assert_eq!(Var::new("abc").stem(), "abc");
        assert_eq!(Var::new("$1").stem(), "v");
    }
}
