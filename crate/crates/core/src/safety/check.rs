use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::parser::{print_formula, print_term, readable_goal};
use crate::syntax::{Comprehension, Formula, SourceSpan, Term, Var, VarSet};

use super::derivation::{is_generator_by, powerset_parts, replacement_parts};
use super::{check_supported_formula, check_supported_term, Derivation, Rule, SafetyError, TheoryConfig};

type Memo = HashMap<usize, Vec<(VarSet, Option<Arc<Derivation>>)>>;

/// Goal-directed decision procedure for `φ ≻ X`.
///
/// For a fixed `X` the conjunction split is forced: the left operand must
/// take `X ∩ Fv(left)` and the right the rest (or the mirror image), so every
/// node is visited with a determined goal. Results are memoized per
/// `(subformula, X)`; the keys are node addresses, valid only while the
/// checked tree is borrowed.
pub(crate) struct Checker<'a> {
    cfg: &'a TheoryConfig,
    fv_formula: HashMap<usize, VarSet>,
    fv_term: HashMap<usize, VarSet>,
    memo: Memo,
    /// Comprehension bodies already validated; shared subterms are checked once.
    seen: HashSet<usize>,
}

fn addr<T>(x: &T) -> usize {
    x as *const T as usize
}

impl<'a> Checker<'a> {
    pub(crate) fn new(cfg: &'a TheoryConfig) -> Self {
        Checker {
            cfg,
            fv_formula: HashMap::new(),
            fv_term: HashMap::new(),
            memo: HashMap::new(),
            seen: HashSet::new(),
        }
    }

    pub(crate) fn fv(&mut self, f: &Formula) -> VarSet {
        if let Some(s) = self.fv_formula.get(&addr(f)) {
            return s.clone();
        }
        let s = match f {
            Formula::Mem(a, b) | Formula::Eq(a, b) | Formula::Sub(a, b) => {
                self.fv_t(a).union(&self.fv_t(b))
            }
            Formula::Not(a) => self.fv(a),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                self.fv(a).union(&self.fv(b))
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => self.fv(a).without(v),
            Formula::Tc(c) => {
                let body = self.fv(&c.body).without(&c.x).without(&c.y);
                body.union(&self.fv_t(&c.from)).union(&self.fv_t(&c.to))
            }
        };
        self.fv_formula.insert(addr(f), s.clone());
        s
    }

    fn fv_t(&mut self, t: &Term) -> VarSet {
        match t {
            Term::Var(v) => VarSet::singleton(v.clone()),
            Term::Const(_) => VarSet::new(),
            Term::Compr(c) => {
                if let Some(s) = self.fv_term.get(&addr(t)) {
                    return s.clone();
                }
                let s = self.fv(&c.body).without(&c.binder);
                self.fv_term.insert(addr(t), s.clone());
                s
            }
        }
    }

    /// A derivation of `f ≻ x`, preferring constructive ones.
    pub(crate) fn derive(&mut self, f: &Formula, x: &VarSet) -> Option<Arc<Derivation>> {
        let fv = self.fv(f);
        if !x.is_subset(&fv) {
            return None;
        }
        self.derive_within(f, x)
    }

    /// As [`Self::derive`] for goals already known to be inside `Fv(f)`.
    fn derive_within(&mut self, f: &Formula, x: &VarSet) -> Option<Arc<Derivation>> {
        let key = addr(f);
        if let Some(hit) = self.memo.get(&key).and_then(|v| v.iter().find(|(g, _)| g.len() == x.len() && g == x)) {
            return hit.1.clone();
        }
        let result = self.derive_uncached(f, x);
        self.memo.entry(key).or_default().push((x.clone(), result.clone()));
        result
    }

    /// Splits a goal `x ⊆ Fv(a) ∪ Fv(b)` into `(x ∩ Fv(a), x − Fv(a))`,
    /// touching only the smaller side.
    fn split(&mut self, x: &VarSet, a: &Formula, b: &Formula) -> (VarSet, VarSet) {
        let (fa, fb) = (self.fv(a), self.fv(b));
        let right: VarSet = if fb.len() < x.len() {
            fb.iter().filter(|v| x.contains(v) && !fa.contains(v)).cloned().collect()
        } else {
            x.iter().filter(|v| !fa.contains(v)).cloned().collect()
        };
        (x.difference(&right), right)
    }

    fn derive_uncached(&mut self, f: &Formula, x: &VarSet) -> Option<Arc<Derivation>> {
        let mut found: Option<Arc<Derivation>> = None;
        macro_rules! offer {
            ($d:expr) => {{
                let d: Arc<Derivation> = $d;
                if d.is_evaluable() {
                    return Some(d);
                }
                if found.is_none() {
                    found = Some(d);
                }
            }};
        }
        let node = |rule: Rule, prem: Vec<Arc<Derivation>>| {
            Arc::new(Derivation::new(rule, f.clone(), x.clone(), prem))
        };
        match f {
            Formula::Mem(..) | Formula::Eq(..) | Formula::Sub(..) => {
                if x.is_empty() {
                    return Some(node(Rule::Atomic, vec![]));
                }
                if x.len() == 1 {
                    let v = x.iter().next().expect("singleton");
                    if is_generator_by(f, v, |t| !self.fv_t(t).contains(v)) {
                        return Some(node(Rule::Generator, vec![]));
                    }
                    if let Formula::Sub(Term::Var(s), t) = f {
                        if self.cfg.subseteq_atom && s == v && !self.fv_t(t).contains(v) {
                            return Some(node(Rule::SubsetGenerator, vec![]));
                        }
                    }
                }
            }
            Formula::Not(a) => {
                if x.is_empty() {
                    if let Some(p) = self.derive(a, x) {
                        offer!(node(Rule::Negation, vec![p]));
                    }
                }
            }
            Formula::Or(a, b) => {
                if let (Some(p), Some(q)) = (self.derive(a, x), self.derive(b, x)) {
                    offer!(node(Rule::Disjunction, vec![p, q]));
                }
            }
            Formula::And(a, b) => {
                let (xa, xb) = self.split(x, a, b);
                if let Some(p) = self.derive_within(a, &xa) {
                    if let Some(q) = self.derive_within(b, &xb) {
                        offer!(node(Rule::Conjunction, vec![p, q]));
                    }
                }
                if self.cfg.conjunction_symmetric {
                    let (xb, xa) = self.split(x, b, a);
                    if let Some(q) = self.derive_within(b, &xb) {
                        if let Some(p) = self.derive_within(a, &xa) {
                            offer!(node(Rule::ConjunctionSwapped, vec![p, q]));
                        }
                    }
                }
                if self.cfg.replacement {
                    if let Some((phi, yr, psi)) = replacement_parts(f) {
                        if x.is_disjoint(&self.fv(phi)) && !x.contains(yr) {
                            if let Some(p) = self.derive(psi, x) {
                                offer!(node(Rule::Replacement, vec![p]));
                            }
                        }
                    }
                }
            }
            Formula::Implies(a, b) => {
                if x.is_empty() {
                    if let (Some(p), Some(q)) = (self.derive(a, x), self.derive(b, x)) {
                        offer!(node(Rule::Implication, vec![p, q]));
                    }
                }
            }
            Formula::Exists(y, a) => {
                // x ⊆ Fv(∃y a) already, so only y needs checking.
                let within = self.fv(a).contains(y);
                if let Some(p) = within.then(|| self.derive_within(a, &x.with(y.clone()))).flatten() {
                    offer!(node(Rule::Exists, vec![p]));
                }
            }
            Formula::Forall(v, body) => {
                if let Formula::Implies(p, q) = &**body {
                    if x.is_empty() {
                        if let Some(dp) = self.derive(p, &VarSet::singleton(v.clone())) {
                            if let Some(dq) = self.derive(q, &VarSet::new()) {
                                offer!(node(Rule::BoundedForall, vec![dp, dq]));
                            }
                        }
                    }
                }
                if self.cfg.powerset {
                    if let Some((y, xs, phi)) = powerset_parts(f) {
                        if !self.fv(phi).contains(xs) {
                            let goal = x.without(xs).with(y.clone());
                            if let Some(p) = self.derive(phi, &goal) {
                                offer!(node(Rule::Powerset, vec![p]));
                            }
                        }
                    }
                }
            }
            Formula::Tc(c) => {
                if self.cfg.tc {
                    let params = self.fv(&c.body).without(&c.x).without(&c.y);
                    let ys = VarSet::singleton(c.y.clone());
                    let xs = VarSet::singleton(c.x.clone());
                    let vars: Vec<&Var> = x.iter().collect();
                    match vars.as_slice() {
                        [] => {
                            if let Some(p) = self.derive(&c.body, &ys) {
                                offer!(node(Rule::TcTest, vec![p]));
                            }
                            if let Some(p) = self.derive(&c.body, &xs) {
                                offer!(node(Rule::TcTest, vec![p]));
                            }
                        }
                        [v] => {
                            let v = (*v).clone();
                            if c.to.as_var() == Some(&v)
                                && !self.fv_t(&c.from).contains(&v)
                                && !params.contains(&v)
                            {
                                if let Some(p) = self.derive(&c.body, &ys) {
                                    offer!(node(Rule::TcForward, vec![p]));
                                }
                            }
                            if c.from.as_var() == Some(&v)
                                && !self.fv_t(&c.to).contains(&v)
                                && !params.contains(&v)
                            {
                                if let Some(p) = self.derive(&c.body, &xs) {
                                    offer!(node(Rule::TcBackward, vec![p]));
                                }
                            }
                        }
                        [_, _] => {
                            if let (Some(u), Some(v)) = (c.from.as_var(), c.to.as_var()) {
                                if u != v
                                    && x.contains(u)
                                    && x.contains(v)
                                    && !params.contains(u)
                                    && !params.contains(v)
                                {
                                    let both = xs.union(&ys);
                                    if let Some(p) = self.derive(&c.body, &both) {
                                        offer!(node(Rule::TcPair, vec![p]));
                                    }
                                }
                            }
                        }
                        _ => {}
                    }
                }
            }
        }
        if found.is_none() && self.cfg.separation && x.is_empty() {
            found = Some(node(Rule::Separation, vec![]));
        }
        found
    }

    /// Validates every comprehension inside `t`, outermost first.
    pub(crate) fn validate_term_into(&mut self, t: &Term, out: &mut Validation) {
        match t {
            Term::Var(_) | Term::Const(_) => {}
            Term::Compr(c) => {
                if !self.seen.insert(addr(&*c.body)) {
                    return;
                }
                self.validate_comprehension(c, t, out);
                self.validate_formula_into(&c.body, out);
            }
        }
    }

    fn validate_comprehension(&mut self, c: &Comprehension, t: &Term, out: &mut Validation) {
        let goal = VarSet::singleton(c.binder.clone());
        if let Some(d) = self.derive(&c.body, &goal) {
            out.accepted.push((t.clone(), d));
            return;
        }
        if self.cfg.separation {
            if let Some(p) = self.derive(&c.body, &VarSet::new()) {
                let d = Derivation::new(Rule::SeparationTerm, (*c.body).clone(), goal, vec![p]);
                out.accepted.push((t.clone(), Arc::new(d)));
                return;
            }
        }
        let blame = self.blame(&c.body, &goal).readable();
        out.violations.push(Violation {
            comprehension: t.clone(),
            span: c.span.get().cloned(),
            reason: format!(
                "{{{} | ...}} requires the body to be safe for {{{}}}; blocked at `{}` ≻ {}: {}",
                c.binder,
                c.binder,
                print_formula(&blame.formula, false),
                blame.safe,
                blame.reason
            ),
            blame,
        });
    }

    pub(crate) fn validate_formula_into(&mut self, f: &Formula, out: &mut Validation) {
        match f {
            Formula::Mem(a, b) | Formula::Eq(a, b) | Formula::Sub(a, b) => {
                self.validate_term_into(a, out);
                self.validate_term_into(b, out);
            }
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => {
                self.validate_formula_into(a, out)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                self.validate_formula_into(a, out);
                self.validate_formula_into(b, out);
            }
            Formula::Tc(c) => {
                self.validate_formula_into(&c.body, out);
                self.validate_term_into(&c.from, out);
                self.validate_term_into(&c.to, out);
            }
        }
    }

    /// Locates the subformula that blocks `f ≻ x`. Assumes the goal fails.
    pub(crate) fn blame(&mut self, f: &Formula, x: &VarSet) -> Blame {
        let here = |reason: String| Blame { formula: f.clone(), safe: x.clone(), reason };
        let fv = self.fv(f);
        if !x.is_subset(&fv) {
            return here(format!(
                "{} are not free in the formula",
                x.difference(&fv)
            ));
        }
        match f {
            Formula::Mem(..) | Formula::Eq(..) | Formula::Sub(..) => here(if x.len() > 1 {
                "an atom generates at most one variable".into()
            } else {
                "the atom is not a generator for this variable (needs x = t, t = x, x ∈ t with x ∉ Fv(t), or x ∈ x)".into()
            }),
            Formula::Not(a) => {
                if !x.is_empty() {
                    here("negation only preserves safety for ∅".into())
                } else {
                    self.blame(a, x)
                }
            }
            Formula::Or(a, b) => {
                if self.derive(a, x).is_none() {
                    self.blame(a, x)
                } else {
                    self.blame(b, x)
                }
            }
            Formula::And(a, b) => {
                let fa = self.fv(a);
                let left = x.intersection(&fa);
                let right = x.difference(&fa);
                if self.derive(a, &left).is_none() && !left.is_empty() && self.derive(a, &VarSet::new()).is_some() {
                    here(format!(
                        "no split of {x} between the conjuncts satisfies the variable-disjointness condition"
                    ))
                } else if self.derive(a, &left).is_none() {
                    self.blame(a, &left)
                } else if self.derive(b, &right).is_none() {
                    if right.is_empty() {
                        self.blame(b, &right)
                    } else {
                        here(format!(
                            "the right conjunct cannot supply {right} (and the swapped split fails too)"
                        ))
                    }
                } else {
                    here("conjunction split failed".into())
                }
            }
            Formula::Implies(a, b) => {
                if !x.is_empty() {
                    here("an implication is only ever safe for ∅".into())
                } else if self.derive(a, x).is_none() {
                    self.blame(a, x)
                } else {
                    self.blame(b, x)
                }
            }
            Formula::Exists(y, a) => {
                let goal = x.with(y.clone());
                if self.fv(a).contains(y) {
                    self.blame(a, &goal)
                } else {
                    here(format!("the bound variable {y} does not occur free in the body"))
                }
            }
            Formula::Forall(v, body) => match &**body {
                Formula::Implies(p, q) if x.is_empty() => {
                    let vs = VarSet::singleton(v.clone());
                    if self.derive(p, &vs).is_none() {
                        self.blame(p, &vs)
                    } else {
                        self.blame(q, x)
                    }
                }
                _ => here("only ∀x(φ → ψ) with φ ≻ {x} and ψ ≻ ∅ is safe (for ∅)".into()),
            },
            Formula::Tc(c) => {
                if !self.cfg.tc {
                    return here("TC requires the tc pack".into());
                }
                let ys = VarSet::singleton(c.y.clone());
                if self.derive(&c.body, &ys).is_none()
                    && self.derive(&c.body, &VarSet::singleton(c.x.clone())).is_none()
                {
                    self.blame(&c.body, &ys)
                } else {
                    here(format!(
                        "TC is safe for {x} only when the matching argument is a variable not occurring in the other argument or the step parameters"
                    ))
                }
            }
        }
    }
}

/// Where and why a safety goal fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blame {
    pub formula: Formula,
    pub safe: VarSet,
    pub reason: String,
}

impl Blame {
    fn readable(self) -> Blame {
        let (formula, safe) = readable_goal(&self.formula, &self.safe);
        Blame { formula, safe, reason: self.reason }
    }
}

/// A comprehension whose body is not safe for its binder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub comprehension: Term,
    pub span: Option<SourceSpan>,
    pub reason: String,
    pub blame: Blame,
}

impl Violation {
    pub fn describe(&self) -> String {
        let at = self.span.as_ref().map(|s| format!("{s}: ")).unwrap_or_default();
        format!("{at}{}: {}", print_term(&self.comprehension, false), self.reason)
    }
}

/// Outcome of validating every comprehension in an expression.
#[derive(Clone, Debug, Default)]
pub struct Validation {
    pub accepted: Vec<(Term, Arc<Derivation>)>,
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// True iff every accepted comprehension has a constructive derivation.
    pub fn is_evaluable(&self) -> bool {
        self.accepted.iter().all(|(_, d)| d.is_evaluable())
    }
}

/// Decides `f ≻ x`; on success returns a derivation.
pub fn check_safe(f: &Formula, x: &VarSet, cfg: &TheoryConfig) -> Result<Option<Arc<Derivation>>, SafetyError> {
    check_supported_formula(f, cfg)?;
    Ok(Checker::new(cfg).derive(f, x))
}

/// Explains why `f ≻ x` fails, or `None` if it holds.
pub fn explain_failure(f: &Formula, x: &VarSet, cfg: &TheoryConfig) -> Result<Option<Blame>, SafetyError> {
    check_supported_formula(f, cfg)?;
    let mut c = Checker::new(cfg);
    if c.derive(f, x).is_some() {
        return Ok(None);
    }
    Ok(Some(c.blame(f, x).readable()))
}

/// Checks that every comprehension `{x | φ}` inside `t` has `φ ≻ {x}`.
pub fn validate_term(t: &Term, cfg: &TheoryConfig) -> Result<Validation, SafetyError> {
    check_supported_term(t, cfg)?;
    let mut out = Validation::default();
    Checker::new(cfg).validate_term_into(t, &mut out);
    Ok(out)
}

/// Checks every comprehension occurring inside `f`.
pub fn validate_formula(f: &Formula, cfg: &TheoryConfig) -> Result<Validation, SafetyError> {
    check_supported_formula(f, cfg)?;
    let mut out = Validation::default();
    Checker::new(cfg).validate_formula_into(f, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Formula as F;

    fn v(s: &str) -> Term {
        Term::var(s)
    }

    fn vs(names: &[&str]) -> VarSet {
        names.iter().copied().collect()
    }

    fn holds(f: &Formula, x: &[&str], cfg: &TheoryConfig) -> bool {
        let d = check_safe(f, &vs(x), cfg).unwrap();
        if let Some(d) = &d {
            d.verify(cfg).unwrap();
            assert_eq!(d.safe, vs(x));
        }
        d.is_some()
    }

    #[test]
    fn generators() {
        let rst = TheoryConfig::rst();
        assert!(holds(&F::eq(v("x"), v("y")), &["x"], &rst));
        assert!(holds(&F::eq(v("x"), v("y")), &["y"], &rst));
        assert!(!holds(&F::eq(v("x"), v("y")), &["x", "y"], &rst));
        assert!(holds(&F::mem(v("x"), v("x")), &["x"], &rst));
        assert!(!holds(&F::mem(v("y"), v("x")), &["x"], &rst));
        let t = Term::compr("z", F::mem(v("z"), v("x")));
        assert!(!holds(&F::mem(v("x"), t), &["x"], &rst));
    }

    #[test]
    fn negation_preserves_only_empty() {
        let rst = TheoryConfig::rst();
        let f = F::not(F::mem(v("x"), v("y")));
        assert!(!holds(&f, &["x"], &rst));
        assert!(holds(&f, &[], &rst));
        let blame = explain_failure(&f, &vs(&["x"]), &rst).unwrap().unwrap();
        assert!(blame.reason.contains("negation"));
    }

    #[test]
    fn exists_through_symmetric_conjunction() {
        let f = F::exists("y", F::and(F::mem(v("x"), v("y")), F::mem(v("y"), v("z"))));
        assert!(holds(&f, &["x"], &TheoryConfig::rst()));
        let d = check_safe(&f, &vs(&["x"]), &TheoryConfig::rst()).unwrap().unwrap();
        assert_eq!(d.rule, Rule::Exists);
        assert_eq!(d.premise(0).rule, Rule::ConjunctionSwapped);
        let one_sided = TheoryConfig { conjunction_symmetric: false, ..TheoryConfig::rst() };
        assert!(!holds(&f, &["x"], &one_sided));
    }

    #[test]
    fn bounded_forall() {
        let f = F::forall("y", F::implies(F::mem(v("y"), v("t")), F::mem(v("x"), v("y"))));
        assert!(holds(&f, &[], &TheoryConfig::rst()));
        let g = F::forall("y", F::mem(v("x"), v("y")));
        assert!(!holds(&g, &[], &TheoryConfig::rst()));
    }

    #[test]
    fn unsupported_constructs() {
        let tc = F::tc("x", "y", F::mem(v("y"), v("x")), v("a"), v("b"));
        assert!(matches!(
            check_safe(&tc, &VarSet::new(), &TheoryConfig::rst()),
            Err(SafetyError::UnsupportedConstruct { .. })
        ));
        assert!(holds(&tc, &[], &TheoryConfig::pzf()));
        assert!(holds(&tc, &["b"], &TheoryConfig::pzf()));
        // y ∈ x does not generate x, so there is no backward direction
        assert!(!holds(&tc, &["a"], &TheoryConfig::pzf()));
        assert!(!holds(&tc, &["a", "b"], &TheoryConfig::pzf()));
    }

    #[test]
    fn tc_pair_when_step_relation_enumerable() {
        let body = F::exists(
            "p",
            F::and(
                F::mem(v("p"), v("g")),
                F::eq(v("p"), Term::compr("q", F::or(F::eq(v("q"), v("x")), F::eq(v("q"), v("y"))))),
            ),
        );
        let tc = F::tc("x", "y", body, v("a"), v("b"));
        let pzf = TheoryConfig::pzf();
        // the step body cannot generate x or y here
        assert!(!holds(&tc, &["a", "b"], &pzf));
        let body2 = F::and(F::mem(v("x"), v("g")), F::mem(v("y"), v("x")));
        let tc2 = F::tc("x", "y", body2, v("a"), v("b"));
        assert!(holds(&tc2, &["a", "b"], &pzf));
    }

    #[test]
    fn separation_term_rule() {
        let t = Term::compr("x", F::not(F::mem(v("x"), v("y"))));
        let rst = validate_term(&t, &TheoryConfig::rst()).unwrap();
        assert!(!rst.is_ok());
        let sep_cfg = TheoryConfig::rst().with(super::super::Pack::Separation);
        let sep = validate_term(&t, &sep_cfg).unwrap();
        assert!(sep.is_ok());
        assert!(!sep.is_evaluable());
        sep.accepted[0].1.verify(&sep_cfg).unwrap();
    }

    #[test]
    fn domain_property() {
        assert!(!holds(&F::mem(v("x"), v("y")), &["z"], &TheoryConfig::rst()));
    }
}
