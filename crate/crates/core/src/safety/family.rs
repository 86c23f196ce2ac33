use std::fmt;

use crate::syntax::{Formula, Term, VarSet};

use super::derivation::{is_generator, powerset_parts, replacement_parts};
use super::{check_supported_formula, SafetyError, TheoryConfig};

/// A downward-closed family of variable sets, stored as its maximal members.
///
/// `X` belongs to the family iff `X ⊆ M` for some stored `M`. An empty
/// antichain means no set (not even `∅`) is safe.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct SafetyFamily {
    maximal: Vec<VarSet>,
}

impl SafetyFamily {
    /// The family with no members.
    pub fn none() -> Self {
        SafetyFamily { maximal: Vec::new() }
    }

    /// The family `{∅}`.
    pub fn empty_only() -> Self {
        SafetyFamily { maximal: vec![VarSet::new()] }
    }

    /// Builds the family generated by `candidates`, keeping only maximal sets.
    pub fn from_candidates(candidates: impl IntoIterator<Item = VarSet>) -> Self {
        let mut all: Vec<VarSet> = candidates.into_iter().collect();
        all.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        all.dedup();
        let mut maximal: Vec<VarSet> = Vec::new();
        for c in all {
            if !maximal.iter().any(|m| c.is_subset(m)) {
                maximal.push(c);
            }
        }
        maximal.sort();
        SafetyFamily { maximal }
    }

    pub fn maximal(&self) -> &[VarSet] {
        &self.maximal
    }

    pub fn is_empty(&self) -> bool {
        self.maximal.is_empty()
    }

    pub fn contains(&self, x: &VarSet) -> bool {
        self.maximal.iter().any(|m| x.is_subset(m))
    }

    fn with_empty(self) -> Self {
        if self.is_empty() {
            SafetyFamily::empty_only()
        } else {
            self
        }
    }
}

impl fmt::Debug for SafetyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SafetyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, m) in self.maximal.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("]")
    }
}

/// The family of all `X` with `f ≻ X`, computed bottom-up.
///
/// The antichain can grow exponentially in the number of independent
/// conjuncts; use [`super::check_safe`] to decide a single goal.
pub fn safe_sets(f: &Formula, cfg: &TheoryConfig) -> Result<SafetyFamily, SafetyError> {
    check_supported_formula(f, cfg)?;
    Ok(family(f, cfg).1)
}

fn family(f: &Formula, cfg: &TheoryConfig) -> (VarSet, SafetyFamily) {
    let (fv, fam) = family_inner(f, cfg);
    let fam = if cfg.separation { fam.with_empty() } else { fam };
    (fv, fam)
}

fn family_inner(f: &Formula, cfg: &TheoryConfig) -> (VarSet, SafetyFamily) {
    match f {
        Formula::Mem(a, b) | Formula::Eq(a, b) | Formula::Sub(a, b) => {
            let fv = a.free_vars().union(&b.free_vars());
            let mut cands = vec![VarSet::new()];
            for v in fv.iter() {
                let sub_gen = matches!(f, Formula::Sub(Term::Var(s), t)
                    if cfg.subseteq_atom && s == v && !t.free_vars().contains(v));
                if is_generator(f, v) || sub_gen {
                    cands.push(VarSet::singleton(v.clone()));
                }
            }
            (fv, SafetyFamily::from_candidates(cands))
        }
        Formula::Not(a) => {
            let (fv, fa) = family(a, cfg);
            let fam = if fa.is_empty() { SafetyFamily::none() } else { SafetyFamily::empty_only() };
            (fv, fam)
        }
        Formula::Or(a, b) => {
            let (fva, fa) = family(a, cfg);
            let (fvb, fb) = family(b, cfg);
            let cands = fa
                .maximal
                .iter()
                .flat_map(|x| fb.maximal.iter().map(move |y| x.intersection(y)))
                .collect::<Vec<_>>();
            (fva.union(&fvb), SafetyFamily::from_candidates(cands))
        }
        Formula::And(a, b) => {
            let (fva, fa) = family(a, cfg);
            let (fvb, fb) = family(b, cfg);
            let mut cands = Vec::new();
            for x in &fa.maximal {
                for y in &fb.maximal {
                    cands.push(x.union(&y.difference(&fva)));
                    if cfg.conjunction_symmetric {
                        cands.push(x.difference(&fvb).union(y));
                    }
                }
            }
            if cfg.replacement {
                if let Some((phi, yr, psi)) = replacement_parts(f) {
                    let (_, fpsi) = family(psi, cfg);
                    let fv_phi = phi.free_vars();
                    for m in &fpsi.maximal {
                        cands.push(m.difference(&fv_phi).without(yr));
                    }
                }
            }
            (fva.union(&fvb), SafetyFamily::from_candidates(cands))
        }
        Formula::Implies(a, b) => {
            let (fva, fa) = family(a, cfg);
            let (fvb, fb) = family(b, cfg);
            let fam = if !fa.is_empty() && !fb.is_empty() {
                SafetyFamily::empty_only()
            } else {
                SafetyFamily::none()
            };
            (fva.union(&fvb), fam)
        }
        Formula::Exists(y, a) => {
            let (fva, fa) = family(a, cfg);
            let cands = fa
                .maximal
                .iter()
                .filter(|m| m.contains(y))
                .map(|m| m.without(y))
                .collect::<Vec<_>>();
            (fva.without(y), SafetyFamily::from_candidates(cands))
        }
        Formula::Forall(v, body) => {
            let fvb = body.free_vars();
            let mut cands = Vec::new();
            if let Formula::Implies(p, q) = &**body {
                let (_, fp) = family(p, cfg);
                let (_, fq) = family(q, cfg);
                if fp.contains(&VarSet::singleton(v.clone())) && !fq.is_empty() {
                    cands.push(VarSet::new());
                }
            }
            if cfg.powerset {
                if let Some((y, xs, phi)) = powerset_parts(f) {
                    let (fv_phi, fphi) = family(phi, cfg);
                    if !fv_phi.contains(xs) {
                        for m in fphi.maximal.iter().filter(|m| m.contains(y)) {
                            cands.push(m.without(y).with(xs.clone()));
                        }
                    }
                }
            }
            (fvb.without(v), SafetyFamily::from_candidates(cands))
        }
        Formula::Tc(c) => {
            let (fv_body, fb) = family(&c.body, cfg);
            let params = fv_body.without(&c.x).without(&c.y);
            let fv = params.union(&c.from.free_vars()).union(&c.to.free_vars());
            let mut cands = Vec::new();
            if cfg.tc {
                let ys = VarSet::singleton(c.y.clone());
                let xs = VarSet::singleton(c.x.clone());
                let forward = fb.contains(&ys);
                let backward = fb.contains(&xs);
                if forward || backward {
                    cands.push(VarSet::new());
                }
                if let Some(v) = c.to.as_var() {
                    if forward && !c.from.free_vars().contains(v) && !params.contains(v) {
                        cands.push(VarSet::singleton(v.clone()));
                    }
                }
                if let Some(u) = c.from.as_var() {
                    if backward && !c.to.free_vars().contains(u) && !params.contains(u) {
                        cands.push(VarSet::singleton(u.clone()));
                    }
                }
                if let (Some(u), Some(v)) = (c.from.as_var(), c.to.as_var()) {
                    if u != v
                        && fb.contains(&xs.union(&ys))
                        && !params.contains(u)
                        && !params.contains(v)
                    {
                        cands.push([u.clone(), v.clone()].into_iter().collect());
                    }
                }
            }
            (fv, SafetyFamily::from_candidates(cands))
        }
    }
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

    #[test]
    fn self_membership_generates() {
        let fam = safe_sets(&F::mem(v("x"), v("x")), &TheoryConfig::rst()).unwrap();
        assert_eq!(fam.maximal(), &[vs(&["x"])]);
    }

    #[test]
    fn product_body_accumulates() {
        let pair = Term::compr(
            "p",
            F::or(
                F::eq(v("p"), Term::compr("q", F::eq(v("q"), v("a")))),
                F::eq(
                    v("p"),
                    Term::compr("q", F::or(F::eq(v("q"), v("a")), F::eq(v("q"), v("b")))),
                ),
            ),
        );
        let f = F::and(
            F::and(F::mem(v("a"), v("s")), F::mem(v("b"), v("t"))),
            F::eq(v("x"), pair),
        );
        let fam = safe_sets(&f, &TheoryConfig::rst()).unwrap();
        assert!(fam.contains(&vs(&["a", "b", "x"])));
    }

    #[test]
    fn one_sided_conjunction() {
        let f = F::and(F::mem(v("x"), v("y")), F::mem(v("y"), v("z")));
        let one_sided = TheoryConfig { conjunction_symmetric: false, ..TheoryConfig::rst() };
        // x ∈ y supplies {x} or nothing; y ∈ z's {y} clashes with Fv(x ∈ y)
        assert_eq!(safe_sets(&f, &one_sided).unwrap().maximal(), &[vs(&["x"])]);
        let sym = safe_sets(&f, &TheoryConfig::rst()).unwrap();
        assert!(sym.contains(&vs(&["x", "y"])));
    }

    #[test]
    fn independent_equalities_blow_up() {
        let f = F::and_all((0..4).map(|i| F::eq(v(&format!("x{i}")), v(&format!("y{i}"))))).unwrap();
        let fam = safe_sets(&f, &TheoryConfig::rst()).unwrap();
        assert_eq!(fam.maximal().len(), 16);
    }

    #[test]
    fn separation_adds_empty_everywhere() {
        let f = F::forall("y", F::mem(v("x"), v("y")));
        assert!(safe_sets(&f, &TheoryConfig::rst()).unwrap().is_empty());
        let sep = TheoryConfig::rst().with(super::super::Pack::Separation);
        assert_eq!(safe_sets(&f, &sep).unwrap(), SafetyFamily::empty_only());
    }
}
