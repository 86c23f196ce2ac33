//! The standard abbreviation catalog.
//!
//! Operators and named abbreviations live in `prelude.set`, which is parsed
//! once on first use. Binding forms are built into the parser; they appear in
//! [`entries`] with an example instance so every entry can be expanded and
//! checked uniformly.

use std::sync::OnceLock;

use crate::parser::{parse_expr, parse_formula, parse_theory_file, Definitions, ParseOptions};
use crate::safety::{check_supported_formula, check_supported_term, SafetyError, TheoryConfig};
use crate::syntax::{Expr, Formula, Term, Var};

/// Source of the standard prelude.
pub const PRELUDE: &str = include_str!("prelude.set");

/// The prelude's definition table.
pub fn prelude() -> &'static Definitions {
    static DEFS: OnceLock<Definitions> = OnceLock::new();
    DEFS.get_or_init(|| {
        parse_theory_file(PRELUDE, &Definitions::new(), &TheoryConfig::rst(), Some("prelude.set"))
            .unwrap_or_else(|e| panic!("prelude does not parse: {e}"))
            .definitions
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryKind {
    /// Built into the grammar.
    Syntax,
    /// A named definition in the prelude.
    Definition,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    /// Concrete notation.
    pub notation: &'static str,
    pub kind: EntryKind,
    /// Name of the prelude definition, if any.
    pub definition: Option<&'static str>,
    /// A representative instance over free variables, in concrete syntax.
    pub example: &'static str,
    /// Side condition under which the expansion is a valid term.
    pub side_condition: Option<&'static str>,
}

impl CatalogEntry {
    /// The example expanded into core syntax.
    pub fn expansion(&self) -> Term {
        match parse_expr(self.example, prelude(), &ParseOptions::default()) {
            Ok(p) => match p.value {
                Expr::Term(t) => t,
                Expr::Formula(_) => unreachable!("catalog examples are terms"),
            },
            Err(e) => panic!("catalog example `{}` does not parse: {e}", self.example),
        }
    }
}

const fn syntax(
    name: &'static str,
    notation: &'static str,
    example: &'static str,
    side_condition: Option<&'static str>,
) -> CatalogEntry {
    CatalogEntry { name, notation, kind: EntryKind::Syntax, definition: None, example, side_condition }
}

const fn def(name: &'static str, notation: &'static str, definition: &'static str, example: &'static str) -> CatalogEntry {
    CatalogEntry {
        name,
        notation,
        kind: EntryKind::Definition,
        definition: Some(definition),
        example,
        side_condition: None,
    }
}

static ENTRIES: [CatalogEntry; 22] = [
    syntax("empty", "0", "0", None),
    syntax("enum", "{t1, ..., tn}", "{a, b, c}", None),
    def("pair", "<t, s>", "pair", "<t, s>"),
    syntax("tuple", "<t1, ..., tn>", "<a, b, c>", None),
    syntax("sep", "{x in t | φ}", "{x in t | ~(x = a)}", Some("φ ≻ ∅ and x ∉ Fv(t)")),
    syntax("repl", "{t | x in s}", "{{x, a} | x in s}", Some("x ∉ Fv(s)")),
    def("times", "s times t", "times", "s times t"),
    syntax("tuplecomp", "{<x1, ..., xn> | φ}", "{<a, b> | a in s & b in a}", Some("φ ≻ {x1, ..., xn}")),
    def("cap", "s cap t", "cap", "s cap t"),
    def("cup", "s cup t", "cup", "s cup t"),
    def("minus", "s \\ t", "minus", "s \\ t"),
    def("succ", "S(x)", "S", "S(x)"),
    def("union", "⋃t", "Union", "⋃t"),
    def("inter", "⋂t", "Inter", "⋂t"),
    syntax("iota", "iota x. φ", "iota x. x in s & x = a", Some("φ ≻ {x}")),
    def("p1", "P1(z)", "P1", "P1(z)"),
    def("p2", "P2(z)", "P2", "P2(z)"),
    syntax("lambda", "lambda x in s. t", "lambda x in s. {x}", Some("x ∉ Fv(s)")),
    def("app", "f(x)", "app", "f(x)"),
    def("dom", "Dom(f)", "Dom", "Dom(f)"),
    def("rng", "Rng(f)", "Rng", "Rng(f)"),
    def("restrict", "f / s", "restrict", "f / s"),
];

/// The 22 catalog entries, in the standard order.
pub fn entries() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn lookup(name: &str) -> Option<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.name == name || e.definition == Some(name))
}

/// Source of the ω term.
pub const OMEGA: &str = "{y | exists x. x = 0 & TC[x, y](y = {z | z = x | z in x})(x, y)}";

/// `ω = {y | ∃x. x = ∅ ∧ (TC_{x,y} y = {z | z = x ∨ z ∈ x})(x, y)}`. Requires the TC clause.
pub fn omega_term() -> Term {
    match parse_expr(OMEGA, prelude(), &ParseOptions::default()) {
        Ok(p) => match p.value {
            Expr::Term(t) => t,
            Expr::Formula(_) => unreachable!(),
        },
        Err(e) => panic!("ω does not parse: {e}"),
    }
}

/// Fails unless `cfg` supports the ω term.
pub fn omega_for(cfg: &TheoryConfig) -> Result<Term, SafetyError> {
    let t = omega_term();
    check_supported_term(&t, cfg)?;
    Ok(t)
}

/// The first two Peano counterparts, in concrete syntax.
pub const PEANO: [&str; 2] = ["0 in HF", "forall x y. x in HF & y in HF -> x cup {y} in HF"];

/// The induction schema; `phi` must be defined as a unary formula abbreviation.
pub const PEANO_INDUCTION: &str =
    "phi(0) & (forall x y. phi(x) & phi(y) -> phi(x cup {y})) -> forall x in HF. phi(x)";

/// The induction schema for the property `φ(x)`.
pub fn peano_induction(phi: &Formula, x: &Var) -> Formula {
    let at = |t: Term| phi.substitute(x, &t);
    let sx = Var::new("x");
    let sy = Var::new("y");
    let avoid = phi.free_vars();
    let (vx, vy) = (
        if avoid.contains(&sx) { crate::syntax::fresh_like(&sx, &avoid) } else { sx },
        if avoid.contains(&sy) { crate::syntax::fresh_like(&sy, &avoid) } else { sy },
    );
    let cup = prelude().get("cup").expect("prelude defines cup");
    let succ = match cup.instantiate(&[
        Term::Var(vx.clone()),
        crate::parser::enumeration(&[Term::Var(vy.clone())]),
    ]) {
        Expr::Term(t) => t,
        Expr::Formula(_) => unreachable!(),
    };
    let hf = Term::Const(crate::syntax::Constant::Hf);
    let step = Formula::forall(
        vx.clone(),
        Formula::forall(
            vy.clone(),
            Formula::implies(
                Formula::and(at(Term::Var(vx.clone())), at(Term::Var(vy.clone()))),
                at(succ),
            ),
        ),
    );
    let conclusion = Formula::forall(
        vx.clone(),
        Formula::implies(Formula::mem(Term::Var(vx.clone()), hf), at(Term::Var(vx))),
    );
    Formula::implies(Formula::and(at(crate::parser::empty_set()), step), conclusion)
}

/// The Peano counterparts, with induction instantiated for `φ(x)`. Requires the HF constant.
pub fn peano_axioms(cfg: &TheoryConfig, phi: &Formula, x: &Var) -> Result<Vec<Formula>, SafetyError> {
    let mut out: Vec<Formula> = PEANO
        .iter()
        .map(|src| {
            parse_formula(src, prelude(), &ParseOptions::default())
                .unwrap_or_else(|e| panic!("axiom `{src}` does not parse: {e}"))
                .value
        })
        .collect();
    out.push(peano_induction(phi, x));
    for f in &out {
        check_supported_formula(f, cfg)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::print_term;
    use crate::safety::validate_term;

    #[test]
    fn prelude_loads() {
        let defs = prelude();
        for name in ["cap", "cup", "minus", "S", "Union", "Inter", "times", "P1", "P2", "app", "Dom", "Rng", "restrict"] {
            assert!(defs.contains(name), "{name}");
        }
    }

    #[test]
    fn every_entry_is_valid_in_rst() {
        assert_eq!(entries().len(), 22);
        for e in entries() {
            let t = e.expansion();
            let v = validate_term(&t, &TheoryConfig::rst()).unwrap();
            assert!(v.is_ok(), "{}: {} {:?}", e.name, print_term(&t, false), v.violations);
        }
    }

    #[test]
    fn cup_expands_as_expected() {
        let t = lookup("cup").unwrap().expansion();
        assert_eq!(print_term(&t, false), "{x | x in s | x in t}");
    }

    #[test]
    fn omega_needs_tc() {
        assert!(omega_for(&TheoryConfig::rst()).is_err());
        let t = omega_for(&TheoryConfig::pzf()).unwrap();
        assert!(validate_term(&t, &TheoryConfig::pzf()).unwrap().is_ok());
    }

    #[test]
    fn peano_mentions_hf() {
        let phi = Formula::eq(Term::var("x"), Term::var("x"));
        assert!(peano_axioms(&TheoryConfig::rst(), &phi, &Var::new("x")).is_err());
        let ax = peano_axioms(&TheoryConfig::rst_omega(), &phi, &Var::new("x")).unwrap();
        assert_eq!(ax.len(), 3);
    }
}
