//! Surface syntax before abbreviation expansion.

#![allow(dead_code)]

use super::lexer::Pos;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Span {
    pub start: Pos,
    pub end: Pos,
}

impl Span {
    pub fn join(self, other: Span) -> Span {
        Span { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum BinOp {
    Cup,
    Cap,
    Minus,
    Times,
    Restrict,
}

impl BinOp {
    pub fn macro_name(self) -> &'static str {
        match self {
            BinOp::Cup => "cup",
            BinOp::Cap => "cap",
            BinOp::Minus => "minus",
            BinOp::Times => "times",
            BinOp::Restrict => "restrict",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum BigOp {
    Union,
    Inter,
}

impl BigOp {
    pub fn macro_name(self) -> &'static str {
        match self {
            BigOp::Union => "Union",
            BigOp::Inter => "Inter",
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum STerm {
    /// A variable or a nullary abbreviation.
    Name(Ident),
    Hf(Span),
    Empty(Span),
    Numeral(u64, Span),
    Enum(Vec<STerm>, Span),
    Tuple(Vec<STerm>, Span),
    Compr { binder: Ident, body: Box<SFormula>, span: Span },
    /// `{x ∈ s | φ}`
    Sep { binder: Ident, set: Box<STerm>, body: Box<SFormula>, span: Span },
    /// `{t | x ∈ s}`
    Repl { head: Box<STerm>, var: Ident, set: Box<STerm>, span: Span },
    /// `{⟨x1, ..., xn⟩ | φ}`
    TupleCompr { vars: Vec<Ident>, body: Box<SFormula>, span: Span },
    Iota { var: Ident, body: Box<SFormula>, span: Span },
    Lambda { var: Ident, set: Box<STerm>, body: Box<STerm>, span: Span },
    /// `name(args)`: an abbreviation, or application when `name` is a variable.
    Call { name: Ident, args: Vec<STerm>, span: Span },
    Apply { fun: Box<STerm>, arg: Box<STerm>, span: Span },
    Bin { op: BinOp, left: Box<STerm>, right: Box<STerm>, span: Span },
    Big { op: BigOp, arg: Box<STerm>, span: Span },
}

impl STerm {
    pub fn span(&self) -> Span {
        match self {
            STerm::Name(i) => i.span,
            STerm::Hf(s) | STerm::Empty(s) | STerm::Numeral(_, s) | STerm::Enum(_, s) | STerm::Tuple(_, s) => *s,
            STerm::Compr { span, .. }
            | STerm::Sep { span, .. }
            | STerm::Repl { span, .. }
            | STerm::TupleCompr { span, .. }
            | STerm::Iota { span, .. }
            | STerm::Lambda { span, .. }
            | STerm::Call { span, .. }
            | STerm::Apply { span, .. }
            | STerm::Bin { span, .. }
            | STerm::Big { span, .. } => *span,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum RelOp {
    In,
    NotIn,
    Eq,
    NotEq,
    Sub,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Quant {
    Exists,
    Forall,
}

#[derive(Clone, Debug)]
pub(crate) enum SFormula {
    Rel { op: RelOp, left: STerm, right: STerm, span: Span },
    Not(Box<SFormula>, Span),
    And(Box<SFormula>, Box<SFormula>),
    Or(Box<SFormula>, Box<SFormula>),
    Implies(Box<SFormula>, Box<SFormula>),
    Iff(Box<SFormula>, Box<SFormula>),
    /// `∃x y z. φ`, or the bounded `∃x ∈ s. φ`.
    Quant { q: Quant, vars: Vec<Ident>, bound: Option<Box<STerm>>, body: Box<SFormula>, span: Span },
    Tc { x: Ident, y: Ident, body: Box<SFormula>, from: STerm, to: STerm, span: Span },
    Call { name: Ident, args: Vec<STerm>, span: Span },
}

impl SFormula {
    pub fn span(&self) -> Span {
        match self {
            SFormula::Rel { span, .. }
            | SFormula::Not(_, span)
            | SFormula::Quant { span, .. }
            | SFormula::Tc { span, .. }
            | SFormula::Call { span, .. } => *span,
            SFormula::And(a, b) | SFormula::Or(a, b) | SFormula::Implies(a, b) | SFormula::Iff(a, b) => {
                a.span().join(b.span())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum SExpr {
    Term(STerm),
    Formula(SFormula),
}
