//! Backtracking recursive-descent parser producing surface syntax.

use super::ast::*;
use super::lexer::{Pos, Tok, Token};

/// An internal failure, positioned at a token index so alternatives can be ranked.
#[derive(Clone, Debug)]
pub(crate) struct PErr {
    pub at: usize,
    pub expected: Vec<String>,
    pub message: Option<String>,
}

impl PErr {
    fn furthest(self, other: PErr) -> PErr {
        use std::cmp::Ordering::*;
        match self.at.cmp(&other.at) {
            Greater => self,
            Less => other,
            Equal => {
                let mut e = self;
                if e.message.is_none() {
                    e.message = other.message;
                }
                for x in other.expected {
                    if !e.expected.contains(&x) {
                        e.expected.push(x);
                    }
                }
                e
            }
        }
    }
}

type R<T> = Result<T, PErr>;

pub(crate) struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    pub allow_subseteq: bool,
}

impl<'a> Parser<'a> {
    pub fn new(toks: &'a [Token], allow_subseteq: bool) -> Self {
        Parser { toks, pos: 0, allow_subseteq }
    }

    pub fn token(&self, i: usize) -> &Token {
        &self.toks[i.min(self.toks.len() - 1)]
    }

    fn peek(&self) -> &Tok {
        &self.token(self.pos).tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.token(self.pos + k).tok
    }

    fn start(&self) -> Pos {
        self.token(self.pos).start
    }

    fn last_end(&self) -> Pos {
        if self.pos == 0 {
            self.token(0).start
        } else {
            self.token(self.pos - 1).end
        }
    }

    fn span_from(&self, start: Pos) -> Span {
        Span { start, end: self.last_end() }
    }

    fn bump(&mut self) -> Token {
        let t = self.token(self.pos).clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn err(&self, expected: &str) -> PErr {
        PErr { at: self.pos, expected: vec![expected.to_string()], message: None }
    }

    fn err_msg(&self, msg: impl Into<String>) -> PErr {
        PErr { at: self.pos, expected: Vec::new(), message: Some(msg.into()) }
    }

    fn expect(&mut self, t: Tok) -> R<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.err(&t.to_string()))
        }
    }

    fn ident(&mut self) -> R<Ident> {
        let tok = self.token(self.pos).clone();
        match tok.tok {
            Tok::Ident(name) => {
                self.bump();
                Ok(Ident { name, span: Span { start: tok.start, end: tok.end } })
            }
            _ => Err(self.err("a name")),
        }
    }

    pub fn at_end(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn expect_end(&self) -> R<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("end of input"))
        }
    }

    /// Tries `f`, restoring the position when it fails.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> R<T>) -> R<T> {
        let save = self.pos;
        let r = f(self);
        if r.is_err() {
            self.pos = save;
        }
        r
    }

    /// A whole input that is either a term or a formula.
    pub fn expr(&mut self) -> R<SExpr> {
        let as_term = self.attempt(|p| {
            let t = p.term()?;
            p.expect_end()?;
            Ok(t)
        });
        match as_term {
            Ok(t) => Ok(SExpr::Term(t)),
            Err(e1) => {
                let as_formula = self.attempt(|p| {
                    let f = p.formula()?;
                    p.expect_end()?;
                    Ok(f)
                });
                match as_formula {
                    Ok(f) => Ok(SExpr::Formula(f)),
                    Err(e2) => Err(e2.furthest(e1)),
                }
            }
        }
    }

    /// `def NAME(params) := EXPR`, positioned at `def`.
    pub fn definition(&mut self) -> R<(Ident, Vec<Ident>, SExpr)> {
        self.bump();
        let name = self.ident()?;
        let mut params = Vec::new();
        if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            loop {
                params.push(self.ident()?);
                if self.eat(&Tok::Comma) {
                    continue;
                }
                self.expect(Tok::RParen)?;
                break;
            }
        }
        self.expect(Tok::Define)?;
        let body = self.expr()?;
        Ok((name, params, body))
    }

    pub fn whole_formula(&mut self) -> R<SFormula> {
        let f = self.formula()?;
        self.expect_end()?;
        Ok(f)
    }

    pub fn whole_term(&mut self) -> R<STerm> {
        let t = self.term()?;
        self.expect_end()?;
        Ok(t)
    }

    // ---- formulas ----

    pub fn formula(&mut self) -> R<SFormula> {
        self.iff()
    }

    fn iff(&mut self) -> R<SFormula> {
        let left = self.implication()?;
        if self.eat(&Tok::Iff) {
            let right = self.iff()?;
            return Ok(SFormula::Iff(Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    fn implication(&mut self) -> R<SFormula> {
        let left = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let right = self.implication()?;
            return Ok(SFormula::Implies(Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> R<SFormula> {
        let mut left = self.conjunction()?;
        while self.eat(&Tok::Bar) {
            let right = self.conjunction()?;
            left = SFormula::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> R<SFormula> {
        let mut left = self.unary()?;
        while self.eat(&Tok::Amp) {
            let right = self.unary()?;
            left = SFormula::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> R<SFormula> {
        let start = self.start();
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                let f = self.unary()?;
                Ok(SFormula::Not(Box::new(f), self.span_from(start)))
            }
            Tok::Exists | Tok::Forall => self.quantifier(),
            Tok::Tc => self.closure(),
            _ => self.atom(),
        }
    }

    fn quantifier(&mut self) -> R<SFormula> {
        let start = self.start();
        let q = if self.eat(&Tok::Exists) { Quant::Exists } else {
            self.expect(Tok::Forall)?;
            Quant::Forall
        };
        let mut vars = vec![self.ident()?];
        loop {
            if self.eat(&Tok::Comma) {
                vars.push(self.ident()?);
            } else if matches!(self.peek(), Tok::Ident(_)) {
                vars.push(self.ident()?);
            } else {
                break;
            }
        }
        let bound = if self.eat(&Tok::In) { Some(Box::new(self.term()?)) } else { None };
        self.expect(Tok::Dot)?;
        let body = self.formula()?;
        Ok(SFormula::Quant { q, vars, bound, body: Box::new(body), span: self.span_from(start) })
    }

    fn closure(&mut self) -> R<SFormula> {
        let start = self.start();
        self.expect(Tok::Tc)?;
        self.expect(Tok::LBrack)?;
        let x = self.ident()?;
        self.expect(Tok::Comma)?;
        let y = self.ident()?;
        self.expect(Tok::RBrack)?;
        self.expect(Tok::LParen)?;
        let body = self.formula()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::LParen)?;
        let from = self.term()?;
        self.expect(Tok::Comma)?;
        let to = self.term()?;
        self.expect(Tok::RParen)?;
        Ok(SFormula::Tc { x, y, body: Box::new(body), from, to, span: self.span_from(start) })
    }

    fn atom(&mut self) -> R<SFormula> {
        // `( φ )` unless the parenthesis opens a term.
        let paren = if matches!(self.peek(), Tok::LParen) {
            self.attempt(|p| {
                p.bump();
                let f = p.formula()?;
                p.expect(Tok::RParen)?;
                if p.relation_follows() {
                    return Err(p.err("a formula"));
                }
                Ok(f)
            })
        } else {
            Err(self.err("`(`"))
        };
        let paren_err = match paren {
            Ok(f) => return Ok(f),
            Err(e) => e,
        };
        let rel = self.attempt(|p| p.relation());
        match rel {
            Ok(f) => Ok(f),
            Err(e) => {
                // A bare call such as `Fun(f)` may be a formula abbreviation.
                let call = self.attempt(|p| {
                    let start = p.start();
                    let name = p.ident()?;
                    let args = if matches!(p.peek(), Tok::LParen) { p.args()? } else { Vec::new() };
                    if p.relation_follows() {
                        return Err(p.err("a relation"));
                    }
                    Ok(SFormula::Call { name, args, span: p.span_from(start) })
                });
                call.map_err(|e3| e3.furthest(e).furthest(paren_err))
            }
        }
    }

    fn relation_follows(&self) -> bool {
        matches!(
            self.peek(),
            Tok::In | Tok::NotIn | Tok::Equals | Tok::NotEquals | Tok::Sub | Tok::Cup | Tok::Cap
                | Tok::Times | Tok::Minus | Tok::Slash | Tok::LParen
        ) || matches!(self.peek(), Tok::Ident(w) if is_word_op(w))
    }

    fn relation(&mut self) -> R<SFormula> {
        let start = self.start();
        let left = self.term()?;
        let op = match self.peek() {
            Tok::In => RelOp::In,
            Tok::NotIn => RelOp::NotIn,
            Tok::Equals => RelOp::Eq,
            Tok::NotEquals => RelOp::NotEq,
            Tok::Sub => {
                if !self.allow_subseteq {
                    return Err(self.err_msg("⊆ not enabled (enable the subseteq pack)"));
                }
                RelOp::Sub
            }
            _ => return Err(self.err("a relation (`in`, `=`, `!=`, `notin` or `sub`)")),
        };
        self.bump();
        let right = self.term()?;
        Ok(SFormula::Rel { op, left, right, span: self.span_from(start) })
    }

    // ---- terms ----

    pub fn term(&mut self) -> R<STerm> {
        let start = self.start();
        let mut left = self.t_inter()?;
        loop {
            let op = match self.peek() {
                Tok::Cup => BinOp::Cup,
                Tok::Minus => BinOp::Minus,
                Tok::Ident(w) if w == "cup" => BinOp::Cup,
                _ => break,
            };
            self.bump();
            let right = self.t_inter()?;
            left = STerm::Bin { op, left: Box::new(left), right: Box::new(right), span: self.span_from(start) };
        }
        Ok(left)
    }

    fn t_inter(&mut self) -> R<STerm> {
        let start = self.start();
        let mut left = self.t_times()?;
        while matches!(self.peek(), Tok::Cap) || matches!(self.peek(), Tok::Ident(w) if w == "cap") {
            self.bump();
            let right = self.t_times()?;
            left = STerm::Bin { op: BinOp::Cap, left: Box::new(left), right: Box::new(right), span: self.span_from(start) };
        }
        Ok(left)
    }

    fn t_times(&mut self) -> R<STerm> {
        let start = self.start();
        let mut left = self.t_restrict()?;
        while matches!(self.peek(), Tok::Times) || matches!(self.peek(), Tok::Ident(w) if w == "times") {
            self.bump();
            let right = self.t_restrict()?;
            left = STerm::Bin { op: BinOp::Times, left: Box::new(left), right: Box::new(right), span: self.span_from(start) };
        }
        Ok(left)
    }

    fn t_restrict(&mut self) -> R<STerm> {
        let start = self.start();
        let mut left = self.t_prefix()?;
        while self.eat(&Tok::Slash) {
            let right = self.t_prefix()?;
            left = STerm::Bin { op: BinOp::Restrict, left: Box::new(left), right: Box::new(right), span: self.span_from(start) };
        }
        Ok(left)
    }

    fn t_prefix(&mut self) -> R<STerm> {
        let start = self.start();
        let op = match self.peek() {
            Tok::BigCup => BigOp::Union,
            Tok::BigCap => BigOp::Inter,
            _ => return self.t_postfix(),
        };
        self.bump();
        let arg = self.t_prefix()?;
        Ok(STerm::Big { op, arg: Box::new(arg), span: self.span_from(start) })
    }

    fn t_postfix(&mut self) -> R<STerm> {
        let start = self.start();
        let mut t = self.t_primary()?;
        while matches!(self.peek(), Tok::LParen) {
            let args = self.attempt(|p| p.args())?;
            for arg in args {
                t = STerm::Apply { fun: Box::new(t), arg: Box::new(arg), span: self.span_from(start) };
            }
        }
        Ok(t)
    }

    fn args(&mut self) -> R<Vec<STerm>> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(Tok::RParen)?;
            return Ok(out);
        }
    }

    fn t_primary(&mut self) -> R<STerm> {
        let start = self.start();
        match self.peek().clone() {
            Tok::Ident(w) if is_word_op(&w) && !matches!(self.peek_at(1), Tok::LParen) => {
                Err(self.err("a term"))
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                if matches!(self.peek(), Tok::LParen) {
                    let args = self.args()?;
                    return Ok(STerm::Call { name, args, span: self.span_from(start) });
                }
                Ok(STerm::Name(name))
            }
            Tok::Hf => {
                self.bump();
                Ok(STerm::Hf(self.span_from(start)))
            }
            Tok::Empty => {
                self.bump();
                Ok(STerm::Empty(self.span_from(start)))
            }
            Tok::Num(n) => {
                self.bump();
                Ok(STerm::Numeral(n, self.span_from(start)))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::LBrace => self.braces(),
            Tok::LAngle => {
                self.bump();
                let mut items = Vec::new();
                if !self.eat(&Tok::RAngle) {
                    loop {
                        items.push(self.term()?);
                        if self.eat(&Tok::Comma) {
                            continue;
                        }
                        self.expect(Tok::RAngle)?;
                        break;
                    }
                }
                Ok(STerm::Tuple(items, self.span_from(start)))
            }
            Tok::Iota => {
                self.bump();
                let var = self.ident()?;
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(STerm::Iota { var, body: Box::new(body), span: self.span_from(start) })
            }
            Tok::Lambda => {
                self.bump();
                let var = self.ident()?;
                self.expect(Tok::In)?;
                let set = self.term()?;
                self.expect(Tok::Dot)?;
                let body = self.term()?;
                Ok(STerm::Lambda { var, set: Box::new(set), body: Box::new(body), span: self.span_from(start) })
            }
            _ => Err(self.err("a term")),
        }
    }

    fn braces(&mut self) -> R<STerm> {
        let start = self.start();
        self.expect(Tok::LBrace)?;
        if self.eat(&Tok::RBrace) {
            return Ok(STerm::Enum(Vec::new(), self.span_from(start)));
        }
        // `{x ∈ s | φ}`
        if matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::In) {
            let sep = self.attempt(|p| {
                let binder = p.ident()?;
                p.expect(Tok::In)?;
                let set = p.term()?;
                p.expect(Tok::Bar)?;
                let body = p.formula()?;
                p.expect(Tok::RBrace)?;
                Ok(STerm::Sep { binder, set: Box::new(set), body: Box::new(body), span: p.span_from(start) })
            });
            if let Ok(t) = sep {
                return Ok(t);
            }
        }
        let head = self.term()?;
        if self.eat(&Tok::Bar) {
            match head {
                STerm::Name(binder) => {
                    let body = self.formula()?;
                    self.expect(Tok::RBrace)?;
                    return Ok(STerm::Compr { binder, body: Box::new(body), span: self.span_from(start) });
                }
                STerm::Tuple(items, _)
                    if items.len() >= 2 && items.iter().all(|t| matches!(t, STerm::Name(_))) =>
                {
                    let vars: Vec<Ident> = items
                        .into_iter()
                        .map(|t| match t {
                            STerm::Name(i) => i,
                            _ => unreachable!(),
                        })
                        .collect();
                    let body = self.formula()?;
                    self.expect(Tok::RBrace)?;
                    return Ok(STerm::TupleCompr { vars, body: Box::new(body), span: self.span_from(start) });
                }
                head => {
                    let var = self.ident()?;
                    self.expect(Tok::In)?;
                    let set = self.term()?;
                    self.expect(Tok::RBrace)?;
                    return Ok(STerm::Repl { head: Box::new(head), var, set: Box::new(set), span: self.span_from(start) });
                }
            }
        }
        let mut items = vec![head];
        while self.eat(&Tok::Comma) {
            items.push(self.term()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(STerm::Enum(items, self.span_from(start)))
    }
}

fn is_word_op(w: &str) -> bool {
    matches!(w, "cup" | "cap" | "times")
}
