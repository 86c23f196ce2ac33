//! Concrete syntax: lexing, parsing, abbreviation expansion and printing.
//!
//! Expressions are written in ASCII or Unicode notation:
//!
//! ```text
//! x in y    x ∈ y          ~φ  ¬φ        φ & ψ  φ ∧ ψ     φ | ψ  φ ∨ ψ
//! φ -> ψ    φ <-> ψ        exists x. φ    forall x in s. φ
//! {x | φ}   {x in s | φ}   {t | x in s}   {<x, y> | φ}    {a, b}   <a, b>   0
//! TC[x, y](φ)(s, t)        iota x. φ      lambda x in s. t
//! s cup t   s cap t        s \ t          s times t       f / s    ⋃s   ⋂s   f(x)
//! ```
//!
//! Every form except the core ones expands into core syntax when parsed, so
//! the rest of the crate only ever sees [`crate::syntax`] values.

mod ast;
mod error;
mod expand;
mod grammar;
mod lexer;
mod printer;
mod theory_file;

use std::sync::Arc;

pub use error::{ErrorSpan, ParseError};
pub use expand::{empty_set, enumeration, numeral, pair, tuple, Definition, Definitions, Obligation, MAX_NUMERAL};
pub use lexer::KEYWORDS;
pub use printer::{print_expr, print_formula, print_term, readable_formula, readable_goal, readable_term};
pub use theory_file::{parse_statement, parse_theory_file, split_statements, Directive, Statement, StatementKind, TheoryFile};

use crate::safety::TheoryConfig;
use crate::syntax::{Expr, Formula, Term};

use grammar::{PErr, Parser};
use lexer::Token;

/// Settings that affect parsing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept the `⊆` atom.
    pub subseteq: bool,
    /// File name recorded in spans.
    pub file: Option<Arc<str>>,
    /// Line number of the first line of input; 0 is treated as 1.
    pub first_line: u32,
}

impl ParseOptions {
    pub fn for_config(cfg: &TheoryConfig) -> Self {
        ParseOptions { subseteq: cfg.subseteq_atom, ..Default::default() }
    }

    pub fn with_file(mut self, file: impl AsRef<str>) -> Self {
        self.file = Some(Arc::from(file.as_ref()));
        self
    }
}

/// A parsed value with the safety obligations its sugar forms introduced.
#[derive(Clone, Debug)]
pub struct Parsed<T> {
    pub value: T,
    pub obligations: Vec<Obligation>,
}

pub(crate) fn convert(e: PErr, toks: &[Token], file: Option<Arc<str>>) -> ParseError {
    let tok = &toks[e.at.min(toks.len() - 1)];
    let message = match e.message {
        Some(m) => m,
        None => {
            let expected = match e.expected.len() {
                0 => "something else".to_string(),
                1 => e.expected[0].clone(),
                n => format!("{} or {}", e.expected[..n - 1].join(", "), e.expected[n - 1]),
            };
            format!("expected {expected}, found {}", tok.tok)
        }
    };
    ParseError::Syntax { span: error::make_span(file, tok.start, tok.end), message }
}

fn run<S, T>(
    src: &str,
    defs: &Definitions,
    opts: &ParseOptions,
    parse: impl FnOnce(&mut Parser) -> Result<S, PErr>,
    expand: impl FnOnce(&mut expand::Expander, &S) -> Result<T, ParseError>,
) -> Result<Parsed<T>, ParseError> {
    let toks = lexer::lex(src, opts.first_line.max(1)).map_err(|mut e| {
        e.set_file(opts.file.clone());
        e
    })?;
    let mut p = Parser::new(&toks, opts.subseteq);
    let surface = parse(&mut p).map_err(|e| convert(e, &toks, opts.file.clone()))?;
    let mut x = expand::Expander::new(defs, opts.file.clone());
    let value = expand(&mut x, &surface)?;
    Ok(Parsed { value, obligations: x.obligations })
}

/// Parses a term or a formula, whichever the input is.
pub fn parse_expr(src: &str, defs: &Definitions, opts: &ParseOptions) -> Result<Parsed<Expr>, ParseError> {
    run(src, defs, opts, |p| p.expr(), |x, s| x.expr(s))
}

pub fn parse_formula(src: &str, defs: &Definitions, opts: &ParseOptions) -> Result<Parsed<Formula>, ParseError> {
    run(src, defs, opts, |p| p.whole_formula(), |x, s| x.formula(s))
}

pub fn parse_term(src: &str, defs: &Definitions, opts: &ParseOptions) -> Result<Parsed<Term>, ParseError> {
    run(src, defs, opts, |p| p.whole_term(), |x, s| x.term(s))
}
