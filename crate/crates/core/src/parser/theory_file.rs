//! Theory files: sequences of definitions, directives and expressions.
//!
//! A statement starts on a line whose first character is not whitespace and
//! continues over the following indented lines. `#` starts a comment.
//!
//! ```text
//! theory pzf
//! enable subseteq
//! def Fun(f) := forall z in f. exists x y. z = <x, y>
//! def twice(s) :=
//!     s cup s
//! {x in a | Fun(x)}
//! ```

use std::sync::Arc;

use crate::safety::{Pack, TheoryConfig};
use crate::syntax::{Expr, Var};

use super::error::{make_span, ParseError};
use super::expand::{Definition, Definitions, Expander};
use super::grammar::Parser;
use super::lexer::{lex, Tok};
use super::{convert, Parsed};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Directive {
    /// `theory rst|rst-omega|pzf`
    Theory(String),
    /// `enable pack, ...`
    Enable(Vec<Pack>),
}

impl Directive {
    pub fn apply(&self, cfg: &mut TheoryConfig) -> Result<(), String> {
        match self {
            Directive::Theory(name) => cfg.set_base(name),
            Directive::Enable(packs) => {
                for p in packs {
                    cfg.enable(*p);
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum StatementKind {
    Define(Definition),
    Directive(Directive),
    Expr(Parsed<Expr>),
}

#[derive(Clone, Debug)]
pub struct Statement {
    /// Line of the statement's first line.
    pub line: u32,
    pub text: String,
    pub kind: StatementKind,
}

/// The statements of a file together with the resulting definitions and configuration.
#[derive(Clone, Debug)]
pub struct TheoryFile {
    pub statements: Vec<Statement>,
    pub definitions: Definitions,
    pub config: TheoryConfig,
}

impl TheoryFile {
    pub fn expressions(&self) -> impl Iterator<Item = (&Statement, &Parsed<Expr>)> + '_ {
        self.statements.iter().filter_map(|s| match &s.kind {
            StatementKind::Expr(p) => Some((s, p)),
            _ => None,
        })
    }
}

/// Splits source text into `(first line, text)` statements.
pub fn split_statements(src: &str) -> Result<Vec<(u32, String)>, (u32, String)> {
    let mut out: Vec<(u32, String)> = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let n = i as u32 + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            if let Some(last) = out.last_mut() {
                last.1.push('\n');
            }
            continue;
        }
        if line.starts_with(char::is_whitespace) {
            match out.last_mut() {
                Some(last) => {
                    last.1.push('\n');
                    last.1.push_str(line);
                }
                None => return Err((n, "indented line does not continue a statement".into())),
            }
        } else {
            out.push((n, line.to_string()));
        }
    }
    for s in &mut out {
        let t = s.1.trim_end().len();
        s.1.truncate(t);
    }
    Ok(out)
}

/// Parses one statement against the given definitions and configuration.
pub fn parse_statement(
    text: &str,
    line: u32,
    defs: &Definitions,
    cfg: &TheoryConfig,
    file: Option<&str>,
) -> Result<Statement, ParseError> {
    let file: Option<Arc<str>> = file.map(Arc::from);
    let toks = lex(text, line).map_err(|mut e| {
        e.set_file(file.clone());
        e
    })?;
    let head = match (&toks[0].tok, &toks[1].tok) {
        (Tok::Ident(w), Tok::Ident(_)) => Some(w.as_str()),
        _ => None,
    };
    let kind = match head {
        Some("def") => {
            let mut p = Parser::new(&toks, cfg.subseteq_atom);
            let (name, params, body) = p
                .definition()
                .map_err(|e| convert(e, &toks, file.clone()))?;
            let names: Vec<String> = params.iter().map(|i| i.name.clone()).collect();
            let mut x = Expander::new(defs, file.clone()).with_scope(names.iter().cloned());
            let body = x.expr(&body)?;
            StatementKind::Define(Definition {
                name: name.name,
                params: names.iter().map(Var::new).collect(),
                body,
                source: Some(text.to_string()),
                span: Some(make_span(file.clone(), toks[0].start, toks[toks.len() - 1].end).0),
            })
        }
        Some(w @ ("theory" | "enable")) => {
            let rest = text.trim_start()[w.len()..].trim();
            let span = make_span(file.clone(), toks[0].start, toks[toks.len() - 1].end);
            let directive = if w == "theory" {
                if TheoryConfig::preset(rest).is_none() {
                    return Err(ParseError::Syntax {
                        span,
                        message: format!("unknown theory `{rest}` (expected rst, rst-omega or pzf)"),
                    });
                }
                Directive::Theory(rest.to_string())
            } else {
                let packs = rest
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<Pack>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|message| ParseError::Syntax { span: span.clone(), message })?;
                Directive::Enable(packs)
            };
            StatementKind::Directive(directive)
        }
        _ => {
            let mut p = Parser::new(&toks, cfg.subseteq_atom);
            let e = p.expr().map_err(|e| convert(e, &toks, file.clone()))?;
            let mut x = Expander::new(defs, file.clone());
            let value = x.expr(&e)?;
            StatementKind::Expr(Parsed { value, obligations: x.obligations })
        }
    };
    Ok(Statement { line, text: text.to_string(), kind })
}

/// Parses a whole file, applying definitions and directives in order.
pub fn parse_theory_file(
    src: &str,
    defs: &Definitions,
    cfg: &TheoryConfig,
    file: Option<&str>,
) -> Result<TheoryFile, ParseError> {
    let parts = split_statements(src).map_err(|(line, message)| ParseError::Syntax {
        span: make_span(
            file.map(Arc::from),
            super::lexer::Pos { line, col: 1 },
            super::lexer::Pos { line, col: 1 },
        ),
        message,
    })?;
    let mut defs = defs.clone();
    let mut cfg = cfg.clone();
    let mut statements = Vec::new();
    for (line, text) in parts {
        let st = parse_statement(&text, line, &defs, &cfg, file)?;
        match &st.kind {
            StatementKind::Define(d) => defs.insert(d.clone())?,
            StatementKind::Directive(d) => d.apply(&mut cfg).expect("validated when parsed"),
            StatementKind::Expr(_) => {}
        }
        statements.push(st);
    }
    Ok(TheoryFile { statements, definitions: defs, config: cfg })
}
