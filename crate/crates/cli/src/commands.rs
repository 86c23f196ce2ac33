use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rudiset::eval::{render, Style};
use rudiset::parser::{
    parse_statement, print_expr, split_statements, print_formula, print_term, readable_formula, Parsed, StatementKind,
};
use rudiset::safety::{check_safe, explain_failure, safe_sets, validate_formula, validate_term, Validation};
use rudiset::theory::Value as Val;
use rudiset::{Env, Expr, SafetyError, Term, Theory, TheoryConfig, Var, VarSet};
use serde_json::{json, Map, Value};

use crate::report::{self, SCHEMA};
use crate::{eval_exit, exit, Options};

/// Outcome of checking one expression.
pub struct Checked {
    pub valid: bool,
    pub json: Value,
    pub text: Vec<String>,
}

fn validation_of(e: &Expr, cfg: &TheoryConfig) -> Result<Validation, SafetyError> {
    match e {
        Expr::Term(t) => validate_term(t, cfg),
        Expr::Formula(f) => validate_formula(f, cfg),
    }
}

/// Checks a parsed expression: validity, safe sets, derivations and sugar obligations.
pub fn check_parsed(parsed: &Parsed<Expr>, cfg: &TheoryConfig, sugar: bool, timing: bool) -> Checked {
    let start = Instant::now();
    let mut obj = Map::new();
    let mut text = Vec::new();
    let e = &parsed.value;
    obj.insert("kind".into(), json!(if matches!(e, Expr::Term(_)) { "term" } else { "formula" }));
    obj.insert("expansion".into(), json!(print_expr(e, sugar)));
    let valid = match validation_of(e, cfg) {
        Err(err) => {
            obj.insert("error".into(), json!(err.to_string()));
            text.push(format!("  {err}"));
            false
        }
        Ok(v) => {
            let family = match e {
                Expr::Formula(f) => Some(safe_sets(f, cfg)),
                Expr::Term(Term::Compr(c)) => Some(safe_sets(&c.body, cfg)),
                Expr::Term(_) => None,
            };
            obj.insert(
                "safe_sets".into(),
                family.and_then(|f| f.ok()).map(|f| report::family(&f)).unwrap_or(Value::Null),
            );
            obj.insert("derivation".into(), report::derivation_summary(v.accepted.iter().map(|(_, d)| &**d)));
            obj.insert("evaluable".into(), json!(v.is_ok() && v.is_evaluable()));
            obj.insert(
                "violations".into(),
                Value::Array(v.violations.iter().map(|x| report::violation(x, sugar)).collect()),
            );
            for x in &v.violations {
                text.push(format!("  {}", x.describe()));
            }
            let mut obligations_ok = true;
            let mut obs = Vec::new();
            for o in &parsed.obligations {
                let holds = matches!(check_safe(&o.formula, &o.safe, cfg), Ok(Some(_)));
                obligations_ok &= holds;
                obs.push(report::obligation(o, holds, sugar));
                if !holds {
                    let at = o.span.as_ref().map(|s| format!("{s}: ")).unwrap_or_default();
                    text.push(format!(
                        "  {at}side condition of {} fails: `{}` ≻ {}",
                        o.origin,
                        print_formula(&o.formula, sugar),
                        o.safe
                    ));
                }
            }
            obj.insert("obligations".into(), Value::Array(obs));
            v.is_ok() && obligations_ok
        }
    };
    obj.insert("valid".into(), json!(valid));
    if timing {
        obj.insert("timing_us".into(), json!(start.elapsed().as_micros() as u64));
    }
    Checked { valid, json: Value::Object(obj), text }
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn check(
    opts: &Options,
    cfg: &TheoryConfig,
    files: &[PathBuf],
    exprs: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if files.is_empty() && exprs.is_empty() {
        let _ = writeln!(err, "error: nothing to check (give files or -e EXPR)");
        return exit::PARSE;
    }
    let timing = !opts.no_timing;
    let mut parse_errors = 0u64;
    let (mut total, mut valid) = (0u64, 0u64);
    let mut file_reports = Vec::new();
    let mut lines = Vec::new();

    let mut sources: Vec<(String, Result<String, String>)> =
        files.iter().map(|p| (p.display().to_string(), read(p))).collect();
    if !exprs.is_empty() {
        sources.push(("<expr>".to_string(), Ok(exprs.join("\n"))));
    }

    for (name, src) in sources {
        let mut entries = Vec::new();
        let mut fobj = Map::new();
        fobj.insert("file".into(), json!(name));
        let src = match src {
            Ok(s) => s,
            Err(m) => {
                parse_errors += 1;
                fobj.insert("error".into(), json!({ "kind": "io", "message": m }));
                lines.push(format!("error: {m}"));
                file_reports.push(Value::Object(fobj));
                continue;
            }
        };
        let statements: Vec<(u32, String)> = if name == "<expr>" {
            exprs.iter().enumerate().map(|(i, e)| (i as u32 + 1, e.clone())).collect()
        } else {
            match split_statements(&src) {
                Ok(s) => s,
                Err((line, m)) => {
                    parse_errors += 1;
                    fobj.insert("error".into(), json!({ "kind": "syntax", "message": m, "span": format!("{name}:{line}:1") }));
                    lines.push(format!("{name}:{line}:1: error: {m}"));
                    file_reports.push(Value::Object(fobj));
                    continue;
                }
            }
        };
        let mut defs = rudiset::parser::Definitions::standard();
        let mut fcfg = cfg.clone();
        let file_arg = (name != "<expr>").then_some(name.as_str());
        for (line, text) in statements {
            let st = parse_statement(&text, line, &defs, &fcfg, file_arg).and_then(|st| {
                if let StatementKind::Define(d) = &st.kind {
                    defs.insert(d.clone())?;
                }
                Ok(st)
            });
            match st {
                Err(e) => {
                    parse_errors += 1;
                    entries.push(json!({ "line": line, "source": text, "parse_error": report::parse_error(&e) }));
                    lines.push(format!("{}: error: {}", e.span(), e.message()));
                }
                Ok(st) => match &st.kind {
                    StatementKind::Define(_) => {}
                    StatementKind::Directive(d) => {
                        if let Err(m) = d.apply(&mut fcfg) {
                            parse_errors += 1;
                            lines.push(format!("{name}:{line}: error: {m}"));
                        }
                    }
                    StatementKind::Expr(p) => {
                        total += 1;
                        let c = check_parsed(p, &fcfg, opts.sugar, timing);
                        if c.valid {
                            valid += 1;
                        }
                        let mut j = c.json;
                        if let Value::Object(m) = &mut j {
                            m.insert("line".into(), json!(line));
                            m.insert("source".into(), json!(text));
                            m.insert("theory".into(), json!(fcfg.to_string()));
                        }
                        entries.push(j);
                        let status = if c.valid { "ok" } else { "invalid" };
                        lines.push(format!("{name}:{line}: {status}: {}", one_line(&text)));
                        lines.extend(c.text);
                    }
                },
            }
        }
        fobj.insert("expressions".into(), Value::Array(entries));
        file_reports.push(Value::Object(fobj));
    }

    let code = if parse_errors > 0 {
        exit::PARSE
    } else if valid < total {
        exit::VIOLATION
    } else {
        exit::OK
    };
    if opts.json {
        let v = json!({
            "schema": SCHEMA,
            "command": "check",
            "theory": cfg.to_string(),
            "ok": code == exit::OK,
            "exit_code": code,
            "files": file_reports,
            "summary": { "expressions": total, "valid": valid, "invalid": total - valid, "parse_errors": parse_errors },
        });
        let _ = writeln!(out, "{}", report::render(&v));
    } else {
        for l in lines {
            let _ = writeln!(out, "{l}");
        }
        let _ = writeln!(out, "{total} expressions, {valid} valid, {} invalid, {parse_errors} parse errors", total - valid);
    }
    code
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Result of evaluating one expression.
pub struct Evaluated {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

/// Parses, checks and evaluates `src` in `th`.
pub fn evaluate(th: &Theory, src: &str, style: Style, sugar: bool) -> Evaluated {
    let parsed = match th.parse(src) {
        Ok(p) => p,
        Err(e) => {
            return Evaluated {
                code: exit::PARSE,
                text: format!("error: {e}"),
                json: json!({ "ok": false, "error": report::parse_error(&e) }),
            }
        }
    };
    let checked = check_parsed(&parsed, &th.config, sugar, false);
    if !checked.valid {
        let mut text = vec!["error: the expression is not valid".to_string()];
        text.extend(checked.text);
        return Evaluated {
            code: exit::VIOLATION,
            text: text.join("\n"),
            json: json!({ "ok": false, "error": { "kind": "invalid", "message": "the expression is not valid" }, "check": checked.json }),
        };
    }
    let (r, budget) = th.eval(&parsed.value, &Env::new());
    match r {
        Ok(v) => {
            let (shown, kind) = match &v {
                Val::Set(h) => (render(h, style), "term"),
                Val::Bool(b) => (b.to_string(), "formula"),
            };
            Evaluated {
                code: exit::OK,
                text: shown.clone(),
                json: json!({ "ok": true, "kind": kind, "value": shown, "steps": budget.used(), "budget": budget.limit() }),
            }
        }
        Err(e) => Evaluated {
            code: eval_exit(&e),
            text: format!("error: {e}"),
            json: json!({ "ok": false, "error": report::eval_error(&e), "steps": budget.used(), "budget": budget.limit() }),
        },
    }
}

pub fn eval(
    opts: &Options,
    cfg: &TheoryConfig,
    src: &str,
    as_nat: bool,
    as_pairs: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let mut th = Theory::new(cfg.clone());
    th.budget = opts.budget;
    let r = evaluate(&th, src, Style { nat: as_nat, pairs: as_pairs }, opts.sugar);
    if opts.json {
        let mut v = r.json;
        if let Value::Object(m) = &mut v {
            m.insert("schema".into(), json!(SCHEMA));
            m.insert("command".into(), json!("eval"));
            m.insert("expr".into(), json!(src));
            m.insert("theory".into(), json!(cfg.to_string()));
            m.insert("exit_code".into(), json!(r.code));
        }
        let _ = writeln!(out, "{}", report::render(&v));
    } else if r.code == exit::OK {
        let _ = writeln!(out, "{}", r.text);
    } else {
        let _ = writeln!(err, "{}", r.text);
    }
    r.code
}

pub fn expand_text(th: &Theory, src: &str, sugar: bool) -> Result<String, rudiset::ParseError> {
    th.expand(src, sugar)
}

pub fn expand(opts: &Options, cfg: &TheoryConfig, src: &str, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let th = Theory::new(cfg.clone());
    match expand_text(&th, src, opts.sugar) {
        Ok(s) => {
            if opts.json {
                let v = json!({ "schema": SCHEMA, "command": "expand", "input": src, "expansion": s, "ok": true, "exit_code": 0 });
                let _ = writeln!(out, "{}", report::render(&v));
            } else {
                let _ = writeln!(out, "{s}");
            }
            exit::OK
        }
        Err(e) => {
            if opts.json {
                let v = json!({ "schema": SCHEMA, "command": "expand", "input": src, "ok": false, "exit_code": exit::PARSE, "error": report::parse_error(&e) });
                let _ = writeln!(out, "{}", report::render(&v));
            } else {
                let _ = writeln!(err, "error: {e}");
            }
            exit::PARSE
        }
    }
}

/// Parses a variable list such as `a,b`, `{a, b}` or `a b`.
pub fn parse_vars(s: &str) -> VarSet {
    s.trim()
        .trim_start_matches('{')
        .trim_end_matches('}')
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|w| !w.is_empty())
        .map(Var::new)
        .collect()
}

pub struct Derived {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

pub fn derive_in(th: &Theory, src: &str, vars: &VarSet, sugar: bool) -> Derived {
    let f = match th.parse(src) {
        Ok(Parsed { value: Expr::Formula(f), .. }) => readable_formula(&f),
        Ok(Parsed { value: Expr::Term(t), .. }) => {
            let m = format!("expected a formula, found the term {}", print_term(&t, sugar));
            return Derived { code: exit::PARSE, text: format!("error: {m}"), json: json!({ "ok": false, "error": { "kind": "syntax", "message": m } }) };
        }
        Err(e) => {
            return Derived { code: exit::PARSE, text: format!("error: {e}"), json: json!({ "ok": false, "error": report::parse_error(&e) }) }
        }
    };
    let base = json!({ "formula": print_formula(&f, sugar), "vars": report::varset(vars) });
    let with = |extra: Value| {
        let mut b = base.clone();
        if let (Value::Object(m), Value::Object(e)) = (&mut b, extra) {
            m.extend(e);
        }
        b
    };
    match check_safe(&f, vars, &th.config) {
        Err(e) => Derived {
            code: exit::VIOLATION,
            text: format!("error: {e}"),
            json: with(json!({ "ok": false, "derivable": false, "error": { "kind": "unsupported", "message": e.to_string() } })),
        },
        Ok(Some(d)) => {
            let mut text = d.explain();
            text.push_str(if d.is_evaluable() { "evaluable: yes" } else { "evaluable: no (static-only clauses)" });
            Derived {
                code: exit::OK,
                text,
                json: with(json!({ "ok": true, "derivable": true, "evaluable": d.is_evaluable(), "derivation": report::derivation(&d, sugar) })),
            }
        }
        Ok(None) => {
            let b = explain_failure(&f, vars, &th.config).ok().flatten();
            let mut text = format!("not derivable: `{}` ≻ {}", print_formula(&f, sugar), vars);
            if let Some(b) = &b {
                text.push_str(&format!("\n  fails at `{}` ≻ {}: {}", print_formula(&b.formula, sugar), b.safe, b.reason));
            }
            Derived {
                code: exit::VIOLATION,
                text,
                json: with(json!({ "ok": false, "derivable": false, "blame": b.map(|b| report::blame(&b, sugar)) })),
            }
        }
    }
}

pub fn derive(
    opts: &Options,
    cfg: &TheoryConfig,
    src: &str,
    vars: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let th = Theory::new(cfg.clone());
    let r = derive_in(&th, src, &parse_vars(vars), opts.sugar);
    if opts.json {
        let mut v = r.json;
        if let Value::Object(m) = &mut v {
            m.insert("schema".into(), json!(SCHEMA));
            m.insert("command".into(), json!("derive"));
            m.insert("theory".into(), json!(cfg.to_string()));
            m.insert("exit_code".into(), json!(r.code));
        }
        let _ = writeln!(out, "{}", report::render(&v));
    } else if r.code == exit::PARSE {
        let _ = writeln!(err, "{}", r.text);
    } else {
        let _ = writeln!(out, "{}", r.text);
    }
    r.code
}
