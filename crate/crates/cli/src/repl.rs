//! Interactive session: definitions, directives and commands, one per line.

use std::io::{BufRead, IsTerminal, Write};

use rudiset::eval::Style;
use rudiset::parser::{parse_statement, StatementKind};
use rudiset::safety::Pack;
use rudiset::{Theory, TheoryConfig};

use crate::commands::{check_parsed, derive_in, evaluate, parse_vars};
use crate::Options;

const HELP: &str = "\
def NAME(ARGS) := BODY     add a definition
theory rst|rst-omega|pzf   switch the base theory
enable PACK, ...           enable rule packs
EXPR                       evaluate a closed term or sentence
eval EXPR [--as-nat] [--as-pairs]
:check EXPR                check validity
:expand EXPR               show the core expansion
:derive {VARS} FORMULA     show a safety derivation
:set theory|budget|sugar|nat|pairs|symmetric-and VALUE
:set enable|disable PACK
:defs                      list user definitions
:save FILE / :load FILE    write or read definitions
:help / :quit";

pub struct Session {
    pub theory: Theory,
    pub sugar: bool,
    pub style: Style,
    user_defs: Vec<String>,
}

/// What a line did.
pub enum Reply {
    Output(String),
    Error(String),
    Quit,
}

impl Session {
    pub fn new(opts: &Options, cfg: TheoryConfig) -> Self {
        let mut theory = Theory::new(cfg);
        theory.budget = opts.budget;
        Session { theory, sugar: opts.sugar, style: Style::default(), user_defs: Vec::new() }
    }

    pub fn handle(&mut self, line: &str) -> Reply {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            return Reply::Output(String::new());
        }
        if let Some(cmd) = line.strip_prefix(':') {
            let (head, rest) = cmd.split_once(char::is_whitespace).unwrap_or((cmd, ""));
            return self.command(head, rest.trim());
        }
        if let Some(rest) = line.strip_prefix("eval ") {
            return self.eval(rest);
        }
        let st = match parse_statement(line, 1, &self.theory.definitions, &self.theory.config, None) {
            Ok(s) => s,
            Err(e) => return Reply::Error(e.to_string()),
        };
        match st.kind {
            StatementKind::Define(d) => {
                let name = d.name.clone();
                match self.theory.definitions.insert(d) {
                    Ok(()) => {
                        self.user_defs.push(line.to_string());
                        Reply::Output(format!("defined {name}"))
                    }
                    Err(e) => Reply::Error(e.to_string()),
                }
            }
            StatementKind::Directive(d) => match d.apply(&mut self.theory.config) {
                Ok(()) => Reply::Output(format!("theory {}", self.theory.config)),
                Err(m) => Reply::Error(m),
            },
            StatementKind::Expr(_) => self.eval(line),
        }
    }

    fn eval(&mut self, rest: &str) -> Reply {
        let mut style = self.style;
        let mut words: Vec<&str> = Vec::new();
        for w in rest.split(' ') {
            match w {
                "--as-nat" => style.nat = true,
                "--as-pairs" => style.pairs = true,
                _ => words.push(w),
            }
        }
        let r = evaluate(&self.theory, &words.join(" "), style, self.sugar);
        if r.code == 0 {
            Reply::Output(r.text)
        } else {
            Reply::Error(r.text.trim_start_matches("error: ").to_string())
        }
    }

    fn command(&mut self, head: &str, rest: &str) -> Reply {
        match head {
            "q" | "quit" | "exit" => Reply::Quit,
            "h" | "help" => Reply::Output(HELP.to_string()),
            "eval" => self.eval(rest),
            "check" => match self.theory.parse(rest) {
                Err(e) => Reply::Error(e.to_string()),
                Ok(p) => {
                    let c = check_parsed(&p, &self.theory.config, self.sugar, false);
                    let mut out = vec![if c.valid { "ok".to_string() } else { "invalid".to_string() }];
                    out.extend(c.text);
                    Reply::Output(out.join("\n"))
                }
            },
            "expand" => match self.theory.expand(rest, self.sugar) {
                Ok(s) => Reply::Output(s),
                Err(e) => Reply::Error(e.to_string()),
            },
            "derive" => {
                let (vars, formula) = match rest.strip_prefix('{').and_then(|r| r.split_once('}')) {
                    Some((v, f)) => (parse_vars(v), f.trim()),
                    None => return Reply::Error("usage: :derive {VARS} FORMULA".into()),
                };
                let r = derive_in(&self.theory, formula, &vars, self.sugar);
                if r.code == 2 {
                    Reply::Error(r.text.trim_start_matches("error: ").to_string())
                } else {
                    Reply::Output(r.text.trim_end().to_string())
                }
            }
            "defs" => Reply::Output(self.user_defs.join("\n")),
            "set" => self.set(rest),
            "save" => self.save(rest),
            "load" => self.load(rest),
            _ => Reply::Error(format!("unknown command `:{head}` (try :help)")),
        }
    }

    fn set(&mut self, rest: &str) -> Reply {
        let (key, value) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
        let value = value.trim();
        let flag = || match value {
            "on" | "true" | "yes" | "1" => Ok(true),
            "off" | "false" | "no" | "0" => Ok(false),
            _ => Err(format!("expected on or off, found `{value}`")),
        };
        let cfg = &mut self.theory.config;
        let r = match key {
            "theory" => cfg.set_base(value),
            "enable" | "disable" => value.parse::<Pack>().map(|p| cfg.set_pack(p, key == "enable")),
            "symmetric-and" => flag().map(|b| cfg.conjunction_symmetric = b),
            "budget" => value.parse().map(|b| self.theory.budget = b).map_err(|e| format!("budget: {e}")),
            "sugar" => flag().map(|b| self.sugar = b),
            "nat" => flag().map(|b| self.style.nat = b),
            "pairs" => flag().map(|b| self.style.pairs = b),
            _ => Err(format!("unknown setting `{key}`")),
        };
        match r {
            Ok(()) => Reply::Output(format!("theory {}", self.theory.config)),
            Err(m) => Reply::Error(m),
        }
    }

    fn save(&self, path: &str) -> Reply {
        let cfg = &self.theory.config;
        let mut text = format!("theory {}\n", cfg.base_name());
        let packs: Vec<&str> = cfg.packs().iter().map(|p| p.name()).collect();
        if !packs.is_empty() {
            text.push_str(&format!("enable {}\n", packs.join(", ")));
        }
        for d in &self.user_defs {
            text.push_str(d);
            text.push('\n');
        }
        match std::fs::write(path, text) {
            Ok(()) => Reply::Output(format!("saved {} definitions to {path}", self.user_defs.len())),
            Err(e) => Reply::Error(format!("{path}: {e}")),
        }
    }

    fn load(&mut self, path: &str) -> Reply {
        let src = match std::fs::read_to_string(path) {
            Ok(s) => s,
            Err(e) => return Reply::Error(format!("{path}: {e}")),
        };
        let parts = match rudiset::parser::split_statements(&src) {
            Ok(p) => p,
            Err((line, m)) => return Reply::Error(format!("{path}:{line}: {m}")),
        };
        let mut out = Vec::new();
        for (line, text) in parts {
            let st = match parse_statement(&text, line, &self.theory.definitions, &self.theory.config, Some(path)) {
                Ok(s) => s,
                Err(e) => return Reply::Error(e.to_string()),
            };
            match st.kind {
                StatementKind::Define(d) => {
                    if let Err(e) = self.theory.definitions.insert(d) {
                        return Reply::Error(e.to_string());
                    }
                    self.user_defs.push(text);
                }
                StatementKind::Directive(d) => {
                    if let Err(m) = d.apply(&mut self.theory.config) {
                        return Reply::Error(m);
                    }
                }
                StatementKind::Expr(p) => {
                    let c = check_parsed(&p, &self.theory.config, self.sugar, false);
                    out.push(format!("{path}:{line}: {}", if c.valid { "ok" } else { "invalid" }));
                }
            }
        }
        out.push(format!("loaded {path}"));
        Reply::Output(out.join("\n"))
    }
}

/// Reads lines from `input` until end of input or `:quit`. Always exits 0.
pub fn run(opts: &Options, cfg: TheoryConfig, input: &mut dyn BufRead, out: &mut dyn Write) -> i32 {
    let mut s = Session::new(opts, cfg);
    let prompt = std::io::stdin().is_terminal();
    let mut line = String::new();
    loop {
        if prompt {
            let _ = write!(out, "rudiset> ");
            let _ = out.flush();
        }
        line.clear();
        match input.read_line(&mut line) {
            Ok(0) | Err(_) => break,
            Ok(_) => {}
        }
        match s.handle(&line) {
            Reply::Quit => break,
            Reply::Output(t) if t.is_empty() => {}
            Reply::Output(t) => {
                let _ = writeln!(out, "{t}");
            }
            Reply::Error(m) => {
                let _ = writeln!(out, "error: {m}");
            }
        }
    }
    crate::exit::OK
}
