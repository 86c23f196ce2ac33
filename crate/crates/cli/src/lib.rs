//! The `rudiset` command-line tool.
//!
//! Exit codes: 0 success, 1 safety violations, 2 parse or usage errors,
//! 3 not evaluable, 4 budget exceeded.

pub mod commands;
pub mod repl;
pub mod report;

use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rudiset::eval::DEFAULT_BUDGET;
use rudiset::safety::Pack;
use rudiset::{EvalError, TheoryConfig};

pub mod exit {
    pub const OK: i32 = 0;
    pub const VIOLATION: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const NOT_EVALUABLE: i32 = 3;
    pub const BUDGET: i32 = 4;
}

/// Exit code for an evaluation failure.
pub fn eval_exit(e: &EvalError) -> i32 {
    match e {
        EvalError::NotEvaluable { .. } | EvalError::UnboundVariable(_) => exit::NOT_EVALUABLE,
        EvalError::BudgetExceeded { .. } => exit::BUDGET,
        EvalError::Unsupported(_) => exit::VIOLATION,
    }
}

#[derive(Debug, Parser)]
#[command(name = "rudiset", version, about = "Check and evaluate safe set comprehensions")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct Options {
    /// Base theory.
    #[arg(long, global = true, default_value = "rst", value_parser = ["rst", "rst-omega", "pzf"])]
    pub theory: String,
    /// Rule packs to enable: separation, replacement, powerset, subseteq.
    #[arg(long, global = true, value_delimiter = ',')]
    pub enable: Vec<String>,
    /// Also accept conjunctions whose right conjunct supplies the parameters of the left.
    #[arg(long = "symmetric-and", global = true)]
    pub symmetric_and: Option<bool>,
    /// Evaluation step budget.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Print expansions with short forms for 0, enumerations and tuples.
    #[arg(long, global = true)]
    pub sugar: bool,
    /// Leave timing fields out of JSON reports.
    #[arg(long = "no-timing", global = true)]
    pub no_timing: bool,
}

impl Options {
    pub fn config(&self) -> Result<TheoryConfig, String> {
        let mut cfg = TheoryConfig::preset(&self.theory).ok_or_else(|| format!("unknown theory `{}`", self.theory))?;
        for p in &self.enable {
            cfg.enable(p.parse::<Pack>()?);
        }
        if let Some(s) = self.symmetric_and {
            cfg.conjunction_symmetric = s;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check theory files and expressions for validity.
    Check {
        files: Vec<PathBuf>,
        /// An expression to check; may be repeated.
        #[arg(short = 'e', long = "expr")]
        exprs: Vec<String>,
    },
    /// Evaluate a closed term or sentence.
    Eval {
        expr: String,
        /// Show von Neumann numerals as numbers.
        #[arg(long = "as-nat")]
        as_nat: bool,
        /// Show Kuratowski pairs as <a, b>.
        #[arg(long = "as-pairs")]
        as_pairs: bool,
    },
    /// Print an expression in core syntax.
    Expand { expr: String },
    /// Show a derivation of `formula ≻ vars`, e.g. `derive "a in s & b in t" a,b`.
    Derive {
        formula: String,
        /// Comma- or space-separated variables; empty for the boolean case.
        #[arg(default_value = "")]
        vars: String,
    },
    /// Interactive session.
    Repl,
}

/// Runs the tool on `args` (including the program name).
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::PARSE } else { exit::OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let cfg = match cli.opts.config() {
        Ok(c) => c,
        Err(m) => {
            let _ = writeln!(err, "error: {m}");
            return exit::PARSE;
        }
    };
    let opts = &cli.opts;
    match &cli.command {
        Command::Check { files, exprs } => commands::check(opts, &cfg, files, exprs, out, err),
        Command::Eval { expr, as_nat, as_pairs } => commands::eval(opts, &cfg, expr, *as_nat, *as_pairs, out, err),
        Command::Expand { expr } => commands::expand(opts, &cfg, expr, out, err),
        Command::Derive { formula, vars } => commands::derive(opts, &cfg, formula, vars, out, err),
        Command::Repl => repl::run(opts, cfg, input, out),
    }
}
