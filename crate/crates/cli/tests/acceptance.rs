//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any fail.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rudiset::catalog::{entries, lookup, omega_term};
use rudiset::eval::{compile, execute_plan, NatCodec, PairCodec};
use rudiset::parser::{print_formula, readable_term};
use rudiset::safety::{check_safe, validate_term, Derivation, Rule};
use rudiset::{Budget, Env, EvalError, Formula, Hf, Term, Theory, TheoryConfig, Var, VarSet};

const CATALOG_LIMIT: Duration = Duration::from_secs(1);
const DECISION_LIMIT: Duration = Duration::from_secs(1);
const NEST_DEPTH: usize = 100;
const CONJUNCTS: usize = 200;
const SCALING_SIZES: [usize; 4] = [50, 100, 200, 400];
/// Largest accepted log-log slope of checking time against AST size.
const MAX_SCALING_EXPONENT: f64 = 2.0;
const BETA_CASES: usize = 500;
const ORACLE_CASES: usize = 1000;
const UNIVERSE_CAP: usize = 50;
const TC_CASES: usize = 200;
const TC_MAX_NODES: usize = 12;
const IOTA_CASES: usize = 100;
const OMEGA_BUDGETS: [u64; 3] = [1_000, 10_000, 100_000];
const OMEGA_MEMBERS: u64 = 10;
const POWERSET_MAX: usize = 4;
const REPLACEMENT_CASES: usize = 200;
const CODEC_CASES: usize = 1000;
const GRAPH_CASES: usize = 200;
const GRAPH_MAX: usize = 8;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($c:expr, $($m:tt)*) => {
        if !$c {
            return Err(format!($($m)*));
        }
    };
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("catalog validity", catalog),
        ("decision procedure scaling", scaling),
        ("beta/eta laws", beta_eta),
        ("oracle equivalence", oracle),
        ("transitive closure semantics", transitive_closure),
        ("empty intersection and iota", iota),
        ("omega divergence", omega),
        ("extension packs", packs),
        ("codecs and function catalog", codecs),
        ("cli golden behaviour", cli),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(m) => println!("PASS {:>2} {name}: {m} ({secs:.2}s)", i + 1),
            Err(m) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {m} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn nodes(d: &Derivation, out: &mut Vec<(Rule, String)>) {
    out.push((d.rule, format!("{} > {}", print_formula(&d.formula, true), d.safe)));
    for p in &d.premises {
        nodes(p, out);
    }
}

fn catalog() -> Outcome {
    let start = Instant::now();
    let cfg = TheoryConfig::rst();
    ensure!(entries().len() == 22, "{} entries", entries().len());
    for e in entries() {
        let v = validate_term(&e.expansion(), &cfg).map_err(|err| format!("{}: {err}", e.name))?;
        ensure!(v.is_ok(), "{} rejected: {}", e.name, v.violations[0].describe());
    }
    let Term::Compr(c) = readable_term(&lookup("times").unwrap().expansion()) else {
        return Err("s times t is not a comprehension".into());
    };
    let d = check_safe(&c.body, &VarSet::singleton(c.binder.clone()), &cfg).unwrap().ok_or("product not derivable")?;
    let mut chain = Vec::new();
    nodes(&d, &mut chain);
    let want: [(Rule, &str); 7] = [
        (Rule::Exists, "{x}"),
        (Rule::Exists, "{a, x}"),
        (Rule::Conjunction, "a in s & b in t & x = <a, b> > {a, b, x}"),
        (Rule::Conjunction, "a in s & b in t > {a, b}"),
        (Rule::Generator, "a in s > {a}"),
        (Rule::Generator, "b in t > {b}"),
        (Rule::Generator, "x = <a, b> > {x}"),
    ];
    ensure!(chain.len() == want.len(), "product derivation has {} nodes", chain.len());
    for ((rule, text), (wr, wt)) in chain.iter().zip(want) {
        ensure!(*rule == wr && text.ends_with(wt), "product derivation step `{text}` [{}], expected `{wt}`", rule.id());
    }
    let t = start.elapsed();
    ensure!(t < CATALOG_LIMIT, "took {t:?}");
    Ok(format!("22/22 expansions valid, product chain matches, {:.0} ms", t.as_secs_f64() * 1e3))
}

fn xs(i: usize) -> Var {
    Var::new(format!("x{i}"))
}

/// `x1 ∈ a ∧ x2 ∈ x1 ∧ ... ∧ xn ∈ x(n-1)` with its full safe set.
fn chain(n: usize) -> (Formula, VarSet) {
    let mut f = Formula::mem(Term::Var(xs(1)), Term::var("a"));
    for i in 2..=n {
        f = Formula::and(f, Formula::mem(Term::Var(xs(i)), Term::Var(xs(i - 1))));
    }
    (f, (1..=n).map(xs).collect())
}

/// `{x1 | x1 ∈ {x2 | x2 ∈ ... {xn | xn ∈ a ∧ xn ∈ b} ... ∧ x2 ∈ b} ∧ x1 ∈ b}`.
fn nest(n: usize) -> Term {
    let mut t = Term::var("a");
    for i in (1..=n).rev() {
        t = Term::compr(xs(i), Formula::and(Formula::mem(Term::Var(xs(i)), t), Formula::mem(Term::Var(xs(i)), Term::var("b"))));
    }
    t
}

fn term_size(t: &Term) -> usize {
    match t {
        Term::Var(_) | Term::Const(_) => 1,
        Term::Compr(c) => 1 + formula_size(&c.body),
    }
}

fn formula_size(f: &Formula) -> usize {
    match f {
        Formula::Mem(a, b) | Formula::Eq(a, b) | Formula::Sub(a, b) => 1 + term_size(a) + term_size(b),
        Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => 1 + formula_size(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + formula_size(a) + formula_size(b),
        Formula::Tc(c) => 1 + formula_size(&c.body) + term_size(&c.from) + term_size(&c.to),
    }
}

/// Best of several runs.
fn time(mut f: impl FnMut() -> bool) -> Result<Duration, String> {
    let mut best = Duration::MAX;
    for _ in 0..5 {
        let s = Instant::now();
        ensure!(f(), "input rejected");
        best = best.min(s.elapsed());
    }
    Ok(best)
}

fn slope(points: &[(usize, Duration)]) -> f64 {
    let xy: Vec<(f64, f64)> = points.iter().map(|(n, t)| ((*n as f64).ln(), t.as_secs_f64().max(1e-9).ln())).collect();
    let k = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / k;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / k;
    let num: f64 = xy.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xy.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    num / den
}

fn scaling() -> Outcome {
    let cfg = TheoryConfig::rst();
    let nested = nest(NEST_DEPTH);
    let t_nest = time(|| validate_term(&nested, &cfg).unwrap().is_ok())?;
    ensure!(t_nest < DECISION_LIMIT, "depth-{NEST_DEPTH} nest took {t_nest:?}");
    let (f, x) = chain(CONJUNCTS);
    let t_chain = time(|| check_safe(&f, &x, &cfg).unwrap().is_some())?;
    ensure!(t_chain < DECISION_LIMIT, "{CONJUNCTS}-conjunct formula took {t_chain:?}");

    let mut chains = Vec::new();
    let mut nests = Vec::new();
    for n in SCALING_SIZES {
        let (f, x) = chain(n);
        chains.push((formula_size(&f), time(|| check_safe(&f, &x, &cfg).unwrap().is_some())?));
        let t = nest(n);
        nests.push((term_size(&t), time(|| validate_term(&t, &cfg).unwrap().is_ok())?));
    }
    let (sc, sn) = (slope(&chains), slope(&nests));
    let fmt = |p: &[(usize, Duration)]| {
        p.iter().map(|(n, t)| format!("{n}:{:.2}ms", t.as_secs_f64() * 1e3)).collect::<Vec<_>>().join(" ")
    };
    let detail = format!(
        "nest {NEST_DEPTH} in {:.1} ms, {CONJUNCTS} conjuncts in {:.1} ms; fit time ~ size^k: conjunctions k={sc:.2} [{}], nests k={sn:.2} [{}]",
        t_nest.as_secs_f64() * 1e3,
        t_chain.as_secs_f64() * 1e3,
        fmt(&chains),
        fmt(&nests)
    );
    ensure!(sc < MAX_SCALING_EXPONENT && sn < MAX_SCALING_EXPONENT, "{detail}");
    Ok(detail)
}

/// A closed comprehension `{x | φ}` valid under RST, parameters replaced by values of `u`.
fn closed_comprehension(r: &mut impl Rng, u: &[Hf]) -> (Var, Formula, Term) {
    let cfg = TheoryConfig::rst();
    let mut g = FormulaGen::new(&["x", "p", "q"], 3);
    let x = var("x");
    loop {
        let f = g.formula(r);
        if check_safe(&f, &VarSet::singleton(x.clone()), &cfg).unwrap().is_none() {
            continue;
        }
        let mut body = f;
        for p in ["p", "q"] {
            body = body.substitute(&var(p), &u.choose(r).unwrap().to_term());
        }
        return (x.clone(), body.clone(), Term::compr(x, body));
    }
}

fn beta_eta() -> Outcome {
    let mut r = rng(3);
    let u = vn(4);
    let th = Theory::default();
    let ev = |t: &Term, env: &Env| th.eval_term(t, env).map_err(|e| e.to_string());
    let truth = |f: &Formula| th.eval_bool(f, &Env::new()).map_err(|e| e.to_string());
    let mut bad = [0usize; 4];
    let mut example = String::new();
    for _ in 0..BETA_CASES {
        let (x, body, t) = closed_comprehension(&mut r, &u);
        let val = ev(&t, &Env::new())?;
        let shown = print_formula(&body, false);
        for a in &u {
            let lhs = truth(&Formula::mem(a.to_term(), t.clone()))?;
            let rhs = truth(&body.substitute(&x, &a.to_term()))?;
            if lhs != rhs || lhs != val.contains(a) {
                bad[0] += 1;
                example = format!("beta at {a} for {shown}");
            }
        }
        if ev(&Term::compr("z", Formula::mem(Term::var("z"), t.clone())), &Env::new())? != val {
            bad[1] += 1;
            example = format!("eta for {shown}");
        }
        let (_, body2, _) = closed_comprehension(&mut r, &u);
        let open = Term::compr(
            "w",
            Formula::or(
                Formula::and(Formula::mem(Term::var("w"), Term::var("p")), Formula::not(body2.substitute(&x, &Term::var("w")))),
                Formula::eq(Term::var("w"), Term::var("p")),
            ),
        );
        if ev(&open.substitute(&var("p"), &t), &Env::new())? != ev(&open, &Env::new().with("p", val.clone()))? {
            bad[2] += 1;
            example = format!("substitution for {shown}");
        }
        if ev(&rename_binders_term(&t, &mut 0), &Env::new())? != val {
            bad[3] += 1;
            example = format!("alpha for {shown}");
        }
    }
    ensure!(bad == [0; 4], "counterexamples beta/eta/subst/alpha = {bad:?}; e.g. {example}");
    Ok(format!("{BETA_CASES} closed comprehensions over V_4, {} beta instances, 0 counterexamples", BETA_CASES * u.len()))
}

fn oracle() -> Outcome {
    let mut r = rng(4);
    let u = vn(4);
    ensure!(u.len() <= UNIVERSE_CAP, "universe has {} values", u.len());
    let cfg = TheoryConfig::rst();
    let mut g = FormulaGen::new(&["a", "b", "c"], 3);
    let mut rows = 0;
    for i in 0..ORACLE_CASES {
        let (f, x) = safe_instance(&mut r, &mut g, &cfg, i % 5 != 0);
        let params = f.free_vars().difference(&x);
        let assignment: Assignment = params.iter().map(|p| (p.clone(), u.choose(&mut r).unwrap().clone())).collect();
        let env: Env = assignment.iter().cloned().collect();
        let plan = compile(&check_safe(&f, &x, &cfg).unwrap().unwrap()).map_err(|e| e.to_string())?;
        let got = execute_plan(&plan, &env, &cfg, &mut Budget::default()).map_err(|e| e.to_string())?;
        let want = brute_force(&f, &plan.cols, &assignment, &u);
        ensure!(got.rows == want, "plan differs from brute force on `{}` for {x}", print_formula(&f, false));
        rows += want.len();
    }
    Ok(format!("{ORACLE_CASES} safe formulas over a {}-value transitive universe, {rows} rows, all equal", u.len()))
}

/// The step relation `x ∈ g ∧ y ∈ x` and its closure by iterated composition.
fn composition(g: &Hf) -> (BTreeSet<(Hf, Hf)>, BTreeSet<(Hf, Hf)>) {
    let one: BTreeSet<(Hf, Hf)> =
        g.elems().iter().flat_map(|x| x.elems().iter().map(move |y| (x.clone(), y.clone()))).collect();
    let mut plus = one.clone();
    loop {
        let mut next = plus.clone();
        for (a, b) in &plus {
            for (c, d) in &one {
                if b == c {
                    next.insert((a.clone(), d.clone()));
                }
            }
        }
        if next == plus {
            return (plus, one);
        }
        plus = next;
    }
}

fn transitive_closure() -> Outcome {
    let mut r = rng(5);
    let th = Theory::new(TheoryConfig::pzf());
    let pairs = th.parse_term("{<u, v> | TC[x, y](x in g & y in x)(u, v)}").unwrap();
    let fwd = th.parse_term("{v | TC[x, y](x in g & y in x)(a, v)}").unwrap();
    let mut edges = 0;
    for _ in 0..TC_CASES {
        let n = r.gen_range(1..=TC_MAX_NODES);
        let nodes: Vec<Hf> = (0..n).map(|_| random_hf(&mut r, 4, 3)).collect();
        let g = Hf::set(nodes.iter().cloned());
        let start = nodes.choose(&mut r).unwrap().clone();
        let (plus, one) = composition(&g);
        let env = Env::new().with("g", g.clone()).with("a", start.clone());
        let got = th.eval_term(&pairs, &env).map_err(|e| e.to_string())?;
        ensure!(got == Hf::set(plus.iter().map(|(p, q)| Hf::pair(p, q))), "closure differs on g = {g}");
        let reach = th.eval_term(&fwd, &env).map_err(|e| e.to_string())?;
        let want: BTreeSet<Hf> = plus.iter().filter(|(p, _)| *p == start).map(|(_, q)| q.clone()).collect();
        ensure!(reach.elems().iter().cloned().collect::<BTreeSet<_>>() == want, "reach set differs on g = {g}");
        let mut again: BTreeSet<Hf> = one.iter().filter(|(p, _)| *p == start).map(|(_, q)| q.clone()).collect();
        for z in reach.elems() {
            again.extend(one.iter().filter(|(p, _)| p == z).map(|(_, q)| q.clone()));
        }
        ensure!(again == want, "one more step changes the reach set on g = {g}");
        edges += plus.len();
    }
    Ok(format!("{TC_CASES} graphs of <= {TC_MAX_NODES} nodes, {edges} closure pairs, fixpoint stable"))
}

fn iota() -> Outcome {
    let th = Theory::default();
    let e = th.eval_term(&th.parse_term("iota x. x in 0").unwrap(), &Env::new()).map_err(|e| e.to_string())?;
    ensure!(e == Hf::empty(), "iota over no satisfier gave {e}");
    let e = th.eval_term(&th.parse_term("Inter(0)").unwrap(), &Env::new()).map_err(|e| e.to_string())?;
    ensure!(e == Hf::empty(), "Inter(0) gave {e}");
    let mut r = rng(6);
    let u = vn(4);
    let x = var("x");
    let cfg = TheoryConfig::rst();
    let mut g = FormulaGen::new(&["x", "p"], 3);
    let (mut found, mut tries) = (0, 0);
    while found < IOTA_CASES {
        tries += 1;
        ensure!(tries < 200 * IOTA_CASES, "only {found} singleton formulas found");
        let f = g.formula(&mut r);
        if check_safe(&f, &VarSet::singleton(x.clone()), &cfg).unwrap().is_none() {
            continue;
        }
        let p = u.choose(&mut r).unwrap().clone();
        let ext = brute_force(&f, &[x.clone()], &vec![(var("p"), p.clone())], &u);
        if ext.len() != 1 {
            continue;
        }
        let want = &ext.iter().next().unwrap()[0];
        let got = th
            .eval_term(&iota_of(&x, &f), &Env::new().with("p", p))
            .map_err(|e| e.to_string())?;
        ensure!(&got == want, "iota of `{}` gave {got}, expected {want}", print_formula(&f, false));
        found += 1;
    }
    Ok(format!("iota over nothing and Inter(0) are 0; {IOTA_CASES} singleton formulas return their witness"))
}

/// `ιx.φ` built directly: `⋂{x | φ}`.
fn iota_of(x: &Var, f: &Formula) -> Term {
    let th = Theory::default();
    let inter = th.parse_term("Inter(s)").unwrap();
    inter.substitute(&var("s"), &Term::compr(x.clone(), f.clone()))
}

fn omega() -> Outcome {
    let pzf = TheoryConfig::pzf();
    let w = omega_term();
    ensure!(validate_term(&w, &pzf).map(|v| v.is_ok()).unwrap_or(false), "omega rejected under pzf");
    let mut th = Theory::new(pzf);
    for b in OMEGA_BUDGETS {
        th.budget = b;
        match th.eval_term(&w, &Env::new()) {
            Err(EvalError::BudgetExceeded { .. }) => {}
            other => return Err(format!("budget {b}: {other:?}")),
        }
    }
    th.budget = rudiset::eval::DEFAULT_BUDGET;
    for n in 1..=OMEGA_MEMBERS {
        let reach = th.parse_formula(&format!("TC[x, y](y = {{z | z = x | z in x}})(0, {n})")).unwrap();
        ensure!(th.eval_bool(&reach, &Env::new()) == Ok(true), "{n} not reached from 0");
        let member = Formula::mem(Hf::nat(n).to_term(), w.clone());
        ensure!(th.eval_bool(&member, &Env::new()) == Ok(true), "{n} not in omega");
    }
    Ok(format!("valid under pzf, budget exceeded at {OMEGA_BUDGETS:?}, 1..={OMEGA_MEMBERS} reached from 0 and in omega"))
}

fn subsets(s: &Hf) -> BTreeSet<Hf> {
    let es = s.elems();
    (0..1u32 << es.len()).map(|m| Hf::set((0..es.len()).filter(|i| m >> i & 1 == 1).map(|i| es[i].clone()))).collect()
}

fn packs() -> Outcome {
    let sep_src = "{x | ~(x in y)}";
    let rst = Theory::default();
    let t = rst.parse_term(sep_src).unwrap();
    ensure!(!validate_term(&t, &rst.config).unwrap().is_ok(), "{sep_src} accepted under rst");
    let sep = TheoryConfig::rst().with(rudiset::safety::Pack::Separation);
    ensure!(validate_term(&t, &sep).unwrap().is_ok(), "{sep_src} rejected under separation");

    let sub = Theory::new(TheoryConfig::rst().with(rudiset::safety::Pack::Subseteq));
    let power = sub.parse_term("{x | x sub t}").unwrap();
    let u = vn(4);
    let mut r = rng(8);
    for k in 0..=POWERSET_MAX {
        let elems: Vec<Hf> = u.choose_multiple(&mut r, k).cloned().collect();
        let s = Hf::set(elems);
        let got = sub.eval_term(&power, &Env::new().with("t", s.clone())).map_err(|e| e.to_string())?;
        let want = subsets(&s);
        ensure!(got.elems().len() == 1 << k, "|P(t)| = {} for |t| = {k}", got.elems().len());
        ensure!(got.elems().iter().cloned().collect::<BTreeSet<_>>() == want, "powerset of {s} differs");
    }

    let repl = TheoryConfig::rst().with(rudiset::safety::Pack::Replacement);
    let mut g = FormulaGen::new(&["y", "a"], 2);
    let (mut matched, mut unmatched) = (0, 0);
    let (x, y, w) = (var("x"), var("y"), var("w"));
    for _ in 0..REPLACEMENT_CASES {
        let phi = g.formula(&mut r);
        let (phi2, bound2) = match r.gen_range(0..3) {
            0 => (phi.clone(), y.clone()),
            1 => (phi.substitute(&y, &Term::Var(w.clone())), w.clone()),
            _ => (g.formula(&mut r), y.clone()),
        };
        let body = Formula::and(
            Formula::exists(y.clone(), phi.clone()),
            Formula::forall(bound2.clone(), Formula::implies(phi2.clone(), Formula::mem(Term::Var(x.clone()), Term::Var(bound2)))),
        );
        let alpha = match &body {
            Formula::And(l, rr) => match &**rr {
                Formula::Forall(v, imp) => match &**imp {
                    Formula::Implies(p2, _) => l.alpha_eq(&Formula::exists(v.clone(), (**p2).clone())),
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            },
            _ => unreachable!(),
        };
        let xs = VarSet::singleton(x.clone());
        let base = check_safe(&body, &xs, &TheoryConfig::rst()).unwrap().is_some();
        let with = check_safe(&body, &xs, &repl).unwrap().is_some();
        ensure!(!base, "`{}` accepted without replacement", print_formula(&body, false));
        ensure!(with == alpha, "`{}`: accepted = {with}, alpha match = {alpha}", print_formula(&body, false));
        if alpha {
            matched += 1;
        } else {
            unmatched += 1;
        }
    }
    Ok(format!(
        "separation flips {sep_src}; powersets for |t| <= {POWERSET_MAX} match; replacement {matched} matched accepted, {unmatched} unmatched rejected"
    ))
}

fn codecs() -> Outcome {
    let mut r = rng(9);
    for _ in 0..CODEC_CASES {
        let n = r.gen_range(0..64u64);
        ensure!(NatCodec::decode(&NatCodec::encode(n)) == Some(n), "nat {n}");
        let a = random_hf(&mut r, 4, 3);
        let b = random_hf(&mut r, 4, 3);
        ensure!(PairCodec::decode(&PairCodec::encode(&a, &b)) == Some((a.clone(), b.clone())), "pair <{a}, {b}>");
    }
    let th = Theory::default();
    let u = vn(4);
    let terms = ["Dom(f)", "Rng(f)", "f(x)", "f / s"].map(|s| th.parse_term(s).unwrap());
    for _ in 0..GRAPH_CASES {
        let k = r.gen_range(0..=GRAPH_MAX);
        let dom: Vec<Hf> = u.choose_multiple(&mut r, k).cloned().collect();
        let f = Hf::set(dom.iter().map(|a| Hf::pair(a, u.choose(&mut r).unwrap())));
        let graph = PairCodec::decode_relation(&f).ok_or("generated graph does not decode")?;
        let s = Hf::set(u.iter().filter(|_| r.gen_bool(0.3)).cloned());
        let x = u.choose(&mut r).unwrap().clone();
        let env = Env::new().with("f", f.clone()).with("s", s.clone()).with("x", x.clone());
        let apply = |v: &Hf| graph.iter().find(|(a, _)| a == v).map(|(_, b)| b.clone()).unwrap_or_else(Hf::empty);
        let want = [
            Hf::set(graph.iter().map(|(a, _)| a.clone())),
            Hf::set(graph.iter().map(|(_, b)| b.clone())),
            apply(&x),
            Hf::set(s.elems().iter().map(|v| Hf::pair(v, &apply(v)))),
        ];
        for (t, w) in terms.iter().zip(want) {
            let got = th.eval_term(t, &env).map_err(|e| e.to_string())?;
            ensure!(got == w, "{} on f = {f}: got {got}, expected {w}", rudiset::parser::print_term(t, true));
        }
    }
    Ok(format!("{CODEC_CASES} nat and pair round trips; Dom, Rng, f(x), f / s agree on {GRAPH_CASES} graphs"))
}

fn cli() -> Outcome {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/");
    let file = |n: &str| format!("{dir}{n}");
    let omega = "{y | exists x. x = 0 & TC[x, y](y = {z | z = x | z in x})(x, y)}";
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["check".into(), file("catalog.set")], 0),
        (vec!["check".into(), file("mixed.set")], 1),
        (vec!["check".into(), file("broken.set")], 2),
        (vec!["check".into(), "-e".into(), "{x | ~(x in y)}".into()], 1),
        (vec!["check".into(), "--enable".into(), "separation".into(), "-e".into(), "{x | ~(x in y)}".into()], 0),
        (vec!["eval".into(), "S(S(0))".into(), "--as-nat".into()], 0),
        (vec!["eval".into(), "{x | ~(x in 0)}".into()], 1),
        (vec!["eval".into(), "{x | x in".into()], 2),
        (vec!["eval".into(), "HF".into(), "--theory".into(), "rst-omega".into()], 3),
        (vec!["eval".into(), omega.into(), "--theory".into(), "pzf".into(), "--budget".into(), "100000".into()], 4),
        (vec!["expand".into(), "s times t".into()], 0),
        (vec!["derive".into(), "a in s & b in t".into(), "a,b".into()], 0),
        (vec!["derive".into(), "~(x in y)".into(), "x".into()], 1),
    ];
    for (args, want) in &cases {
        let out = Command::new(env!("CARGO_BIN_EXE_rudiset")).args(args).output().map_err(|e| e.to_string())?;
        ensure!(out.status.code() == Some(*want), "{args:?} exited {:?}, expected {want}", out.status.code());
        let mut json = vec!["--json".to_string(), "--no-timing".to_string()];
        json.extend(args.iter().cloned());
        let a = Command::new(env!("CARGO_BIN_EXE_rudiset")).args(&json).output().map_err(|e| e.to_string())?;
        let b = Command::new(env!("CARGO_BIN_EXE_rudiset")).args(&json).output().map_err(|e| e.to_string())?;
        ensure!(a.stdout == b.stdout && !a.stdout.is_empty(), "{json:?} JSON differs between runs");
        ensure!(a.status.code() == Some(*want), "{json:?} exited {:?}", a.status.code());
    }
    Ok(format!("{} invocations honour the exit-code contract; JSON byte-identical across two runs", cases.len()))
}
