use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn rudiset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rudiset")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    rudiset(args).status.code().expect("exit code")
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(rudiset(args).stdout).unwrap()
}

fn with_stdin(args: &[&str], input: &str) -> String {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_rudiset"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    String::from_utf8(child.wait_with_output().unwrap().stdout).unwrap()
}

#[test]
fn check_exit_codes() {
    assert_eq!(code(&["check", &data("catalog.set")]), 0);
    assert_eq!(code(&["check", &data("mixed.set")]), 1);
    assert_eq!(code(&["check", &data("broken.set")]), 2);
    assert_eq!(code(&["check", &data("no-such-file.set")]), 2);
    assert_eq!(code(&["check", &data("pzf.set")]), 0);
    assert_eq!(code(&["check", "-e", "{x | ~(x in y)}"]), 1);
    assert_eq!(code(&["check", "--enable", "separation", "-e", "{x | ~(x in y)}"]), 0);
    assert_eq!(code(&["check", "-e", "TC[x, y](y in x)(a, b)"]), 1);
    assert_eq!(code(&["check"]), 2);
    assert_eq!(code(&["check", "--theory", "zf", "-e", "0"]), 2);
    assert_eq!(code(&["check", "--enable", "choice", "-e", "0"]), 2);
}

#[test]
fn violations_carry_spans() {
    let out = stdout(&["check", "-e", "{x | ~(x in y)}"]);
    assert!(out.contains("1:1-1:15"), "{out}");
    assert!(out.contains("negation"), "{out}");
}

#[test]
fn eval_exit_codes() {
    assert_eq!(stdout(&["eval", "{x in {0, {0}} | x = 0}"]).trim(), "{{}}");
    assert_eq!(stdout(&["eval", "S(S(0))", "--as-nat"]).trim(), "2");
    assert_eq!(stdout(&["eval", "<0, 1>", "--as-pairs", "--as-nat"]).trim(), "<0, 1>");
    assert_eq!(stdout(&["eval", "TC[x, y](y in x)(3, 0)", "--theory", "pzf"]).trim(), "true");
    let omega = "{y | exists x. x = 0 & TC[x, y](y = {z | z = x | z in x})(x, y)}";
    assert_eq!(code(&["eval", omega, "--theory", "pzf", "--budget", "100000"]), 4);
    assert_eq!(code(&["eval", omega]), 1);
    assert_eq!(code(&["eval", "HF", "--theory", "rst-omega"]), 3);
    assert_eq!(code(&["eval", "{x | ~(x in 0)}", "--enable", "separation"]), 3);
    assert_eq!(code(&["eval", "{x | x in y}"]), 3);
    assert_eq!(code(&["eval", "{x | "]), 2);
    assert_eq!(code(&["eval", "{x | ~(x in 0)}"]), 1);
}

#[test]
fn expand_and_derive() {
    assert_eq!(stdout(&["expand", "{x | x in a}"]).trim(), "{x | x in a}");
    let times = stdout(&["expand", "s times t"]);
    assert!(times.starts_with("{x | exists a. exists b. a in s & b in t & x = "), "{times}");
    assert_eq!(code(&["expand", "<a"]), 2);
    let d = stdout(&["derive", "a in s & b in t", "a,b"]);
    assert!(d.lines().next().unwrap().ends_with("[conjunction]"), "{d}");
    assert_eq!(d.matches("[generator]").count(), 2, "{d}");
    let out = rudiset(&["derive", "~(x in y)", "{x}"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("not derivable") && text.contains("negation"), "{text}");
    let tc = rudiset(&["derive", "TC[x, y](y in x)(a, b)", "b"]);
    assert_eq!(tc.status.code(), Some(1));
    assert!(String::from_utf8(tc.stdout).unwrap().contains("unsupported construct"));
    assert_eq!(code(&["derive", "TC[x, y](y in x)(a, b)", "b", "--theory", "pzf"]), 0);
    assert_eq!(code(&["derive", "{x | x in a}", "x"]), 2);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["eval", "0", "--budget", "lots"]), 2);
}

#[test]
fn json_is_byte_stable() {
    let files = [data("catalog.set"), data("mixed.set"), data("pzf.set")];
    let runs: Vec<Vec<&str>> = vec![
        vec!["--json", "--no-timing", "check", &files[0], &files[1], &files[2]],
        vec!["--json", "--no-timing", "check", "-e", "{x | ~(x in y)}", "-e", "s times t"],
        vec!["--json", "eval", "<0, 1>", "--as-pairs"],
        vec!["--json", "eval", "{x | x in HF}", "--theory", "rst-omega", "--budget", "500"],
        vec!["--json", "expand", "<a, b, c>"],
        vec!["--json", "derive", "a in s & b in t & x = <a, b>", "a, b, x"],
        vec!["--json", "derive", "~(x in y)", "x"],
    ];
    for args in runs {
        let a = rudiset(&args);
        let b = rudiset(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
        let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
        assert_eq!(v["schema"], 1, "{args:?}");
        assert_eq!(v["exit_code"].as_i64().map(|c| c as i32), a.status.code(), "{args:?}");
    }
}

#[test]
fn json_check_report_fields() {
    let out = stdout(&["--json", "--no-timing", "check", "-e", "{x | x in a & y in x}", "-e", "{x | ~(x in y)}"]);
    assert!(!out.contains("timing_us"));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let es = &v["files"][0]["expressions"];
    assert_eq!(es[0]["valid"], true);
    assert_eq!(es[0]["evaluable"], true);
    assert_eq!(es[0]["safe_sets"], serde_json::json!([["x", "y"]]));
    assert_eq!(es[0]["derivation"]["rules"]["generator"], 1);
    assert_eq!(es[1]["valid"], false);
    assert_eq!(es[1]["violations"][0]["span"], "2:1-2:15");
    assert_eq!(v["summary"]["invalid"], 1);
    let timed = stdout(&["--json", "check", "-e", "0"]);
    assert!(timed.contains("timing_us"));
}

#[test]
fn repl_session() {
    let script = "def three := S(S(S(0)))\n\
                  eval three --as-nat\n\
                  :check {x | x in three}\n\
                  {x | ~(x in 0)}\n\
                  5 in {y | exists x. x = 0 & TC[x, y](y = {z | z = x | z in x})(x, y)}\n\
                  :set theory pzf\n\
                  5 in {y | exists x. x = 0 & TC[x, y](y = {z | z = x | z in x})(x, y)}\n\
                  :derive {a, b} a in s & b in t\n\
                  :expand <a, b>\n\
                  :bogus\n\
                  three\n\
                  :quit\n\
                  eval 0\n";
    let out = with_stdin(&["repl"], script);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "defined three");
    assert_eq!(lines[1], "3");
    assert_eq!(lines[2], "ok");
    assert!(lines[3].starts_with("error: "), "{out}");
    assert!(lines.iter().any(|l| l.contains("unsupported construct")), "{out}");
    let after = out.split("\ntheory pzf\n").nth(1).unwrap();
    assert_eq!(after.lines().next(), Some("true"), "{out}");
    assert!(out.contains("[conjunction]"));
    assert!(out.contains("{x | x = {x1 | x1 = a} | x = {x1 | x1 = a | x1 = b}}"), "{out}");
    assert!(out.contains("unknown command"));
    assert!(out.trim_end().ends_with("{{}, {{}}, {{}, {{}}}}"), "{out}");
}

#[test]
fn repl_save_and_load() {
    let dir = std::env::temp_dir().join(format!("rudiset-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("session.set");
    let f = file.display().to_string();
    let out = with_stdin(&["repl", "--theory", "pzf"], &format!("def two := S(S(0))\n:save {f}\n"));
    assert!(out.contains("saved 1 definitions"), "{out}");
    let saved = std::fs::read_to_string(&file).unwrap();
    assert_eq!(saved, "theory pzf\ndef two := S(S(0))\n");
    assert_eq!(code(&["check", &f]), 0);
    let out = with_stdin(&["repl"], &format!(":load {f}\neval two --as-nat\n"));
    assert!(out.lines().any(|l| l == "2"), "{out}");
    std::fs::remove_dir_all(&dir).unwrap();
}
