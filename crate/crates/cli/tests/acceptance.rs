//! End-to-end acceptance checks. Prints one PASS or FAIL line per
//! criterion and exits non-zero if any fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;

use lr1gen::engine::{saw_token, ParseEvent, ParseStatus};
use lr1gen::grammar::SymbolId;
use lr1gen::tables::{deserialize, serialize, ParseTables};
use support::*;

type Check = Result<String, String>;

fn lr1gen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lr1gen")).args(args).output().expect("run lr1gen")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Analyzes a suite grammar into `dir` and returns the table path.
fn tables_file(dir: &Path, name: &str) -> Result<String, String> {
    let out = dir.join(format!("{name}.json"));
    let g = grammar_dir().join(format!("{name}.lr"));
    let res = lr1gen(&["analyze", path_str(&g), "--out", path_str(&out)]);
    if !res.status.success() {
        return Err(format!("analyze {name}: {}", String::from_utf8_lossy(&res.stderr)));
    }
    Ok(path_str(&out).to_string())
}

fn parse_cli(dir: &Path, grammar: &str, input: &str, extra: &[&str]) -> Result<(i32, String, String), String> {
    let tables = tables_file(dir, grammar)?;
    let input = input_dir().join(input);
    let mut args = vec!["parse", tables.as_str(), path_str(&input)];
    args.extend(extra);
    let res = lr1gen(&args);
    let code = res.status.code().unwrap_or(-1);
    Ok((code, String::from_utf8_lossy(&res.stdout).into_owned(), String::from_utf8_lossy(&res.stderr).into_owned()))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn discards(name: &str, input: &str) -> Vec<String> {
    let b = built(name);
    let text = std::fs::read_to_string(input_dir().join(input)).unwrap();
    let out = parse(&b.pager_tables, &b.spec, &text);
    out.events
        .iter()
        .filter_map(|e| match e {
            ParseEvent::Discard(t) => Some(saw_token(&b.pager_tables, t)),
            _ => None,
        })
        .collect()
}

fn criterion_1(dir: &Path) -> Check {
    let start = Instant::now();
    let (code, _, err) = parse_cli(dir, "test4", "test4.txt", &[])?;
    within(start, Duration::from_secs(1))?;
    for line in ["### Saw token: id='f'", "### expected: ; ,", "### Resuming parse with token: id='f'"] {
        ensure(err.lines().any(|l| l == line), || format!("missing {line:?} in\n{err}"))?;
    }
    ensure(code == 1, || format!("exit {code}"))?;
    let d = discards("test4", "test4.txt");
    ensure(d.is_empty(), || format!("discarded {d:?}"))?;
    Ok("missing comma recovers on id='f' with nothing discarded".into())
}

fn criterion_2(dir: &Path) -> Check {
    let start = Instant::now();
    let (code, _, err) = parse_cli(dir, "test5", "test5.c", &[])?;
    within(start, Duration::from_secs(1))?;
    ensure(err.lines().any(|l| l == "### Resuming parse with token: ;"), || err.clone())?;
    ensure(code == 1, || format!("exit {code}"))?;
    let d = discards("test5", "test5.c");
    ensure(d == ["=", "id='b'", "+", "id='c'"], || format!("discarded {d:?}"))?;
    Ok("extra '=' discards = b + c and resumes on ;".into())
}

/// Replaces state numbers so traces compare across machines.
fn without_states(trace: &str) -> Vec<String> {
    trace
        .lines()
        .map(|l| match l.strip_prefix("In ask_oracle with state ") {
            Some(rest) => format!("In ask_oracle with state N{}", &rest[rest.find(' ').unwrap()..]),
            None => l.to_string(),
        })
        .collect()
}

const TYPEDEF_TRACE: &str = "\
Token: typedef [1:1]
Token: unsigned [1:9]
Token: int [1:18]
Token: id = 'foo' [1:22]
In ask_oracle with state N and token id
id not changed
Token: ; [1:25]
Token: id = 'foo' [3:1]
In ask_oracle with state N and token id
Token: id changed to Token: TYPENAME
Token: id = 'b' [3:5]
In ask_oracle with state N and token id
id not changed
Token: ; [3:6]
Token: EOF [4:1]";

const POINTER_TRACE: &str = "\
Token: int [3:2]
Token: id = 'a' [3:6]
In ask_oracle with state N and token id
id not changed
Token: , [3:7]
Token: dualop Subtoken: * [3:9]
In ask_oracle with state N and token dualop
Token: dualop changed to Token: *
Token: id = 'b' [3:10]
In ask_oracle with state N and token id
id not changed
Token: ; [3:11]
Token: id = 'a' [5:2]
In ask_oracle with state N and token id
id not changed
Token: asop Subtoken: += [5:4]
In ask_oracle with state N and token asop
asop not changed
Token: dualop Subtoken: * [5:7]
In ask_oracle with state N and token dualop
dualop not changed
Token: id = 'b' [5:8]
In ask_oracle with state N and token id
id not changed
Token: ; [5:9]
Token: EOF [6:1]";

fn criterion_3(dir: &Path) -> Check {
    let (code, out, err) = parse_cli(dir, "c_subset", "typedef.c", &["--trace-tokens"])?;
    ensure(code == 0, || format!("exit {code}: {err}"))?;
    let changed = out.lines().filter(|l| *l == "Token: id changed to Token: TYPENAME").count();
    ensure(changed == 1, || format!("{changed} changes"))?;
    let got = without_states(&out);
    let want: Vec<String> = TYPEDEF_TRACE.lines().map(str::to_string).collect();
    ensure(got == want, || format!("trace differs:\n{out}"))?;
    Ok("typedef name becomes TYPENAME once; other ids unchanged".into())
}

fn criterion_4(dir: &Path) -> Check {
    let (code, out, err) = parse_cli(dir, "c_subset", "pointer.c", &["--trace-tokens"])?;
    ensure(code == 0, || format!("exit {code}: {err}"))?;
    let got = without_states(&out);
    let want: Vec<String> = POINTER_TRACE.lines().map(str::to_string).collect();
    ensure(got == want, || format!("trace differs:\n{out}"))?;
    Ok("'*' converted in the declarator, kept in the expression".into())
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let b = built("g1");
    ensure(b.pager.conflicts.is_empty(), || format!("{} conflicts", b.pager.conflicts.len()))?;
    let language: BTreeSet<&str> = ["a e c", "a e d", "b e c", "b e d"].into();
    let alpha: Vec<String> = ["a", "b", "c", "d", "e"].map(String::from).to_vec();
    let mut checked = 0;
    let mut wrong = Vec::new();
    for_each_string(&alpha, 4, |s| {
        checked += 1;
        let accepted = parse(&b.pager_tables, &b.spec, s).status == ParseStatus::Accepted;
        if accepted != language.contains(s) {
            wrong.push(s.to_string());
        }
    });
    ensure(wrong.is_empty(), || format!("wrong verdicts: {wrong:?}"))?;
    let lalr = lalr_reduce_conflicts(&b.model, &b.canonical);
    ensure(lalr > 0, || "core merge shows no conflict".into())?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("{checked} strings; {} merged states; core merge has {lalr} reduce-reduce conflicts", b.pager.states.len()))
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let names = suite();
    ensure(names.len() >= 6 && names.iter().any(|n| n == "c_subset"), || format!("suite {names:?}"))?;
    let mut total = 0usize;
    let mut modes = Vec::new();
    for name in &names {
        let b = built(name);
        let alpha = alphabet(&b.spec);
        let compare = |s: &str| -> Result<(), String> {
            let c = normalized(&b.canonical_tables, &parse(&b.canonical_tables, &b.spec, s));
            let p = normalized(&b.pager_tables, &parse(&b.pager_tables, &b.spec, s));
            ensure(c == p, || format!("{name} {s:?}:\n{c}\nvs\n{p}"))
        };
        let mut result = Ok(());
        if string_count(alpha.len(), 8) <= 600_000 {
            for_each_string(&alpha, 8, |s| {
                if result.is_ok() {
                    total += 1;
                    result = compare(s);
                }
            });
            modes.push(format!("{name}: exhaustive"));
        } else {
            let mut rng = StdRng::seed_from_u64(name.len() as u64);
            for _ in 0..50_000 {
                total += 1;
                compare(&random_string(&alpha, 8, &mut rng))?;
            }
            for _ in 0..5_000 {
                if let Some(s) = random_sentence(&b.model, &b.spec, 6, &mut rng) {
                    total += 2;
                    compare(&s)?;
                    compare(&mutate(&s, &alpha, &mut rng))?;
                }
            }
            modes.push(format!("{name}: random"));
        }
        result?;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("{} grammars, {total} inputs ({})", names.len(), modes.join(", ")))
}

fn criterion_7() -> Check {
    let mut states = 0;
    for name in suite() {
        let b = built(&name);
        let sim = simulated_first1(&b.model, &b.canonical).ok_or_else(|| format!("{name}: simulation did not terminate"))?;
        for (s, set) in sim.iter().enumerate() {
            let want: Vec<SymbolId> = set.iter().copied().collect();
            ensure(b.canonical.first1[s] == want, || format!("{name} canonical state {s}"))?;
            states += 1;
        }
        let map = merge_map(&b.canonical, &b.pager);
        let mut union = vec![BTreeSet::new(); b.pager.states.len()];
        for (c, &p) in map.iter().enumerate() {
            union[p].extend(sim[c].iter().copied());
        }
        for (s, set) in union.iter().enumerate() {
            let want: Vec<SymbolId> = set.iter().copied().collect();
            ensure(b.pager.first1[s] == want, || format!("{name} merged state {s}"))?;
            states += 1;
        }
    }
    Ok(format!("{states} states agree with single-token simulation"))
}

/// Calls `f` on every well-formed expression of at most `max` tokens.
fn for_each_expression(max: usize, f: &mut impl FnMut(&[&str])) {
    const PREFIX: [&str; 7] = ["+", "-", "*", "&", "~", "!", "++"];
    const INFIX: [&str; 4] = ["+", "-", "*", "&"];
    fn go(toks: &mut Vec<&'static str>, operand_next: bool, max: usize, f: &mut impl FnMut(&[&str])) {
        if !operand_next {
            f(toks);
        }
        if toks.len() == max {
            return;
        }
        let choices: Vec<&'static str> =
            if operand_next { PREFIX.iter().copied().chain(["a"]).collect() } else { INFIX.to_vec() };
        for c in choices {
            toks.push(c);
            go(toks, !operand_next || c != "a", max, f);
            toks.pop();
        }
    }
    go(&mut Vec::new(), true, max, f);
}

fn criterion_8() -> Check {
    let start = Instant::now();
    let dynamic = built("expr");
    let reference = built("expr_ref");
    let shape = |b: &Built, s: &str| {
        let out = parse(&b.pager_tables, &b.spec, s);
        (out.status == ParseStatus::Accepted).then(|| out.tree.unwrap().shape())
    };
    ensure(shape(&dynamic, "a + a * a").as_deref() == Some("(n_plus a (n_mul a a))"), || "a+b*c".into())?;
    ensure(shape(&dynamic, "a + a + a").as_deref() == Some("(n_plus (n_plus a a) a)"), || "a+b+c".into())?;
    let mut count = 0;
    let mut first_bad = None;
    for_each_expression(7, &mut |toks| {
        if first_bad.is_some() {
            return;
        }
        count += 1;
        let s = toks.join(" ");
        let (d, r) = (shape(&dynamic, &s), shape(&reference, &s));
        if d.is_none() || d != r {
            first_bad = Some(format!("{s:?}: {d:?} vs {r:?}"));
        }
    });
    if let Some(bad) = first_bad {
        return Err(bad);
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("{count} expressions match the stratified grammar"))
}

fn criterion_9() -> Check {
    let mut rng = StdRng::seed_from_u64(9);
    let (mut cases, mut recoveries) = (0, 0);
    for name in suite() {
        let b = built(&name);
        let alpha = alphabet(&b.spec);
        for i in 0..400 {
            let text = match random_sentence(&b.model, &b.spec, 6, &mut rng) {
                Some(s) if i % 4 != 0 => mutate(&s, &alpha, &mut rng),
                _ => random_string(&alpha, 12, &mut rng),
            };
            for t in [&b.pager_tables, &b.canonical_tables] {
                let out = parse(t, &b.spec, &text);
                let bad = recovery_violations(&out);
                ensure(bad.is_empty(), || format!("{name} {text:?}: {bad:?}"))?;
                recoveries += out.events.iter().filter(|e| matches!(e, ParseEvent::Recover { .. })).count();
                cases += 1;
            }
        }
    }
    ensure(recoveries > 0, || "no recoveries exercised".into())?;
    Ok(format!("{cases} fuzzed parses, {recoveries} recoveries"))
}

fn criterion_10(dir: &Path) -> Check {
    let names = suite();
    for name in &names {
        let first = std::fs::read(tables_file(dir, name)?).unwrap();
        let second = std::fs::read(tables_file(dir, name)?).unwrap();
        ensure(first == second, || format!("{name}: table files differ"))?;
        let b = built(name);
        for t in [&b.pager_tables, &b.canonical_tables] {
            let text = serialize(t);
            let back: ParseTables = deserialize(&text).map_err(|e| format!("{name}: {e}"))?;
            ensure(&back == t && serialize(&back) == text, || format!("{name}: round trip differs"))?;
        }
        ensure(String::from_utf8_lossy(&first) == serialize(&b.pager_tables), || format!("{name}: cli tables differ"))?;
    }
    Ok(format!("{} grammars analyze identically and round trip", names.len()))
}

fn state_counts() -> Check {
    let mut notes = Vec::new();
    for name in suite() {
        let b = built(&name);
        let cores = distinct_cores(&b.canonical);
        let merged = b.pager.states.len();
        if lalr_reduce_conflicts(&b.model, &b.canonical) == 0 {
            ensure(merged == cores, || format!("{name}: {merged} states, {cores} cores"))?;
        } else {
            ensure(merged > cores, || format!("{name}: {merged} states, {cores} cores"))?;
            notes.push(format!("{name} {merged} > {cores}"));
        }
    }
    Ok(format!("merged machines match core counts except {}", notes.join(", ")))
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let checks: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("1 missing comma listing", Box::new(|| criterion_1(dir))),
        ("2 discard-to-semicolon listing", Box::new(|| criterion_2(dir))),
        ("3 typedef oracle trace", Box::new(|| criterion_3(dir))),
        ("4 generic-token oracle trace", Box::new(|| criterion_4(dir))),
        ("5 full LR(1) power", Box::new(criterion_5)),
        ("6 merged equals canonical", Box::new(criterion_6)),
        ("7 FIRST(1) union property", Box::new(criterion_7)),
        ("8 dynamic precedence", Box::new(criterion_8)),
        ("9 recovery resumption", Box::new(criterion_9)),
        ("10 determinism and round trip", Box::new(|| criterion_10(dir))),
        ("state counts", Box::new(state_counts)),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        match check() {
            Ok(note) => println!("PASS criterion {name}: {note} ({:.2?})", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
