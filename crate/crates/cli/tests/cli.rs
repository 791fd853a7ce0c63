use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

const TABLE1: &str = "\
event_id,case_id,timestamp,event_name,status
e0001,0001,1675086864052,Review request,NEW
e0002,0002,1675147138009,Review request,NEW
e0003,0001,1675160180724,Calculate terms,WIP
e0004,0002,1675213914098,Define terms,WIP
e0005,0001,1675220315296,Prepare contract,WIP
e0006,0002,1675282027657,Prepare contract,WIP
e0007,0002,1675414104525,Send quote,SENT
";

const SHIPPING: &str = "\
event_id,case_id,timestamp,event_name
e1,1,2023-10-15,order_received
e2,1,2023-10-16,package_collected
e3,1,2023-10-17,package_checked
e4,1,2023-10-23,package_sent
";

const SHIPPING_QUERY: &str = "SELECT case_id, event_name, event_time FROM eventlog \
    WHERE event_name MATCHES ('package_sent' ~> 'package_accepted')";

fn csv_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn scc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scc"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

/// Table 1 with the timestamp column named as in the shipping query.
fn table1_event_time() -> NamedTempFile {
    csv_file(&TABLE1.replacen("timestamp", "event_time", 1))
}

#[test]
fn shipping_query_on_table1_is_empty() {
    let log = table1_event_time();
    let out = scc(&[
        "query",
        "--log",
        path(&log),
        "--ts-col",
        "event_time",
        SHIPPING_QUERY,
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout(&out), "case_id,event_name,event_time\n");
}

#[test]
fn explain_prints_the_plan_first() {
    let log = table1_event_time();
    let out = scc(&[
        "query",
        "--log",
        path(&log),
        "--ts-col",
        "event_time",
        "--explain",
        SHIPPING_QUERY,
    ]);
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "π[case_id,event_name,event_time](σ_P[event_name: 'package_sent' ~> 'package_accepted'](eventlog))"
    );
}

#[test]
fn query_formats_and_semantics() {
    let log = csv_file(TABLE1);
    let q =
        "SELECT case_id FROM eventlog WHERE event_name MATCHES 'Review request' ~> 'Send quote'";
    let out = scc(&["query", "--log", path(&log), q]);
    assert_eq!(stdout(&out), "case_id\n0002\n0002\n0002\n0002\n");
    let out = scc(&[
        "query",
        "--log",
        path(&log),
        "--set-semantics",
        "--format",
        "jsonl",
        q,
    ]);
    assert_eq!(stdout(&out), "{\"case_id\":\"0002\"}\n");
    let out = scc(&["query", "--log", path(&log), "--format", "pretty", q]);
    assert!(stdout(&out).ends_with("(4 rows)\n"));
}

#[test]
fn query_from_file() {
    let log = csv_file(TABLE1);
    let q = csv_file("SELECT event_id FROM eventlog WHERE status = 'SENT'");
    let out = scc(&["query", "--log", path(&log), "--file", path(&q)]);
    assert_eq!(stdout(&out), "event_id\ne0007\n");
}

#[test]
fn exit_statuses() {
    let log = csv_file(TABLE1);
    assert_eq!(
        scc(&[
            "query",
            "--log",
            "/no/such/log.csv",
            "SELECT case_id FROM eventlog"
        ])
        .status
        .code(),
        Some(2)
    );
    let bad = scc(&["query", "--log", path(&log), "SELECT FROM eventlog"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("syntax error"));
    assert_eq!(
        scc(&["query", "--log", path(&log), "SELECT nope FROM eventlog"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        scc(&["query", "--log", path(&log), "SELECT case_id FROM other"])
            .status
            .code(),
        Some(1)
    );
    let malformed = csv_file("event_id,case_id,timestamp\ne1,1\n");
    assert_eq!(
        scc(&[
            "query",
            "--log",
            path(&malformed),
            "SELECT case_id FROM eventlog"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(scc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(scc(&["--help"]).status.code(), Some(0));
}

#[test]
fn strict_grammar_flag() {
    let log = csv_file(TABLE1);
    let q = "SELECT case_id FROM eventlog WHERE BEHAVIOUR status = 'SENT' AS s MATCHES s";
    assert_eq!(
        scc(&["query", "--log", path(&log), q]).status.code(),
        Some(0)
    );
    assert_eq!(
        scc(&["query", "--log", path(&log), "--strict-grammar", q])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn match_lists_minimal_segment_first() {
    let log = csv_file(SHIPPING);
    let (t1, t2, t4) = ("1697328000000", "1697414400000", "1698019200000");
    let out = scc(&[
        "match",
        "--log",
        path(&log),
        "event_name",
        "'package_collected' ~> 'package_sent'",
    ]);
    assert_eq!(
        stdout(&out).lines().next().unwrap(),
        format!("1\t{t2}\t{t4}")
    );
    let out = scc(&[
        "match",
        "--log",
        path(&log),
        "event_name",
        "'order_received' -> ('package_collected' ~> 'package_sent')*",
    ]);
    assert!(stdout(&out).lines().any(|l| l == format!("1\t{t1}\t{t4}")));
    let with_oracle = scc(&[
        "match",
        "--log",
        path(&log),
        "--oracle-bound",
        "12",
        "event_name",
        "'order_received' -> ('package_collected' ~> 'package_sent')*",
    ]);
    assert_eq!(stdout(&with_oracle), stdout(&out));
}

#[test]
fn match_single_event_and_empty() {
    let log = csv_file("event_id,case_id,timestamp,event_name\ne1,a,5,x\ne2,b,6,y\n");
    let out = scc(&[
        "match",
        "--log",
        path(&log),
        "--case",
        "a",
        "event_name",
        "ANY",
    ]);
    assert_eq!(stdout(&out), "a\t5\t5\n");
    let out = scc(&["match", "--log", path(&log), "event_name", "'x'*"]);
    assert_eq!(stdout(&out), "a\tempty\na\t5\t5\nb\tempty\n");
    let out = scc(&[
        "match",
        "--log",
        path(&log),
        "--oracle-bound",
        "0",
        "event_name",
        "ANY",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn merged_cases_show_evenness() {
    let even =
        csv_file("event_id,case_id,timestamp,event_name\ne1,a,1,x\ne2,b,2,x\ne3,a,3,x\ne4,c,4,x\n");
    let odd = csv_file("event_id,case_id,timestamp,event_name\ne1,a,1,x\ne2,b,2,x\ne3,a,3,x\n");
    let pattern = "START (ANY -> ANY)* END";
    let out = scc(&[
        "match",
        "--log",
        path(&even),
        "--merge-cases",
        "event_name",
        pattern,
    ]);
    assert_eq!(stdout(&out), "merged\t1\t4\n");
    let out = scc(&[
        "match",
        "--log",
        path(&odd),
        "--merge-cases",
        "event_name",
        pattern,
    ]);
    assert_eq!(stdout(&out), "");
}

#[test]
fn translate_emits_identifier_rule_and_facts() {
    let log = csv_file(TABLE1);
    let out = scc(&[
        "translate",
        "--log",
        path(&log),
        "SELECT case_id FROM eventlog WHERE event_name MATCHES 'Send quote'",
    ]);
    let text = stdout(&out);
    assert!(text.contains(
        "p0_0(T,T,C) :- segment(T,T,C), event(C,E,T), attr_event_name(C,E,\"v:Send quote\")."
    ));
    assert_eq!(
        stdout(&scc(&[
            "translate",
            "--log",
            path(&log),
            "SELECT case_id FROM eventlog WHERE event_name MATCHES 'Send quote'"
        ])),
        text
    );

    let out = scc(&[
        "translate",
        "--log",
        path(&log),
        "--with-facts",
        "SELECT case_id FROM eventlog",
    ]);
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("event(")).count(), 7);
    assert_eq!(text.lines().filter(|l| l.starts_with("Output(")).count(), 1);
}

#[test]
fn check_reports_equal_and_mismatch() {
    let log = table1_event_time();
    let out = scc(&[
        "check",
        "--log",
        path(&log),
        "--ts-col",
        "event_time",
        SHIPPING_QUERY,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("equal"));

    let out = scc(&["check", "--random", "100", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    let table1 = csv_file(TABLE1);
    let q =
        "SELECT event_id FROM eventlog WHERE event_name MATCHES 'Review request' ~> 'Send quote'";
    let out = scc(&[
        "check",
        "--log",
        path(&table1),
        "--fault",
        "drop-pattern",
        q,
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("+ (\"e:e0001\")"));
}

#[test]
fn gen_is_deterministic_and_loadable() {
    let args = [
        "gen",
        "--cases",
        "2",
        "--min-events",
        "3",
        "--max-events",
        "4",
        "--seed",
        "7",
    ];
    let (a, b) = (scc(&args), scc(&args));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let rows = text.lines().count() - 1;
    assert!((6..=8).contains(&rows), "{text}");

    let log = csv_file(&text);
    let out = scc(&[
        "query",
        "--log",
        path(&log),
        "SELECT event_id FROM eventlog",
    ]);
    assert_eq!(out.status.code(), Some(0));

    let empty = scc(&["gen", "--cases", "0"]);
    assert_eq!(
        stdout(&empty),
        "event_id,case_id,timestamp,event_name,status\n"
    );
    assert_eq!(
        scc(&["gen", "--min-events", "5", "--max-events", "2"])
            .status
            .code(),
        Some(1)
    );
}
