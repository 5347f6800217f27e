use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coconvex")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

const T1: &str = "((1,2),(3,(4,5)));";
const T2: &str = "(1,3,(2,(4,5)));";

#[test]
fn documented_examples() {
    assert_eq!(stdout(&["construct", "thm42", "--n", "7"]), "5 3 1 7 6 2 4\n");
    assert_eq!(stdout(&["expect", "exact", "--n", "4"]), "1/3\n");
    assert_eq!(stdout(&["expect", "exact", "--n", "5"]), "31/15\n");
    let dk = stdout(&["dist", "--metric", "dk", "--k", "2", T1, T2]);
    let rf = stdout(&["dist", "--metric", "rf", T1, T2]);
    assert_eq!(dk, rf);
    assert_eq!(stdout(&["dist", "--metric", "quartet", T1, T2]), "2\n");
    assert_eq!(stdout(&["dist", "--metric", "dk", "--k", "3", T1, T2]), "4\n");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["convex", "test", T1, "1,2|3|4,5"]).status.code(), Some(0));
    assert_eq!(run(&["convex", "test", T1, "1,3|2,4|5"]).status.code(), Some(1));
    assert_eq!(run(&["convex", "test", "(1,2,(3,4)", "1|2|3|4"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["dist", "--metric", "dk", T1, T2]).status.code(), Some(2));
    let guarded = run(&["extremal", "cn", "--n", "12"]);
    assert_eq!(guarded.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&guarded.stderr).starts_with("error[guard_exceeded]"));
    assert_eq!(run(&["extremal", "cnk", "--n", "6", "--k", "2", "--max-n", "5"]).status.code(), Some(3));
}

#[test]
fn json_errors_are_machine_readable() {
    let out = run(&["--format", "json", "expect", "exact", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["code"], "out_of_range");
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn outputs_carry_schema() {
    let csv = stdout(&["--format", "csv", "convex", "count", T1]);
    assert!(csv.starts_with("# coconvex schema 1\nn,k,ell,nontrivial,count\n"));
    let json = stdout(&["--format", "json", "dist", T1, T2]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["rf"], 2);
    let trend = stdout(&["--format", "csv", "expect", "trend", "--from", "4", "--to", "6"]);
    assert!(trend.contains("n,E_num,E_den,ratio_float\n4,1,3,"));
}

#[test]
fn files_and_names() {
    let dir = tempfile::tempdir().unwrap();
    let trees = dir.path().join("trees.nwk");
    fs::write(&trees, "((ant,bee),(cat,(dog,eel)));\n(ant,cat,(bee,(dog,eel)));\n").unwrap();
    let t = trees.to_str().unwrap();
    // names are numbered in sorted order, so these match T1 and T2
    assert_eq!(stdout(&["dist", "--metric", "rf", t]), "2\n");
    let matrix = stdout(&["dist", "matrix", "--metric", "rf", t]);
    assert_eq!(matrix, "# coconvex schema 1\ntree,t1,t2\nt1,0,2\nt2,2,0\n");

    let taxa = dir.path().join("taxa.tsv");
    fs::write(&taxa, "1\teel\n2\tdog\n3\tcat\n4\tbee\n5\tant\n").unwrap();
    let shared = stdout(&["--taxa", taxa.to_str().unwrap(), "coconvex", "count", t]);
    assert_eq!(shared, stdout(&["coconvex", "count", t]));

    let list = dir.path().join("shared.txt");
    let out = run(&["coconvex", "enum", t, "--k", "2", "--out", list.to_str().unwrap()]);
    assert!(out.status.success());
    let mut lines: Vec<String> = fs::read_to_string(&list).unwrap().lines().map(String::from).collect();
    lines.sort();
    assert_eq!(lines, ["1,2,3,4|5", "1,2,3,5|4", "1,2,3|4,5", "1,2,4,5|3", "1,3,4,5|2", "1|2,3,4,5"]);
}

#[test]
fn enumeration_streams_every_character() {
    let out = stdout(&["convex", "enum", "(1,2,(3,(4,(5,(6,7)))));"]);
    assert_eq!(out.lines().count(), 233);
    let only = stdout(&["convex", "enum", "(1,2,(3,4));", "--k", "2"]);
    assert_eq!(only.lines().count(), 5);
}

#[test]
fn extremal_commands() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("search.json");
    let witnesses = dir.path().join("witnesses.txt");
    let args = [
        "--format",
        "json",
        "extremal",
        "cnk",
        "--n",
        "7",
        "--k",
        "3",
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--witnesses",
        witnesses.to_str().unwrap(),
    ];
    let v: serde_json::Value = serde_json::from_str(&stdout(&args)).unwrap();
    assert_eq!(v["value"], "21");
    assert!(ckpt.exists());
    let listed = fs::read_to_string(&witnesses).unwrap();
    let stored = v["witness_count"].as_u64().unwrap().min(100) as usize;
    assert_eq!(listed.lines().count(), stored);
    assert!(listed.lines().all(|l| l.split(' ').count() == 7));
    // resumed from a finished checkpoint
    let again: serde_json::Value = serde_json::from_str(&stdout(&args)).unwrap();
    assert_eq!(again, v);

    let built = stdout(&["extremal", "cnk", "--n", "7", "--k", "3", "--construction", "thm42"]);
    assert!(built.starts_with("c_{7,3} = 21\n"), "{built}");
    let bounds = stdout(&["--format", "csv", "extremal", "bounds", "--n", "8", "--exhaustive"]);
    assert!(bounds.contains("\n8,6,66,"), "{bounds}");
    assert!(bounds.contains("n,k,value,bound_31,bound_32,bound_33,witness_count"));
}

#[test]
fn constructions_and_agreement() {
    let family = stdout(&["construct", "thm62", "--n", "12", "--m", "3"]);
    assert_eq!(family.lines().count(), 7);
    assert_eq!(family.lines().next(), Some("1 2 3 4 5 6 7 8 9 10 11 12"));
    let ws = stdout(&["construct", "thm31-witnesses", "--perm", "1 2 3 4 5 6 7 8", "--ell", "4"]);
    assert!(ws.lines().count() > 0);
    let seeded = stdout(&["--seed", "3", "construct", "thm31-witnesses", "--n", "8", "--ell", "4"]);
    assert_eq!(seeded, stdout(&["--seed", "3", "construct", "thm31-witnesses", "--n", "8", "--ell", "4"]));
    let y = stdout(&["agree", "lis", "(1,2,(3,(4,5)));", "(1,3,(2,(4,5)));"]);
    assert_eq!(y.split_whitespace().count(), 4);
    assert_eq!(run(&["agree", "lis", "((1,2),(3,4),(5,6));", "(1,2,(3,(4,(5,6))));"]).status.code(), Some(2));
}

#[test]
fn monte_carlo_ignores_thread_count() {
    let a = stdout(&["--seed", "7", "--threads", "1", "expect", "mc", "--n", "9", "--samples", "200"]);
    let b = stdout(&["--seed", "7", "--threads", "3", "expect", "mc", "--n", "9", "--samples", "200"]);
    assert_eq!(a, b);
    let c = stdout(&["--seed", "8", "expect", "mc", "--n", "9", "--samples", "200"]);
    assert_ne!(a, c);
}

#[test]
fn verify_reports_per_criterion() {
    let out = run(&["verify", "suite", "--only", "2,4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "PASS  2 oracle equivalence\nPASS  4 small-k extremal values\n");
}
