use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ifibf"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> String {
    let out: Output = bin().args(args).output().expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn find(rows: &[Vec<String>], pred: impl Fn(&[String]) -> bool) -> &[String] {
    rows.iter().find(|r| pred(r)).expect("row present")
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn table3_rows() {
    let r = rows(&run(&["table3"]));
    assert_eq!(r[0], ["example", "scheme", "level", "repetition", "n_distinct", "f"]);
    let f = |ex: &str, scheme: &str, level: &str| {
        num(&find(&r, |row| row[0] == ex && row[1] == scheme && row[2] == level)[5])
    };
    assert!((f("I", "4IBF", "all") - 0.0266).abs() < 5e-4);
    assert!((f("II", "2IBF", "2") - 0.1982).abs() < 5e-4);
    for scheme in ["SBF", "2IBF", "4IBF"] {
        assert!((f("III", scheme, "all") - 0.0074).abs() < 5e-4);
    }
}

#[test]
fn analytic_output_ignores_the_seed() {
    for cmd in ["table3", "fpr", "capacity", "naming-bits", "multi-fib"] {
        assert_eq!(run(&[cmd, "--seed", "1"]), run(&[cmd, "--seed", "2"]));
    }
}

#[test]
fn monte_carlo_is_seeded() {
    let a = run(&["fpr", "--k-max", "2", "--monte-carlo", "--trials", "2000", "--seed", "5"]);
    assert_eq!(a, run(&["fpr", "--k-max", "2", "--monte-carlo", "--trials", "2000", "--seed", "5"]));
    let r = rows(&a);
    assert_eq!(r[0][5..], ["mc_f", "mc_lo", "mc_hi", "mc_m_ind"]);
    // one hash at design load: half the bits are set
    let sbf = find(&r, |row| row[0] == "SBF" && row[2] == "1");
    assert_eq!(num(&sbf[4]), 0.5);
    assert!(num(&sbf[6]) < 0.5 && 0.5 < num(&sbf[7]), "{sbf:?}");
}

#[test]
fn case_three_anchors() {
    let r = rows(&run(&["--case", "III", "capacity", "--k-max", "1"]));
    let four = find(&r, |row| row[0] == "4IBF");
    assert!((num(&four[6]) / 4.7633e10 - 1.0).abs() < 1e-3);
    assert!((num(&four[7]) / 1.909e9 - 1.0).abs() < 1e-3);
    let bits = rows(&run(&["--case", "III", "naming-bits", "--k-max", "1"]));
    let four = find(&bits, |row| row[0] == "4IBF");
    assert_eq!((four[5].as_str(), four[8].as_str()), ("144", "true"));
}

#[test]
fn multi_fib_is_consistent_with_capacity() {
    let cap = rows(&run(&["capacity", "--k-max", "4"]));
    let multi = rows(&run(&["multi-fib"]));
    for (scheme, k) in [("SBF", "4"), ("2IBF", "2"), ("4IBF", "1")] {
        let c = find(&cap, |row| row[0] == scheme && row[2] == k);
        let one = find(&multi, |row| row[0] == "1" && row[1] == scheme);
        let two = find(&multi, |row| row[0] == "2" && row[1] == scheme);
        assert_eq!(one[5], c[6]);
        assert_eq!(one[6], c[5]);
        assert_eq!(num(&two[5]) * 2.0, num(&one[5]));
    }
    assert!(multi[1..].iter().all(|row| row[8] == "true"));
    let ten_sbf = find(&multi, |row| row[0] == "10" && row[1] == "SBF");
    assert!(num(&ten_sbf[5]) > 131072.0 / 144.0);
}

#[test]
fn fpr_series() {
    let r = rows(&run(&["multi-fib", "--fpr-series"]));
    assert_eq!(r.len(), 4);
    assert_eq!(r[1][..3], ["0.0625", "bounded", "4"]);
}

#[test]
fn design_without_repetition_keeps_the_rate() {
    let r = rows(&run(&["design", "--levels", "2", "--k", "4"]));
    assert_eq!(r.last().unwrap()[8], "0.0625");
    let r = rows(&run(&["design", "--levels", "4", "--repetition", "0.5", "--strategy", "rehash"]));
    assert_eq!(r.last().unwrap()[8], "0.00390625");
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t3.csv");
    assert!(run(&["table3", "--output", path.to_str().unwrap()]).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), run(&["table3"]));
}

#[test]
fn three_way_router_picks_the_longest_match() {
    let dir = tempfile::tempdir().unwrap();
    let per = dir.path().join("per.csv");
    let summary = run(&[
        "simulate",
        "--topology",
        data("three_way.topo").to_str().unwrap(),
        "--interests",
        data("three_way.interests").to_str().unwrap(),
        "--per-interest",
        per.to_str().unwrap(),
    ]);
    assert_eq!(rows(&summary)[1][..4], ["4", "3", "0", "1"]);
    let per = rows(&std::fs::read_to_string(per).unwrap());
    assert_eq!(per[1][3..], ["delivered", "2", "A>C>E"]);
    assert_eq!(per[2][5], "A>C>D");
    assert_eq!(per[3][3], "dropped");
}

#[test]
fn empty_interest_file_gives_a_zero_report() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("none.txt");
    std::fs::write(&empty, "# nothing\n").unwrap();
    let out = run(&[
        "simulate",
        "--topology",
        data("three_way.topo").to_str().unwrap(),
        "--interests",
        empty.to_str().unwrap(),
    ]);
    assert_eq!(out.lines().nth(1), Some("0,0,0,0,0,0,0,0"));
}

#[test]
fn oracle_mode_delivers_everything_registered() {
    let dir = tempfile::tempdir().unwrap();
    let links = dir.path().join("links.csv");
    let topo = data("three_way.topo");
    let args = [
        "simulate",
        "--topology",
        topo.to_str().unwrap(),
        "--random-interests",
        "200",
        "--seed",
        "9",
        "--oracle",
        "--links",
        links.to_str().unwrap(),
    ];
    let r = rows(&run(&args));
    assert_eq!(r[1][..2], ["200", "200"]);
    // Oracle runs still charge the file's 15-bit positions.
    let l = rows(&std::fs::read_to_string(&links).unwrap());
    assert_eq!(l[0], ["from", "to", "bits"]);
    assert!(l[1..].iter().all(|row| (num(&row[2]) as u64).is_multiple_of(15)));
    assert_eq!(run(&args), run(&args));
    let text = rows(&run(&[&args[..7], &["--hierarchical"]].concat()));
    assert!(num(&text[1][7]) > num(&r[1][7]));
}

#[test]
fn estimate_writes_both_methods() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("design.csv");
    let out = run(&[
        "estimate",
        "--stream",
        data("requests.stream").to_str().unwrap(),
        "--design",
        design.to_str().unwrap(),
        "--target-f",
        "0.1",
    ]);
    let r = rows(&out);
    assert_eq!(r[0], ["level", "method", "mu", "sigma2", "z", "n_expected"]);
    assert_eq!(r.len(), 7);
    let var = |level: &str, method: &str| num(&find(&r, |row| row[0] == level && row[1] == method)[3]);
    assert!(var("1", "II") < var("1", "I"));
    let d = rows(&std::fs::read_to_string(design).unwrap());
    // (1/2)^4 < 0.1 <= (1/2)^3
    assert!(d[1..].iter().all(|row| row[3] == "4"));
}

#[test]
fn bad_input_fails_with_a_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let topo = dir.path().join("bad.topo");
    std::fs::write(&topo, "[geometry]\nd = 2\nm_ind = 64\nk_i = 1\n[links]\nA B x\n").unwrap();
    let out = bin()
        .args(["simulate", "--topology", topo.to_str().unwrap(), "--random-interests", "1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 6"));
    let out = bin().args(["--case", "IV", "table3"]).output().unwrap();
    assert!(!out.status.success());
}
