use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.model"))
        .display()
        .to_string()
}

fn scratch_file(name: &str) -> PathBuf {
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let n = NEXT.fetch_add(1, Ordering::Relaxed);
    let dir = std::env::temp_dir().join(format!("layernet-cli-{}-{n}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_layernet"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn validate_exit_codes() {
    assert_eq!(
        run(&["validate", &fixture("demo"), "--strict"])
            .status
            .code(),
        Some(0)
    );
    let chain = run(&["validate", &fixture("chain"), "--strict"]);
    assert_eq!(chain.status.code(), Some(1));
    assert!(stdout(&chain).contains("EmptyLinkSet"));
    assert_eq!(run(&["validate", &fixture("chain")]).status.code(), Some(0));
}

#[test]
fn check_reports_spofs() {
    let demo = run(&["check", &fixture("demo")]);
    assert_eq!(demo.status.code(), Some(1));
    let text = stdout(&demo);
    assert!(text.contains("verdict: inconsistent\n"));
    assert!(text.contains("requirement.r1.spofs: 13\n"));
    assert!(text.contains("requirement.r1.spof: link:3:cli-srv\n"));

    let redundant = run(&["check", &fixture("redundant")]);
    assert_eq!(redundant.status.code(), Some(0));
    assert!(stdout(&redundant).contains("verdict: consistent-with-warnings\n"));
}

#[test]
fn stats_prints_cardinalities() {
    let out = run(&["stats", &fixture("cpwe")]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<Vec<String>> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().map(str::to_string).collect())
        .collect();
    assert_eq!(rows[0], ["Functional", "4", "4", "2", "16", "45"]);
    assert_eq!(rows[3], ["Physical", "1", "11", "24", "-", "-"]);
}

#[test]
fn output_file_matches_stdout() {
    let path = scratch_file("checklist.txt");
    let to_file = run(&[
        "checklist",
        &fixture("demo"),
        "-o",
        path.to_str().unwrap(),
        "--format",
        "lines",
    ]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let direct = run(&["checklist", &fixture("demo"), "--format", "lines"]);
    assert_eq!(fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn unsatisfiable_checklist_exits_one() {
    let path = scratch_file("broken.model");
    let text = fs::read_to_string(fixture("demo"))
        .unwrap()
        .replace("link logical vm1 net1\n", "");
    fs::write(&path, text).unwrap();
    let out = run(&["checklist", path.to_str().unwrap(), "--format", "lines"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("INT-r1-L2\tinteraction\t2\tr1\tunsatisfiable\t-\n"));
}

#[test]
fn inject_reports_and_rejects() {
    let h1 = run(&["inject", &fixture("demo"), "--remove", "comp:h1"]);
    assert_eq!(h1.status.code(), Some(1));
    assert!(stdout(&h1).contains("broken requirements: r1\n"));

    let redundant = run(&[
        "inject",
        &fixture("redundant"),
        "--remove",
        "link:1:h1a-swa",
    ]);
    assert_eq!(redundant.status.code(), Some(0), "{}", stderr(&redundant));

    let unknown = run(&["inject", &fixture("demo"), "--remove", "zz"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(stderr(&unknown).contains("unknown element \"zz\""));
}

#[test]
fn spof_exit_codes() {
    let demo = run(&["spof", &fixture("demo"), "--requirement", "r1"]);
    assert_eq!(demo.status.code(), Some(1));
    assert_eq!(stdout(&demo).lines().count(), 13);

    let redundant = run(&["spof", &fixture("redundant"), "--requirement", "r1"]);
    assert_eq!(redundant.status.code(), Some(0));
    assert!(redundant.stdout.is_empty());

    let missing = run(&["spof", &fixture("demo"), "--requirement", "nope"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn fmea_needs_requirements() {
    assert_eq!(run(&["fmea", &fixture("demo")]).status.code(), Some(0));
    let chain = run(&["fmea", &fixture("chain")]);
    assert_eq!(chain.status.code(), Some(2));
    assert!(stderr(&chain).contains("no requirements"));
}

#[test]
fn parse_errors_carry_location() {
    let path = scratch_file("bad.model");
    fs::write(
        &path,
        "model bad\ncomponent physical h1\nlink physical h1 ghost\n",
    )
    .unwrap();
    let out = run(&["stats", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.starts_with(&format!("{}:3", path.display())), "{err}");
    assert!(err.contains("ghost"), "{err}");
}

#[test]
fn unreadable_file_and_unknown_command() {
    assert_eq!(
        run(&["stats", "/nonexistent/x.model"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn canonical_export_is_equivalent() {
    let exported = run(&["export", &fixture("two_chains"), "--format", "canonical"]);
    assert_eq!(exported.status.code(), Some(0));
    let path = scratch_file("two_chains.model");
    fs::write(&path, &exported.stdout).unwrap();
    let copy = path.to_str().unwrap();
    for cmd in ["check", "fmea", "checklist", "stats"] {
        let a = run(&[cmd, &fixture("two_chains")]);
        let b = run(&[cmd, copy]);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        assert_eq!(a.status.code(), b.status.code(), "{cmd}");
    }
}

#[test]
fn realize_prints_tree() {
    let out = run(&["realize", &fixture("demo"), "service", "cli", "srv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "L3 [cli, srv]\n  L2 [vm1, net1, vm2]\n    L1 [h1, sw1]\n    L1 [sw1, h2]\n"
    );
    assert_eq!(
        run(&["realize", &fixture("demo"), "3", "cli", "vm1"])
            .status
            .code(),
        Some(2)
    );
}
