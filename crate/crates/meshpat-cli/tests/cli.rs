//! End-to-end checks of the command-line surface, driving the compiled
//! binary the way a user would.

use std::path::PathBuf;
use std::process::{Command, Output};

fn meshpat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meshpat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("meshpat-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn classify_size_one_writes_artifacts() {
    let dir = temp_dir("classify1");
    let out = meshpat(&[
        "classify",
        "--underlying",
        "1",
        "--maxn",
        "3",
        "--depths",
        "1",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("experimental\t1\t7"), "{text}");
    assert!(text.contains("sl\t0\t8"), "{text}");
    assert!(text.contains("classes\t8"), "{text}");
    assert!(text.contains("all_resolved\ttrue"), "{text}");

    let classes = std::fs::read_to_string(dir.join("classes.txt")).unwrap();
    assert_eq!(classes.lines().count(), 8);
    let total: usize = classes.lines().map(|l| l.split_whitespace().count()).sum();
    assert_eq!(total, 16);
    let witnesses = std::fs::read_to_string(dir.join("witnesses.tsv")).unwrap();
    assert_eq!(witnesses.lines().count(), 1 + 8 * 7 / 2, "header plus all pairs");
    assert!(dir.join("report.tsv").exists());
    assert!(dir.join("histogram.tsv").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn classify_is_deterministic_across_worker_counts() {
    let dir1 = temp_dir("det1");
    let dir2 = temp_dir("det2");
    let mut args1 = vec![
        "classify", "--underlying", "1", "--maxn", "3", "--depths", "1", "--jobs", "1", "--out",
    ];
    let d1 = dir1.to_str().unwrap().to_owned();
    args1.push(&d1);
    assert!(meshpat(&args1).status.success());
    let mut args2 = vec![
        "classify", "--underlying", "1", "--maxn", "3", "--depths", "1", "--jobs", "2", "--out",
    ];
    let d2 = dir2.to_str().unwrap().to_owned();
    args2.push(&d2);
    assert!(meshpat(&args2).status.success());
    for file in ["classes.txt", "report.tsv", "histogram.tsv", "witnesses.tsv"] {
        let a = std::fs::read(dir1.join(file)).unwrap();
        let b = std::fs::read(dir2.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between worker counts");
    }
    std::fs::remove_dir_all(&dir1).ok();
    std::fs::remove_dir_all(&dir2).ok();
}

#[test]
fn classify_size_two_reproduces_the_known_counts() {
    let dir = temp_dir("classify12");
    let out = meshpat(&[
        "classify",
        "--underlying",
        "12",
        "--maxn",
        "5",
        "--depths",
        "1,2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    for line in [
        "experimental\t59\t161",
        "sl\t2\t218",
        "ssl\t1\t219",
        "sa-depth-2\t0\t220",
        "classes\t220",
        "all_resolved\ttrue",
    ] {
        assert!(text.contains(line), "{text}");
    }
    let classes = std::fs::read_to_string(dir.join("classes.txt")).unwrap();
    assert_eq!(classes.lines().count(), 220);
    let total: usize = classes.lines().map(|l| l.split_whitespace().count()).sum();
    assert_eq!(total, 512);
    let witnesses = std::fs::read_to_string(dir.join("witnesses.tsv")).unwrap();
    assert_eq!(witnesses.lines().count(), 1 + 220 * 219 / 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn prove_writes_a_replayable_trace() {
    let dir = temp_dir("prove");
    let trace = dir.join("trace.txt");
    let out = meshpat(&[
        "prove",
        "--p",
        "132:200",
        "--q",
        "132:600",
        "--force",
        "1:R",
        "--depth",
        "2",
        "--out",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("verdict success"));

    let replay = meshpat(&["prove", "--replay", trace.to_str().unwrap()]);
    assert!(replay.status.success());
    assert!(stdout(&replay).contains("verdict success"));

    // a tampered trace must be rejected
    let forged = std::fs::read_to_string(&trace)
        .unwrap()
        .replace("occ 2,3,4 stronger", "occ 1,3,4 stronger");
    std::fs::write(&trace, forged).unwrap();
    let replay = meshpat(&["prove", "--replay", trace.to_str().unwrap()]);
    assert!(!replay.status.success());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn prove_methods_match_expected_verdicts() {
    let sl = meshpat(&["prove", "--p", "123:66", "--q", "123:67", "--method", "sl"]);
    assert!(stdout(&sl).starts_with("verdict failure"));
    let tsa1 = meshpat(&["prove", "--p", "123:66", "--q", "123:67", "--method", "tsa1"]);
    assert!(stdout(&tsa1).starts_with("verdict success"));
    let ssl = meshpat(&["prove", "--p", "12:0", "--q", "12:393", "--method", "ssl"]);
    assert!(stdout(&ssl).starts_with("verdict success"));
    let tsa2 = meshpat(&[
        "prove", "--p", "123:1198", "--q", "123:1199", "--method", "tsa2", "--force", "1:D",
    ]);
    assert!(stdout(&tsa2).starts_with("verdict success"));
}

#[test]
fn count_av_prints_catalan_numbers() {
    let out = meshpat(&["count-av", "--basis", "123", "--maxn", "6"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for line in ["0\t1", "3\t5", "5\t42", "6\t132"] {
        assert!(text.contains(line), "{text}");
    }
}

#[test]
fn count_av_six_pattern_basis_prefix() {
    let out = meshpat(&[
        "count-av",
        "--basis",
        "1324,1342,1423,2143,2413,3142",
        "--maxn",
        "6",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    for line in ["4\t18", "5\t54", "6\t167"] {
        assert!(text.contains(line), "{text}");
    }
}

#[test]
fn predicate_commands() {
    let binary = meshpat(&["binary", "--pattern", "1:3"]);
    assert!(stdout(&binary).contains("binary\ttrue"));
    let not_binary = meshpat(&["binary", "--pattern", "21"]);
    assert!(stdout(&not_binary).contains("binary\tfalse\twitness"));
    let forced = meshpat(&["binary", "--pattern", "132", "--force", "2:U,1:D,3:D"]);
    assert!(stdout(&forced).contains("binary\ttrue"));

    let anchored = meshpat(&["anchored", "--pattern", "1:3"]);
    assert!(stdout(&anchored).contains("anchored\ttrue"));

    let force = meshpat(&["find-force", "--pattern", "12"]);
    assert!(stdout(&force).starts_with("force\t"));

    let occ = meshpat(&["occ", "--host", "42135", "--pattern", "213:3136"]);
    let text = stdout(&occ);
    assert!(text.contains("(1,3,5)\t4,1,5"));
    assert!(!text.contains("(2,3,5)"));
}

#[test]
fn bad_inputs_fail_with_diagnostics() {
    let out = meshpat(&["occ", "--host", "42135", "--pattern", "1:16"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let out = meshpat(&["occ", "--host", "411", "--pattern", "1"]);
    assert!(!out.status.success());

    let out = meshpat(&["classify", "--underlying", ""]);
    assert!(!out.status.success());
}
