//! End-to-end runs of the `otlab` binary: golden reports, exit codes and
//! equality with direct library calls.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use otlab::admissible::greedy_admissible_submatrix;
use otlab::exact::Rational;
use otlab::fourier::{lemma41_monte_carlo, lemma41_probability, prop43_check};
use otlab::numtheory::bound_table;
use otlab::oddtown::{certify, support_reduce, verify_family, SetFamily};
use otlab_cli::{json, read_family, read_matrix, FourierReport};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn otlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otlab"))
        .args(args)
        .env_remove("OTLAB_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Compares against `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "report differs from {}", path.display());
}

fn strip(report: &str, keys: &[&str]) -> String {
    let mut value: serde_json::Value = serde_json::from_str(report).unwrap();
    for key in keys {
        value.as_object_mut().unwrap().remove(*key);
    }
    serde_json::to_string_pretty(&value).unwrap() + "\n"
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_singletons() {
    let fam = data("singletons4.json");
    let out = otlab(&["verify", "--family", path_str(&fam), "--ell", "6"]);
    assert_eq!(out.status.code(), Some(0));
    golden("verify_singletons.json", &stdout(&out));
    let direct = verify_family(&read_family(&fam).unwrap(), 6).unwrap();
    assert_eq!(stdout(&out), json(&direct).unwrap());
}

#[test]
fn verify_invalid_family_exits_one() {
    let fam = data("not_oddtown6.json");
    let out = otlab(&["verify", "--family", path_str(&fam), "--ell", "6"]);
    assert_eq!(out.status.code(), Some(1));
    golden("verify_invalid.json", &stdout(&out));
}

#[test]
fn bounds_report() {
    let out = otlab(&["bounds", "--ell", "6", "--n", "1024"]);
    assert_eq!(out.status.code(), Some(0));
    golden("bounds_6_1024.json", &stdout(&out));
    assert_eq!(stdout(&out), json(&bound_table(6, 1024).unwrap()).unwrap());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["trivial"], 2048);
    assert_eq!(report["thm11"]["floor"], 2019);

    let out = otlab(&["bounds", "--ell", "15", "--n", "1048576", "--format", "csv"]);
    golden("bounds_15.csv", &stdout(&out));
}

#[test]
fn solve_report() {
    let out = otlab(&["solve", "--n", "3", "--ell", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let report = strip(&stdout(&out), &["wall_time"]);
    golden("solve_3_2.json", &report);
    let value: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(value["max_size"], 3);
    assert_eq!(value["optimal"], true);
}

#[test]
fn solve_is_thread_independent() {
    let one = otlab(&["solve", "--n", "7", "--ell", "6", "--threads", "1"]);
    let many = otlab(&["solve", "--n", "7", "--ell", "6", "--threads", "4"]);
    let keys = ["wall_time", "nodes_explored"];
    assert_eq!(strip(&stdout(&one), &keys), strip(&stdout(&many), &keys));
}

#[test]
fn solve_out_of_nodes_exits_two() {
    let out = otlab(&["solve", "--n", "8", "--ell", "6", "--budget", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["optimal"], false);
}

#[test]
fn certify_and_split() {
    let fam = data("mixed6.json");
    let out = otlab(&["certify", "--family", path_str(&fam), "--ell", "6"]);
    assert_eq!(out.status.code(), Some(0));
    golden("certify_mixed6.json", &stdout(&out));
    assert_eq!(stdout(&out), json(&certify(&read_family(&fam).unwrap(), 6).unwrap()).unwrap());

    let out = otlab(&["split", "--family", path_str(&fam), "--ell", "6", "--index", "0"]);
    golden("split_mixed6.json", &stdout(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["divisible"]["sets"], serde_json::json!([[3, 4, 5, 6]]));

    let out = otlab(&["split", "--family", path_str(&fam), "--ell", "6", "--index", "2"]);
    assert_eq!(out.status.code(), Some(1));

    let bad = data("not_oddtown6.json");
    let out = otlab(&["certify", "--family", path_str(&bad), "--ell", "6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not an oddtown"));
}

#[test]
fn reduce_report() {
    let fam = data("redundant9.json");
    let out = otlab(&["reduce", "--family", path_str(&fam), "--ell", "3"]);
    assert_eq!(out.status.code(), Some(0));
    golden("reduce_redundant9.json", &stdout(&out));
    let direct = support_reduce(&read_family(&fam).unwrap(), 3).unwrap();
    assert_eq!(direct.deleted, vec![7, 8, 9]);
    assert_eq!(stdout(&out), json(&direct).unwrap());
}

#[test]
fn fourier_check_report() {
    let m = data("identity_f3.csv");
    let out = otlab(&["fourier-check", "--matrix", path_str(&m), "--samples", "2000", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    golden("fourier_identity_f3.json", &stdout(&out));
    let l = read_matrix(&m, None).unwrap();
    let direct = FourierReport {
        prop43: prop43_check(&l).unwrap(),
        lemma41: lemma41_probability(&l).unwrap(),
        monte_carlo: Some(lemma41_monte_carlo(&l, 2000, 5).unwrap()),
    };
    assert_eq!(stdout(&out), json(&direct).unwrap());
}

#[test]
fn admissible_report() {
    let m = data("all_f3_squared.csv");
    let out = otlab(&["admissible", "--matrix", path_str(&m), "--sigma", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    golden("admissible_all_f3.json", &stdout(&out));
    let direct = greedy_admissible_submatrix(&read_matrix(&m, None).unwrap(), &Rational::new(1, 2)).unwrap();
    assert_eq!(direct.c_prime, 2);
    assert_eq!(stdout(&out), json(&direct).unwrap());

    let out = otlab(&["admissible", "--matrix", path_str(&m), "--sigma", "one half"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn constructions() {
    let out = otlab(&["construct", "singletons", "--n", "3"]);
    golden("construct_singletons3.json", &stdout(&out));
    assert_eq!(SetFamily::parse_json(&stdout(&out)).unwrap().len(), 3);
    let out = otlab(&["construct", "block", "--a", "2", "--b", "1", "--format", "csv"]);
    golden("construct_block_2_1.csv", &stdout(&out));
    let out = otlab(&["construct", "all-columns", "--n", "2", "--format", "csv"]);
    assert_eq!(stdout(&out), "# mod 2 rows 2 cols 4\n0,0,1,1\n0,1,0,1\n");
    let out = otlab(&["construct", "block", "--a", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn figure_data() {
    let out = otlab(&["figure-data", "--max-r", "2", "--max-c", "2", "--p", "3", "--max-block", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    golden("figure_2_2_p3.csv", &stdout(&out));
    for line in stdout(&out).lines().skip(1).filter(|l| l.ends_with("scan")) {
        let x: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert!(x <= 1.0);
    }
}

#[test]
fn budget_errors_exit_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_otlab"))
        .args(["figure-data", "--max-r", "3", "--max-c", "3"])
        .env("OTLAB_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget exceeded"));
    let out = otlab(&["solve", "--n", "30", "--ell", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(otlab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(otlab(&["bounds", "--ell", "6"]).status.code(), Some(1));
    assert_eq!(otlab(&["bounds", "--ell", "6", "--n", "8", "--budget", "0"]).status.code(), Some(1));
    assert_eq!(otlab(&["verify", "--family", "/nonexistent.json", "--ell", "6"]).status.code(), Some(1));
    assert_eq!(otlab(&["bounds", "--ell", "1", "--n", "8"]).status.code(), Some(1));
    assert_eq!(otlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("otlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let target = dir.join("bounds.json");
    let out = otlab(&["bounds", "--ell", "6", "--n", "1024", "--output", path_str(&target)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&target).unwrap(), json(&bound_table(6, 1024).unwrap()).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}
