use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn multisec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multisec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn dumped() -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let cards = dir.path().join("cards");
    let out = multisec(&["cards", "dump", cards.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    (dir, cards)
}

fn card(dir: &Path, key: &str) -> String {
    dir.join(format!("{key}.json"))
        .to_str()
        .unwrap()
        .to_string()
}

fn edit_card(dir: &Path, key: &str, f: impl FnOnce(&mut serde_json::Value)) -> String {
    let mut v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(card(dir, key)).unwrap()).unwrap();
    f(&mut v);
    let path = dir.join(format!("{key}-edited.json"));
    fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn cards_dump_writes_every_builtin() {
    let (_tmp, cards) = dumped();
    for key in ["veronese", "fano-product", "blowup"] {
        let text = fs::read_to_string(card(&cards, key)).unwrap();
        assert!(text.ends_with('\n') && !text.contains('\r'));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["name"], key);
    }
}

#[test]
fn analyze_builtins_exit_zero_and_are_deterministic() {
    let (_tmp, cards) = dumped();
    for key in ["veronese", "fano-product", "blowup"] {
        let a = multisec(&["analyze", &card(&cards, key)]);
        let b = multisec(&["analyze", &card(&cards, key)]);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout);
        let a = multisec(&["analyze", &card(&cards, key), "--json"]);
        let b = multisec(&["analyze", &card(&cards, key), "--json"]);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn analyze_json_round_trips() {
    let (_tmp, cards) = dumped();
    let out = multisec(&["analyze", &card(&cards, "blowup"), "--json"]);
    let text = stdout(&out);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let again: serde_json::Value =
        serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
    assert_eq!(v["u"], serde_json::json!([1]));
    assert_eq!(v["class_group_t"]["structure"], "Z");
    assert_eq!(v["canonical_t"]["shift"], serde_json::json!([-1, -3]));
    assert_eq!(v["hilbert_verification"]["status"], "Hilbert-verified");
}

#[test]
fn analyze_exit_codes() {
    let (_tmp, cards) = dumped();
    let zero_dim = edit_card(&cards, "veronese", |v| v["dim"] = 0.into());
    let out = multisec(&["analyze", &zero_dim]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dim"));

    let fractional = edit_card(&cards, "veronese", |v| {
        v["divisors"] = serde_json::json!([[1.5]])
    });
    assert_eq!(code(&multisec(&["analyze", &fractional])), 2);

    // P1 x P2 with divisors that are not big together: T fails, R holds.
    let weak = edit_card(&cards, "fano-product", |v| {
        v["name"] = "weak".into();
        v["divisors"] = serde_json::json!([[-1, 0], [0, 1]]);
    });
    let out = multisec(&["analyze", &weak, "--json"]);
    assert_eq!(code(&out), 3);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["hypothesis_t"], false);
    assert_eq!(v["noetherian_assumed"], true);

    assert_eq!(code(&multisec(&["analyze", "/nonexistent/card.json"])), 1);
}

#[test]
fn hilbert_csv_rows() {
    let (_tmp, cards) = dumped();
    let out = multisec(&[
        "hilbert",
        &card(&cards, "blowup"),
        "--ring",
        "T",
        "--box",
        "0:2,0:2",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n_1,n_2,dim");
    assert_eq!(lines.len(), 10);
    assert!(lines.contains(&"1,1,2"));
    assert!(lines.contains(&"0,2,6"));
    let mut rows: Vec<Vec<i64>> = lines[1..]
        .iter()
        .map(|l| l.split(',').take(2).map(|x| x.parse().unwrap()).collect())
        .collect();
    let before = rows.clone();
    rows.sort();
    assert_eq!(rows, before);

    let again = multisec(&[
        "hilbert",
        &card(&cards, "blowup"),
        "--ring",
        "T",
        "--box",
        "0:2,0:2",
    ]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn hilbert_edge_cases() {
    let (_tmp, cards) = dumped();
    let blowup = card(&cards, "blowup");
    let empty = multisec(&["hilbert", &blowup, "--ring", "R", "--box", "3:1,0:2"]);
    assert_eq!(code(&empty), 0);
    assert_eq!(stdout(&empty), "n_1,n_2,dim\n");

    assert_eq!(
        code(&multisec(&[
            "hilbert", &blowup, "--ring", "T", "--box", "0:2"
        ])),
        2
    );
    assert_eq!(
        code(&multisec(&[
            "hilbert", &blowup, "--ring", "T", "--box", "0-2,0:1"
        ])),
        2
    );
    assert_eq!(code(&multisec(&["hilbert", &blowup, "--ring", "Q"])), 2);

    let no_oracle = edit_card(&cards, "blowup", |v| {
        v.as_object_mut().unwrap().remove("oracle");
    });
    assert_eq!(
        code(&multisec(&[
            "hilbert", &no_oracle, "--ring", "T", "--box", "0:1,0:1"
        ])),
        4
    );
    assert_eq!(code(&multisec(&["analyze", &no_oracle])), 0);

    // K + 2nH = (2n - 3)H on P2
    let veronese = multisec(&[
        "hilbert",
        &card(&cards, "veronese"),
        "--ring",
        "omegaR",
        "--box=-2:2",
    ]);
    assert_eq!(stdout(&veronese), "n_1,dim\n-2,0\n-1,0\n0,0\n1,0\n2,3\n");
}

#[test]
fn verify_suites() {
    for name in ["veronese", "fano-product", "blowup"] {
        let out = multisec(&["verify", name]);
        assert_eq!(code(&out), 0, "{}", stdout(&out));
        assert!(stdout(&out).lines().all(|l| !l.starts_with("FAIL")));
    }
    assert_eq!(code(&multisec(&["verify", "unknown"])), 2);
}
