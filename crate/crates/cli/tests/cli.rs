use std::process::{Command, Output};

fn markoff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_markoff"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV run, skipping the metadata comment and header.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn check_writes_meta_header_and_row() {
    let out = markoff(&["check", "825287", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    let meta = lines.next().unwrap();
    assert!(meta.starts_with("# {"), "{meta}");
    assert!(meta.contains("\"cap\":60"));
    let header = lines.next().unwrap();
    assert!(header.starts_with("p,fact_p_minus_1,fact_p_plus_1,B_minus,B_plus,L_p,S_hyp"));
    let row = &csv_rows(&text)[0];
    assert_eq!(row[0], "825287");
    assert!(row.contains(&"connected".to_string()));
}

#[test]
fn tiny_prime_is_inconclusive() {
    assert_eq!(markoff(&["check", "11"]).status.code(), Some(2));
}

#[test]
fn rejects_composites_and_bad_flags() {
    assert_eq!(markoff(&["check", "91"]).status.code(), Some(1));
    assert_eq!(markoff(&["check", "3"]).status.code(), Some(1));
    assert_eq!(markoff(&["range", "100", "50"]).status.code(), Some(1));
    assert_ne!(markoff(&["check", "101", "--cap", "0"]).status.code(), Some(0));
    assert_ne!(markoff(&["check", "101", "--cap", "5", "--no-cap"]).status.code(), Some(0));
}

#[test]
fn oracle_flag_rescues_small_primes() {
    let out = markoff(&["range", "5", "60", "--oracle", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows = csv_rows(&text);
    let primes: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(primes.first(), Some(&"5"));
    assert_eq!(primes.last(), Some(&"59"));
    assert!(rows.iter().all(|r| r.last().unwrap() == "connected"));
}

#[test]
fn range_output_is_ordered_and_reproducible() {
    let args = ["range", "20000", "20400", "--no-timing", "--jobs", "2"];
    let a = stdout(&markoff(&args));
    let b = stdout(&markoff(&args));
    assert_eq!(a, b);
    let ps: Vec<u64> = csv_rows(&a).iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(ps.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(ps.len(), 43);
}

#[test]
fn sample_is_seeded() {
    let run = |seed: &str| stdout(&markoff(&["sample", "5", "100000", "200000", "--seed", seed, "--no-timing"]));
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
    assert!(run("7").lines().next().unwrap().contains("\"seed\":7"));
    assert_eq!(markoff(&["sample", "10", "5", "20"]).status.code(), Some(1));
}

#[test]
fn jsonl_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.jsonl");
    let out = markoff(&["check", "916879", "--format", "jsonl", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["meta"]["variant"], "maximal");
    assert_eq!(lines[1]["p"], 916879);
    assert_eq!(lines[1]["verdict"], "connected");
    assert_eq!(lines[1]["bad_hyp"], 370627);
    assert_eq!(lines[1]["four_p"], 4 * 916879);
}

#[test]
fn oracle_subcommand() {
    let out = markoff(&["oracle", "199"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("components = 1"));
    assert!(text.contains("result = pass"));
    assert_eq!(markoff(&["oracle", "10007"]).status.code(), Some(1));
}
