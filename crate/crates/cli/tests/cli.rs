use serde_json::Value;
use std::process::{Command, Output};

fn redei(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_redei")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn symbol_values_and_exit_codes() {
    let o = redei(&["symbol", "2", "2", "313"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-1");

    let o = redei(&["symbol", "5", "13", "17"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("inadmissible"));
}

#[test]
fn symbol_cross_check_json() {
    let o = redei(&["symbol", "313", "457", "521", "--cross-check", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], -1);
    assert_eq!(v["permutations_agreeing"], 6);
    assert_eq!(v["agree"], true);
}

#[test]
fn certify_trivial_linking_set() {
    let o = redei(&["certify", "2,313,457,521", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["admissible"], true);
    assert_eq!(r["mild"], true);
    assert!(r["witness"]["U"].is_array());
    let entries = r["tensor"].as_array().unwrap();
    for m in 1..=3u64 {
        for k in 1..=3u64 {
            let present = entries.iter().any(|e| e["m"] == m && e["i"] == 0 && e["j"] == 0 && e["k"] == k);
            assert_eq!(present, m == k);
        }
    }
}

#[test]
fn certify_decomposed_example() {
    let o = redei(&["certify", "2,17,7489,15809", "--decomposed", "5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["ordering"], serde_json::json!([2, 7489, 15809, 17]));
    assert_eq!(r["mild"], true);
    assert_eq!(r["uncertified_pairs"][0]["pair"], serde_json::json!([2, 17]));

    let o = redei(&["certify", "2,17,7489,15809", "--decomposed", "5", "--strict"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn certify_rejects_inadmissible_sets() {
    assert_eq!(redei(&["certify", "2,5,13"]).status.code(), Some(2));
    assert_eq!(redei(&["certify", "2,x"]).status.code(), Some(2));
    assert_eq!(redei(&["certify", "2,313,457,521", "--decomposed", "17"]).status.code(), Some(2));
}

#[test]
fn search_streams_json_lines() {
    let o = redei(&["search", "--count", "3", "--mod16", "9", "--max", "600"]);
    assert_eq!(o.status.code(), Some(0));
    let sets: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str::<Value>(l).unwrap()["primes"].clone()).collect();
    assert!(sets.contains(&serde_json::json!([313, 457, 521])));

    let o = redei(&["search", "--count", "2", "--mod16", "1", "--max", "600"]);
    assert!(stdout(&o).lines().any(|l| l == r#"{"primes":[113,593]}"#));

    let o = redei(&["search", "--count", "2", "--mod16", "3", "--max", "600"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_examples_subset() {
    let o = redei(&["verify-examples", "--only", "gst-traces"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS gst-traces"));

    let o = redei(&["verify-examples", "--only", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_examples_full_run_reports_each_check() {
    let o = redei(&["verify-examples", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let outcomes = v.as_array().unwrap();
    assert_eq!(outcomes.len(), 6);
    let all_pass = outcomes.iter().all(|c| c["passed"] == true);
    assert_eq!(o.status.code(), Some(if all_pass { 0 } else { 1 }));
}

#[test]
fn cache_is_written_and_reused() {
    let dir = std::env::temp_dir().join(format!("redei-cli-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("symbols.jsonl");
    std::fs::write(&path, "junk\n").unwrap();
    let p = path.to_str().unwrap();
    let o = redei(&["--cache", p, "symbol", "2", "2", "313"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("skipped"));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "{\"triple\":[2,2,313],\"value\":-1}\n");

    let o = redei(&["--cache", p, "certify", "2,313,457,521"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&path).unwrap().lines().count() > 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_alias_is_accepted() {
    let o = redei(&["verify-paper", "--only", "gst-mild"]);
    assert_eq!(o.status.code(), Some(0));
}
